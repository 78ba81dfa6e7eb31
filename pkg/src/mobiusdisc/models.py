"""Random matrix families: finite atom mixtures, Anderson chains, polymers.

A model is a probability distribution over SU_<=(1,1) matrices of the form

    T = R_eta * exp(eps * P(w) + eps^2 * P' + i * delta * d * Q),

where (eta, P, P', Q) are drawn from finitely many weighted atoms,
P(w) = P + w * Pw depends affinely on an optional uniform draw w, and d
is an optional uniform scale on Q.  `anderson_model` builds the family
obtained from the 1d discrete Schroedinger transfer matrices at energy
E + i*delta with coupling eps; polymer models realize exact products of
single-site transfer matrices conjugated into SU(1,1).

`constants` computes the drift/diffusion coefficients that govern the
small-(eps, delta) behaviour:

    C = E(d) * E(q3),   the radial drift per unit delta,
    D = E(|beta|^2)/2 + Re[ E(beta) E(e^{2i eta} conj(beta)) / (1 - E(e^{2i eta})) ],

with beta = p1 - i p2 and xi = q1 - i q2, and the scale ratio
lambda = 2 (C/D) (delta/eps^2) of the limiting radial law.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .su11 import (
    CAYLEY,
    coeffs_to_matrix,
    exp_su11,
    log_traceless,
    matrix_to_coeffs,
    phase_rotation,
)

__all__ = [
    "ModelError",
    "AnomalyError",
    "UniformSampler",
    "Atom",
    "ModelSpec",
    "DerivedConstants",
    "PolymerBlock",
    "PolymerSpec",
    "CriticalityReport",
    "realize",
    "constants",
    "xi_q3_bound",
    "anderson_model",
    "anderson_frame",
    "single_transfer",
    "polymer_transfer",
    "critical_energy_check",
    "model_from_polymer",
    "with_parameters",
    "load_model",
    "model_to_dict",
]

# E(e^{2 i eta}) this close to 1 makes the diffusion coefficient D singular.
PHASE_ANOMALY_TOL = 1e-12

# Residual threshold for classifying D = 0 models (degenerate cases).
D_ZERO_TOL = 1e-12


class ModelError(ValueError):
    """A model specification is invalid or outside the supported regime."""


class AnomalyError(ModelError):
    """A derived quantity is singular (e.g. E(e^{2i eta}) = 1)."""


@dataclass(frozen=True)
class UniformSampler:
    """Uniform law on [low, high]; quad_order fixes Gauss-Legendre accuracy
    when expectations over the draw are computed by quadrature."""

    low: float
    high: float
    quad_order: int = 16

    def __post_init__(self):
        if not (self.high >= self.low):
            raise ModelError(f"empty sampler interval [{self.low}, {self.high}]")
        if self.quad_order < 1:
            raise ModelError("quad_order must be >= 1")

    def mean(self) -> float:
        return 0.5 * (self.low + self.high)

    def mean_sq(self) -> float:
        lo, hi = self.low, self.high
        return (lo * lo + lo * hi + hi * hi) / 3.0

    def nodes_weights(self) -> tuple[np.ndarray, np.ndarray]:
        """Gauss-Legendre nodes on [low, high] with weights summing to 1."""
        if self.high == self.low:
            return np.array([self.low]), np.array([1.0])
        x, w = np.polynomial.legendre.leggauss(self.quad_order)
        nodes = 0.5 * (self.high - self.low) * x + 0.5 * (self.high + self.low)
        return nodes, w / w.sum()


_ZERO3 = (0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Atom:
    """One outcome of the matrix draw, with generator coefficients in the
    B1, B2, B3 basis.  The first-order generator is P + w*Pw for the
    model-level uniform draw w; d_factor is a fixed scale on Q, applied
    on top of the model-level random d draw if one is configured."""

    weight: float
    eta: float
    P: tuple[float, float, float] = _ZERO3
    Pprime: tuple[float, float, float] = _ZERO3
    Q: tuple[float, float, float] = _ZERO3
    Pw: tuple[float, float, float] = _ZERO3
    d_factor: float = 1.0

    def __post_init__(self):
        if not (self.weight > 0.0 and math.isfinite(self.weight)):
            raise ModelError(f"atom weight must be positive, got {self.weight}")
        for name in ("P", "Pprime", "Q", "Pw"):
            vals = tuple(float(v) for v in getattr(self, name))
            if len(vals) != 3:
                raise ModelError(f"{name} must have three coefficients")
            object.__setattr__(self, name, vals)

    def beta(self, w: float = 0.0) -> complex:
        p = self.P
        pw = self.Pw
        return complex(p[0] + w * pw[0], -(p[1] + w * pw[1]))

    def xi(self) -> complex:
        return complex(self.Q[0], -self.Q[1]) * self.d_factor

    def q3(self) -> float:
        return self.Q[2] * self.d_factor


@dataclass(frozen=True, eq=False)
class PolymerBlock:
    """A finite chain of single-site transfer matrices: hoppings t(k) > 0
    and potentials v(k), k = 1..K, applied in site order."""

    weight: float
    hoppings: tuple[float, ...]
    potentials: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "hoppings", tuple(float(t) for t in self.hoppings))
        object.__setattr__(self, "potentials", tuple(float(v) for v in self.potentials))
        if len(self.hoppings) != len(self.potentials) or not self.hoppings:
            raise ModelError("block needs matching, nonempty hopping/potential lists")
        if any(t <= 0 for t in self.hoppings):
            raise ModelError("hoppings must be positive")
        if not (self.weight > 0.0):
            raise ModelError("block weight must be positive")


@dataclass(frozen=True, eq=False)
class PolymerSpec:
    blocks: tuple[PolymerBlock, ...]
    critical_energy: float

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if not self.blocks:
            raise ModelError("polymer spec needs at least one block")


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """A two-parameter random family T^{eps,delta}; see the module docstring.

    When `polymer` is set, `realize` ignores the atom generators and returns
    the exact conjugated transfer-matrix product at energy
    critical_energy + eps - i*delta; the atom coefficients then hold the
    numerically extracted expansion data used for derived constants.
    """

    atoms: tuple[Atom, ...]
    epsilon: float
    delta: float
    w_sampler: UniformSampler | None = None
    d_sampler: UniformSampler | None = None
    label: str = "generic"
    polymer: PolymerSpec | None = None
    conjugator: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        if not self.atoms:
            raise ModelError("model needs at least one atom")
        total = sum(a.weight for a in self.atoms)
        if abs(total - 1.0) > 1e-9:
            raise ModelError(f"atom weights must sum to 1, got {total}")
        if not (math.isfinite(self.epsilon) and math.isfinite(self.delta)):
            raise ModelError("epsilon and delta must be finite")
        if self.polymer is not None and self.conjugator is None:
            raise ModelError("polymer models need their conjugator matrix")

    def weights(self) -> np.ndarray:
        return np.array([a.weight for a in self.atoms])

    def confined(self) -> bool:
        """True when the draw provably stays in SU_<=(1,1): delta >= 0 and
        each atom satisfies q3 >= |xi| after every admissible d scale."""
        if self.delta < 0:
            return False
        d_lo = self.d_sampler.low if self.d_sampler is not None else 1.0
        if d_lo < 0:
            return False
        for atom in self.atoms:
            if atom.d_factor * d_lo < 0:
                return False
            if atom.q3() < abs(atom.xi()) - 1e-12:
                return False
        return True


def with_parameters(
    spec: ModelSpec, epsilon: float | None = None, delta: float | None = None
) -> ModelSpec:
    """Copy of the model with new (epsilon, delta); realization follows."""
    kwargs = {}
    if epsilon is not None:
        kwargs["epsilon"] = float(epsilon)
    if delta is not None:
        kwargs["delta"] = float(delta)
    return replace(spec, **kwargs) if kwargs else spec


def realize(spec: ModelSpec, atom_index: int, w: float = 0.0, d: float = 1.0) -> np.ndarray:
    """The matrix drawn for atom `atom_index` and draws (w, d).

    Exponential families return R_eta * exp(eps*(P + w*Pw) + eps^2*P'
    + i*delta*d_factor*d*Q); polymer models return the exact conjugated
    transfer product at energy  critical_energy + eps - i*delta.
    """
    atom = spec.atoms[atom_index]
    if spec.polymer is not None:
        e_val = spec.polymer.critical_energy + spec.epsilon - 1j * spec.delta
        S = polymer_transfer(spec.polymer.blocks[atom_index], e_val)
        M = spec.conjugator
        return M @ S @ np.linalg.inv(M)
    return realize_atom(atom, spec.epsilon, spec.delta, w=w, d=d)


def realize_atom(
    atom: Atom, epsilon: float, delta: float, w: float = 0.0, d: float = 1.0
) -> np.ndarray:
    """R_eta exp(eps*(P + w*Pw) + eps^2*P' + i*delta*d_factor*d*Q) for one atom."""
    gen = epsilon * coeffs_to_matrix(
        tuple(p + w * pw for p, pw in zip(atom.P, atom.Pw))
    )
    gen += epsilon**2 * coeffs_to_matrix(atom.Pprime)
    gen += 1j * delta * atom.d_factor * d * coeffs_to_matrix(atom.Q)
    return phase_rotation(atom.eta) @ exp_su11(gen)


# ---------------------------------------------------------------------------
# Derived constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DerivedConstants:
    C: float
    D: float
    lam: float | None
    beta_mean: complex
    beta_abs2_mean: float
    phase2_mean: complex
    phase4_mean: complex
    d_classification: str

    def lambda_per_unit_ratio(self) -> float:
        """lambda divided by delta/eps^2, i.e. 2*C/D."""
        return 2.0 * self.C / self.D


def _atom_moments(spec: ModelSpec):
    """Weighted moments of (e^{2i eta}, beta, q3, xi) over atoms and w."""
    m1 = spec.w_sampler.mean() if spec.w_sampler is not None else 0.0
    m2 = spec.w_sampler.mean_sq() if spec.w_sampler is not None else 0.0
    e2 = 0.0 + 0.0j
    e4 = 0.0 + 0.0j
    beta_mean = 0.0 + 0.0j
    beta_abs2 = 0.0
    phase_beta_conj = 0.0 + 0.0j  # E(e^{2i eta} conj(beta))
    beta_phase_conj = 0.0 + 0.0j  # E(beta e^{-2i eta})
    q3_mean = 0.0
    for atom in spec.atoms:
        wgt = atom.weight
        ph2 = cmath.exp(2j * atom.eta)
        b0 = atom.beta(0.0)
        b1 = atom.beta(1.0) - b0  # coefficient of w
        bm = b0 + m1 * b1
        e2 += wgt * ph2
        e4 += wgt * ph2 * ph2
        beta_mean += wgt * bm
        beta_abs2 += wgt * (
            abs(b0) ** 2 + 2.0 * m1 * (b0 * b1.conjugate()).real + m2 * abs(b1) ** 2
        )
        phase_beta_conj += wgt * ph2 * bm.conjugate()
        beta_phase_conj += wgt * bm * ph2.conjugate()
        q3_mean += wgt * atom.q3()
    d_mean = spec.d_sampler.mean() if spec.d_sampler is not None else 1.0
    return {
        "e2": e2,
        "e4": e4,
        "beta_mean": beta_mean,
        "beta_abs2": beta_abs2,
        "phase_beta_conj": phase_beta_conj,
        "beta_phase_conj": beta_phase_conj,
        "C": d_mean * q3_mean,
    }


def _classify_d(spec: ModelSpec, mom: dict, D: float) -> str:
    if D > D_ZERO_TOL:
        return "positive"
    # Case (i): e^{2i eta} and beta both almost surely constant.
    var_phase = 1.0 - abs(mom["e2"]) ** 2
    var_beta = mom["beta_abs2"] - abs(mom["beta_mean"]) ** 2
    if var_phase <= D_ZERO_TOL and var_beta <= D_ZERO_TOL:
        return "zero_case_i"
    # Case (ii): E(e^{2i eta}) = 0 and beta = c (1 - e^{2i eta}) a.s.;
    # least-squares fit of c with the within-atom w variance included.
    if abs(mom["e2"]) <= 1e-9:
        cross = mom["beta_mean"] - mom["beta_phase_conj"]  # E[beta conj(1 - e^{2i eta})]
        denom = sum(
            a.weight * abs(1.0 - cmath.exp(2j * a.eta)) ** 2 for a in spec.atoms
        )
        if denom > 0:
            residual = mom["beta_abs2"] - abs(cross) ** 2 / denom
            if residual <= D_ZERO_TOL:
                return "zero_case_ii"
    return "zero_unclassified"


def constants(spec: ModelSpec) -> DerivedConstants:
    """Drift/diffusion constants C and D, the ratio lambda, and moments.

    Raises AnomalyError when E(e^{2i eta}) = 1 within tolerance, which
    makes the diffusion constant singular.
    """
    mom = _atom_moments(spec)
    e2 = mom["e2"]
    if abs(e2 - 1.0) <= PHASE_ANOMALY_TOL:
        raise AnomalyError(
            "E(e^{2i eta}) = 1 within tolerance; diffusion constant undefined"
        )
    D = 0.5 * mom["beta_abs2"] + (
        mom["beta_mean"] * mom["phase_beta_conj"] / (1.0 - e2)
    ).real
    C = mom["C"]
    classification = _classify_d(spec, mom, D)
    lam = None
    if spec.epsilon != 0.0 and classification == "positive":
        lam = 2.0 * (C / D) * spec.delta / spec.epsilon**2
    return DerivedConstants(
        C=C,
        D=D,
        lam=lam,
        beta_mean=mom["beta_mean"],
        beta_abs2_mean=mom["beta_abs2"],
        phase2_mean=e2,
        phase4_mean=mom["e4"],
        d_classification=classification,
    )


_XI_GRID = 101


def xi_q3_bound(spec: ModelSpec) -> float:
    """Essential supremum of |xi|/q3 over atoms (support radius bound).

    Requires q3 > 0 on every atom and, if a d range is configured, a
    strictly positive one (the ratio is d-invariant, but q3 > 0 is not).
    """
    if spec.d_sampler is not None and spec.d_sampler.low <= 0:
        raise ModelError("xi/q3 bound needs a positive d range")
    worst = 0.0
    for atom in spec.atoms:
        q3 = atom.q3()
        if q3 <= 0:
            raise ModelError(f"atom with q3 = {q3} <= 0; support bound undefined")
        worst = max(worst, abs(atom.xi()) / q3)
    return worst


# ---------------------------------------------------------------------------
# Anderson chain
# ---------------------------------------------------------------------------


def anderson_model(
    E: float,
    w_low: float = -1.0,
    w_high: float = 1.0,
    epsilon: float = 0.0,
    delta: float = 0.0,
    d_low: float | None = None,
    d_high: float | None = None,
    quad_order: int = 16,
) -> ModelSpec:
    """Transfer-matrix family of the 1d chain at energy E inside the band.

    T^{eps,delta} = M [[eps*w - E + i*delta, -1], [1, 0]] M^{-1}
                  = diag(e^{-ik}, e^{ik}) exp[(i*delta + eps*w)/(2 sin k) (B2+B3)]

    with k = arccos(-E/2) in (0, pi), w uniform on [w_low, w_high]; the
    optional (d_low, d_high) interval puts a random uniform scale on Q.
    """
    if not abs(E) < 2.0:
        raise ModelError(f"energy must lie inside the band (-2, 2), got {E}")
    k = math.acos(-E / 2.0)
    s = 1.0 / (2.0 * math.sin(k))
    atom = Atom(
        weight=1.0,
        eta=-k,
        P=_ZERO3,
        Pw=(0.0, s, s),
        Pprime=_ZERO3,
        Q=(0.0, s, s),
    )
    d_sampler = None
    if d_low is not None or d_high is not None:
        if d_low is None or d_high is None:
            raise ModelError("d range needs both endpoints")
        d_sampler = UniformSampler(d_low, d_high, quad_order)
    return ModelSpec(
        atoms=(atom,),
        epsilon=float(epsilon),
        delta=float(delta),
        w_sampler=UniformSampler(float(w_low), float(w_high), quad_order),
        d_sampler=d_sampler,
        label="anderson",
    )


def anderson_frame(E: float) -> np.ndarray:
    """Disc-picture conjugator M for the chain at energy E: the raw
    transfer matrix satisfies  M [[eps*w-E+i*delta, -1],[1, 0]] M^{-1}
    = realize(anderson_model(E, ...), 0, w, d)  exactly."""
    if not abs(E) < 2.0:
        raise ModelError(f"energy must lie inside the band (-2, 2), got {E}")
    k = math.acos(-E / 2.0)
    frame = (1.0 / math.sqrt(math.sin(k))) * np.array(
        [[math.sin(k), 0.0], [-math.cos(k), 1.0]], dtype=complex
    )
    return CAYLEY @ frame


# ---------------------------------------------------------------------------
# Polymer chains
# ---------------------------------------------------------------------------


def single_transfer(v_minus_e: complex, t: float) -> np.ndarray:
    """One site of the chain: (1/t) [[v - E, -t^2], [1, 0]]."""
    if t <= 0:
        raise ModelError("hopping must be positive")
    return np.array([[(v_minus_e) / t, -t], [1.0 / t, 0.0]], dtype=complex)


def polymer_transfer(block: PolymerBlock, energy: complex) -> np.ndarray:
    """Transfer matrix across one block: S_K ... S_2 S_1 (site 1 first)."""
    out = np.eye(2, dtype=complex)
    for t, v in zip(block.hoppings, block.potentials):
        out = single_transfer(v - energy, t) @ out
    return out


@dataclass(frozen=True)
class CriticalityReport:
    commutator_max: float
    elliptic: tuple[bool, ...]
    traces: tuple[float, ...]
    critical: bool

    def ok(self) -> bool:
        return self.critical and all(self.elliptic)


_COMMUTATOR_TOL = 1e-10


def critical_energy_check(spec: PolymerSpec) -> CriticalityReport:
    """Commutation and ellipticity of all blocks at the critical energy."""
    mats = [polymer_transfer(b, spec.critical_energy) for b in spec.blocks]
    worst = 0.0
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            comm = mats[i] @ mats[j] - mats[j] @ mats[i]
            worst = max(worst, float(np.linalg.norm(comm, 2)))
    elliptic = []
    traces = []
    for S in mats:
        tr = (S[0, 0] + S[1, 1]).real
        traces.append(tr)
        is_pm_id = (
            np.max(np.abs(S - np.eye(2))) < 1e-12 or np.max(np.abs(S + np.eye(2))) < 1e-12
        )
        elliptic.append(abs(tr) < 2.0 - 1e-12 or is_pm_id)
    return CriticalityReport(
        commutator_max=worst,
        elliptic=tuple(elliptic),
        traces=tuple(traces),
        critical=worst <= _COMMUTATOR_TOL,
    )


def _halfplane_frame(mats: list[np.ndarray]) -> np.ndarray:
    """SL(2,R) frame turning every commuting elliptic block into a rotation.

    Maps the common upper-half-plane fixed point z* = x + iy to i; among
    the SO(2)-coset of such frames, the lower-triangular one with positive
    diagonal is chosen, which reproduces the closed-form chain frame for a
    single site.
    """
    for S in mats:
        tr = (S[0, 0] + S[1, 1]).real
        if abs(tr) >= 2.0 - 1e-12:
            continue  # +-identity blocks fix everything; skip
        a, d = S[0, 0].real, S[1, 1].real
        c = S[1, 0].real
        if abs(c) < 1e-14:
            continue
        y = math.sqrt(4.0 - tr * tr) / (2.0 * abs(c))
        x = (a - d) / (2.0 * c)
        n = x * x + y * y
        f11 = math.sqrt(y / n)
        return np.array(
            [[f11, 0.0], [-x / math.sqrt(y * n), 1.0 / f11]], dtype=complex
        )
    # Every block is +-identity (or diagonal-elliptic, already a rotation).
    return np.eye(2, dtype=complex)


_FD_STEP = 3e-3


def _richardson_pair(fn, h: float) -> np.ndarray:
    """Richardson-extrapolated central first derivative of a matrix map."""

    def central(step):
        return (fn(step) - fn(-step)) / (2.0 * step)

    return (4.0 * central(h / 2.0) - central(h)) / 3.0


def _richardson_second(fn, h: float) -> np.ndarray:
    def second(step):
        return (fn(step) + fn(-step)) / (2.0 * step * step)

    return (4.0 * second(h / 2.0) - second(h)) / 3.0


def model_from_polymer(
    spec: PolymerSpec,
    weights: tuple[float, ...] | None = None,
    epsilon: float = 0.0,
    delta: float = 0.0,
) -> ModelSpec:
    """Conjugate a critical polymer family into the disc picture.

    Checks criticality and ellipticity, builds the frame M sending every
    block at the critical energy to a rotation R_eta, and extracts the
    expansion generators (P, P', Q) of each block numerically from the
    traceless logarithm of R_eta^{-1} T along the two parameter axes.
    """
    report = critical_energy_check(spec)
    if not report.critical:
        raise ModelError(
            f"blocks do not commute at the critical energy "
            f"(max commutator {report.commutator_max:.3e})"
        )
    if not all(report.elliptic):
        raise ModelError("every block must be elliptic (or +-Id) at criticality")
    mats = [polymer_transfer(b, spec.critical_energy) for b in spec.blocks]
    frame = _halfplane_frame(mats)
    M = CAYLEY @ frame
    M_inv = np.linalg.inv(M)

    if weights is None:
        weights = tuple(b.weight for b in spec.blocks)
    total = sum(weights)
    weights = tuple(w / total for w in weights)

    atoms = []
    for blk, wgt in zip(spec.blocks, weights):
        T0 = M @ polymer_transfer(blk, spec.critical_energy) @ M_inv
        off = max(abs(T0[0, 1]), abs(T0[1, 0]))
        if off > 1e-9:
            raise ModelError("conjugated block is not a rotation at criticality")
        eta = cmath.phase(T0[0, 0])
        R_inv = phase_rotation(-eta)

        def gen_at(eps_step=0.0, delta_step=0.0):
            e_val = spec.critical_energy + eps_step - 1j * delta_step
            return log_traceless(R_inv @ (M @ polymer_transfer(blk, e_val) @ M_inv))

        P_mat = _richardson_pair(lambda h: gen_at(eps_step=h), _FD_STEP)
        Pp_mat = _richardson_second(lambda h: gen_at(eps_step=h), _FD_STEP)
        Q_mat = -1j * _richardson_pair(lambda h: gen_at(delta_step=h), _FD_STEP)
        atoms.append(
            Atom(
                weight=wgt,
                eta=eta,
                P=tuple(matrix_to_coeffs(P_mat, tol=1e-7)),
                Pprime=tuple(matrix_to_coeffs(Pp_mat, tol=1e-6)),
                Q=tuple(matrix_to_coeffs(Q_mat, tol=1e-7)),
            )
        )
    return ModelSpec(
        atoms=tuple(atoms),
        epsilon=float(epsilon),
        delta=float(delta),
        label="polymer",
        polymer=spec,
        conjugator=M,
    )


# ---------------------------------------------------------------------------
# JSON schema
# ---------------------------------------------------------------------------

_TYPES = ("generic", "anderson", "polymer")


def load_model(source) -> ModelSpec:
    """Build a ModelSpec from a JSON file path, JSON string, or dict.

    Schema (see README for examples):
      type: "generic" | "anderson" | "polymer"    (required)
      epsilon, delta: floats                       (required)
      generic:  atoms: [{weight, eta, P, Pprime, Q, Pw?, dFactor?}, ...]
                wLow/wHigh optional, dFactorLow/dFactorHigh optional
      anderson: E (band energy), wLow/wHigh (default -1/1),
                dFactorLow/dFactorHigh optional
      polymer:  E (critical energy),
                blocks: [{weight, t: [...], v: [...]}, ...]
      quadOrder: optional Gauss-Legendre order for expectations (default 16)
    """
    if isinstance(source, (str, Path)):
        text = Path(source).read_text() if Path(str(source)).exists() else str(source)
        data = json.loads(text)
    elif isinstance(source, dict):
        data = source
    else:
        raise ModelError(f"cannot load a model from {type(source)!r}")
    if not isinstance(data, dict):
        raise ModelError("model document must be a JSON object")

    kind = data.get("type")
    if kind not in _TYPES:
        raise ModelError(f"model type must be one of {_TYPES}, got {kind!r}")
    try:
        epsilon = float(data["epsilon"])
        delta = float(data["delta"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError("model needs numeric epsilon and delta") from exc
    quad_order = int(data.get("quadOrder", 16))

    d_sampler = None
    if "dFactorLow" in data or "dFactorHigh" in data:
        try:
            d_sampler = UniformSampler(
                float(data["dFactorLow"]), float(data["dFactorHigh"]), quad_order
            )
        except KeyError as exc:
            raise ModelError("dFactor range needs both dFactorLow and dFactorHigh") from exc

    if kind == "anderson":
        return anderson_model(
            E=float(data["E"]),
            w_low=float(data.get("wLow", -1.0)),
            w_high=float(data.get("wHigh", 1.0)),
            epsilon=epsilon,
            delta=delta,
            d_low=d_sampler.low if d_sampler else None,
            d_high=d_sampler.high if d_sampler else None,
            quad_order=quad_order,
        )

    if kind == "polymer":
        try:
            blocks = tuple(
                PolymerBlock(
                    weight=float(b.get("weight", 1.0)),
                    hoppings=tuple(float(t) for t in b["t"]),
                    potentials=tuple(float(v) for v in b["v"]),
                )
                for b in data["blocks"]
            )
            pspec = PolymerSpec(blocks=blocks, critical_energy=float(data["E"]))
        except (KeyError, TypeError) as exc:
            raise ModelError("polymer model needs E and blocks with t/v lists") from exc
        return model_from_polymer(pspec, epsilon=epsilon, delta=delta)

    try:
        atoms = tuple(
            Atom(
                weight=float(a["weight"]),
                eta=float(a["eta"]),
                P=tuple(float(x) for x in a.get("P", _ZERO3)),
                Pprime=tuple(float(x) for x in a.get("Pprime", _ZERO3)),
                Q=tuple(float(x) for x in a.get("Q", _ZERO3)),
                Pw=tuple(float(x) for x in a.get("Pw", _ZERO3)),
                d_factor=float(a.get("dFactor", 1.0)),
            )
            for a in data["atoms"]
        )
    except (KeyError, TypeError) as exc:
        raise ModelError("generic model needs an atoms list") from exc
    w_sampler = None
    if "wLow" in data or "wHigh" in data:
        try:
            w_sampler = UniformSampler(float(data["wLow"]), float(data["wHigh"]), quad_order)
        except KeyError as exc:
            raise ModelError("w range needs both wLow and wHigh") from exc
    return ModelSpec(
        atoms=atoms,
        epsilon=epsilon,
        delta=delta,
        w_sampler=w_sampler,
        d_sampler=d_sampler,
        label="generic",
    )


def model_to_dict(spec: ModelSpec) -> dict:
    """Round-trippable JSON form of a model (generic representation)."""
    if spec.polymer is not None:
        return {
            "type": "polymer",
            "epsilon": spec.epsilon,
            "delta": spec.delta,
            "E": spec.polymer.critical_energy,
            "blocks": [
                {"weight": b.weight, "t": list(b.hoppings), "v": list(b.potentials)}
                for b in spec.polymer.blocks
            ],
        }
    if spec.label == "anderson":
        # The band energy is encoded in the rotation angle: eta = -k.
        out = {
            "type": "anderson",
            "epsilon": spec.epsilon,
            "delta": spec.delta,
            "E": -2.0 * math.cos(-spec.atoms[0].eta),
            "wLow": spec.w_sampler.low,
            "wHigh": spec.w_sampler.high,
        }
        if spec.d_sampler is not None:
            out["dFactorLow"] = spec.d_sampler.low
            out["dFactorHigh"] = spec.d_sampler.high
        return out
    out = {
        "type": "generic",
        "epsilon": spec.epsilon,
        "delta": spec.delta,
        "atoms": [
            {
                "weight": a.weight,
                "eta": a.eta,
                "P": list(a.P),
                "Pprime": list(a.Pprime),
                "Q": list(a.Q),
                "Pw": list(a.Pw),
                "dFactor": a.d_factor,
            }
            for a in spec.atoms
        ],
    }
    if spec.w_sampler is not None:
        out["wLow"] = spec.w_sampler.low
        out["wHigh"] = spec.w_sampler.high
    if spec.d_sampler is not None:
        out["dFactorLow"] = spec.d_sampler.low
        out["dFactorHigh"] = spec.d_sampler.high
    return out
