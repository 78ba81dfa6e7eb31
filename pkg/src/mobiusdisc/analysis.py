"""Analytic predictions and statistical comparisons for disc orbits.

For a family with drift constant C > 0 and diffusion constant D > 0, the
stationary radial distribution of s = |z|^2 is approximated (weakly, to
leading order in epsilon and delta) by

    rho_lam(s) = lam / (1 - s)^2 * exp(-lam s / (1 - s)),
    lam = 2 (C / D) (delta / epsilon^2),

which is the exponential law of rate lam in the variable x = s/(1 - s).
This module evaluates that law and its CDF, compares it against orbit
histograms, computes the Lyapunov prediction C*delta + D*epsilon^2 and
its residual, checks the second-order drift/diffusion balance and the
weak stationarity identity satisfied by rho_lam, measures truncation
defects of the second-order expansions of the Moebius action, and
reports support bounds.

Everything here is closed-form or quadrature: no compiled kernels are
imported, so the module loads fast and is safe to use from lightweight
entry points.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy import special
from scipy.integrate import quad

from .gfamily import GFunc, get_g
from .models import Atom, DerivedConstants, ModelSpec, constants, realize_atom
from .moebius import act, lift

if TYPE_CHECKING:
    from .dynamics import OrbitAccumulator

__all__ = [
    "RadialLaw",
    "ComparisonReport",
    "MomentReport",
    "SupportReport",
    "rho",
    "radial_cdf",
    "ks_compare",
    "moment_report",
    "gamma_prediction",
    "gamma_residual",
    "truncated_action",
    "truncated_modulus",
    "truncated_lognorm",
    "expansion_defect_action",
    "expansion_defect_modulus",
    "expansion_defect_lognorm",
    "second_order_balance",
    "weak_identity_residual",
    "support_bound_check",
    "compare_run",
]


# ---------------------------------------------------------------------------
# the radial law
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RadialLaw:
    """The approximate stationary law of s = |z|^2 with rate parameter lam."""

    lam: float

    def __post_init__(self):
        if not (self.lam > 0.0 and math.isfinite(self.lam)):
            raise ValueError(f"lam must be positive and finite, got {self.lam}")

    def rho(self, s):
        """Density lam/(1-s)^2 exp(-lam s/(1-s)); 0 at s = 1 by continuity."""
        arr = np.asarray(s, dtype=float)
        if np.any(arr < 0.0) or np.any(arr > 1.0):
            raise ValueError("s must lie in [0, 1]")
        flat = np.atleast_1d(arr)
        out = np.zeros_like(flat)
        mask = flat < 1.0
        one = 1.0 - flat[mask]
        # evaluated in log form: the exponential factor always wins at s -> 1
        out[mask] = np.exp(
            math.log(self.lam) - 2.0 * np.log(one) - self.lam * flat[mask] / one
        )
        return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)

    def cdf(self, s):
        """1 - exp(-lam s/(1-s)) for s < 1, and exactly 1 at s = 1."""
        arr = np.asarray(s, dtype=float)
        if np.any(arr < 0.0) or np.any(arr > 1.0):
            raise ValueError("s must lie in [0, 1]")
        flat = np.atleast_1d(arr)
        out = np.ones_like(flat)
        mask = flat < 1.0
        one = 1.0 - flat[mask]
        out[mask] = -np.expm1(-self.lam * flat[mask] / one)
        return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Exact draws by inverse transform: s = x/(1+x) with x ~ Exp(lam)."""
        x = -np.log1p(-rng.random(n)) / self.lam
        return x / (1.0 + x)

    def mean(self) -> float:
        """E[s] = 1 - lam e^lam E1(lam), via s = x/(1+x) with x ~ Exp(lam)."""
        if self.lam < 650.0:
            return 1.0 - self.lam * math.exp(self.lam) * float(special.exp1(self.lam))
        # e^lam overflows; use the asymptotic series of lam e^lam E1(lam)
        term, total = 1.0, 1.0
        for k in range(1, 9):
            term *= -k / self.lam
            total += term
        return 1.0 - total


def rho(law: RadialLaw, s):
    """Density of the radial law at s (vectorized)."""
    return law.rho(s)


def radial_cdf(law: RadialLaw, s):
    """CDF of the radial law at s (vectorized)."""
    return law.cdf(s)


def ks_compare(acc: "OrbitAccumulator", law: RadialLaw) -> float:
    """Sup-distance over histogram bin edges between the empirical CDF of
    |z_n|^2 and the radial law.  Meaningful from ~10^4 samples up; the bin
    discretization (<= 1/bins) is part of any tolerance applied on top."""
    if acc.count == 0:
        raise ValueError("empty accumulator")
    edges = acc.bin_edges()
    empirical = np.concatenate(([0.0], acc.empirical_cdf()))
    return float(np.max(np.abs(empirical - law.cdf(edges))))


# ---------------------------------------------------------------------------
# moment and Lyapunov reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MomentReport:
    """Empirical E|z|^2 against the applicable concentration regime.

    origin_scale is the bound scale max(delta, epsilon, epsilon^2/delta)
    for concentration near the origin (drift-dominated, needs delta > 0);
    boundary_deficit_scale is max(sqrt(epsilon), sqrt(delta)/epsilon) for
    1 - E|z|^2 in the diffusion-dominated regime (needs epsilon > 0).
    Whichever scale is smaller names the regime; with both infinite
    (epsilon = delta = 0) the dynamics is a rotation and regime is
    "neutral".
    """

    mean_radius_sq: float
    lam: float | None
    origin_scale: float
    boundary_deficit_scale: float
    regime: str


def moment_report(
    acc: "OrbitAccumulator",
    consts: DerivedConstants,
    epsilon: float,
    delta: float,
) -> MomentReport:
    lam = None
    if consts.d_classification == "positive" and epsilon > 0.0:
        lam = 2.0 * (consts.C / consts.D) * delta / epsilon**2
    origin = max(delta, epsilon, epsilon**2 / delta) if delta > 0.0 else math.inf
    boundary = (
        max(math.sqrt(epsilon), math.sqrt(delta) / epsilon)
        if epsilon > 0.0
        else math.inf
    )
    if math.isinf(origin) and math.isinf(boundary):
        regime = "neutral"
    else:
        regime = "origin" if origin <= boundary else "boundary"
    return MomentReport(
        mean_radius_sq=acc.mean_radius_sq(),
        lam=lam,
        origin_scale=origin,
        boundary_deficit_scale=boundary,
        regime=regime,
    )


def gamma_prediction(spec: ModelSpec) -> float:
    """Second-order Lyapunov prediction C*delta + D*epsilon^2."""
    c = constants(spec)
    return c.C * spec.delta + c.D * spec.epsilon**2


def gamma_residual(spec: ModelSpec, gamma_hat: float) -> tuple[float, float]:
    """(prediction, gamma_hat - prediction) for the model's (epsilon, delta)."""
    pred = gamma_prediction(spec)
    return pred, gamma_hat - pred


# ---------------------------------------------------------------------------
# truncated expansions of the one-step map
# ---------------------------------------------------------------------------

_CONVENTIONS = ("bch", "prime")


def _expansion_coefficients(atom: Atom, w: float, d: float, convention: str):
    """Effective coefficients entering the second-order expansions.

    The family realizes a *single* exponential of the combined generator,
    so reordering it into a product of one-parameter factors (to expand
    the action) picks up commutator cross terms at second order:

        beta_tilde = beta' + i p3 beta,     p3_tilde = p3' - p1 p2,

    the "bch" convention.  The "prime" convention drops the cross terms
    (beta_tilde = beta', p3_tilde = p3'), which is exact only when
    p3 = 0 and p1 p2 = 0; otherwise it degrades the epsilon-remainder of
    the truncations from cubic to quadratic.  Reports should state which
    convention produced a defect number.
    """
    if convention not in _CONVENTIONS:
        raise ValueError(f"convention must be one of {_CONVENTIONS}")
    p1 = atom.P[0] + w * atom.Pw[0]
    p2 = atom.P[1] + w * atom.Pw[1]
    p3 = atom.P[2] + w * atom.Pw[2]
    beta = complex(p1, -p2)
    beta_prime = complex(atom.Pprime[0], -atom.Pprime[1])
    if convention == "bch":
        beta_tilde = beta_prime + 1j * p3 * beta
        p3_tilde = atom.Pprime[2] - p1 * p2
    else:
        beta_tilde = beta_prime
        p3_tilde = atom.Pprime[2]
    scale = atom.d_factor * d
    xi = complex(atom.Q[0], -atom.Q[1]) * scale
    q3 = atom.Q[2] * scale
    return beta, beta_tilde, p3, p3_tilde, xi, q3


def _check_disc(z: complex):
    if abs(z) > 1.0 + 1e-12:
        raise ValueError("z must lie in the closed unit disc")


def truncated_action(
    atom: Atom,
    epsilon: float,
    delta: float,
    z: complex,
    w: float = 0.0,
    d: float = 1.0,
    convention: str = "bch",
) -> complex:
    """Second-order expansion of T.z in epsilon and first order in delta;
    the remainder is O(epsilon^3, epsilon*delta, delta^2)."""
    _check_disc(z)
    beta, bt, p3, p3t, xi, q3 = _expansion_coefficients(atom, w, d, convention)
    bracket = (
        z
        + epsilon * (beta.conjugate() + 2j * p3 * z - beta * z * z)
        + delta * (1j * xi.conjugate() - 2.0 * q3 * z - 1j * xi * z * z)
        + epsilon**2
        * (
            bt.conjugate()
            - bt * z * z
            + 2j * p3 * (beta.conjugate() - beta * z * z)
            - (abs(beta) ** 2 + 1j * (beta * beta).imag - 2j * p3t + 2.0 * p3 * p3) * z
            + beta * beta * z**3
        )
    )
    return cmath.exp(2j * atom.eta) * bracket


def truncated_modulus(
    atom: Atom,
    epsilon: float,
    delta: float,
    z: complex,
    w: float = 0.0,
    d: float = 1.0,
    convention: str = "bch",
) -> float:
    """Second-order expansion of |T.z|^2 (same remainder order)."""
    _check_disc(z)
    beta, bt, _, _, xi, q3 = _expansion_coefficients(atom, w, d, convention)
    s = abs(z) ** 2
    return (
        s
        + 2.0 * epsilon * (beta * z).real * (1.0 - s)
        + epsilon**2
        * (abs(beta) ** 2 * (1.0 - s) + 2.0 * (bt * z - beta * beta * z * z).real)
        * (1.0 - s)
        + 2.0 * delta * ((xi * z).imag * (1.0 + s) - 2.0 * q3 * s)
    )


def truncated_lognorm(
    atom: Atom,
    epsilon: float,
    delta: float,
    z: complex,
    w: float = 0.0,
    d: float = 1.0,
    convention: str = "bch",
) -> float:
    """Second-order expansion of log ||T x|| for the unit lift x of z."""
    _check_disc(z)
    beta, bt, _, _, _, q3 = _expansion_coefficients(atom, w, d, convention)
    s = abs(z) ** 2
    return (
        2.0 * epsilon * (beta * z).real / (1.0 + s)
        + epsilon**2 * abs(beta) ** 2 * (1.0 + s * s) / (1.0 + s) ** 2
        + delta * q3 * (1.0 - s) / (1.0 + s)
        + 2.0
        * epsilon**2
        * ((bt * z).real / (1.0 + s) - (beta * beta * z * z).real / (1.0 + s) ** 2)
    )


def expansion_defect_action(
    atom: Atom,
    epsilon: float,
    delta: float,
    z: complex,
    w: float = 0.0,
    d: float = 1.0,
    convention: str = "bch",
) -> float:
    """|exact Moebius action - truncated_action| at z."""
    T = realize_atom(atom, epsilon, delta, w=w, d=d)
    return abs(act(T, z) - truncated_action(atom, epsilon, delta, z, w, d, convention))


def expansion_defect_modulus(
    atom: Atom,
    epsilon: float,
    delta: float,
    z: complex,
    w: float = 0.0,
    d: float = 1.0,
    convention: str = "bch",
) -> float:
    """| |exact T.z|^2 - truncated_modulus | at z."""
    T = realize_atom(atom, epsilon, delta, w=w, d=d)
    return abs(
        abs(act(T, z)) ** 2 - truncated_modulus(atom, epsilon, delta, z, w, d, convention)
    )


def expansion_defect_lognorm(
    atom: Atom,
    epsilon: float,
    delta: float,
    z: complex,
    w: float = 0.0,
    d: float = 1.0,
    convention: str = "bch",
) -> float:
    """|exact log ||T x|| - truncated_lognorm| at the unit lift x of z."""
    T = realize_atom(atom, epsilon, delta, w=w, d=d)
    x = lift(z)
    v = T @ np.array([x.x1, x.x2])
    exact = 0.5 * math.log(float(np.real(np.vdot(v, v))))
    return abs(exact - truncated_lognorm(atom, epsilon, delta, z, w, d, convention))


# ---------------------------------------------------------------------------
# stationarity identities
# ---------------------------------------------------------------------------


def second_order_balance(
    acc: "OrbitAccumulator",
    consts: DerivedConstants,
    epsilon: float,
    delta: float,
    g: str = "s^1",
) -> tuple[float, float]:
    """Drift/diffusion balance along the orbit for the test function g.

    Returns (2 C delta * avg(s g'(s)),  D eps^2 * avg((1-s)^2 (g'(s) + s g''(s))))
    with averages over the retained samples; in the stationary regime the
    two sides agree up to O(epsilon^3, epsilon*delta, delta^2, 1/N).
    Raises ValueError when no accumulated observable used g.
    """
    gid = get_g(g).gid
    for m, o in enumerate(acc.observables):
        if o.gid == gid:
            avg_lhs, avg_rhs = acc.balance_averages(m)
            return (
                2.0 * consts.C * delta * avg_lhs,
                consts.D * epsilon**2 * avg_rhs,
            )
    raise ValueError(f"no accumulated observable uses g = {g!r}")


def weak_identity_residual(
    law: RadialLaw, g: str | GFunc, operator_lam: float | None = None
) -> float:
    """Integral of rho_lam(s) [lam s g'(s) - (1-s)^2 (g'(s) + s g''(s))] ds.

    Vanishes (to quadrature accuracy) when the density and the operator
    share the same rate; pass operator_lam to probe a mismatched pair.
    Uses the substitution x = s/(1-s), under which the density becomes
    lam e^{-lam x} and the integrand is smooth with no boundary layer.
    """
    gf = get_g(g) if isinstance(g, str) else g
    lam_rho = law.lam
    lam_op = law.lam if operator_lam is None else operator_lam

    def integrand(x: float) -> float:
        s = x / (1.0 + x)
        return (
            lam_rho
            * math.exp(-lam_rho * x)
            * (
                lam_op * s * gf.dg(s)
                - (1.0 - s) ** 2 * (gf.dg(s) + s * gf.d2g(s))
            )
        )

    val, _ = quad(integrand, 0.0, np.inf, epsabs=1e-13, epsrel=1e-13, limit=400)
    return float(val)


@dataclass(frozen=True)
class SupportReport:
    """Observed orbit radius against the ess-sup |xi|/q3 support bound."""

    max_radius_sq: float
    bound: float
    slack: float
    threshold: float
    status: str  # "ok" | "violated" | "inapplicable"


def support_bound_check(
    acc: "OrbitAccumulator",
    bound: float,
    epsilon: float,
    delta: float,
    slack_constant: float = 10.0,
) -> SupportReport:
    """Check max |z_n|^2 <= bound + c (epsilon/delta + delta).

    The bound constrains the stationary support only in the
    drift-dominated regime; with delta = 0 the check is reported as
    "inapplicable" rather than pass/fail.
    """
    if delta <= 0.0:
        return SupportReport(acc.max_radius_sq, bound, math.inf, math.inf, "inapplicable")
    slack = slack_constant * (epsilon / delta + delta)
    threshold = bound + slack
    status = "ok" if acc.max_radius_sq <= threshold else "violated"
    return SupportReport(acc.max_radius_sq, bound, slack, threshold, status)


# ---------------------------------------------------------------------------
# aggregate report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ComparisonReport:
    """One-stop summary of a run against the analytic predictions."""

    ks_statistic: float | None
    mean_radius_sq: float
    predicted_gamma: float
    empirical_gamma: float
    residual: float
    balance_lhs: float | None
    balance_rhs: float | None
    lam: float | None


def compare_run(spec: ModelSpec, acc: "OrbitAccumulator", g: str | None = None) -> ComparisonReport:
    """Build a ComparisonReport from a finished accumulator.

    The KS statistic is only computed when the model admits a radial law
    (positive diffusion constant and epsilon != 0); the balance pair is
    only computed when g names an accumulated observable.
    """
    c = constants(spec)
    predicted = c.C * spec.delta + c.D * spec.epsilon**2
    empirical = acc.gamma_hat()
    ks = None
    if c.lam is not None and c.lam > 0.0:
        ks = ks_compare(acc, RadialLaw(c.lam))
    lhs = rhs = None
    if g is not None:
        lhs, rhs = second_order_balance(acc, c, spec.epsilon, spec.delta, g)
    return ComparisonReport(
        ks_statistic=ks,
        mean_radius_sq=acc.mean_radius_sq(),
        predicted_gamma=predicted,
        empirical_gamma=empirical,
        residual=empirical - predicted,
        balance_lhs=lhs,
        balance_rhs=rhs,
        lam=c.lam,
    )
