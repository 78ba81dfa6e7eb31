"""Random dynamical system engine: reproducible orbits and Lyapunov estimators.

Orbits iterate z_n = T_n . z_{n-1} with T_n drawn independently from a
model; the state is kept as a renormalized unit vector in C^2 so that
log ||T_n x_{n-1}|| accumulates the Lyapunov exponent without overflow.
Randomness comes from counter-based Philox streams keyed by
(seed, replica): every orbit is a pure function of (model, config) and
is bitwise independent of scheduling or thread count.

Two estimators are provided: `lyapunov_estimate` averages the vector
growth rate over replicas (the vector version lower-bounds the
matrix-norm definition but converges to the same limit under strong
irreducibility, which holds for the shipped model families), and
`furstenberg_gamma` averages the exact one-step expectation
E_sigma log ||T_sigma x_n|| along the orbit, with the expectation over
atoms summed exactly and the uniform draws integrated by Gauss-Legendre
quadrature.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .gfamily import get_g
from .models import ModelSpec, realize
from .moebius import lift

__all__ = [
    "RunConfig",
    "Observable",
    "OrbitAccumulator",
    "EscapeError",
    "sample_stream",
    "run_orbit",
    "orbit_trajectory",
    "lyapunov_estimate",
    "furstenberg_gamma",
]

_CHUNK = 1 << 20

DEFAULT_BURNIN = 1000


class EscapeError(RuntimeError):
    """The orbit left the closed unit disc although the model confines it."""


@dataclass(frozen=True)
class RunConfig:
    """Orbit parameters: length, discarded prefix, replication, start point."""

    seed: int = 0
    steps: int = 100_000
    burnin: int = DEFAULT_BURNIN
    replicas: int = 1
    z0: complex = 0.0 + 0.0j
    bins: int = 100

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if not (0 <= self.burnin < self.steps):
            raise ValueError("burnin must satisfy 0 <= burnin < steps")
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative 64-bit integer")
        if self.bins < 1:
            raise ValueError("bins must be >= 1")
        if abs(self.z0) > 1.0 + 1e-12:
            raise ValueError("z0 must lie in the closed unit disc")

    @property
    def retained(self) -> int:
        return self.steps - self.burnin


@dataclass(frozen=True)
class Observable:
    """Angular index j and a named radial test function g: f(z) = z^j g(|z|^2)."""

    j: int
    g: str

    def __post_init__(self):
        get_g(self.g)  # validate the name eagerly

    @property
    def gid(self) -> int:
        return get_g(self.g).gid


@dataclass
class OrbitAccumulator:
    """Streaming statistics of one or more merged orbits.

    birkhoff_moments[m] holds the complex sum of z^j g(|z|^2) for the
    m-th configured observable; balance_lhs/balance_rhs hold the sums of
    s g'(s) and (1-s)^2 (g'(s) + s g''(s)) used by the second-order
    balance identity.
    """

    observables: tuple[Observable, ...]
    log_norm_sum: float = 0.0
    count: int = 0
    radial_counts: np.ndarray = field(default_factory=lambda: np.zeros(100, dtype=np.int64))
    radial_sum: float = 0.0
    radial_sq_sum: float = 0.0
    max_radius_sq: float = -math.inf
    birkhoff_moments: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    balance_lhs: np.ndarray = field(default_factory=lambda: np.zeros(0))
    balance_rhs: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def gamma_hat(self) -> float:
        return self.log_norm_sum / self.count

    def mean_radius_sq(self) -> float:
        return self.radial_sum / self.count

    def bin_edges(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.radial_counts.shape[0] + 1)

    def empirical_cdf(self) -> np.ndarray:
        """CDF values at the interior+right bin edges (len = bins)."""
        return np.cumsum(self.radial_counts) / self.count

    def birkhoff_mean(self, m: int = 0) -> complex:
        return complex(self.birkhoff_moments[m]) / self.count

    def balance_averages(self, m: int = 0) -> tuple[float, float]:
        return self.balance_lhs[m] / self.count, self.balance_rhs[m] / self.count

    @classmethod
    def merged(cls, parts: list["OrbitAccumulator"]) -> "OrbitAccumulator":
        """Exact sum of per-replica accumulators, in list order."""
        out = cls(observables=parts[0].observables)
        out.radial_counts = np.zeros_like(parts[0].radial_counts)
        out.birkhoff_moments = np.zeros_like(parts[0].birkhoff_moments)
        out.balance_lhs = np.zeros_like(parts[0].balance_lhs)
        out.balance_rhs = np.zeros_like(parts[0].balance_rhs)
        for p in parts:
            out.log_norm_sum += p.log_norm_sum
            out.count += p.count
            out.radial_counts += p.radial_counts
            out.radial_sum += p.radial_sum
            out.radial_sq_sum += p.radial_sq_sum
            out.max_radius_sq = max(out.max_radius_sq, p.max_radius_sq)
            out.birkhoff_moments += p.birkhoff_moments
            out.balance_lhs += p.balance_lhs
            out.balance_rhs += p.balance_rhs
        return out


# ---------------------------------------------------------------------------
# sampling plumbing
# ---------------------------------------------------------------------------


def sample_stream(seed: int, replica_index: int) -> np.random.Generator:
    """Counter-based uniform stream for one replica; three draws per step
    (atom inverse-CDF, w, d), reproducible and replica-independent."""
    key = np.array([seed, replica_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _kernel_inputs(spec: ModelSpec) -> dict:
    """Precomputed per-atom arrays consumed by the compiled kernels."""
    n = len(spec.atoms)
    cum_w = np.cumsum([a.weight for a in spec.atoms])
    cum_w[-1] = 1.0  # guard the last inverse-CDF edge against rounding
    phase = np.array([np.exp(1j * a.eta) for a in spec.atoms])
    gen0 = np.zeros((n, 3), dtype=complex)
    genw = np.zeros((n, 3), dtype=complex)
    gend = np.zeros((n, 3), dtype=complex)
    exact = spec.polymer is not None
    if exact:
        tmats = np.stack([realize(spec, a) for a in range(n)]).astype(complex)
        # the stored phase/generators are unused in exact mode
    else:
        tmats = np.zeros((n, 2, 2), dtype=complex)
        for a, atom in enumerate(spec.atoms):
            gen0[a] = spec.epsilon * np.asarray(atom.P) + spec.epsilon**2 * np.asarray(
                atom.Pprime
            )
            genw[a] = spec.epsilon * np.asarray(atom.Pw)
            gend[a] = 1j * spec.delta * atom.d_factor * np.asarray(atom.Q)
    if spec.w_sampler is not None:
        w_lo, w_span = spec.w_sampler.low, spec.w_sampler.high - spec.w_sampler.low
    else:
        w_lo, w_span = 0.0, 0.0
    if spec.d_sampler is not None:
        d_lo, d_span = spec.d_sampler.low, spec.d_sampler.high - spec.d_sampler.low
    else:
        d_lo, d_span = 1.0, 0.0
    return {
        "cum_w": cum_w,
        "phase": phase,
        "gen0": gen0,
        "genw": genw,
        "gend": gend,
        "exact_mode": exact,
        "tmats": tmats,
        "w_lo": float(w_lo),
        "w_span": float(w_span),
        "d_lo": float(d_lo),
        "d_span": float(d_span),
        "check_escape": spec.confined(),
    }


def _state_vector(z0: complex) -> np.ndarray:
    x = lift(z0)
    return np.array([x.x1, x.x2], dtype=complex)


def _worker_count(replicas: int) -> int:
    raw = os.environ.get("THREADS")
    cap = int(raw) if raw else (os.cpu_count() or 1)
    return max(1, min(replicas, cap))


def _map_replicas(fn, replicas: int):
    """Run fn(replica_index) for each replica; results in replica order.

    THREADS caps the pool size; the merge order is fixed, so results do
    not depend on scheduling.
    """
    workers = _worker_count(replicas)
    if workers == 1:
        return [fn(r) for r in range(replicas)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(replicas)))


# ---------------------------------------------------------------------------
# orbit drivers
# ---------------------------------------------------------------------------


def _run_replica(
    spec: ModelSpec, cfg: RunConfig, observables: tuple[Observable, ...], replica: int
) -> OrbitAccumulator:
    ki = _kernel_inputs(spec)
    rng = sample_stream(cfg.seed, replica)
    state = _state_vector(cfg.z0)
    n_obs = len(observables)
    obs_j = np.array([o.j for o in observables], dtype=np.int64)
    obs_g = np.array([o.gid for o in observables], dtype=np.int64)
    hist = np.zeros(cfg.bins, dtype=np.int64)
    sums = np.zeros(5)
    sums[3] = -math.inf
    obs_sums = np.zeros((n_obs, 4))
    done = 0
    while done < cfg.steps:
        n = min(_CHUNK, cfg.steps - done)
        u = rng.random((n, 3))
        start_accum = min(max(cfg.burnin - done, 0), n)
        status = _kernels.orbit_chunk(
            u, state, ki["cum_w"], ki["phase"], ki["gen0"], ki["genw"], ki["gend"],
            ki["exact_mode"], ki["tmats"], ki["w_lo"], ki["w_span"], ki["d_lo"],
            ki["d_span"], start_accum, ki["check_escape"], hist, obs_j, obs_g,
            sums, obs_sums,
        )
        if status != 0:
            raise EscapeError(
                f"orbit escaped the closed disc (replica {replica}, "
                f"around step {done})"
            )
        done += n
    acc = OrbitAccumulator(observables=observables)
    acc.log_norm_sum = float(sums[0])
    acc.radial_sum = float(sums[1])
    acc.radial_sq_sum = float(sums[2])
    acc.max_radius_sq = float(sums[3])
    acc.count = int(sums[4])
    acc.radial_counts = hist
    acc.birkhoff_moments = obs_sums[:, 0] + 1j * obs_sums[:, 1]
    acc.balance_lhs = obs_sums[:, 2].copy()
    acc.balance_rhs = obs_sums[:, 3].copy()
    return acc


def run_orbit(
    spec: ModelSpec, cfg: RunConfig, observables: tuple[Observable, ...] = ()
) -> OrbitAccumulator:
    """Iterate the orbit(s) and return the merged accumulator.

    Accumulation starts after `burnin` steps: the retained samples are
    z_n for n = burnin+1 .. steps, per replica.  Raises EscapeError if a
    confined model (delta >= 0, q3 >= |xi| atoms) leaves the closed disc
    beyond 1e-9, which signals a model or numerics bug.
    """
    observables = tuple(observables)
    parts = _map_replicas(
        lambda r: _run_replica(spec, cfg, observables, r), cfg.replicas
    )
    return OrbitAccumulator.merged(parts)


def orbit_trajectory(spec: ModelSpec, cfg: RunConfig) -> np.ndarray:
    """Retained chart values z_{burnin+1} .. z_{steps} of replica 0."""
    ki = _kernel_inputs(spec)
    rng = sample_stream(cfg.seed, 0)
    state = _state_vector(cfg.z0)
    out = np.empty(cfg.retained, dtype=complex)
    done = 0
    kept = 0
    while done < cfg.steps:
        n = min(_CHUNK, cfg.steps - done)
        u = rng.random((n, 3))
        chunk_z = np.empty(n, dtype=complex)
        status = _kernels.trajectory_chunk(
            u, state, ki["cum_w"], ki["phase"], ki["gen0"], ki["genw"], ki["gend"],
            ki["exact_mode"], ki["tmats"], ki["w_lo"], ki["w_span"], ki["d_lo"],
            ki["d_span"], ki["check_escape"], chunk_z,
        )
        if status != 0:
            raise EscapeError(f"orbit escaped the closed disc around step {done}")
        start = min(max(cfg.burnin - done, 0), n)
        take = chunk_z[start:]
        out[kept : kept + take.shape[0]] = take
        kept += take.shape[0]
        done += n
    return out


# ---------------------------------------------------------------------------
# Lyapunov estimators
# ---------------------------------------------------------------------------


def lyapunov_estimate(
    spec: ModelSpec, cfg: RunConfig, observables: tuple[Observable, ...] = ()
) -> tuple[float, float]:
    """Replica-averaged vector growth rate and its standard error.

    Per replica gamma_r = (1/count) sum log ||T_n x_{n-1}||; returns
    (mean over replicas, sample std / sqrt(replicas)).
    """
    if cfg.replicas < 2:
        raise ValueError("lyapunov_estimate needs replicas >= 2 for a standard error")
    observables = tuple(observables)
    parts = _map_replicas(
        lambda r: _run_replica(spec, cfg, observables, r), cfg.replicas
    )
    gammas = np.array([p.gamma_hat() for p in parts])
    return float(gammas.mean()), float(gammas.std(ddof=1) / math.sqrt(len(gammas)))


def _quad_nodes(sampler, neutral: float) -> tuple[np.ndarray, np.ndarray]:
    """Sampler quadrature nodes, or the neutral draw when absent
    (w enters additively, neutral 0; d scales Q, neutral 1)."""
    if sampler is None:
        return np.array([neutral]), np.array([1.0])
    return sampler.nodes_weights()


def furstenberg_nodes(spec: ModelSpec) -> tuple[np.ndarray, np.ndarray]:
    """Flat (weights, matrices) quadrature of the one-step measure.

    Atoms are summed exactly; uniform w and d draws are integrated by
    Gauss-Legendre rules of the samplers' configured order.  Exactly
    realized models (polymers) contribute one node per atom.
    """
    weights = []
    mats = []
    if spec.polymer is not None:
        for a, atom in enumerate(spec.atoms):
            weights.append(atom.weight)
            mats.append(realize(spec, a))
    else:
        w_nodes, w_wgt = _quad_nodes(spec.w_sampler, neutral=0.0)
        d_nodes, d_wgt = _quad_nodes(spec.d_sampler, neutral=1.0)
        for a, atom in enumerate(spec.atoms):
            for wn, ww in zip(w_nodes, w_wgt):
                for dn, dw in zip(d_nodes, d_wgt):
                    weights.append(atom.weight * ww * dw)
                    mats.append(realize(spec, a, w=wn, d=dn))
    return np.array(weights), np.stack(mats).astype(complex)


def furstenberg_gamma(
    spec: ModelSpec, cfg: RunConfig, return_stderr: bool = False
):
    """Estimate gamma = E int nu(dx) log ||T x|| along the orbit.

    The inner expectation over the matrix draw is computed exactly
    (atom sums + quadrature) at every retained orbit point x_n; the
    orbit itself advances with the same random draws as `run_orbit`.
    Returns the replica mean; with return_stderr=True, also the
    standard error over replicas.
    """
    node_w, node_t = furstenberg_nodes(spec)
    ki = _kernel_inputs(spec)

    def one(replica: int) -> float:
        rng = sample_stream(cfg.seed, replica)
        state = _state_vector(cfg.z0)
        sums = np.zeros(2)
        done = 0
        while done < cfg.steps:
            n = min(_CHUNK, cfg.steps - done)
            u = rng.random((n, 3))
            start_accum = min(max(cfg.burnin - done, 0), n)
            status = _kernels.furstenberg_chunk(
                u, state, ki["cum_w"], ki["phase"], ki["gen0"], ki["genw"],
                ki["gend"], ki["exact_mode"], ki["tmats"], ki["w_lo"],
                ki["w_span"], ki["d_lo"], ki["d_span"], start_accum,
                ki["check_escape"], node_w, node_t, sums,
            )
            if status != 0:
                raise EscapeError(
                    f"orbit escaped the closed disc (replica {replica})"
                )
            done += n
        return float(sums[0] / sums[1])

    vals = np.array(_map_replicas(one, cfg.replicas))
    mean = float(vals.mean())
    if not return_stderr:
        return mean
    stderr = float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
    return mean, stderr
