"""Command-line surface emitting reproducible CSV/JSON artifacts.

Verbs
-----
orbit      one orbit as CSV rows `n,re_z,im_z,abs_z2`
hist       radial histogram CSV `s_lo,s_hi,count,empirical_density,rho_lambda`
           plus a trailing `# {...}` JSON line carrying lambda and the KS
           statistic (comment-prefixed so the CSV stays machine-readable)
lyap       Lyapunov estimate, prediction and residual as JSON
scan       CSV scan over an (epsilon, delta) grid
constants  model constants as JSON
check      internal invariant suites as JSON; exit 1 on any failure

Every command honors --seed (default 0) and --out (default stdout), and
is a deterministic function of the model file bytes and flags; the
THREADS environment variable changes scheduling only, never bytes.
Float CSV columns use 17-significant-digit formatting.

Exit codes: 0 ok, 1 check failure, 2 usage/config error, 3 numeric
anomaly (orbit escape or a singular-constant model).

The environment variable MOBIUSDISC_LAMBDA_SCALE (default 1) is a debug
hook that scales the density rate inside the `check` density suite; any
value other than 1 must make the weak-identity assertions fail, which
exercises the failure path end to end.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np
from scipy.integrate import quad

from .analysis import (
    RadialLaw,
    expansion_defect_action,
    expansion_defect_lognorm,
    expansion_defect_modulus,
    gamma_prediction,
    ks_compare,
    weak_identity_residual,
)
from .gfamily import g_names
from .models import (
    AnomalyError,
    ModelError,
    anderson_model,
    constants,
    load_model,
    with_parameters,
    xi_q3_bound,
)
from .moebius import act, disc_defect
from .su11 import coeffs_to_matrix, exp_su11, phase_rotation, J

__all__ = ["main"]

_LAMBDA_GRID = (0.1, 0.21823, 1.0475, 2.0, 6.547, 20.0)
_SUITES = ("algebra", "moebius", "expansions", "density", "balance")
_BAND_ENERGY = -2.0 * math.cos(2.0)


def _fmt(x: float) -> str:
    return format(float(x) + 0.0, ".17g")  # +0.0 folds -0.0 into 0


def _write_out(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _load_spec(args):
    if not os.path.exists(args.model):
        raise ModelError(f"model file not found: {args.model}")
    spec = load_model(args.model)
    return with_parameters(spec, epsilon=args.epsilon, delta=args.delta)


def _run_config(args, **overrides):
    from .dynamics import RunConfig

    kwargs = {
        "seed": args.seed,
        "steps": args.steps,
        "burnin": args.burnin,
        "z0": args.z0,
    }
    kwargs.update(overrides)
    return RunConfig(**kwargs)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_orbit(args) -> int:
    from .dynamics import orbit_trajectory

    spec = _load_spec(args)
    cfg = _run_config(args)
    traj = orbit_trajectory(spec, cfg)
    lines = ["n,re_z,im_z,abs_z2"]
    for i, z in enumerate(traj):
        n = cfg.burnin + 1 + i
        lines.append(f"{n},{_fmt(z.real)},{_fmt(z.imag)},{_fmt(abs(z) ** 2)}")
    _write_out(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_hist(args) -> int:
    from .dynamics import run_orbit

    spec = _load_spec(args)
    cfg = _run_config(args, replicas=args.replicas, bins=args.bins)
    acc = run_orbit(spec, cfg)
    try:
        lam = constants(spec).lam
    except AnomalyError:
        lam = None
    if lam is not None and lam <= 0.0:
        lam = None  # defined but degenerate (delta = 0): no radial law
    law = RadialLaw(lam) if lam is not None else None
    edges = acc.bin_edges()
    width = 1.0 / args.bins
    lines = ["s_lo,s_hi,count,empirical_density,rho_lambda"]
    for b in range(args.bins):
        mid = 0.5 * (edges[b] + edges[b + 1])
        dens = acc.radial_counts[b] / (acc.count * width)
        overlay = law.rho(mid) if law is not None else math.nan
        lines.append(
            f"{_fmt(edges[b])},{_fmt(edges[b + 1])},{acc.radial_counts[b]},"
            f"{_fmt(dens)},{_fmt(overlay)}"
        )
    ks = ks_compare(acc, law) if law is not None else None
    lines.append("# " + json.dumps({"lambda": lam, "ks": ks}))
    _write_out(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_lyap(args) -> int:
    from .dynamics import furstenberg_gamma, lyapunov_estimate

    if args.replicas < 2:
        print("error: lyap needs --replicas >= 2", file=sys.stderr)
        return 2
    spec = _load_spec(args)
    cfg = _run_config(args, replicas=args.replicas)
    gamma_hat, stderr = lyapunov_estimate(spec, cfg)
    fur = furstenberg_gamma(spec, cfg)
    c = constants(spec)
    prediction = c.C * spec.delta + c.D * spec.epsilon**2
    out = {
        "gamma_hat": gamma_hat,
        "stderr": stderr,
        "gamma_furstenberg": fur,
        "prediction": prediction,
        "residual": gamma_hat - prediction,
        "C": c.C,
        "D": c.D,
        "lambda": c.lam,
    }
    _write_out(args.out, json.dumps(out, indent=2) + "\n")
    return 0


def cmd_scan(args) -> int:
    from .dynamics import lyapunov_estimate

    if args.replicas < 2:
        print("error: scan needs --replicas >= 2", file=sys.stderr)
        return 2
    base = _load_spec(args)
    lines = ["epsilon,delta,gamma_hat,stderr,prediction,residual"]
    for eps in args.epsilon_grid:
        for delta in args.delta_grid:
            spec = with_parameters(base, epsilon=eps, delta=delta)
            cfg = _run_config(args, replicas=args.replicas)
            gamma_hat, stderr = lyapunov_estimate(spec, cfg)
            pred = gamma_prediction(spec)
            lines.append(
                f"{_fmt(eps)},{_fmt(delta)},{_fmt(gamma_hat)},{_fmt(stderr)},"
                f"{_fmt(pred)},{_fmt(gamma_hat - pred)}"
            )
    _write_out(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_constants(args) -> int:
    spec = _load_spec(args)
    try:
        c = constants(spec)
    except AnomalyError as exc:
        _write_out(
            args.out,
            json.dumps({"error": {"kind": "anomaly", "message": str(exc)}}, indent=2)
            + "\n",
        )
        return 3
    try:
        bound = xi_q3_bound(spec)
    except ModelError:
        bound = None
    ratio = (
        c.lambda_per_unit_ratio() if c.d_classification == "positive" else None
    )
    out = {
        "C": c.C,
        "D": c.D,
        "lambda_per_unit_ratio": ratio,
        "beta_mean_re": c.beta_mean.real,
        "beta_mean_im": c.beta_mean.imag,
        "beta_abs2_mean": c.beta_abs2_mean,
        "phase2_mean": [c.phase2_mean.real, c.phase2_mean.imag],
        "phase4_mean": [c.phase4_mean.real, c.phase4_mean.imag],
        "d_classification": c.d_classification,
        "xi_q3_bound": bound,
    }
    _write_out(args.out, json.dumps(out, indent=2) + "\n")
    return 0


# ---------------------------------------------------------------------------
# check suites
# ---------------------------------------------------------------------------


def _assertion(name, measured, tolerance, comparison="<="):
    passed = measured <= tolerance if comparison == "<=" else measured >= tolerance
    return {
        "name": name,
        "measured": measured,
        "tolerance": tolerance,
        "comparison": comparison,
        "passed": bool(passed),
    }


def _suite_algebra(seed: int) -> list[dict]:
    rng = np.random.default_rng(seed)
    worst_membership = 0.0
    worst_det = 0.0
    for _ in range(10_000):
        T = exp_su11(coeffs_to_matrix(rng.uniform(-1.5, 1.5, 3)))
        worst_membership = max(
            worst_membership, float(np.max(np.abs(T.conj().T @ J @ T - J)))
        )
        worst_det = max(worst_det, abs(np.linalg.det(T) - 1.0))
    return [
        _assertion("exp_group_membership", worst_membership, 1e-10),
        _assertion("exp_unimodularity", worst_det, 1e-10),
    ]


def _suite_moebius(seed: int) -> list[dict]:
    rng = np.random.default_rng(seed)
    worst_excess = -math.inf
    worst_defect = math.inf
    for _ in range(10_000):
        p = rng.uniform(-1.0, 1.0, 3)
        q12 = rng.uniform(-0.5, 0.5, 2)
        q3 = math.hypot(q12[0], q12[1]) + rng.uniform(0.0, 0.5)
        gen = rng.uniform(0.0, 0.3) * coeffs_to_matrix(p)
        gen = gen + 1j * rng.uniform(0.0, 0.2) * coeffs_to_matrix((q12[0], q12[1], q3))
        T = phase_rotation(rng.uniform(-math.pi, math.pi)) @ exp_su11(gen)
        z = math.sqrt(rng.uniform()) * np.exp(2j * math.pi * rng.uniform())
        worst_excess = max(worst_excess, abs(act(T, complex(z))) ** 2 - 1.0)
        worst_defect = min(worst_defect, disc_defect(T, complex(z)))
    return [
        _assertion("disc_invariance_excess", worst_excess, 1e-12),
        _assertion("disc_defect_negativity", -worst_defect, 1e-12),
    ]


def _suite_expansions(seed: int) -> list[dict]:
    del seed  # deterministic grid
    atom = anderson_model(_BAND_ENERGY).atoms[0]
    grid = [
        r * np.exp(2j * math.pi * m / 5)
        for r in (0.0, 0.25, 0.5, 0.75, 1.0)
        for m in range(5)
    ]
    fns = {
        "action": expansion_defect_action,
        "modulus": expansion_defect_modulus,
        "lognorm": expansion_defect_lognorm,
    }
    out = []
    exact_worst = 0.0
    for label, fn in fns.items():
        eps_ratio = math.inf
        delta_ratio = math.inf
        for w in (-1.0, 0.0, 1.0):
            d1 = max(fn(atom, 0.05, 0.0, complex(z), w=w) for z in grid)
            d2 = max(fn(atom, 0.025, 0.0, complex(z), w=w) for z in grid)
            if d2 < 1e-13:
                # this draw realizes a pure rotation; truncation is exact
                exact_worst = max(exact_worst, d1, d2)
            else:
                eps_ratio = min(eps_ratio, d1 / d2)
            d3 = max(fn(atom, 0.0, 7.5e-4, complex(z), w=w) for z in grid)
            d4 = max(fn(atom, 0.0, 3.75e-4, complex(z), w=w) for z in grid)
            delta_ratio = min(delta_ratio, d3 / d4)
        out.append(_assertion(f"{label}_eps_halving_ratio", eps_ratio, 7.0, ">="))
        out.append(_assertion(f"{label}_delta_halving_ratio", delta_ratio, 3.5, ">="))
    out.append(_assertion("exact_rotation_defect", exact_worst, 1e-13))
    return out


def _suite_density(seed: int) -> list[dict]:
    del seed  # quadrature only
    scale = float(os.environ.get("MOBIUSDISC_LAMBDA_SCALE", "1"))
    worst_norm = 0.0
    worst_weak = 0.0
    for lam in _LAMBDA_GRID:
        law = RadialLaw(scale * lam)
        val, _ = quad(law.rho, 0.0, 1.0, epsabs=1e-13, epsrel=1e-13, limit=400)
        worst_norm = max(worst_norm, abs(val - 1.0))
        for name in g_names():
            worst_weak = max(
                worst_weak, abs(weak_identity_residual(law, name, operator_lam=lam))
            )
    law = RadialLaw(2.0)
    s = np.linspace(1e-3, 1.0 - 1e-3, 1000)
    h = 1e-6
    num = (law.cdf(s + h) - law.cdf(s - h)) / (2.0 * h)
    cdf_err = float(np.max(np.abs(num - law.rho(s))))
    return [
        _assertion("rho_normalization_error", worst_norm, 1e-10),
        _assertion("weak_identity_residual", worst_weak, 1e-8),
        _assertion("cdf_density_consistency", cdf_err, 1e-8),
    ]


def _suite_balance(seed: int) -> list[dict]:
    from .analysis import second_order_balance
    from .dynamics import Observable, RunConfig, run_orbit

    spec = anderson_model(_BAND_ENERGY, epsilon=0.05, delta=1.2e-4)
    c = constants(spec)
    cfg = RunConfig(seed=seed, steps=1_001_000, burnin=1000)
    acc = run_orbit(spec, cfg, (Observable(0, "s^1"), Observable(0, "log1p")))
    out = []
    for g in ("s^1", "log1p"):
        lhs, rhs = second_order_balance(acc, c, spec.epsilon, spec.delta, g=g)
        rel = abs(lhs - rhs) / max(lhs, rhs)
        out.append(_assertion(f"balance_rel_diff_{g.replace('^', '')}", rel, 0.2))
    return out


def cmd_check(args) -> int:
    suites = args.suite or list(_SUITES)
    runners = {
        "algebra": _suite_algebra,
        "moebius": _suite_moebius,
        "expansions": _suite_expansions,
        "density": _suite_density,
        "balance": _suite_balance,
    }
    report = {"passed": True, "suites": {}}
    for name in suites:
        assertions = runners[name](args.seed)
        ok = all(a["passed"] for a in assertions)
        report["suites"][name] = {"passed": ok, "assertions": assertions}
        report["passed"] = report["passed"] and ok
    _write_out(args.out, json.dumps(report, indent=2) + "\n")
    return 0 if report["passed"] else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _grid(text: str) -> list[float]:
    vals = [float(x) for x in text.split(",") if x.strip()]
    if not vals:
        raise argparse.ArgumentTypeError("grid must list at least one value")
    return vals


def _add_common(p, model=True):
    if model:
        p.add_argument("model", help="path to a model JSON file")
        p.add_argument("--epsilon", type=float, default=None, help="override epsilon")
        p.add_argument("--delta", type=float, default=None, help="override delta")
    p.add_argument("--seed", type=int, default=0, help="random stream seed")
    p.add_argument("--out", default="-", help="output path ('-' for stdout)")


def _add_run_flags(p, steps, burnin):
    p.add_argument("--steps", type=int, default=steps, help="total steps per replica")
    p.add_argument("--burnin", type=int, default=burnin, help="discarded prefix")
    p.add_argument("--z0", type=complex, default=0j, help="start point, e.g. 0.5+0.25j")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mobiusdisc",
        description="Random Moebius dynamics on the unit disc: orbits, radial "
        "laws, and Lyapunov expansions.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("orbit", help="emit one orbit as CSV")
    _add_common(p)
    _add_run_flags(p, steps=5000, burnin=0)
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("hist", help="radial histogram with analytic overlay")
    _add_common(p)
    _add_run_flags(p, steps=100_000, burnin=1000)
    p.add_argument("--bins", type=int, default=100)
    p.add_argument("--replicas", type=int, default=1)
    p.set_defaults(func=cmd_hist)

    p = sub.add_parser("lyap", help="Lyapunov estimate vs prediction as JSON")
    _add_common(p)
    _add_run_flags(p, steps=100_000, burnin=1000)
    p.add_argument("--replicas", type=int, default=4)
    p.set_defaults(func=cmd_lyap)

    p = sub.add_parser("scan", help="Lyapunov scan over an (epsilon, delta) grid")
    _add_common(p)
    _add_run_flags(p, steps=100_000, burnin=1000)
    p.add_argument("--epsilon-grid", type=_grid, required=True)
    p.add_argument("--delta-grid", type=_grid, required=True)
    p.add_argument("--replicas", type=int, default=4)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("constants", help="model constants as JSON")
    _add_common(p)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("check", help="run internal invariant suites")
    _add_common(p, model=False)
    p.add_argument(
        "--suite",
        action="append",
        choices=_SUITES,
        help="suite to run (repeatable; default: all)",
    )
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse: usage errors exit 2, --help exits 0
        return int(exc.code or 0)
    try:
        return args.func(args)
    except AnomalyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:  # EscapeError and other numeric failures
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
