"""Shared fixtures: compile the orbit kernels once per session."""

from __future__ import annotations

import math

import pytest


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger numba compilation up front so per-test timings are honest."""
    from mobiusdisc import anderson_model
    from mobiusdisc.dynamics import (
        Observable,
        RunConfig,
        furstenberg_gamma,
        orbit_trajectory,
        run_orbit,
    )

    spec = anderson_model(-2.0 * math.cos(2.0), epsilon=0.01, delta=1e-4)
    cfg = RunConfig(seed=0, steps=8, burnin=2, replicas=1)
    run_orbit(spec, cfg, observables=(Observable(1, "s^1"),))
    orbit_trajectory(spec, cfg)
    furstenberg_gamma(spec, cfg)
