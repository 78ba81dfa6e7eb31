"""
Checking expansion orders numerically
=====================================

The one-step map and its statistics admit truncated expansions in
(eps, delta) whose remainders are third order in eps and second order
in delta.  Orders are verified by halving: if the defect
|exact - truncated| is O(eps^3), halving eps must shrink it by ~8
(>= 7 with the subleading terms); if O(delta^2), halving delta shrinks
it by ~4.  The same style of identity check works for the stationary
density: integrating the generator of the radial motion against
rho_lambda must give zero for every smooth test function.
"""

import math

import numpy as np

from mobiusdisc import (
    RadialLaw,
    anderson_model,
    constants,
    expansion_defect_action,
    expansion_defect_lognorm,
    expansion_defect_modulus,
    second_order_balance,
    truncated_action,
    weak_identity_residual,
)
from mobiusdisc.dynamics import Observable, RunConfig, run_orbit
from mobiusdisc.gfamily import g_names

BAND_ENERGY = -2.0 * math.cos(2.0)
atom = anderson_model(BAND_ENERGY).atoms[0]

# --- remainder orders by parameter halving ------------------------------
grid = [r * np.exp(2j * math.pi * m / 5) for r in (0.25, 0.5, 0.75, 1.0) for m in range(5)]
print("defect ratios under halving (target ~8 for eps, ~4 for delta):")
for label, fn in (("action", expansion_defect_action),
                  ("modulus", expansion_defect_modulus),
                  ("log-norm", expansion_defect_lognorm)):
    d1 = max(fn(atom, 0.08, 0.0, z, w=1.0) for z in grid)
    d2 = max(fn(atom, 0.04, 0.0, z, w=1.0) for z in grid)
    d3 = max(fn(atom, 0.0, 8e-4, z, w=1.0) for z in grid)
    d4 = max(fn(atom, 0.0, 4e-4, z, w=1.0) for z in grid)
    print(f"  {label:9s} eps: {d1 / d2:5.2f}   delta: {d3 / d4:5.2f}")

# The truncation itself is cheap to inspect:
z = 0.3 + 0.2j
print(f"\ntruncated action at z = {z}: {truncated_action(atom, 0.05, 1e-4, z, w=1.0):.6f}")

# --- the second-order balance along a real orbit -------------------------
# In equilibrium the drift and diffusion terms of E g(s_n) cancel:
# 2 C delta E[s g'(s)] = D eps^2 E[(1-s)^2 (g'(s) + s g''(s))].
spec = anderson_model(BAND_ENERGY, epsilon=0.05, delta=1.2e-4)
cfg = RunConfig(seed=0, steps=2_000_000, burnin=1000)
acc = run_orbit(spec, cfg, (Observable(0, "s^1"), Observable(0, "log1p")))
c = constants(spec)
print("\nsecond-order balance (lhs vs rhs, drift vs diffusion):")
for g in ("s^1", "log1p"):
    lhs, rhs = second_order_balance(acc, c, spec.epsilon, spec.delta, g=g)
    print(f"  g = {g:6s}: {lhs:.4e} vs {rhs:.4e}"
          f"  (rel diff {abs(lhs - rhs) / max(lhs, rhs):.3f})")

# --- the stationary identity of the limiting density ---------------------
# L*rho_lambda = 0 in weak form: for every g,
# int [lambda s g'(s) - (1-s)^2 (g'(s) + s g''(s))] rho_lambda(s) ds = 0.
print("\nweak-identity residuals (all should be ~1e-16):")
for lam in (0.22, 1.05, 6.55):
    law = RadialLaw(lam)
    worst = max(abs(weak_identity_residual(law, name)) for name in g_names())
    print(f"  lambda = {lam:5.2f}: worst over {len(g_names())} test functions = {worst:.1e}")
