"""
The growth rate and its small-parameter expansion
=================================================

The top Lyapunov exponent gamma of the matrix product T_n ... T_1
admits the second-order expansion gamma = C delta + D epsilon^2 + ...
with both constants computable in closed form from the model.  Two
independent estimators verify it below:

* `lyapunov_estimate` accumulates log ||T_n x_{n-1}|| along replicas;
* `furstenberg_gamma` averages the exact one-step expectation
  E log ||T x|| over the orbit (the matrix expectation is a finite
  atom sum plus Gauss-Legendre quadrature, so only the orbit is noisy).
"""

import math

from mobiusdisc import anderson_model, constants, gamma_prediction, gamma_residual
from mobiusdisc.dynamics import RunConfig, furstenberg_gamma, lyapunov_estimate

BAND_ENERGY = -2.0 * math.cos(2.0)

spec = anderson_model(BAND_ENERGY, epsilon=0.05, delta=1.2e-4)
c = constants(spec)
print(f"model constants: C = {c.C:.6f}, D = {c.D:.6f}")
print(f"prediction C delta + D eps^2 = {gamma_prediction(spec):.6e}\n")

cfg = RunConfig(seed=0, steps=400_000, burnin=10_000, replicas=6)
gamma_hat, stderr = lyapunov_estimate(spec, cfg)
gamma_fur, fur_stderr = furstenberg_gamma(spec, cfg, return_stderr=True)
print(f"replica estimator:     {gamma_hat:.6e} +- {stderr:.1e}")
print(f"one-step expectation:  {gamma_fur:.6e} +- {fur_stderr:.1e}")

pred, resid = gamma_residual(spec, gamma_hat)
print(f"residual vs prediction: {resid:+.2e}  ({resid / stderr:+.1f} stderr)\n")

# The expansion degrades gracefully: scan epsilon at fixed delta and
# watch the residual stay third-order small.
print("epsilon   gamma_hat      prediction     residual")
for eps in (0.02, 0.05, 0.1, 0.2):
    spec_e = anderson_model(BAND_ENERGY, epsilon=eps, delta=1.2e-4)
    g, s = lyapunov_estimate(spec_e, cfg)
    p = gamma_prediction(spec_e)
    print(f"  {eps:5.3f}  {g:.6e}   {p:.6e}   {g - p:+.2e} +- {s:.0e}")

# The residual grows faster than the prediction: by eps = 0.2 the
# quadratic form is only accurate to a couple of percent.  That is the
# regime where the radial law (demo 03) has lambda << 1 and the orbit
# hugs the boundary.
