"""
The matrix side: su(1,1), its exponential, and the disc action
==============================================================

Everything downstream iterates 2x2 complex matrices T with
T* J T <= J (J = diag(1, -1)), which act on the closed unit disc by
z -> (a z + b) / (c z + d).  This script builds such matrices from
Lie-algebra coefficients and checks the geometry numerically.
"""

import numpy as np

from mobiusdisc import (
    J,
    act,
    coeffs_to_matrix,
    disc_defect,
    exp_su11,
    in_su11,
    in_su11_semigroup,
    phase_rotation,
    su11_defect,
)

rng = np.random.default_rng(7)

# A traceless generator A = p1 B1 + p2 B2 + p3 B3 satisfies A* J = -J A,
# so its exponential lands in SU(1,1) exactly (closed form, no expm).
p = rng.uniform(-1.0, 1.0, 3)
A = coeffs_to_matrix(p)
T = exp_su11(A)
print("generator coefficients:", np.round(p, 4))
print("membership residual |T*JT - J| =", np.max(np.abs(T.conj().T @ J @ T - J)))
print("det T - 1 =", abs(np.linalg.det(T) - 1.0))
print("in_su11:", in_su11(T))

# SU(1,1) preserves the unit circle; points inside stay inside.
for z in (0.0 + 0.0j, 0.3 - 0.4j, 0.99j):
    print(f"  |z| = {abs(z):.3f} -> |T.z| = {abs(act(T, z)):.6f}")

# Adding i*delta*Q with q3 >= |(q1, q2)| moves T into the interior of
# the semigroup: the disc is mapped strictly inside itself.  The defect
# x*(J - T*JT)x >= 0 quantifies the contraction at each point.
Q = coeffs_to_matrix((0.2, 0.1, 0.8))
S = phase_rotation(0.5) @ exp_su11(0.3 * A + 0.05j * Q)
print("\nsemigroup member:", in_su11_semigroup(S), "| group member:", in_su11(S))
print("largest eigenvalue of S*JS - J (<= 0 certifies the semigroup):",
      su11_defect(S))
for z in (0.9 + 0.0j, -0.7j):
    print(f"  defect at z = {z}: {disc_defect(S, z):.6f},",
          f"|S.z| = {abs(act(S, z)):.6f}")

# The boundary circle is no longer invariant: radii shrink.
angles = np.exp(1j * np.linspace(0.0, 2.0 * np.pi, 9, endpoint=False))
radii = [abs(act(S, complex(u))) for u in angles]
print("\nimage radii of 9 boundary points:", np.round(radii, 4))
