"""Moebius action of 2x2 complex matrices on the Riemann sphere.

A matrix T = [[a, b], [c, d]] acts by T.z = (az + b)/(cz + d), with the
conventions T.(-d/c) = infinity and T.infinity = a/c.  The sphere point
at infinity is represented by a complex number with infinite real part
(`INFINITY`); finite points are ordinary complex numbers.

The projective picture uses unit vectors x = (x1, x2) in C^2 with the
stereographic chart z = x1/x2 (infinity when x2 = 0); `SpherePoint`
wraps such a vector, and T acts by x -> Tx / ||Tx||.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "INFINITY",
    "SpherePoint",
    "lift",
    "act",
    "apply_projective",
    "disc_defect",
]

INFINITY = complex(math.inf, 0.0)

_POLE_TOL = 0.0  # exact-zero denominator maps to infinity; near-poles stay finite


def _is_infinite(z: complex) -> bool:
    return math.isinf(z.real) or math.isinf(z.imag)


@dataclass(frozen=True)
class SpherePoint:
    """A point of the Riemann sphere stored as a unit vector in C^2."""

    x1: complex
    x2: complex

    def __post_init__(self):
        norm = math.hypot(abs(self.x1), abs(self.x2))
        if norm == 0.0 or not math.isfinite(norm):
            raise ValueError("sphere point needs a finite nonzero representative")
        object.__setattr__(self, "x1", complex(self.x1) / norm)
        object.__setattr__(self, "x2", complex(self.x2) / norm)

    def chart(self) -> complex:
        """Stereographic chart z = x1/x2; INFINITY when x2 = 0."""
        if self.x2 == 0:
            return INFINITY
        return self.x1 / self.x2

    def vector(self) -> np.ndarray:
        return np.array([self.x1, self.x2])

    def radius_sq(self) -> float:
        """|z|^2 in the chart, computed projectively (inf when x2 = 0)."""
        b2 = abs(self.x2) ** 2
        if b2 == 0.0:
            return math.inf
        return abs(self.x1) ** 2 / b2

    def proj_distance(self, other: "SpherePoint") -> float:
        """Distance ignoring the overall phase: sqrt(1 - |<x, y>|^2)."""
        inner = self.x1 * other.x1.conjugate() + self.x2 * other.x2.conjugate()
        return math.sqrt(max(0.0, 1.0 - min(1.0, abs(inner) ** 2)))


def lift(z: complex) -> SpherePoint:
    """Unit-vector representative of a chart point; lift(INFINITY) = (1, 0)."""
    z = complex(z)
    if _is_infinite(z):
        return SpherePoint(1.0, 0.0)
    return SpherePoint(z, 1.0)


def act(T: np.ndarray, z: complex) -> complex:
    """Moebius action T.z = (az + b)/(cz + d) with the pole conventions.

    T.(-d/c) = INFINITY and T.INFINITY = a/c; for c = 0 infinity is fixed.
    """
    T = np.asarray(T, dtype=complex)
    a, b = T[0, 0], T[0, 1]
    c, d = T[1, 0], T[1, 1]
    z = complex(z)
    if _is_infinite(z):
        if c == 0:
            return INFINITY
        return a / c
    den = c * z + d
    if abs(den) <= _POLE_TOL:
        return INFINITY
    return (a * z + b) / den


def apply_projective(T: np.ndarray, x: SpherePoint) -> SpherePoint:
    """Projective action x -> Tx / ||Tx|| on unit vectors."""
    T = np.asarray(T, dtype=complex)
    y1 = T[0, 0] * x.x1 + T[0, 1] * x.x2
    y2 = T[1, 0] * x.x1 + T[1, 1] * x.x2
    return SpherePoint(y1, y2)


def disc_defect(T: np.ndarray, z: complex) -> float:
    """How much T expands the disc form at z, as a signed number.

    Returns (1 - |T.z|^2) |cz + d|^2 - (1 - |z|^2); this is
    -(z, 1)* (T* J T - J) (z, 1)^T, so it is >= 0 for every z when T
    lies in SU_<=(1,1) and identically 0 on SU(1,1).
    """
    T = np.asarray(T, dtype=complex)
    z = complex(z)
    if _is_infinite(z):
        raise ValueError("disc_defect is defined for finite chart points")
    num = T[0, 0] * z + T[0, 1]
    den = T[1, 0] * z + T[1, 1]
    return (abs(den) ** 2 - abs(num) ** 2) - (1.0 - abs(z) ** 2)
