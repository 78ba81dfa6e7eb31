"""Built-in radial test functions g(s) on [0, 1] with two derivatives.

The family is curated so that every member is C^3 on [0, 1]: monomials
s^m up to degree six, log(1+s), 1/(1+s), and the quintic smooth step.
Numeric ids are shared with the compiled orbit kernels, which evaluate
g' and g'' inline; `GFunc` carries vectorized references for analysis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["GFunc", "g_names", "get_g", "g_id", "MONOMIAL_MAX_DEGREE"]

MONOMIAL_MAX_DEGREE = 6

_ALIASES = {"1": "s^0", "s": "s^1"}


@dataclass(frozen=True)
class GFunc:
    """A radial test function with its first two derivatives."""

    name: str
    gid: int
    g: Callable[[np.ndarray], np.ndarray]
    dg: Callable[[np.ndarray], np.ndarray]
    d2g: Callable[[np.ndarray], np.ndarray]


def _monomial(m: int) -> GFunc:
    def g(s, m=m):
        return np.asarray(s) ** m if m else np.ones_like(np.asarray(s, dtype=float))

    def dg(s, m=m):
        s = np.asarray(s, dtype=float)
        return m * s ** (m - 1) if m >= 1 else np.zeros_like(s)

    def d2g(s, m=m):
        s = np.asarray(s, dtype=float)
        return m * (m - 1) * s ** (m - 2) if m >= 2 else np.zeros_like(s)

    return GFunc(f"s^{m}", m, g, dg, d2g)


def _log1p() -> GFunc:
    return GFunc(
        "log1p",
        MONOMIAL_MAX_DEGREE + 1,
        lambda s: np.log1p(np.asarray(s, dtype=float)),
        lambda s: 1.0 / (1.0 + np.asarray(s, dtype=float)),
        lambda s: -1.0 / (1.0 + np.asarray(s, dtype=float)) ** 2,
    )


def _inv1p() -> GFunc:
    return GFunc(
        "inv1p",
        MONOMIAL_MAX_DEGREE + 2,
        lambda s: 1.0 / (1.0 + np.asarray(s, dtype=float)),
        lambda s: -1.0 / (1.0 + np.asarray(s, dtype=float)) ** 2,
        lambda s: 2.0 / (1.0 + np.asarray(s, dtype=float)) ** 3,
    )


def _smoothstep() -> GFunc:
    # 6 s^5 - 15 s^4 + 10 s^3: the C^2 quintic step with flat endpoints.
    return GFunc(
        "smoothstep",
        MONOMIAL_MAX_DEGREE + 3,
        lambda s: ((6.0 * np.asarray(s, dtype=float) - 15.0) * np.asarray(s, dtype=float) + 10.0)
        * np.asarray(s, dtype=float) ** 3,
        lambda s: 30.0 * np.asarray(s, dtype=float) ** 2 * (np.asarray(s, dtype=float) - 1.0) ** 2,
        lambda s: 60.0
        * np.asarray(s, dtype=float)
        * (2.0 * np.asarray(s, dtype=float) - 1.0)
        * (np.asarray(s, dtype=float) - 1.0),
    )


_FAMILY = tuple(
    [_monomial(m) for m in range(MONOMIAL_MAX_DEGREE + 1)]
    + [_log1p(), _inv1p(), _smoothstep()]
)
_BY_NAME = {f.name: f for f in _FAMILY}


def g_names() -> tuple[str, ...]:
    """Canonical names of the built-in family, in id order."""
    return tuple(f.name for f in _FAMILY)


def get_g(name: str) -> GFunc:
    key = _ALIASES.get(name, name)
    try:
        return _BY_NAME[key]
    except KeyError:
        raise ValueError(f"unknown test function {name!r}; choose from {g_names()}") from None


def g_id(name: str) -> int:
    return get_g(name).gid
