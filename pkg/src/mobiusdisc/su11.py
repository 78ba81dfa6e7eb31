"""Linear algebra for the group SU(1,1) and the semigroup it generates.

SU(1,1) is the group of complex 2x2 matrices with determinant 1 that
preserve the indefinite form J = diag(1, -1); the semigroup SU_<=(1,1)
consists of determinant-1 matrices T with T* J T <= J, which map the
open unit disc into itself under the Moebius action (see `moebius`).

Everything here works on plain numpy arrays: matrices are complex128
arrays of shape (2, 2), Lie-algebra coefficient triples are float arrays
of shape (3,) relative to the basis B1, B2, B3 below.
"""

from __future__ import annotations

import cmath

import numpy as np

__all__ = [
    "J",
    "SYMPLECTIC",
    "CAYLEY",
    "CAYLEY_INV",
    "B1",
    "B2",
    "B3",
    "basis",
    "coeffs_to_matrix",
    "matrix_to_coeffs",
    "exp_su11",
    "log_traceless",
    "phase_rotation",
    "su11_defect",
    "su11_defect_extremes",
    "in_su11",
    "in_su11_semigroup",
    "cayley_conjugate",
]

# The indefinite metric preserved by SU(1,1).
J = np.diag([1.0, -1.0]).astype(complex)

# Standard symplectic/rotation form on R^2; satisfies i*SYMPLECTIC = CAYLEY* J CAYLEY.
SYMPLECTIC = np.array([[0.0, -1.0], [1.0, 0.0]], dtype=complex)

# Cayley transform intertwining SL(2,R) (upper half-plane) with SU(1,1) (disc).
CAYLEY = cmath.sqrt(-1j / 2) * np.array([[1.0, -1j], [1.0, 1j]])
CAYLEY_INV = np.linalg.inv(CAYLEY)

# Basis of the real Lie algebra su(1,1): traceless A with A[0,1] = conj(A[1,0])
# and A[0,0] purely imaginary.
B1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
B2 = np.array([[0.0, 1j], [-1j, 0.0]], dtype=complex)
B3 = np.array([[1j, 0.0], [0.0, -1j]], dtype=complex)

_BASIS = (B1, B2, B3)

# Below this value of |mu| = |sqrt(-det A)| the closed-form exponential
# switches to a short series for cosh(mu) and sinh(mu)/mu.
_SERIES_THRESHOLD = 1e-4


def basis(j: int) -> np.ndarray:
    """Return a copy of the basis element B_j of su(1,1), j in {1, 2, 3}."""
    if j not in (1, 2, 3):
        raise ValueError(f"basis index must be 1, 2 or 3, got {j}")
    return _BASIS[j - 1].copy()


def coeffs_to_matrix(coeffs) -> np.ndarray:
    """Map a real coefficient triple (c1, c2, c3) to c1*B1 + c2*B2 + c3*B3."""
    c1, c2, c3 = (float(c) for c in coeffs)
    return np.array([[1j * c3, c1 + 1j * c2], [c1 - 1j * c2, -1j * c3]])


def matrix_to_coeffs(A: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Invert `coeffs_to_matrix`; raise if A is not in su(1,1) within tol."""
    A = np.asarray(A, dtype=complex)
    c1 = A[1, 0].real
    c2 = -A[1, 0].imag
    c3 = A[0, 0].imag
    if np.max(np.abs(A - coeffs_to_matrix((c1, c2, c3)))) > tol:
        raise ValueError("matrix is not in the real span of B1, B2, B3")
    return np.array([c1, c2, c3])


def _cosh_sinhc(musq: complex) -> tuple[complex, complex]:
    """cosh(mu) and sinh(mu)/mu for mu = sqrt(musq), stable near mu = 0."""
    mu = cmath.sqrt(musq)
    if abs(mu) < _SERIES_THRESHOLD:
        # Truncation error ~ |mu|^6 / 5040 < 1e-27 at the threshold.
        ch = 1.0 + musq / 2.0 + musq * musq / 24.0
        shc = 1.0 + musq / 6.0 + musq * musq / 120.0
    else:
        ch = cmath.cosh(mu)
        shc = cmath.sinh(mu) / mu
    return ch, shc


def exp_su11(A: np.ndarray) -> np.ndarray:
    """Matrix exponential of a traceless 2x2 complex matrix, in closed form.

    Uses exp(A) = cosh(mu) Id + (sinh(mu)/mu) A with mu^2 = -det(A),
    which is exact for traceless A (Cayley-Hamilton gives A^2 = -det(A) Id).
    """
    A = np.asarray(A, dtype=complex)
    trace = A[0, 0] + A[1, 1]
    scale = max(1.0, float(np.max(np.abs(A))))
    if abs(trace) > 1e-12 * scale:
        raise ValueError(f"exp_su11 requires a traceless matrix, got trace {trace}")
    musq = -(A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0])
    ch, shc = _cosh_sinhc(musq)
    out = shc * A
    out[0, 0] += ch
    out[1, 1] += ch
    return out


def log_traceless(G: np.ndarray) -> np.ndarray:
    """Traceless logarithm of G in SL(2,C), the inverse of `exp_su11`.

    Writes G = cosh(mu) Id + sinh(mu)/mu * A and solves for A via the
    odd part S = (G - G^-1)/2 = (sinh(mu)/mu) A, with sinh(mu) recovered
    from det S; well conditioned near the identity.  Fails for G close
    to -Id, where no traceless logarithm is selected.
    """
    G = np.asarray(G, dtype=complex)
    det = G[0, 0] * G[1, 1] - G[0, 1] * G[1, 0]
    if abs(det - 1.0) > 1e-9:
        raise ValueError(f"log_traceless requires det = 1, got {det}")
    c = (G[0, 0] + G[1, 1]) / 2.0
    # G^-1 = [[d, -b], [-c, a]] for det 1, so (G - G^-1)/2 is the traceless part.
    S = np.array(
        [
            [(G[0, 0] - G[1, 1]) / 2.0, G[0, 1]],
            [G[1, 0], (G[1, 1] - G[0, 0]) / 2.0],
        ]
    )
    sh = cmath.sqrt(-(S[0, 0] * S[1, 1] - S[0, 1] * S[1, 0]))  # sinh(mu), either sign
    if abs(c + sh) < 1e-12:
        sh = -sh
    if abs(c + sh) < 1e-12:
        raise ValueError("matrix logarithm undefined near -identity")
    mu = cmath.log(c + sh)  # exp(mu) = cosh + sinh, consistent with both c and sh
    if abs(mu) < _SERIES_THRESHOLD:
        shc = 1.0 + mu * mu / 6.0 + (mu * mu) ** 2 / 120.0
    else:
        shc = cmath.sinh(mu) / mu
    if abs(shc) < 1e-7:
        # sinh(mu)/mu vanishes at mu = +-i pi, i.e. G = -Id, where no
        # traceless logarithm exists; nearby the division is hopeless.
        raise ValueError("matrix logarithm undefined near -identity")
    return S / shc


def phase_rotation(eta: float) -> np.ndarray:
    """The rotation R_eta = diag(e^{i eta}, e^{-i eta})."""
    ph = cmath.exp(1j * float(eta))
    return np.array([[ph, 0.0], [0.0, 1.0 / ph]])


def _defect_eigs(T: np.ndarray) -> tuple[float, float]:
    T = np.asarray(T, dtype=complex)
    H = T.conj().T @ J @ T - J
    mid = 0.5 * (H[0, 0].real + H[1, 1].real)
    rad = np.hypot(0.5 * (H[0, 0].real - H[1, 1].real), abs(H[0, 1]))
    return mid - rad, mid + rad


def su11_defect(T: np.ndarray) -> float:
    """Largest eigenvalue of the Hermitian matrix T* J T - J.

    A value <= tol certifies membership in the semigroup SU_<=(1,1)
    (together with det T = 1); both extreme eigenvalues within +-tol
    certify membership in the group SU(1,1).
    """
    return _defect_eigs(T)[1]


def su11_defect_extremes(T: np.ndarray) -> tuple[float, float]:
    """Smallest and largest eigenvalue of T* J T - J."""
    return _defect_eigs(T)


def _det_ok(T: np.ndarray, tol: float) -> bool:
    T = np.asarray(T, dtype=complex)
    return abs(T[0, 0] * T[1, 1] - T[0, 1] * T[1, 0] - 1.0) <= tol


def in_su11(T: np.ndarray, tol: float = 1e-10) -> bool:
    """True if T is in SU(1,1) within tol (form preserved and det = 1)."""
    lo, hi = _defect_eigs(T)
    return max(abs(lo), abs(hi)) <= tol and _det_ok(T, tol)


def in_su11_semigroup(T: np.ndarray, tol: float = 1e-10) -> bool:
    """True if T is in SU_<=(1,1) within tol (form contracted and det = 1)."""
    return su11_defect(T) <= tol and _det_ok(T, tol)


def cayley_conjugate(M: np.ndarray) -> np.ndarray:
    """Conjugate a matrix by the Cayley transform: CAYLEY @ M @ CAYLEY^-1.

    Sends SL(2,R) (half-plane picture) into SU(1,1) (disc picture); a
    rotation by angle k maps to diag(e^{-ik}, e^{ik}) = phase_rotation(-k).
    """
    return CAYLEY @ np.asarray(M, dtype=complex) @ CAYLEY_INV
