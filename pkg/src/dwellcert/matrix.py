"""Dense matrix kernels: powers, symmetric eigenvalue bounds, spectral radius.

Matrices are plain 2-D ``float64`` numpy arrays.  Symmetric matrices are
normalized with :func:`symmetrize` so that downstream code can rely on exact
symmetry.
"""

import math
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import NumericalFailure

DEFAULT_TOL = 1e-10
MAX_JACOBI_SWEEPS = 100


def as_matrix(a, name="matrix"):
    """Coerce to a finite 2-D float array."""
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"{name} must be a nonempty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def _square(a, name="matrix"):
    m = as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    return m


def symmetrize(a):
    """Return ``(a + a.T) / 2``; the result is exactly symmetric."""
    m = _square(a, "symmetric matrix")
    return 0.5 * (m + m.T)


def mat_pow(a, p):
    """``a**p`` by repeated squaring; ``a**0`` is the identity."""
    m = _square(a)
    if int(p) != p or p < 0:
        raise ValueError(f"exponent must be a nonnegative integer, got {p}")
    p = int(p)
    result = np.eye(m.shape[0])
    base = m.copy()
    first = True
    while p:
        if p & 1:
            result = base.copy() if first else result @ base
            first = False
        p >>= 1
        if p:
            base = base @ base
    return result


def sym_eigenvalues(s, tol=DEFAULT_TOL):
    """All eigenvalues of a symmetric matrix (ascending) by cyclic Jacobi."""
    m = symmetrize(s)
    if m.shape[0] == 1:
        return m[0].copy()
    vals, ok = _kernels.jacobi_eigvalsh(np.ascontiguousarray(m), float(tol), MAX_JACOBI_SWEEPS)
    if not ok:
        raise NumericalFailure(f"Jacobi iteration did not converge in {MAX_JACOBI_SWEEPS} sweeps")
    return np.sort(vals)


def max_sym_eigenvalue(s, tol=DEFAULT_TOL):
    """Largest eigenvalue of a symmetric matrix; ``s`` is negative definite iff < 0."""
    return float(sym_eigenvalues(s, tol)[-1])


def min_sym_eigenvalue(s, tol=DEFAULT_TOL):
    return float(sym_eigenvalues(s, tol)[0])


def _radius_2x2(m):
    # exact rational discriminant: float cancellation near a double root costs sqrt(eps)
    a, b, c, d = (Fraction(float(v)) for v in m.ravel())
    half_tr = (a + d) / 2
    disc = ((a - d) / 2) ** 2 + b * c
    if disc < 0:
        # complex pair, modulus sqrt(det)
        return math.sqrt(a * d - b * c)
    return abs(float(half_tr)) + math.sqrt(disc)


def spectral_radius(a, tol=DEFAULT_TOL):
    """max |lambda| over the eigenvalues of a general square matrix.

    2x2 inputs use the closed-form roots of the characteristic polynomial;
    larger inputs go through LAPACK's Hessenberg QR.
    """
    m = _square(a)
    n = m.shape[0]
    if n == 1:
        return abs(float(m[0, 0]))
    if n == 2:
        return _radius_2x2(m)
    try:
        vals = np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigenvalue iteration failed: {exc}") from exc
    return float(np.max(np.abs(vals)))
