"""Dense real matrix and vector primitives used by every other module.

Matrices are plain ``numpy.ndarray`` objects with two dimensions and
``float64`` entries, stored row-major. Vectors are one-dimensional
``float64`` arrays. The helpers here validate shapes and finiteness,
compute the two norms used throughout the package, reciprocate
entrywise, and wrap the dense SVD and LU kernels behind the error
contracts the rest of the code relies on.
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg

from .errors import NoConvergence, Singular, ZeroEntry

# Pivots smaller than this multiple of the largest entry are treated as zero.
SOLVE_PIVOT_RTOL = 1e-14


def as_matrix(a) -> np.ndarray:
    """Validate and return ``a`` as a nonempty 2-d float64 array.

    Raises ValueError on wrong dimensionality, emptiness, or non-finite
    entries; these are programming errors, not data conditions.
    """
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d array, got ndim={m.ndim}")
    if m.size == 0:
        raise ValueError("matrix must be nonempty")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must all be finite")
    return m


def as_vector(a) -> np.ndarray:
    """Validate and return ``a`` as a nonempty 1-d float64 array."""
    v = np.asarray(a, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-d array, got ndim={v.ndim}")
    if v.size == 0:
        raise ValueError("vector must be nonempty")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must all be finite")
    return v


def require_square(A: np.ndarray) -> np.ndarray:
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    return A


def square_shape(A) -> np.ndarray:
    """Shape-only validation, for operations that must not scan all entries."""
    M = np.asarray(A, dtype=float)
    if M.ndim != 2 or M.size == 0 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a nonempty square matrix, got shape {getattr(M, 'shape', None)}")
    return M


def norm_max(A) -> float:
    """Largest entry modulus (Chebyshev norm)."""
    return float(np.abs(as_matrix(A)).max())


def norm_frobenius(A) -> float:
    """Square root of the sum of squared entries."""
    return float(np.linalg.norm(as_matrix(A)))


def first_zero_entry(A: np.ndarray) -> tuple[int, int] | None:
    """1-based position of the first exactly-zero entry, or None.

    Comparison is exact: tiny entries are legitimate data (they encode
    large reciprocals) and must not be flagged.
    """
    hits = np.argwhere(A == 0.0)
    if hits.size == 0:
        return None
    i, j = hits[0]
    return int(i) + 1, int(j) + 1


def reciprocal(A) -> np.ndarray:
    """Entrywise reciprocal of a zero-free matrix.

    Raises ZeroEntry naming the first offending position (1-based) if
    any entry is exactly zero.
    """
    A = as_matrix(A)
    hit = first_zero_entry(A)
    if hit is not None:
        raise ZeroEntry(*hit)
    return 1.0 / A


def singular_values(A) -> np.ndarray:
    """Singular values of ``A`` in nonincreasing order.

    Returns all ``min(rows, cols)`` values. Backed by the LAPACK dense
    SVD; the rare failure of its iteration surfaces as NoConvergence.
    """
    A = as_matrix(A)
    try:
        return np.linalg.svd(A, compute_uv=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergence(str(exc)) from exc


def solve_linear(M, b, overwrite_m: bool = False) -> np.ndarray:
    """Solve the square system ``M z = b`` by LU with partial pivoting.

    Raises Singular when a pivot falls below
    ``SOLVE_PIVOT_RTOL * norm_max(M)``, which signals that the system is
    numerically rank-deficient at working precision. With
    ``overwrite_m`` the caller gives up the matrix as factorization
    scratch space.
    """
    M = require_square(M)
    b = as_vector(b)
    if b.size != M.shape[0]:
        raise ValueError(f"right-hand side length {b.size} does not match matrix size {M.shape[0]}")
    threshold = SOLVE_PIVOT_RTOL * np.abs(M).max()
    with warnings.catch_warnings():
        # exact zero pivots are reported through the Singular error below
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(M, overwrite_a=overwrite_m, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if pivots.min() <= threshold:
        raise Singular(f"pivot {pivots.min():.3e} below threshold {threshold:.3e}")
    return scipy.linalg.lu_solve((lu, piv), b, check_finite=False)
