"""Displacement-based recovery: minimize the residual of the defining equation.

A Cauchy matrix with points ``(x, y)`` is the unique solution of
``Diag(x) A - A Diag(y) = ones``. Minimizing the Frobenius norm of
``Diag(x) A - A Diag(y) - ones`` over all point pairs therefore yields
both a Cauchyness measure and a recovery algorithm. The minimization is
a linear least-squares problem; eliminating ``x`` reduces its normal
equations to an n-by-n system whose matrix is a singular M-matrix with
the all-ones nullvector, handled by a rank-one shift.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import blas as _blas

from .errors import DimensionMismatch, Singular, ZeroEntry
from .linalg import first_zero_entry, norm_max, require_square, solve_linear
from .model import GeneratorPair, difference_matrix, normalize_generators


@dataclass(frozen=True, eq=False)
class NormalEquationParts:
    """Blocks of the normal equations of the displacement least squares.

    ``B`` is the entrywise square of the data matrix, ``d1``/``d2`` its
    row/column sums, and ``b1``/``b2`` the row/column sums of the data
    matrix itself.
    """

    B: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    b1: np.ndarray
    b2: np.ndarray


def apply_displacement(A, g: GeneratorPair) -> np.ndarray:
    """Evaluate ``Diag(x) A - A Diag(y)``, entrywise ``A_ij (x_i - y_j)``."""
    A = require_square(A)
    if A.shape[0] != g.n:
        raise DimensionMismatch(
            f"matrix size {A.shape[0]} does not match generator length {g.n}"
        )
    return A * difference_matrix(g)


def normal_equation_parts(A) -> NormalEquationParts:
    """Assemble the blocks of the displacement normal equations."""
    A = require_square(A)
    B = A * A
    if B.min() <= 0.0:
        hit = first_zero_entry(A)
        if hit is not None:
            raise ZeroEntry(*hit)
        # nonzero entry whose square underflows: the scaling is degenerate
        raise Singular("an entry is too small to square in double precision")
    return NormalEquationParts(
        B=B,
        d1=B.sum(axis=1),
        d2=B.sum(axis=0),
        b1=A.sum(axis=1),
        b2=A.sum(axis=0),
    )


def _schur_system(parts: NormalEquationParts, shift: float = 0.0):
    """Reduced system for y: eliminate x from the normal equations.

    Returns ``(S, c, G)`` with ``S = Diag(d2) - B^T Diag(d1)^-1 B``
    minus a uniform ``shift``, ``c = B^T Diag(d1)^-1 b1 - b2``, and the
    row-scaled matrix ``G = Diag(d1)^-1 B`` reused by the caller to
    back out the eliminated block. Without the shift, S is symmetric
    with ``S 1 = 0``.

    The product is accumulated by one BLAS call into a Fortran-ordered
    matrix prefilled with the shift, so the subsequent factorization
    can work fully in place.
    """
    B, d1 = parts.B, parts.d1
    G = B / d1[:, None]
    base = np.full(B.shape, -shift, order="F")
    # transposed views are Fortran-contiguous, so no operand is copied
    S = _blas.dgemm(-1.0, G.T, B.T, beta=1.0, c=base, trans_b=1, overwrite_c=1)
    idx = np.arange(B.shape[0])
    S[idx, idx] += parts.d2
    c = G.T @ parts.b1 - parts.b2
    return S, c, G


def recover_displacement(A) -> GeneratorPair:
    """Recover normalized generators minimizing the displacement residual.

    Solves the reduced system through the rank-one shift
    ``S - (1/n) ones``: the shifted matrix is nonsingular whenever the
    data is nondegenerate, and its solution is the zero-sum solution of
    ``S y = c``. The generators are then completed from the eliminated
    block and shifted to the normalized representative.

    Raises Singular when the shifted system is numerically singular,
    which signals degenerate data beyond the known nullvector.
    """
    A = require_square(A)
    n = A.shape[0]
    parts = normal_equation_parts(A)
    S, c, G = _schur_system(parts, shift=1.0 / n)
    y = solve_linear(S, c, overwrite_m=True)
    x = parts.b1 / parts.d1 + G @ y
    return normalize_generators(GeneratorPair(x, y))


def displacement_residual_frobenius(A) -> float:
    """Minimal Frobenius norm of ``Diag(x) A - A Diag(y) - ones``.

    Zero exactly when ``A`` is a Cauchy matrix.
    """
    A = require_square(A)
    g = recover_displacement(A)
    return float(np.linalg.norm(apply_displacement(A, g) - 1.0))


def displacement_distance_sandwich(A, distance_f: float) -> tuple[float, float, float]:
    """Bracketing of the displacement residual by the Frobenius distance.

    Returns ``(lower, upper, residual)`` where
    ``lower = distance_f / norm_max(reciprocal(A))`` and
    ``upper = distance_f * norm_max(A)``; the caller asserts
    ``lower <= residual <= upper``.
    """
    if distance_f < 0:
        raise ValueError("distance_f must be nonnegative")
    A = require_square(A)
    hit = first_zero_entry(A)
    if hit is not None:
        raise ZeroEntry(*hit)
    recip_max = float(np.abs(1.0 / A).max())
    lower = distance_f / recip_max
    upper = distance_f * norm_max(A)
    return lower, upper, displacement_residual_frobenius(A)


def normal_matrix(parts: NormalEquationParts) -> np.ndarray:
    """Full 2n x 2n normal-equation matrix assembled from the blocks."""
    n = parts.d1.size
    M = np.zeros((2 * n, 2 * n))
    M[:n, :n] = np.diag(parts.d1)
    M[:n, n:] = -parts.B
    M[n:, :n] = -parts.B.T
    M[n:, n:] = np.diag(parts.d2)
    return M


def normal_rhs(parts: NormalEquationParts) -> np.ndarray:
    """Right-hand side ``[b1; -b2]`` of the full normal equations."""
    return np.concatenate([parts.b1, -parts.b2])
