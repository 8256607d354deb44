"""Cauchyness measures, error certificates, and inequality checkers.

Two complementary measures quantify how far a zero-free matrix is from
being Cauchy: the Frobenius distance from its reciprocal to the
difference space (computed exactly by the orthogonal recovery), and the
third singular value of the reciprocal bordered by an all-ones row and
column, which vanishes exactly on Cauchy matrices. The certificates
here turn entrywise residuals and those measures into normwise error
bounds for recovered matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .displacement import displacement_residual_frobenius
from .errors import SizeTooLarge, ZeroEntry
from .linalg import (
    first_zero_entry,
    norm_frobenius,
    norm_max,
    require_square,
    singular_values,
)
from .model import (
    CauchyPoints,
    GeneratorPair,
    SeparationFailure,
    check_cauchy_points,
    difference_matrix,
)
from .projectors import recover_cross, recover_orthogonal

#: Grid parameters of the brute-force Chebyshev-distance search. The
#: final resolution is (4 / (grid - 1)) ** rounds * norm_max, around
#: 3e-12 of the input scale, so sandwich checks against the third
#: singular value keep headroom at noise levels down to 1e-9.
ORACLE_GRID = 801
ORACLE_ROUNDS = 5
ORACLE_MAX_SIZE = 3


@dataclass(frozen=True)
class APosterioriCertificate:
    """Error bounds from the entrywise residual of a candidate pair.

    ``beta`` is the largest entrywise deviation ``|1 - A_ij D_ij|``.
    When ``beta < 1`` the candidate points are provably separated and
    the relative reconstruction error in both norms is at most
    ``beta / (1 - beta)``; the remaining fields carry those bounds. When
    ``beta >= 1`` nothing is certified and the bounds are NaN.
    """

    beta: float
    valid: bool
    rel_error_bound: float
    separation_bound: float
    stability_bound_frob: float
    stability_bound_max: float


@dataclass(frozen=True)
class DiagnosticsReport:
    """Summary of all Cauchyness measures for one input matrix."""

    kappa_f: float
    beta_f: float
    sigma3: float
    residual_max_alg1: float
    residual_f_alg2: float
    norm_max_A: float
    norm_max_hinvA: float


@dataclass(frozen=True, eq=False)
class MaxPivotNormalization:
    """Scaled and permuted copy of a matrix with a unit-modulus corner."""

    matrix: np.ndarray
    scale: float
    row_perm: np.ndarray
    col_perm: np.ndarray


def _zero_free(A) -> np.ndarray:
    A = require_square(A)
    hit = first_zero_entry(A)
    if hit is not None:
        raise ZeroEntry(*hit)
    return A


def cauchy_distance_frobenius(A) -> float:
    """Frobenius distance from the reciprocal of ``A`` to the difference space.

    Computed exactly as the residual of the orthogonal recovery.
    """
    A = _zero_free(A)
    g = recover_orthogonal(A)
    return float(np.linalg.norm(1.0 / A - difference_matrix(g)))


def cauchy_distance_max_oracle(A, grid: int = ORACLE_GRID, rounds: int = ORACLE_ROUNDS) -> float:
    """Chebyshev distance from the reciprocal to the difference space, n <= 3.

    Brute-force nested grid refinement. For fixed column offsets the
    optimal row offsets have a closed form (the midpoint of each row's
    range), so the search runs over the column offsets only, gauge-fixed
    by pinning the first one. The coarse grid spans +-2 norm_max of the
    reciprocal around the row-interpolation start; each round shrinks to
    twice the previous spacing, reaching a final resolution below
    1e-6 norm_max.
    """
    A = _zero_free(A)
    n = A.shape[0]
    if n > ORACLE_MAX_SIZE:
        raise SizeTooLarge(f"oracle supports n <= {ORACLE_MAX_SIZE}, got {n}")
    Z = 1.0 / A
    if n == 1:
        return 0.0
    scale = float(np.abs(Z).max())

    def values_on_grid(axes: list[np.ndarray]) -> np.ndarray:
        # value at column offsets (0, t_1, ..., t_{n-1}) for every grid
        # combination; per-row running max/min keeps the temporaries at
        # the size of the grid itself
        def offset(j: int) -> np.ndarray:
            shape = [1] * (n - 1)
            shape[j - 1] = axes[j - 1].size
            return axes[j - 1].reshape(shape)

        total = None
        for i in range(n):
            hi = lo = Z[i, 0]
            for j in range(1, n):
                v = Z[i, j] + offset(j)
                hi = np.maximum(hi, v)
                lo = np.minimum(lo, v)
            spread = hi - lo
            total = spread if total is None else np.maximum(total, spread)
        return 0.5 * total

    center = Z[0, 0] - Z[0, :]
    center[0] = 0.0
    half = 2.0 * scale
    best = float(values_on_grid([np.array([center[j]]) for j in range(1, n)]).ravel()[0])
    for _ in range(rounds):
        axes = [center[j] + np.linspace(-half, half, grid) for j in range(1, n)]
        vals = values_on_grid(axes)
        flat = int(vals.argmin())
        if vals.ravel()[flat] < best:
            best = float(vals.ravel()[flat])
            idx = np.unravel_index(flat, vals.shape)
            center = np.concatenate([[0.0], [axes[k][idx[k]] for k in range(n - 1)]])
        half = 2.0 * (2.0 * half / (grid - 1))
    return best


def relative_error_certificate(A, g: GeneratorPair) -> APosterioriCertificate:
    """Certificate from the entrywise residual of candidate generators.

    With ``D`` the difference matrix of ``g`` and
    ``beta = max_ij |1 - A_ij D_ij|``: if ``beta < 1`` the points are
    separated by at least ``(1 - beta) / norm_max(A)`` and the Cauchy
    matrix they define satisfies
    ``|A - C| / |A| <= beta / (1 - beta)`` in both norms, with the
    stability bounds ``|C| <= |A| / (1 - beta)``.
    """
    A = _zero_free(A)
    D = difference_matrix(g)
    beta = float(np.abs(1.0 - A * D).max())
    if beta < 1.0:
        return APosterioriCertificate(
            beta=beta,
            valid=True,
            rel_error_bound=beta / (1.0 - beta),
            separation_bound=(1.0 - beta) / norm_max(A),
            stability_bound_frob=norm_frobenius(A) / (1.0 - beta),
            stability_bound_max=norm_max(A) / (1.0 - beta),
        )
    return APosterioriCertificate(
        beta=beta,
        valid=False,
        rel_error_bound=math.nan,
        separation_bound=math.nan,
        stability_bound_frob=math.nan,
        stability_bound_max=math.nan,
    )


def bordered_reciprocal(A) -> np.ndarray:
    """Reciprocal of ``A`` bordered by an all-ones row and column.

    The bordered matrix has rank at most 2 exactly when the reciprocal
    lies in the difference space, so its third singular value measures
    non-Cauchyness.
    """
    A = _zero_free(A)
    n = A.shape[0]
    Zh = np.empty((n + 1, n + 1))
    Zh[0, 0] = 0.0
    Zh[0, 1:] = 1.0
    Zh[1:, 0] = 1.0
    Zh[1:, 1:] = 1.0 / A
    return Zh


def third_singular_value(A) -> float:
    """Third singular value of the bordered reciprocal (0 for 1x1 input)."""
    s = singular_values(bordered_reciprocal(A))
    return float(s[2]) if s.size >= 3 else 0.0


def normalize_max_pivot(A) -> MaxPivotNormalization:
    """Scale to unit maximum modulus and pivot a maximal entry to the corner.

    Ties between maximal entries break toward the lexicographically
    smallest position. Returns the transformed matrix, the scale, and
    the row/column permutations (as index arrays) that were applied.
    """
    A = _zero_free(A)
    n = A.shape[0]
    scale = norm_max(A)
    absA = np.abs(A)
    i, j = np.argwhere(absA == absA.max())[0]
    row_perm = np.arange(n)
    col_perm = np.arange(n)
    row_perm[[0, i]] = row_perm[[i, 0]]
    col_perm[[0, j]] = col_perm[[j, 0]]
    normed = (A / scale)[np.ix_(row_perm, col_perm)]
    return MaxPivotNormalization(matrix=normed, scale=scale, row_perm=row_perm, col_perm=col_perm)


def cross_approximation_certificate(A) -> tuple[float, float]:
    """Residual of the cross recovery against its singular-value bound.

    Normalizes to a unit-modulus corner pivot, runs the cross recovery,
    and returns ``(residual_max, 6 * sigma3)`` where ``sigma3`` is the
    third singular value of the bordered reciprocal of the normalized
    matrix. The factor-6 bound presumes the corner is a near-maximal
    2x2 pivot of the bordered reciprocal; for small matrices whose
    entries span several orders of magnitude it can fail.
    """
    norm = normalize_max_pivot(A)
    An = norm.matrix
    g = recover_cross(An)
    residual_max = float(np.abs(1.0 / An - difference_matrix(g)).max())
    return residual_max, 6.0 * third_singular_value(An)


def max_two_by_two_determinant(A) -> float:
    """Largest 2x2 subdeterminant modulus of the bordered reciprocal.

    Evaluated on the max-pivot normalization, whose corner block has
    determinant exactly 1. When the returned value is at most 2, the
    corner is a volume-maximal pivot up to a factor 2 and the factor-6
    bound of cross_approximation_certificate is guaranteed; larger
    values explain its failures. Exhaustive over all row and column
    pairs, so restricted to n <= 20.
    """
    A = _zero_free(A)
    n = A.shape[0]
    if n > 20:
        raise SizeTooLarge(f"exhaustive pivot scan supports n <= 20, got {n}")
    Zh = bordered_reciprocal(normalize_max_pivot(A).matrix)
    m = n + 1
    rows = np.triu_indices(m, k=1)
    cols = np.triu_indices(m, k=1)
    a = Zh[rows[0]][:, cols[0]]
    b = Zh[rows[1]][:, cols[1]]
    c = Zh[rows[0]][:, cols[1]]
    d = Zh[rows[1]][:, cols[0]]
    return float(np.abs(a * b - c * d).max())


def third_singular_value_sandwich(A) -> tuple[float, float, float]:
    """Bracketing of sigma3 between the two Cauchyness distances.

    Returns ``(lower, sigma3, upper)`` evaluated on the max-pivot
    normalization: ``lower`` is the Chebyshev distance divided by 6 when
    the brute-force oracle applies (n <= 3) and NaN otherwise, and
    ``upper`` is the Frobenius distance. The upper inequality holds for
    every size; the caller asserts the lower one only when present.
    """
    norm = normalize_max_pivot(A)
    An = norm.matrix
    n = An.shape[0]
    lower = cauchy_distance_max_oracle(An) / 6.0 if n <= ORACLE_MAX_SIZE else math.nan
    return lower, third_singular_value(An), cauchy_distance_frobenius(An)


def diagnostics_report(A) -> DiagnosticsReport:
    """All Cauchyness measures of ``A`` in one record."""
    A = _zero_free(A)
    Z = 1.0 / A
    g1 = recover_cross(A)
    g2 = recover_orthogonal(A)
    kappa_f = float(np.linalg.norm(Z - difference_matrix(g2)))
    return DiagnosticsReport(
        kappa_f=kappa_f,
        beta_f=displacement_residual_frobenius(A),
        sigma3=third_singular_value(A),
        residual_max_alg1=float(np.abs(Z - difference_matrix(g1)).max()),
        residual_f_alg2=kappa_f,
        norm_max_A=norm_max(A),
        norm_max_hinvA=float(np.abs(Z).max()),
    )


def certified_recovery(A, g: GeneratorPair):
    """Certificate plus the separation check for candidate generators.

    Returns ``(certificate, points_or_failure)``; the separation check
    uses a zero tolerance because a valid certificate already implies a
    quantitative separation bound.
    """
    cert = relative_error_certificate(A, g)
    checked: CauchyPoints | SeparationFailure = check_cauchy_points(g, 0.0)
    return cert, checked
