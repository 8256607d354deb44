"""Domain model for Cauchy matrices and the rank-2 difference space.

A pair of point vectors ``(x, y)`` generates the difference matrix with
entries ``x_i - y_j``. When no difference vanishes, the entrywise
reciprocal of that matrix is a Cauchy matrix and ``(x, y)`` are its
Cauchy points. Points are determined only up to a common additive
shift; the normalized representative is the one whose combined entry
sum is zero, which also minimizes ``sum(x_i^2 + y_i^2)``.

The module also provides the shift-free parametrization of a difference
matrix by a zero-mean row part, a zero-mean column part, and a constant
offset. Up to a factor ``sqrt(n)`` that parametrization is an isometry,
which makes it perfectly conditioned as a representation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SeparationViolated
from .linalg import as_vector

#: Default relative tolerance used to declare two points coincident.
#: Differences below this scale reciprocate into entries too large to be
#: useful in double precision.
DEFAULT_SEPARATION_RTOL = 1e-12


def _frozen_vector(v) -> np.ndarray:
    out = as_vector(v).copy()
    out.setflags(write=False)
    return out


def _mean(v: np.ndarray) -> float:
    # fsum keeps normalization shifts exact even for the largest sweeps
    return math.fsum(v) / v.size


@dataclass(frozen=True, eq=False)
class GeneratorPair:
    """Point vectors (x, y) of equal length; not necessarily separated."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", _frozen_vector(self.x))
        object.__setattr__(self, "y", _frozen_vector(self.y))
        if self.x.size != self.y.size:
            raise ValueError(
                f"x and y must have equal length, got {self.x.size} and {self.y.size}"
            )

    @property
    def n(self) -> int:
        return self.x.size


@dataclass(frozen=True, eq=False)
class CauchyPoints:
    """Separated point vectors together with their minimum separation."""

    x: np.ndarray
    y: np.ndarray
    min_separation: float

    def __post_init__(self):
        object.__setattr__(self, "x", _frozen_vector(self.x))
        object.__setattr__(self, "y", _frozen_vector(self.y))
        if self.x.size != self.y.size:
            raise ValueError("x and y must have equal length")
        if not self.min_separation > 0.0:
            raise SeparationViolated(
                f"min_separation must be positive, got {self.min_separation}"
            )
        actual, _, _ = _min_abs_difference(self.x, self.y)
        if not math.isclose(actual, self.min_separation, rel_tol=1e-9, abs_tol=0.0):
            raise ValueError(
                f"stated min_separation {self.min_separation} disagrees with actual {actual}"
            )

    @property
    def n(self) -> int:
        return self.x.size

    def pair(self) -> GeneratorPair:
        return GeneratorPair(self.x, self.y)


@dataclass(frozen=True, eq=False)
class SeparationFailure:
    """Outcome of a failed separation check; a value, not an exception.

    ``i`` and ``j`` are the 1-based indices of an offending pair.
    """

    min_separation: float
    i: int
    j: int


@dataclass(frozen=True, eq=False)
class ReciprocalRep:
    """Shift-free parametrization: zero-sum parts and a constant offset."""

    xhat: np.ndarray
    yhat: np.ndarray
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "xhat", _frozen_vector(self.xhat))
        object.__setattr__(self, "yhat", _frozen_vector(self.yhat))
        if self.xhat.size != self.yhat.size:
            raise ValueError("xhat and yhat must have equal length")
        for name, v in (("xhat", self.xhat), ("yhat", self.yhat)):
            if abs(math.fsum(v)) > 1e-12 * float(np.linalg.norm(v)):
                raise ValueError(f"{name} must have (numerically) zero sum")

    @property
    def n(self) -> int:
        return self.xhat.size


def _min_abs_difference(x: np.ndarray, y: np.ndarray, block: int = 256):
    """Min of |x_i - y_j| over all pairs, with a 1-based argmin.

    Blocked so the n*n table is never materialized for large inputs.
    """
    best = math.inf
    bi = bj = 0
    for start in range(0, x.size, block):
        stop = min(start + block, x.size)
        diffs = np.abs(x[start:stop, None] - y[None, :])
        k = int(diffs.argmin())
        i, j = divmod(k, y.size)
        if diffs[i, j] < best:
            best = float(diffs[i, j])
            bi, bj = start + i, j
    return best, bi + 1, bj + 1


def difference_matrix(g: GeneratorPair) -> np.ndarray:
    """Matrix with entries ``x_i - y_j`` (rank at most 2)."""
    return np.subtract.outer(np.asarray(g.x), np.asarray(g.y))


def cauchy_matrix(p: CauchyPoints) -> np.ndarray:
    """Cauchy matrix with entries ``1 / (x_i - y_j)``."""
    D = difference_matrix(p.pair())
    if np.any(D == 0.0):
        i, j = np.argwhere(D == 0.0)[0]
        raise SeparationViolated(f"coincident points x_{i + 1} and y_{j + 1}")
    return 1.0 / D


def normalize_generators(g: GeneratorPair) -> GeneratorPair:
    """Shift both vectors so the combined entry sum is zero.

    The shift is ``(sum(x) + sum(y)) / (2n)``; the difference matrix is
    unchanged and the result minimizes ``sum(x_i^2 + y_i^2)`` among all
    equivalent pairs.
    """
    n = g.n
    shift = (math.fsum(g.x) + math.fsum(g.y)) / (2 * n)
    return GeneratorPair(g.x - shift, g.y - shift)


def check_cauchy_points(
    g: GeneratorPair, tol: float = DEFAULT_SEPARATION_RTOL
) -> CauchyPoints | SeparationFailure:
    """Decide whether the pair is usably separated.

    Returns CauchyPoints when the smallest difference exceeds
    ``tol * (1 + max(|x|_inf, |y|_inf))``, otherwise a SeparationFailure
    carrying the smallest difference and an offending index pair.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    s, i, j = _min_abs_difference(np.asarray(g.x), np.asarray(g.y))
    scale = 1.0 + max(float(np.abs(g.x).max()), float(np.abs(g.y).max()))
    if s > tol * scale:
        return CauchyPoints(g.x, g.y, s)
    return SeparationFailure(s, i, j)


def to_reciprocal_rep(g: GeneratorPair) -> ReciprocalRep:
    """Split a pair into zero-mean parts and the mean offset.

    The three pieces reconstruct the difference matrix as
    ``xhat 1^T - 1 yhat^T + alpha 1 1^T`` and are mutually orthogonal as
    matrices under the Frobenius inner product.
    """
    mx = _mean(g.x)
    my = _mean(g.y)
    return ReciprocalRep(g.x - mx, g.y - my, mx - my)


def from_reciprocal_rep(r: ReciprocalRep) -> np.ndarray:
    """Difference matrix ``xhat 1^T - 1 yhat^T + alpha 1 1^T``."""
    return np.subtract.outer(np.asarray(r.xhat), np.asarray(r.yhat)) + r.alpha


def rep_vector(r: ReciprocalRep) -> np.ndarray:
    """Stacked coordinates ``[xhat; yhat; sqrt(n) * alpha]``."""
    return np.concatenate([r.xhat, r.yhat, [math.sqrt(r.n) * r.alpha]])


def rep_norm_identity(g: GeneratorPair) -> tuple[float, float]:
    """Both sides of the isometry: Frobenius norm of the difference
    matrix versus ``sqrt(n)`` times the 2-norm of the rep coordinates."""
    lhs = float(np.linalg.norm(difference_matrix(g)))
    rhs = math.sqrt(g.n) * float(np.linalg.norm(rep_vector(to_reciprocal_rep(g))))
    return lhs, rhs


def rep_map_matrix(n: int) -> np.ndarray:
    """Explicit (2n+1) x 2n matrix sending ``[x; y]`` to the rep coordinates.

    Its nonzero singular values are sqrt(2) and 1, so the rep is a
    perfectly conditioned representation of the difference space.
    """
    if n < 1:
        raise ValueError("n must be positive")
    C = np.eye(n) - np.full((n, n), 1.0 / n)
    V = np.zeros((2 * n + 1, 2 * n))
    V[:n, :n] = C
    V[n : 2 * n, n:] = C
    V[2 * n, :n] = 1.0 / math.sqrt(n)
    V[2 * n, n:] = -1.0 / math.sqrt(n)
    return V


def cauchy_matrix_from_pair(g: GeneratorPair, tol: float = DEFAULT_SEPARATION_RTOL):
    """Convenience: separation check then Cauchy matrix.

    Returns ``(matrix, CauchyPoints)`` on success or ``(None, failure)``.
    """
    checked = check_cauchy_points(g, tol)
    if isinstance(checked, SeparationFailure):
        return None, checked
    return cauchy_matrix(checked), checked
