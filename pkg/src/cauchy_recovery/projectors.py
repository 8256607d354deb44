"""Projectors onto the difference space and the recovery algorithms built on them.

Every linear projector onto the space of difference matrices has the
form ``X -> X - M_v X M_w^T`` where ``M_u = I - 1 u^T`` and the weight
vectors ``v, w`` have unit entry sums. Reading one weighted row and one
weighted column of the projected reciprocal recovers generator vectors;
the classic first-row/first-column scheme and the Frobenius-orthogonal
scheme are the special cases ``v = w = e_1`` and ``v = w = 1/n``.

The a-priori bound constants computed here certify how far each
projected result can be from the best approximation in either norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, SpecInvalid, ZeroEntry
from .linalg import as_vector, reciprocal, require_square, square_shape
from .model import GeneratorPair, normalize_generators

#: Tolerance on |sum(v) - 1| accepted for projector weight vectors.
UNIT_SUM_TOL = 1e-12


def _frozen_vector(v) -> np.ndarray:
    out = as_vector(v).copy()
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class ProjectorSpec:
    """Weight vectors (v, w), each with unit entry sum."""

    v: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "v", _frozen_vector(self.v))
        object.__setattr__(self, "w", _frozen_vector(self.w))
        if self.v.size != self.w.size:
            raise SpecInvalid("v and w must have equal length")
        for name, u in (("v", self.v), ("w", self.w)):
            err = abs(math.fsum(u) - 1.0)
            if err > UNIT_SUM_TOL:
                raise SpecInvalid(f"entry sum of {name} deviates from 1 by {err:.3e}")

    @property
    def n(self) -> int:
        return self.v.size


@dataclass(frozen=True)
class BoundConstants:
    """Certified multipliers for the a-priori recovery error bounds.

    alpha_max bounds the Chebyshev-norm amplification, alpha_frob the
    Frobenius-norm amplification, and nu the constant in the relative
    normwise bounds (equal to alpha_max).
    """

    alpha_max: float
    alpha_frob: float
    nu: float


def spec_e1(n: int) -> ProjectorSpec:
    """First-coordinate weights; reproduces the row/column cross scheme."""
    e = np.zeros(n)
    e[0] = 1.0
    return ProjectorSpec(e, e)


def spec_uniform(n: int) -> ProjectorSpec:
    """Uniform weights 1/n; gives the Frobenius-orthogonal projector."""
    u = np.full(n, 1.0 / n)
    return ProjectorSpec(u, u)


def spec_decreasing(n: int) -> ProjectorSpec:
    """Positive, uniformly decreasing weights 2(n-j+1)/(n(n+1)).

    Numerators are built in exact integer arithmetic and divided once,
    so the unit sum holds to a few ulp.
    """
    numer = np.array([2 * (n - j + 1) for j in range(1, n + 1)], dtype=float)
    u = numer / (n * (n + 1))
    return ProjectorSpec(u, u)


PRESETS = {"e1": spec_e1, "uniform": spec_uniform, "decreasing": spec_decreasing}


def preset_spec(name: str, n: int) -> ProjectorSpec:
    try:
        factory = PRESETS[name]
    except KeyError:
        raise SpecInvalid(f"unknown projector preset {name!r}") from None
    return factory(n)


def centering_matrix(u) -> np.ndarray:
    """The operator ``I - 1 u^T`` that subtracts the u-weighted average."""
    u = as_vector(u)
    return np.eye(u.size) - np.outer(np.ones(u.size), u)


def centering_operator_norms(u) -> tuple[float, float]:
    """Infinity norm of ``I - 1 u^T`` and an upper bound on its 2-norm.

    The infinity norm equals ``1 + |u|_1`` whenever some entry of u is
    positive (always the case for unit-sum weights); otherwise that
    value is still an upper bound. The 2-norm bound is
    ``1 + sqrt(n) * |u - 1/n|_2``.
    """
    u = as_vector(u)
    n = u.size
    inf_norm = 1.0 + float(np.abs(u).sum())
    two_norm_bound = 1.0 + math.sqrt(n) * float(np.linalg.norm(u - 1.0 / n))
    return inf_norm, two_norm_bound


def bound_constants(spec: ProjectorSpec) -> BoundConstants:
    """Computable a-priori bound constants for a given projector."""
    n = spec.n
    alpha_max = (1.0 + float(np.abs(spec.v).sum())) * (1.0 + float(np.abs(spec.w).sum()))
    alpha_frob = (1.0 + math.sqrt(n) * float(np.linalg.norm(spec.v - 1.0 / n))) * (
        1.0 + math.sqrt(n) * float(np.linalg.norm(spec.w - 1.0 / n))
    )
    return BoundConstants(alpha_max=alpha_max, alpha_frob=alpha_frob, nu=alpha_max)


def oblique_project(X, spec: ProjectorSpec) -> np.ndarray:
    """Apply the projector ``X - M_v X M_w^T`` onto the difference space.

    Evaluated in expanded rank-structured form
    ``1 v^T X + X w 1^T - (v^T X w) 1 1^T`` in O(n^2) operations.
    """
    X = require_square(X)
    if X.shape[0] != spec.n:
        raise DimensionMismatch(
            f"matrix size {X.shape[0]} does not match spec size {spec.n}"
        )
    col = X @ spec.w
    row = X.T @ spec.v
    corner = float(spec.v @ col)
    return np.add.outer(col, row) - corner


def recover_cross(A) -> GeneratorPair:
    """Recover normalized generators from the first row and column only.

    Reads ``2n - 1`` entries of ``A`` and never forms the full
    reciprocal, so the cost is O(n); validation is likewise restricted
    to the touched entries. Equivalent to projecting the reciprocal
    with the first-coordinate weights.
    """
    A = square_shape(A)
    n = A.shape[0]
    if not (np.all(np.isfinite(A[0, :])) and np.all(np.isfinite(A[1:, 0]))):
        raise ValueError("matrix entries must all be finite")
    zero_row = np.nonzero(A[0, :] == 0.0)[0]
    if zero_row.size:
        raise ZeroEntry(1, int(zero_row[0]) + 1)
    zero_col = np.nonzero(A[1:, 0] == 0.0)[0]
    if zero_col.size:
        raise ZeroEntry(int(zero_col[0]) + 2, 1)
    y = -1.0 / A[0, :]
    x = np.empty(n)
    x[0] = 0.0
    x[1:] = 1.0 / A[1:, 0] + y[0]
    return normalize_generators(GeneratorPair(x, y))


def recover_orthogonal(A) -> GeneratorPair:
    """Recover normalized generators minimizing the Frobenius distance
    between the reciprocal of ``A`` and the difference space.

    Row and column averages of the reciprocal give the generators; the
    residual is Frobenius-orthogonal to every difference matrix.
    """
    A = require_square(A)
    n = A.shape[0]
    Z = reciprocal(A)
    r = Z @ np.full(n, 1.0 / n)
    c = Z.T @ np.full(n, 1.0 / n)
    alpha = math.fsum(r) / (2 * n)
    return GeneratorPair(r - alpha, alpha - c)


def recover_oblique(A, spec: ProjectorSpec) -> GeneratorPair:
    """Recover normalized generators through a parametrized projector.

    Implemented with two matrix-vector products against the reciprocal,
    computed once; O(n^2) total. With first-coordinate weights this
    reproduces recover_cross, with uniform weights recover_orthogonal.
    """
    A = require_square(A)
    if A.shape[0] != spec.n:
        raise DimensionMismatch(
            f"matrix size {A.shape[0]} does not match spec size {spec.n}"
        )
    Z = reciprocal(A)
    y = -(Z.T @ spec.v)
    theta = float(y @ spec.w)
    x = theta + Z @ spec.w
    return normalize_generators(GeneratorPair(x, y))
