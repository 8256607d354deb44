"""Shared construction helpers for the test suite."""

from __future__ import annotations

import numpy as np

from cauchy_recovery import (
    CauchyPoints,
    PerturbationModel,
    ZeroEntry,
    cauchy_matrix,
    difference_matrix,
)
from cauchy_recovery.experiments import RECIPROCAL_KINDS, KINDS, apply_perturbation


def well_separated_points(n: int, rng: np.random.Generator) -> CauchyPoints:
    """Random interlaced points with min separation >= 1/(2n) by construction.

    Layout x_1 < y_1 < x_2 < y_2 < ... with every consecutive gap at
    least 0.5/n, so every pairwise difference is at least 0.5/n.
    """
    base = 3.0 * np.arange(1, n + 1) / n
    x = base + 0.5 * rng.random(n) / n
    y = x + (1.0 + rng.random(n)) / n
    s = float(np.abs(x[:, None] - y[None, :]).min())
    assert s >= 1.0 / (2 * n)
    return CauchyPoints(x, y, s)


def random_zero_free(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random matrix with entry magnitudes in [0.2, 2.2] and random signs."""
    mag = 0.2 + 2.0 * rng.random((n, n))
    sign = np.where(rng.random((n, n)) < 0.5, 1.0, -1.0)
    return mag * sign


def perturbed_cauchy(n: int, kind: str, delta: float, seed: int, rng: np.random.Generator):
    """One corpus instance: random separated points + one noise model.

    Returns ``(points, C, A)`` with C the exact Cauchy matrix and A the
    matrix the algorithms consume. Retries draws whose perturbed matrix
    acquires an exact zero (degenerate, outside every contract here).
    """
    for attempt in range(20):
        points = well_separated_points(n, rng)
        C = cauchy_matrix(points)
        # nudge delta on retries: exact zeros need an exact rational
        # alignment between delta and the model weights
        model = PerturbationModel(kind, delta * (1.0 - 1e-9) ** attempt, seed + attempt)
        try:
            if kind in RECIPROCAL_KINDS:
                Z = apply_perturbation(difference_matrix(points.pair()), model)
                A = 1.0 / Z
            else:
                A = apply_perturbation(C, model)
        except ZeroEntry:
            continue
        if np.any(A == 0.0):
            continue
        return points, C, A
    raise RuntimeError(f"could not draw a zero-free instance (n={n}, {kind}, {delta})")


def corpus(sizes, deltas, seed0: int = 0):
    """Iterate corpus instances spanning all perturbation kinds."""
    k = 0
    for n in sizes:
        for kind in KINDS:
            for delta in deltas:
                rng = np.random.default_rng(seed0 + 7919 * k)
                yield n, kind, delta, perturbed_cauchy(n, kind, delta, seed0 + k, rng)
                k += 1
