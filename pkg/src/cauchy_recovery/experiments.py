"""Reproducible test-problem generators, perturbation models, and sweeps.

Four perturbation models cover the interesting noise regimes: entrywise
multiplicative noise on the Cauchy matrix, additive noise on its
reciprocal, multiplicative noise concentrated on the trailing block,
and a rank-one perturbation along the worst-case direction of the cross
recovery. All randomness flows through a counter-based generator keyed
by an explicit seed, so a fixed seed reproduces the same sign pattern
for every noise level and identical CSV output byte for byte.
"""

from __future__ import annotations

import ctypes
import math
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
import threadpoolctl

from .errors import DegenerateFit, SizeTooSmall, ZeroEntry
from .linalg import first_zero_entry, require_square
from .model import (
    CauchyPoints,
    GeneratorPair,
    cauchy_matrix,
    cauchy_matrix_from_pair,
    difference_matrix,
)
from .projectors import ProjectorSpec, preset_spec, recover_cross, recover_oblique, recover_orthogonal
from .displacement import recover_displacement

MULTIPLICATIVE = "multiplicative"
ADDITIVE_RECIPROCAL = "additive_reciprocal"
UNBALANCED_MULTIPLICATIVE = "unbalanced_multiplicative"
WORST_CASE_SINGULAR = "worst_case_singular"

KINDS = (
    MULTIPLICATIVE,
    ADDITIVE_RECIPROCAL,
    UNBALANCED_MULTIPLICATIVE,
    WORST_CASE_SINGULAR,
)

#: Kinds whose perturbation acts on the reciprocal; the experiment
#: consumes the entrywise reciprocal of the perturbed matrix.
RECIPROCAL_KINDS = (ADDITIVE_RECIPROCAL, WORST_CASE_SINGULAR)

CSV_HEADER = "n,delta,alg,err_C_frob,err_A_frob,err_A_max,valid"
TIMING_CSV_HEADER = "n,mean_alg2,min_alg2,max_alg2,mean_alg4,min_alg4,max_alg4"


@dataclass(frozen=True)
class PerturbationModel:
    """Noise model: kind, magnitude, and the seed of the sign pattern."""

    kind: str
    delta: float
    seed: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown perturbation kind {self.kind!r}")
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class ExperimentRow:
    """One (size, noise level, algorithm) cell of a recovery sweep."""

    n: int
    delta: float
    algorithm: int
    err_c_frob: float
    err_a_frob: float
    err_a_max: float
    valid: bool


@dataclass(frozen=True)
class TimingRow:
    """Wall-clock statistics for one matrix size."""

    n: int
    mean_alg2: float
    min_alg2: float
    max_alg2: float
    mean_alg4: float
    min_alg4: float
    max_alg4: float


def interlaced_points(n: int) -> CauchyPoints:
    """Uniformly spaced points ``x_i = i/n`` interlaced with ``y = x + 1/(2n)``."""
    if n < 1:
        raise ValueError("n must be positive")
    x = np.arange(1, n + 1) / n
    return CauchyPoints(x, x + 1.0 / (2 * n), 1.0 / (2 * n))


def sign_pattern(shape: tuple[int, int], seed: int) -> np.ndarray:
    """Deterministic +-1 pattern from a counter-based generator.

    A sign is positive when the next uniform draw is below one half.
    The pattern depends on the seed and shape only, never on the noise
    level, so one seed fixes the pattern across a whole sweep.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    return np.where(rng.random(shape) < 0.5, 1.0, -1.0)


def worst_case_matrix(n: int) -> np.ndarray:
    """Unit-Frobenius rank-one direction hardest for the cross recovery.

    The matrix is the orthogonal projector onto the span of
    ``(1, -1/(n-1), ..., -1/(n-1))``; its entries are
    ``(n-1)/n`` at the corner, ``-1/n`` along the first row and column,
    and ``1/(n(n-1))`` inside. Its orthogonal projection onto the
    difference space is zero.
    """
    if n < 2:
        raise SizeTooSmall(f"worst-case direction needs n >= 2, got {n}")
    Y = np.full((n, n), 1.0 / (n * (n - 1)))
    Y[0, :] = -1.0 / n
    Y[:, 0] = -1.0 / n
    Y[0, 0] = (n - 1) / n
    return Y


def apply_perturbation(C_or_D, model: PerturbationModel, signs: np.ndarray | None = None) -> np.ndarray:
    """Perturb a matrix according to the model, in the matrix's own space.

    Multiplicative kinds expect the Cauchy matrix itself and return the
    noisy data matrix. Reciprocal kinds expect the difference matrix and
    return its perturbed copy, which the caller reciprocates to obtain
    the data matrix; a zero entry appearing there raises ZeroEntry.
    ``signs`` overrides the seeded sign pattern (test hook).
    """
    M = require_square(C_or_D)
    n = M.shape[0]
    d = model.delta
    if model.kind == WORST_CASE_SINGULAR:
        out = M + d * worst_case_matrix(n)
    else:
        if signs is None:
            signs = sign_pattern(M.shape, model.seed)
        if signs.shape != M.shape:
            raise ValueError("sign pattern shape does not match the matrix")
        if model.kind == MULTIPLICATIVE:
            out = (1.0 + d * signs) * M
        elif model.kind == ADDITIVE_RECIPROCAL:
            out = M + d * signs
        else:  # UNBALANCED_MULTIPLICATIVE
            i = np.arange(1, n + 1, dtype=float)
            weight = n / np.outer(n - i + 1, n - i + 1)
            out = (1.0 + d * signs * weight) * M
    if model.kind in RECIPROCAL_KINDS:
        hit = first_zero_entry(out)
        if hit is not None:
            raise ZeroEntry(*hit)
    return out


def child_seed(seed: int, index: int) -> int:
    """Per-cell seed derived from the sweep seed and the size index."""
    ss = np.random.SeedSequence([int(seed), int(index)])
    return int(ss.generate_state(1, np.uint64)[0])


def _resolve_spec(spec, n: int) -> ProjectorSpec:
    if isinstance(spec, str):
        return preset_spec(spec, n)
    if isinstance(spec, ProjectorSpec):
        if spec.n != n:
            raise ValueError(f"projector spec has length {spec.n}, expected {n}")
        return spec
    if callable(spec):
        return spec(n)
    raise TypeError("spec must be a preset name, a ProjectorSpec, or a factory")


def perturbed_problem(n: int, model: PerturbationModel):
    """Build one test problem: returns ``(C, A)`` for the model.

    ``C`` is the exact Cauchy matrix on the interlaced points and ``A``
    the perturbed data matrix the algorithms consume.
    """
    points = interlaced_points(n)
    C = cauchy_matrix(points)
    if model.kind in RECIPROCAL_KINDS:
        Z = apply_perturbation(difference_matrix(points.pair()), model)
        return C, 1.0 / Z
    return C, apply_perturbation(C, model)


def _recoveries(A: np.ndarray, spec: ProjectorSpec) -> list[tuple[int, GeneratorPair]]:
    return [
        (1, recover_cross(A)),
        (2, recover_orthogonal(A)),
        (3, recover_oblique(A, spec)),
        (4, recover_displacement(A)),
    ]


def run_recovery_sweep(
    sizes: Sequence[int],
    deltas: Sequence[float],
    kind: str,
    spec="decreasing",
    seed: int = 42,
) -> list[ExperimentRow]:
    """Run all four recovery algorithms over a (size, noise) grid.

    For each cell the perturbed matrix is built with a sign pattern that
    depends on (seed, size index) only, every algorithm is run, and
    relative errors against the original Cauchy matrix and against the
    data are recorded. Cells where an algorithm returns unseparated
    points keep their row with ``valid=False`` and NaN errors.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown perturbation kind {kind!r}")
    rows: list[ExperimentRow] = []
    for idx, n in enumerate(sizes):
        if n < 2:
            raise ValueError("sweep sizes must be at least 2")
        pspec = _resolve_spec(spec, n)
        cell_seed = child_seed(seed, idx)
        for d in deltas:
            model = PerturbationModel(kind, float(d), cell_seed)
            C, A = perturbed_problem(n, model)
            norm_c = float(np.linalg.norm(C))
            norm_a = float(np.linalg.norm(A))
            for alg_id, g in _recoveries(A, pspec):
                Ci, _ = cauchy_matrix_from_pair(g)
                if Ci is None:
                    rows.append(
                        ExperimentRow(n, float(d), alg_id, math.nan, math.nan, math.nan, False)
                    )
                    continue
                rows.append(
                    ExperimentRow(
                        n=n,
                        delta=float(d),
                        algorithm=alg_id,
                        err_c_frob=float(np.linalg.norm(C - Ci)) / norm_c,
                        err_a_frob=float(np.linalg.norm(A - Ci)) / norm_a,
                        err_a_max=float(np.abs(A - Ci).max()) / float(np.abs(Ci).max()),
                        valid=True,
                    )
                )
    return rows


def rows_to_csv(rows: Iterable[ExperimentRow]) -> str:
    """Render sweep rows in the shared CSV schema (17-digit floats)."""
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            f"{r.n},{r.delta:.17g},{r.algorithm},{r.err_c_frob:.17g},"
            f"{r.err_a_frob:.17g},{r.err_a_max:.17g},{str(r.valid).lower()}"
        )
    return "\n".join(lines) + "\n"


def _default_runner(fn: Callable[[np.ndarray], GeneratorPair], A: np.ndarray) -> float:
    start = time.perf_counter()
    fn(A)
    return time.perf_counter() - start


def _pin_allocator() -> None:
    """Keep large buffers on the heap so repeated runs reuse the pages.

    glibc adapts its mmap threshold up to 32 MB, which makes buffers
    near that size alternate between heap reuse and freshly faulted
    mappings from run to run. Pinning the threshold high removes that
    noise source. Best effort; silently skipped off glibc.
    """
    try:
        libc = ctypes.CDLL("libc.so.6")
        libc.mallopt(-3, 512 * 1024 * 1024)  # M_MMAP_THRESHOLD
    except (OSError, AttributeError):
        pass


def run_timing(
    sizes: Sequence[int],
    reps: int,
    runner: Callable[[Callable, np.ndarray], float] | None = None,
) -> list[TimingRow]:
    """Average wall-clock time of the orthogonal and displacement recoveries.

    Each size is timed ``reps`` times on the same perturbed test matrix
    (noise 1e-5, fixed seed) after one untimed warmup run; mean, min,
    and max are recorded. Runs are strictly sequential on one thread,
    with the numeric libraries' pools capped for the duration, so the
    measurements reflect kernel scaling rather than scheduling noise.
    A custom ``runner(fn, A) -> seconds`` replaces the clock in tests.
    """
    if not sizes:
        raise ValueError("sizes must be nonempty")
    if reps < 1:
        raise ValueError("reps must be at least 1")
    synthetic = runner is not None
    if runner is None:
        runner = _default_runner
        _pin_allocator()
    mats = []
    with threadpoolctl.threadpool_limits(limits=1):
        for idx, n in enumerate(sizes):
            model = PerturbationModel(MULTIPLICATIVE, 1e-5, child_seed(42, idx))
            _, A = perturbed_problem(n, model)
            mats.append(A)
            if not synthetic:
                recover_orthogonal(A)
                recover_displacement(A)
        # rep-major order: every sweep touches all sizes, so drift in
        # machine speed scales all sizes alike and cancels in the fits
        t2 = [[] for _ in sizes]
        t4 = [[] for _ in sizes]
        for _ in range(reps):
            for idx, A in enumerate(mats):
                t2[idx].append(runner(recover_orthogonal, A))
                t4[idx].append(runner(recover_displacement, A))
    return [
        TimingRow(
            n=n,
            mean_alg2=math.fsum(t2[idx]) / reps,
            min_alg2=min(t2[idx]),
            max_alg2=max(t2[idx]),
            mean_alg4=math.fsum(t4[idx]) / reps,
            min_alg4=min(t4[idx]),
            max_alg4=max(t4[idx]),
        )
        for idx, n in enumerate(sizes)
    ]


def timing_to_csv(rows: Iterable[TimingRow]) -> str:
    lines = [TIMING_CSV_HEADER]
    for r in rows:
        lines.append(
            f"{r.n},{r.mean_alg2:.17g},{r.min_alg2:.17g},{r.max_alg2:.17g},"
            f"{r.mean_alg4:.17g},{r.min_alg4:.17g},{r.max_alg4:.17g}"
        )
    return "\n".join(lines) + "\n"


def power_law_fit(ns: Sequence[float], times: Sequence[float]) -> tuple[float, float]:
    """Fit ``t = c * n**alpha`` by least squares on the log-log scale.

    Returns ``(c, alpha)``. Raises DegenerateFit when fewer than two
    distinct sizes are given.
    """
    ns = [float(v) for v in ns]
    times = [float(v) for v in times]
    if len(ns) != len(times):
        raise ValueError("ns and times must have equal length")
    if len(set(ns)) < 2:
        raise DegenerateFit("need at least two distinct sizes to fit a power law")
    if any(v <= 0 for v in ns) or any(v <= 0 for v in times):
        raise ValueError("sizes and times must be positive")
    lx = np.log(np.array(ns))
    ly = np.log(np.array(times))
    mx = lx.mean()
    my = ly.mean()
    slope = float(((lx - mx) @ (ly - my)) / ((lx - mx) @ (lx - mx)))
    intercept = my - slope * mx
    return math.exp(intercept), slope
