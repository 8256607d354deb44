import math

import numpy as np
import pytest

from cauchy_recovery import (
    DimensionMismatch,
    GeneratorPair,
    ProjectorSpec,
    SpecInvalid,
    ZeroEntry,
    bound_constants,
    cauchy_matrix,
    centering_matrix,
    centering_operator_norms,
    check_cauchy_points,
    difference_matrix,
    interlaced_points,
    norm_max,
    oblique_project,
    recover_cross,
    recover_oblique,
    recover_orthogonal,
    singular_values,
    spec_decreasing,
    spec_e1,
    spec_uniform,
)
from cauchy_recovery.experiments import PerturbationModel, apply_perturbation

from conftest import random_zero_free, well_separated_points


def random_spec(n, rng):
    v = rng.random(n) + 0.05
    w = rng.random(n) + 0.05
    return ProjectorSpec(v / v.sum(), w / w.sum())


def brute_force_project(X, v, w):
    """Reference route: apply X - M_v X M_w^T with explicit matrices."""
    Mv = centering_matrix(v)
    Mw = centering_matrix(w)
    return X - Mv @ X @ Mw.T


def hand_alg_cross(A):
    """Line-by-line scalar re-implementation of the cross recovery."""
    n = A.shape[0]
    y = [-1.0 / A[0, i] for i in range(n)]
    x = [0.0] + [1.0 / A[i, 0] + y[0] for i in range(1, n)]
    alpha = sum(x) / (2 * n) + sum(y) / (2 * n)
    return np.array([v - alpha for v in x]), np.array([v - alpha for v in y])


def hand_alg_orthogonal(A):
    n = A.shape[0]
    Z = 1.0 / A
    r = Z.sum(axis=1) / n
    c = Z.sum(axis=0) / n
    alpha = r.sum() / (2 * n)
    return r - alpha, alpha - c


def test_spec_validation():
    with pytest.raises(SpecInvalid):
        ProjectorSpec([0.5, 0.4], [0.5, 0.5])
    with pytest.raises(SpecInvalid):
        ProjectorSpec([0.5, 0.5], [1.0])
    s = spec_decreasing(50)
    assert abs(math.fsum(s.v) - 1.0) <= 1e-15
    assert np.all(np.diff(s.v) < 0) and np.all(s.v > 0)


def test_oblique_project_fixes_difference_space():
    rng = np.random.default_rng(0)
    for n in (1, 2, 5, 9):
        D = difference_matrix(GeneratorPair(rng.standard_normal(n), rng.standard_normal(n)))
        for spec in (spec_e1(n), spec_uniform(n), random_spec(n, rng)):
            out = oblique_project(D, spec)
            assert np.abs(out - D).max() <= 1e-12 * (1 + np.abs(D).max())


def test_oblique_project_idempotent_and_matches_reference():
    rng = np.random.default_rng(1)
    for n in (2, 4, 7):
        X = rng.standard_normal((n, n))
        spec = random_spec(n, rng)
        once = oblique_project(X, spec)
        twice = oblique_project(once, spec)
        np.testing.assert_allclose(twice, once, atol=1e-12 * (1 + np.abs(once).max()))
        np.testing.assert_allclose(
            once, brute_force_project(X, spec.v, spec.w), atol=1e-12 * (1 + np.abs(X).max())
        )


def test_oblique_project_unit_matrix_case():
    X = np.zeros((2, 2))
    X[1, 1] = 1.0
    out = oblique_project(X, spec_e1(2))
    np.testing.assert_allclose(out, brute_force_project(X, [1.0, 0.0], [1.0, 0.0]), atol=1e-15)
    np.testing.assert_array_equal(out, np.zeros((2, 2)))


def test_nonunit_sums_do_not_fix_difference_space():
    rng = np.random.default_rng(2)
    n = 4
    D = difference_matrix(GeneratorPair(rng.standard_normal(n), rng.standard_normal(n)))
    v = rng.random(n)
    v = v / v.sum() * 1.5  # entry sum 1.5
    out = brute_force_project(D, v, v)
    assert np.abs(out - D).max() > 1e-6


def test_oblique_project_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        oblique_project(np.ones((3, 3)), spec_e1(2))


def test_recover_cross_hand_example():
    A = cauchy_matrix(check_cauchy_points(GeneratorPair([0.0, 1.0], [2.0, 3.0])))
    g = recover_cross(A)
    np.testing.assert_allclose(g.x, [-1.5, -0.5], atol=1e-15)
    np.testing.assert_allclose(g.y, [0.5, 1.5], atol=1e-15)
    hx, hy = hand_alg_cross(A)
    np.testing.assert_allclose(g.x, hx, atol=1e-15)
    np.testing.assert_allclose(g.y, hy, atol=1e-15)


def test_recover_cross_all_ones():
    g = recover_cross(np.ones((2, 2)))
    np.testing.assert_allclose(g.x, [0.5, 0.5], atol=1e-15)
    np.testing.assert_allclose(g.y, [-0.5, -0.5], atol=1e-15)
    np.testing.assert_array_equal(difference_matrix(g), np.ones((2, 2)))


def test_recover_cross_exact_recovery():
    rng = np.random.default_rng(3)
    for n in (2, 6, 30):
        C = cauchy_matrix(well_separated_points(n, rng))
        g = recover_cross(C)
        Ci = cauchy_matrix(check_cauchy_points(g))
        assert np.linalg.norm(C - Ci) <= 1e-12 * np.linalg.norm(C)


def test_recover_cross_matches_projection():
    rng = np.random.default_rng(4)
    for n in (2, 5):
        A = random_zero_free(n, rng)
        g = recover_cross(A)
        proj = oblique_project(1.0 / A, spec_e1(n))
        np.testing.assert_allclose(
            difference_matrix(g), proj, atol=1e-12 * (1 + np.abs(proj).max())
        )


def test_recover_cross_zero_entry():
    A = np.ones((3, 3))
    A[0, 1] = 0.0
    with pytest.raises(ZeroEntry) as info:
        recover_cross(A)
    assert (info.value.i, info.value.j) == (1, 2)


def test_recover_orthogonal_hand_example_and_equivalence():
    A = np.ones((2, 2))
    g = recover_orthogonal(A)
    np.testing.assert_allclose(g.x, [0.5, 0.5], atol=1e-15)
    np.testing.assert_allclose(g.y, [-0.5, -0.5], atol=1e-15)

    rng = np.random.default_rng(5)
    C = cauchy_matrix(well_separated_points(7, rng))
    g1 = recover_cross(C)
    g2 = recover_orthogonal(C)
    hx, hy = hand_alg_orthogonal(C)
    scale = 1 + max(np.abs(g2.x).max(), np.abs(g2.y).max())
    np.testing.assert_allclose(g2.x, hx, atol=1e-13 * scale)
    np.testing.assert_allclose(g2.y, hy, atol=1e-13 * scale)
    np.testing.assert_allclose(g1.x, g2.x, atol=1e-11 * scale)
    np.testing.assert_allclose(g1.y, g2.y, atol=1e-11 * scale)


def test_recover_orthogonal_matches_projection():
    rng = np.random.default_rng(6)
    for n in (2, 5):
        A = random_zero_free(n, rng)
        proj = oblique_project(1.0 / A, spec_uniform(n))
        np.testing.assert_allclose(
            difference_matrix(recover_orthogonal(A)),
            proj,
            atol=1e-12 * (1 + np.abs(proj).max()),
        )


def test_orthogonal_residual_is_orthogonal():
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(2, 8))
        A = random_zero_free(n, rng)
        Z = 1.0 / A
        R = Z - difference_matrix(recover_orthogonal(A))
        D = difference_matrix(GeneratorPair(rng.standard_normal(n), rng.standard_normal(n)))
        bound = 1e-10 * np.linalg.norm(Z) * np.linalg.norm(D)
        assert abs(np.tensordot(R, D)) <= bound


def test_recover_oblique_special_cases_match():
    rng = np.random.default_rng(8)
    for n in (2, 4, 6):
        for _ in range(4):
            A = random_zero_free(n, rng)
            g1 = recover_cross(A)
            ge = recover_oblique(A, spec_e1(n))
            g2 = recover_orthogonal(A)
            gu = recover_oblique(A, spec_uniform(n))
            for a, b in ((g1, ge), (g2, gu)):
                scale = 1 + max(np.abs(a.x).max(), np.abs(a.y).max())
                assert np.abs(a.x - b.x).max() <= 1e-12 * scale
                assert np.abs(a.y - b.y).max() <= 1e-12 * scale


def test_recover_oblique_exact_recovery_any_spec():
    rng = np.random.default_rng(9)
    for n in (2, 5, 12):
        C = cauchy_matrix(well_separated_points(n, rng))
        for spec in (spec_decreasing(n), random_spec(n, rng)):
            g = recover_oblique(C, spec)
            Ci = cauchy_matrix(check_cauchy_points(g))
            assert np.linalg.norm(C - Ci) <= 1e-11 * np.linalg.norm(C)


def test_recover_oblique_matches_defining_identity():
    rng = np.random.default_rng(10)
    n = 5
    A = random_zero_free(n, rng)
    spec = random_spec(n, rng)
    Z = 1.0 / A
    expected = Z - centering_matrix(spec.v) @ Z @ centering_matrix(spec.w).T
    np.testing.assert_allclose(
        difference_matrix(recover_oblique(A, spec)),
        expected,
        atol=1e-12 * (1 + np.abs(expected).max()),
    )


def test_bound_constants_examples():
    assert bound_constants(spec_e1(5)).alpha_max == 4.0
    assert bound_constants(spec_uniform(5)).alpha_frob == pytest.approx(1.0, abs=1e-14)
    rng = np.random.default_rng(11)
    for n in (2, 6):
        s = random_spec(n, rng)  # positive entries
        bc = bound_constants(s)
        assert bc.alpha_max == pytest.approx(4.0, rel=1e-12)
        assert bc.nu == bc.alpha_max
        assert bc.alpha_frob >= 1.0 - 1e-12


def test_centering_operator_norms():
    n = 6
    e1 = np.zeros(n)
    e1[0] = 1.0
    inf_norm, two_bound = centering_operator_norms(e1)
    assert inf_norm == 2.0
    # exact for the first-coordinate weights: rows with a zero weight
    # have absolute row sum 1 + |u|_1
    assert inf_norm == np.abs(centering_matrix(e1)).sum(axis=1).max()
    exact_two = singular_values(centering_matrix(e1))[0]
    assert exact_two == pytest.approx(math.sqrt(n), rel=1e-12)
    assert two_bound >= exact_two - 1e-12

    inf_norm, two_bound = centering_operator_norms(np.full(n, 1.0 / n))
    assert two_bound == pytest.approx(1.0, abs=1e-14)
    # for strictly positive weights the value is an upper bound
    assert inf_norm >= np.abs(centering_matrix(np.full(n, 1.0 / n))).sum(axis=1).max()

    rng = np.random.default_rng(99)
    for _ in range(10):
        u = rng.standard_normal(n)
        inf_norm, two_bound = centering_operator_norms(u)
        M = centering_matrix(u)
        assert inf_norm >= np.abs(M).sum(axis=1).max() - 1e-12
        assert two_bound >= singular_values(M)[0] - 1e-12


def test_apriori_frobenius_bound():
    rng = np.random.default_rng(12)
    for _ in range(15):
        n = int(rng.integers(2, 8))
        A = random_zero_free(n, rng)
        Z = 1.0 / A
        kf = np.linalg.norm(Z - difference_matrix(recover_orthogonal(A)))
        for spec in (spec_e1(n), spec_uniform(n), random_spec(n, rng)):
            res = np.linalg.norm(Z - difference_matrix(recover_oblique(A, spec)))
            bound = bound_constants(spec).alpha_frob * kf
            assert res <= bound + 1e-10 * (1 + bound)


def test_orthogonal_recovery_is_frobenius_optimal():
    rng = np.random.default_rng(13)
    for _ in range(10):
        n = int(rng.integers(2, 8))
        A = random_zero_free(n, rng)
        Z = 1.0 / A
        best = np.linalg.norm(Z - difference_matrix(recover_orthogonal(A)))
        others = [
            np.linalg.norm(Z - difference_matrix(recover_cross(A))),
            np.linalg.norm(Z - difference_matrix(recover_oblique(A, random_spec(n, rng)))),
        ]
        for other in others:
            assert best <= other + 1e-10 * (1 + other)


def test_frobenius_distance_permutation_invariant():
    rng = np.random.default_rng(14)
    n = 6
    A = random_zero_free(n, rng)
    Z = 1.0 / A
    base = np.linalg.norm(Z - difference_matrix(recover_orthogonal(A)))
    for _ in range(5):
        P = np.eye(n)[rng.permutation(n)]
        Q = np.eye(n)[rng.permutation(n)]
        B = P @ A @ Q
        val = np.linalg.norm(1.0 / B - difference_matrix(recover_orthogonal(B)))
        assert abs(val - base) <= 1e-12 * (1 + base)


def test_relative_bounds_on_additive_construction():
    # additive noise of size delta on the difference matrix keeps the
    # Chebyshev distance below delta, so the certified relative bounds
    # must hold with nu from the bound constants
    rng = np.random.default_rng(15)
    n = 30
    delta = 1e-4
    points = interlaced_points(n)
    D = difference_matrix(points.pair())
    model = PerturbationModel("additive_reciprocal", delta, 99)
    Z = apply_perturbation(D, model)
    A = 1.0 / Z
    for spec in (spec_e1(n), spec_uniform(n), spec_decreasing(n)):
        g = recover_oblique(A, spec)
        checked = check_cauchy_points(g)
        points_ok = not hasattr(checked, "i")
        assert points_ok
        C = cauchy_matrix(checked)
        nu = bound_constants(spec).nu
        for norm in (np.linalg.norm, lambda M: np.abs(M).max()):
            lhs = norm(A - C) / norm(A)
            rhs = nu * delta * norm_max(C)
            assert lhs <= rhs * (1 + 1e-6)
            lhs2 = norm(A - C) / norm(C)
            rhs2 = nu * delta * norm_max(A)
            assert lhs2 <= rhs2 * (1 + 1e-6)
