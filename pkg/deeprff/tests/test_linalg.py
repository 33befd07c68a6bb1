import numpy as np
import pytest

from deeprff.linalg import (
    RidgeProblem, assemble_design_resid, assemble_design_x, from_complex,
    ridge_gradient, ridge_objective, solve_ridge, to_complex)


def test_design_x_pairs_cos_and_minus_sin():
    points = np.array([[0.5, -1.0], [2.0, 0.25]])
    freqs = np.array([[1.0, 2.0], [-0.5, 0.0], [0.0, 0.0]])
    design = assemble_design_x(points, freqs)
    assert design.shape == (2, 6)
    phase = points @ freqs.T
    np.testing.assert_allclose(design[:, 0::2], np.cos(phase))
    np.testing.assert_allclose(design[:, 1::2], -np.sin(phase))


def test_design_x_accepts_scalar_inputs():
    design = assemble_design_x([0.0, 1.0], [[2.0]])
    np.testing.assert_allclose(design, [[1.0, 0.0], [np.cos(2), -np.sin(2)]])


def test_design_x_dimension_mismatch():
    with pytest.raises(ValueError):
        assemble_design_x(np.zeros((3, 2)), np.zeros((4, 3)))


def test_design_resid_appends_state_features():
    points = np.array([[0.1], [0.2], [0.3]])
    states = np.array([0.0, 1.0, -2.0])
    design = assemble_design_resid(points, states, [[1.0]], [0.5, 2.0])
    assert design.shape == (3, 6)
    np.testing.assert_allclose(design[:, :2], assemble_design_x(points, [[1.0]]))
    np.testing.assert_allclose(design[:, 2], np.cos(0.5 * states))
    np.testing.assert_allclose(design[:, 5], -np.sin(2.0 * states))


def test_design_resid_length_mismatch():
    with pytest.raises(ValueError):
        assemble_design_resid(np.zeros((3, 1)), np.zeros(2), [[1.0]], [1.0])


def test_ridge_problem_validation():
    with pytest.raises(ValueError):
        RidgeProblem(np.zeros((3, 2)), np.zeros(4))
    with pytest.raises(ValueError):
        RidgeProblem(np.zeros((3, 2)), np.zeros(3), tikhonov=-1.0)


@pytest.mark.parametrize('tikhonov', [0.0, 0.1, 1.1])
def test_solve_ridge_matches_normal_equations(tikhonov):
    rng = np.random.default_rng(7)
    for _ in range(34):
        k = int(rng.integers(1, 11))
        n = int(rng.integers(2 * k + 5, 51))
        d = int(rng.integers(1, 4))
        design = assemble_design_x(rng.standard_normal((n, d)),
                                   rng.standard_normal((k, d)))
        problem = RidgeProblem(design, rng.standard_normal(n), tikhonov)
        coef = solve_ridge(problem)
        gram = design.T @ design / n + tikhonov * np.eye(2 * k)
        rhs = design.T @ problem.targets / n
        scale = np.linalg.norm(rhs) + np.linalg.norm(gram) * np.linalg.norm(coef)
        assert np.linalg.norm(gram @ coef - rhs) <= 1e-10 * scale
        if tikhonov > 0:
            oracle = np.linalg.solve(gram, rhs)
            assert np.linalg.norm(coef - oracle) <= 1e-8 * np.linalg.norm(oracle)


def test_solve_ridge_zero_targets():
    design = assemble_design_x(np.linspace(-1, 1, 7), [[0.3], [1.7]])
    coef = solve_ridge(RidgeProblem(design, np.zeros(7), 1.1))
    np.testing.assert_allclose(coef, 0.0, atol=1e-15)


def test_solve_ridge_minimum_norm_for_repeated_columns():
    x = np.linspace(-2, 2, 11)
    design = assemble_design_x(x, [[0.7], [0.7]])
    coef = solve_ridge(RidgeProblem(design, np.sin(0.7 * x)))
    np.testing.assert_allclose(coef[0:2], coef[2:4], atol=1e-10)


def test_solve_ridge_without_columns():
    assert solve_ridge(RidgeProblem(np.zeros((3, 0)), np.ones(3))).shape == (0,)


def test_solution_minimizes_objective():
    rng = np.random.default_rng(3)
    design = assemble_design_x(rng.standard_normal((20, 2)),
                               rng.standard_normal((4, 2)))
    problem = RidgeProblem(design, rng.standard_normal(20), 0.1)
    coef = solve_ridge(problem)
    np.testing.assert_allclose(ridge_gradient(problem, coef), 0.0, atol=1e-12)
    best = ridge_objective(problem, coef)
    for _ in range(10):
        other = coef + 1e-3 * rng.standard_normal(coef.shape)
        assert ridge_objective(problem, other) > best


def test_complex_pairs():
    amplitudes = np.array([1 + 2j, -0.5j])
    coef = from_complex(amplitudes)
    np.testing.assert_array_equal(coef, [1.0, 2.0, 0.0, -0.5])
    np.testing.assert_array_equal(to_complex(coef), amplitudes)


def test_solve_ridge_shrinks_with_tikhonov():
    rng = np.random.default_rng(11)
    for _ in range(50):
        design = assemble_design_x(rng.standard_normal((20, 2)),
                                   rng.standard_normal((3, 2)))
        targets = rng.standard_normal(20)
        norms = [np.linalg.norm(solve_ridge(RidgeProblem(design, targets, t)))
                 for t in (0.0, 0.01, 0.1, 1.1, 10.0)]
        for wider, narrower in zip(norms, norms[1:]):
            assert narrower <= wider * (1 + 1e-10) + 1e-12


def test_solve_ridge_is_deterministic():
    rng = np.random.default_rng(5)
    design = assemble_design_x(rng.standard_normal((30, 3)),
                               rng.standard_normal((6, 3)))
    problem = RidgeProblem(design, rng.standard_normal(30), 1.1)
    np.testing.assert_array_equal(solve_ridge(problem), solve_ridge(problem))
