from dataclasses import replace

import numpy as np
import pytest

from cdrpinn import problems
from cdrpinn.network import init_xavier
from cdrpinn.problems import ExactEvaluator, ProblemId, make_problem
from cdrpinn.util import ConfigurationError, DomainError

MANUFACTURED = ["P1D", "P2D_BL", "P3D"]


def _interior(problem, rng, n):
    return problem.domain.sample_interior(rng, n)


def _term_scale(problem, x):
    """|eps lap u| + |b . grad u| + |c u| + |f| of the exact solution, per point"""
    u, du, d2u = ExactEvaluator(problem).jets(x)
    xs = [x[:, k] for k in range(problem.dim)]
    b = problem.convection(xs)
    scale = problem.epsilon * np.abs(d2u).sum(axis=0)
    scale = scale + sum(np.abs(b[k] * du[k]) for k in range(problem.dim))
    scale = scale + np.abs(problem.reaction(xs) * u) + np.abs(problem.source(xs))
    return scale


def test_problem_ids_parse_case_insensitively():
    assert ProblemId.parse("p2d_bl") is ProblemId.P2D_BL
    assert ProblemId.parse(ProblemId.P3D) is ProblemId.P3D
    with pytest.raises(ConfigurationError):
        ProblemId.parse("P4D")


@pytest.mark.parametrize("eps", [0.0, -1e-3, 2.0])
def test_epsilon_range(eps):
    with pytest.raises(ConfigurationError):
        make_problem("P1D", eps)


def test_rotation_outer_condition_choices():
    assert make_problem("P2D_ROT", 1e-3).outer_bc
    assert not make_problem("P2D_ROT", 1e-3, rot_outer_bc="none").outer_bc
    with pytest.raises(ConfigurationError):
        make_problem("P2D_ROT", 1e-3, rot_outer_bc="neumann")


@pytest.mark.parametrize("problem_id", MANUFACTURED)
@pytest.mark.parametrize("eps", [1.0, 1e-3])
def test_exact_solution_satisfies_the_equation(problem_id, eps, rng):
    problem = make_problem(problem_id, eps)
    x = _interior(problem, rng, 100)
    r = problem.residual(ExactEvaluator(problem), x)
    assert np.all(np.abs(r) <= 1e-6 * _term_scale(problem, x) + 1e-300)


@pytest.mark.parametrize("problem_id", MANUFACTURED)
def test_exact_solution_satisfies_the_equation_at_tiny_eps(problem_id, rng):
    eps = 1e-9
    problem = make_problem(problem_id, eps)
    x = _interior(problem, rng, 2000)
    x = x[problem.layer_distance(x) >= 10 * eps][:100]
    assert x.shape[0] == 100
    r = problem.residual(ExactEvaluator(problem), x)
    assert np.all(np.abs(r) <= 1e-6 * _term_scale(problem, x) + 1e-300)


@pytest.mark.parametrize("problem_id", MANUFACTURED)
@pytest.mark.parametrize("eps", [1.0, 1e-3, 1e-6, 1e-9])
def test_sources_and_solutions_are_finite(problem_id, eps, rng):
    problem = make_problem(problem_id, eps)
    x = np.concatenate([_interior(problem, rng, 500), problem.domain.grid(5)])
    assert np.all(np.isfinite(problem.source_term(x)))
    assert np.all(np.isfinite(problem.exact_solution(x)))


def test_p1d_source_at_the_layer_edge():
    eps = 1e-3
    problem = make_problem("P1D", eps)
    x = np.array([[0.0]])
    u, du, d2u = ExactEvaluator(problem).jets(x)
    assert u[0] == 0.0
    assert du[0, 0] == pytest.approx(2.0 / eps)
    assert d2u[0, 0] == pytest.approx(-4.0 / eps ** 2)
    # L u(0) from the jets against the closed form f(0)
    lu = -eps * d2u[0, 0] + (0.0 - 2.0) * du[0, 0]
    f0 = problems.source_term(problem, np.array([0.0]))
    assert abs(lu - f0) <= 1e-6 * (4.0 / eps)


@pytest.mark.parametrize("problem_id", MANUFACTURED)
def test_exact_solution_meets_boundary_data(problem_id, rng):
    problem = make_problem(problem_id, 1e-3)
    xb = problem.domain.sample_boundary(rng, 200)
    r = problem.boundary_residual(ExactEvaluator(problem), xb)
    np.testing.assert_allclose(r, 0.0, atol=1e-12)


def test_residual_rejects_exterior_points(p1d, small_model):
    with pytest.raises(DomainError):
        p1d.residual(small_model, np.array([[1.5]]))
    with pytest.raises(DomainError):
        p1d.boundary_residual(small_model, np.array([[0.5]]))


def test_missing_manufactured_solution_is_an_error():
    il = make_problem("P2D_IL", 1e-3)
    with pytest.raises(DomainError):
        il.source_term(np.array([[0.5, 0.5]]))
    with pytest.raises(DomainError):
        il.exact_solution(np.array([[0.5, 0.5]]))
    with pytest.raises(DomainError):
        ExactEvaluator(make_problem("P2D_L", 1e-3))


def test_single_point_helpers_return_floats(p1d, small_model):
    x = np.array([0.3])
    assert isinstance(problems.residual(p1d, small_model, x), float)
    assert isinstance(problems.exact_solution(p1d, x), float)
    assert isinstance(problems.source_term(p1d, x), float)
    assert isinstance(problems.boundary_residual(p1d, small_model, np.array([1.0])), float)


def test_residual_uses_the_operator(p1d, small_model, rng):
    x = _interior(p1d, rng, 20)
    u, du, d2u = small_model.jets(x)
    expected = -p1d.epsilon * d2u[0] + (x[:, 0] - 2.0) * du[0] - p1d.source_term(x)
    np.testing.assert_allclose(p1d.residual(small_model, x), expected, rtol=1e-12, atol=1e-12)


def test_rotation_divergence_and_advective_forms_coincide(rng):
    problem = make_problem("P2D_ROT", 1e-3)
    advective = replace(problem, divergence_form=False)
    for seed in range(10):
        model = init_xavier(2, 3, 20, "normal", seed=seed)
        x = _interior(problem, rng, 100)
        np.testing.assert_allclose(
            problem.residual(model, x), advective.residual(model, x), rtol=0, atol=1e-10
        )


def test_rotation_data_lives_on_the_slit():
    problem = make_problem("P2D_ROT", 1e-3)
    on_slit = np.array([[0.5, 0.25], [0.5, 0.1]])
    np.testing.assert_allclose(problem.boundary_data(on_slit), np.sin(2 * np.pi * on_slit[:, 1]) ** 2)
    assert np.all(problem.on_data_boundary(on_slit))
    outer = np.array([[0.0, 0.3], [1.0, 0.9]])
    np.testing.assert_array_equal(problem.boundary_data(outer), 0.0)
    assert not np.any(make_problem("P2D_ROT", 1e-3, "none").on_data_boundary(outer))


def test_interior_layer_inflow_data():
    problem = make_problem("P2D_IL", 1e-3)
    xb = np.array([[0.5, 0.0], [0.0, 0.1], [0.0, 0.5], [1.0, 0.5], [0.5, 1.0]])
    np.testing.assert_array_equal(problem.boundary_data(xb), [1.0, 1.0, 0.0, 0.0, 0.0])


def test_value_ranges():
    assert make_problem("P2D_IL", 1e-3).value_range == (0.0, 1.0)
    assert make_problem("P2D_L", 1e-3).value_range == (0.0, 0.75)
    assert make_problem("P2D_ROT", 1e-3).value_range == (0.0, 1.0)
