import numpy as np
import pytest

from proxframe import (
    AnalysisProblem,
    FrameShrinkage,
    NonPositiveLambda,
    NotParsevalRow,
    analysis_objective,
    build_operator,
    example_operator,
    example_regularizer_closed_form,
    example_shrinkage,
    forward_backward_t_metric,
    frame_prox,
    identity_map,
    random_operator,
    soft_shrink,
    solve_analysis_dual,
    synthesis_solution,
)
from support import grid_min


def random_parseval_rows(n, d, rng):
    q, _ = np.linalg.qr(rng.standard_normal((d, n)))
    return q[:, :n].T  # n orthonormal rows of length d


def test_dual_solver_orthogonal_case(rng):
    x = rng.standard_normal(6)
    prob = AnalysisProblem(x, build_operator(np.eye(6)), 0.8)
    rep = solve_analysis_dual(prob, tol=1e-12)
    assert rep.converged
    np.testing.assert_allclose(rep.minimizer, soft_shrink(x, 0.8), atol=1e-8)


def test_dual_solver_vanishing_regularization(rng):
    x = rng.standard_normal(4)
    op = random_operator(6, 4, rng)
    rep = solve_analysis_dual(AnalysisProblem(x, op, 1e-12), tol=1e-12)
    np.testing.assert_allclose(rep.minimizer, x, atol=1e-6)


def test_dual_solver_flagship_differs_from_shrinkage():
    prob = AnalysisProblem(np.array([1.0]), example_operator(), 1.0)
    rep = solve_analysis_dual(prob, tol=1e-12)
    assert rep.converged
    # grid oracle for the primal objective
    y_grid, _ = grid_min(lambda y: 0.5 * (1 - y) ** 2 + 3.0 * abs(y), -2.0, 2.0)
    assert abs(rep.minimizer[0] - y_grid) <= 1e-4
    assert abs(rep.minimizer[0]) <= 1e-6  # the true minimizer is 0
    y_shrink = frame_prox(example_shrinkage(), np.array([1.0]))
    assert abs(rep.minimizer[0] - y_shrink[0]) > 0.3
    # and the dual solution really has the lower analysis objective
    assert rep.objective < analysis_objective(prob, y_shrink) - 0.5


def test_dual_solver_duality_gap_reported(rng):
    op = random_operator(8, 5, rng)
    prob = AnalysisProblem(rng.standard_normal(5), op, 0.5)
    rep = solve_analysis_dual(prob, tol=1e-10)
    assert rep.converged
    assert rep.residual <= 1e-10
    assert rep.iterations >= 1


def test_dual_solver_not_converged_flag(rng):
    op = random_operator(8, 5, rng)
    prob = AnalysisProblem(rng.standard_normal(5), op, 0.5)
    rep = solve_analysis_dual(prob, tol=1e-14, max_iter=2)
    assert not rep.converged


def test_analysis_problem_requires_positive_lambda():
    with pytest.raises(NonPositiveLambda):
        AnalysisProblem(np.array([1.0]), example_operator(), 0.0)


def test_synthesis_identity_case(rng):
    x = rng.standard_normal(5)
    out = synthesis_solution(x, np.eye(5), 0.4)
    np.testing.assert_allclose(out, soft_shrink(x, 0.4), atol=1e-14)


def test_synthesis_matches_dual_solver():
    t = np.array([[1.0 / np.sqrt(2.0), 1.0 / np.sqrt(2.0)]])
    x = np.array([2.0, 0.0])
    out = synthesis_solution(x, t, 0.5)
    rep = solve_analysis_dual(AnalysisProblem(x, t, 0.5), tol=1e-14)
    np.testing.assert_allclose(out, rep.minimizer, atol=1e-6)


def test_synthesis_large_lambda_projects_out_rows(rng):
    t = random_parseval_rows(2, 5, rng)
    x = rng.standard_normal(5)
    out = synthesis_solution(x, t, 1e6)
    np.testing.assert_allclose(out, x - t.T @ (t @ x), atol=1e-12)


def test_synthesis_rejects_non_parseval(rng):
    with pytest.raises(NotParsevalRow):
        synthesis_solution(rng.standard_normal(3), 2.0 * np.eye(3), 1.0)
    with pytest.raises(NotParsevalRow):
        synthesis_solution(rng.standard_normal(2), np.eye(3)[:, :2], 1.0)  # n > d


def test_synthesis_random_parseval_instances(rng):
    for _ in range(8):
        n = int(rng.integers(1, 4))
        d = int(rng.integers(n, n + 4))
        t = random_parseval_rows(n, d, rng)
        x = rng.standard_normal(d) * rng.choice([0.5, 2.0])
        lam = float(rng.choice([0.1, 0.5, 1.0]))
        out = synthesis_solution(x, t, lam)
        rep = solve_analysis_dual(AnalysisProblem(x, t, lam), tol=1e-14)
        assert rep.converged
        np.testing.assert_allclose(out, rep.minimizer, atol=1e-6)


def test_forward_backward_quadratic_t_objective(rng):
    op = random_operator(6, 3, rng)
    fs = FrameShrinkage(op, identity_map())
    b = rng.standard_normal(3)
    gram = op.matrix.T @ op.matrix
    rep = forward_backward_t_metric(lambda v: gram @ (v - b), fs, np.zeros(3), step=1.0, tol=1e-12)
    assert rep.converged
    np.testing.assert_allclose(rep.minimizer, b, atol=1e-8)


def test_forward_backward_zero_gradient_reaches_fixed_point():
    fs = example_shrinkage()
    rep = forward_backward_t_metric(lambda v: np.zeros_like(v), fs, np.array([2.0]), step=1.0, tol=1e-12)
    m = np.asarray(rep.minimizer)
    again = frame_prox(fs, m)
    assert np.linalg.norm(fs.operator.matrix @ (again - m)) <= 2e-12


def test_forward_backward_flagship_composite(rng):
    # minimize 1/2 (y - 1)^2 + f(y); the composite subdifferential pins y* = 0
    fs = example_shrinkage()
    iterates = []
    rep = forward_backward_t_metric(
        lambda v: v - 1.0,
        fs,
        np.array([1.0]),
        step=1.0,
        tol=1e-12,
        h=lambda v: 0.5 * float((v[0] - 1.0) ** 2),
        callback=lambda v: iterates.append(float(v[0])),
    )
    assert rep.converged
    y_grid, _ = grid_min(
        lambda y: 0.5 * (y - 1.0) ** 2 + example_regularizer_closed_form(y), -2.0, 2.0
    )
    assert abs(rep.minimizer[0] - y_grid) <= 1e-4
    assert abs(rep.minimizer[0]) <= 1e-5
    assert np.isclose(rep.objective, 0.5, atol=1e-8)
    # composite objective is monotonically nonincreasing along the iterates
    objs = [0.5 * (y - 1.0) ** 2 + example_regularizer_closed_form(y) for y in iterates]
    assert all(b <= a + 1e-12 for a, b in zip(objs, objs[1:]))


def test_forward_backward_rejects_bad_step():
    with pytest.raises(ValueError):
        forward_backward_t_metric(lambda v: v, example_shrinkage(), np.array([0.0]), step=0.0)


def test_solve_report_objective_none_without_h():
    fs = example_shrinkage()
    rep = forward_backward_t_metric(lambda v: np.zeros_like(v), fs, np.array([2.0]), step=1.0)
    assert rep.objective is None
    assert rep.to_dict()["objective"] is None
