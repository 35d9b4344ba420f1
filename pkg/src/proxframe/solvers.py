"""Baseline solvers for the analysis-sparsity problem and a T-metric loop.

The analysis problem  min_y 1/2 ||x - y||^2 + lam ||Ty||_1  has closed-form
solutions only for special T (orthogonal, or orthonormal rows); the dual
projected-gradient solver here is the reference for everything else. It also
documents that frame shrinkage is *not* that minimizer: the shrinkage is the
prox of its induced regularizer in the T metric, which is a different
objective.

``forward_backward_t_metric`` iterates gradient steps in the T geometry
against the shrinkage as backward step. Because the shrinkage is the
T-metric prox of the induced regularizer f at unit scale, the fixed points
minimize step * h + f; run it with step = 1 (valid whenever the T-metric
Lipschitz constant of h is at most 1) to minimize h + f itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveLambda, NotParsevalRow
from .operators import AnalysisOperator
from .prox import soft_shrink
from .reports import SolveReport
from .shrinkage import FrameShrinkage, InducedRegularizer, frame_prox, induced_regularizer


@dataclass(frozen=True)
class AnalysisProblem:
    """Data vector, analysis matrix, and regularization weight."""

    x: np.ndarray
    operator: AnalysisOperator | np.ndarray
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise NonPositiveLambda(f"lambda must be positive, got {self.lam}")
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))

    @property
    def matrix(self) -> np.ndarray:
        if isinstance(self.operator, AnalysisOperator):
            return self.operator.matrix
        return np.asarray(self.operator, dtype=float)


def analysis_objective(problem: AnalysisProblem, y: np.ndarray) -> float:
    t = problem.matrix
    return float(
        0.5 * np.sum((problem.x - y) ** 2) + problem.lam * np.sum(np.abs(t @ y))
    )


def solve_analysis_dual(
    problem: AnalysisProblem, tol: float = 1e-10, max_iter: int = 200000
) -> SolveReport:
    """Minimize 1/2 ||x - y||^2 + lam ||Ty||_1 by projected gradient on the dual.

    The dual is min { 1/2 ||x - T* p||^2 : ||p||_inf <= lam }, handled with
    step 1/sigma_max(T)^2 and componentwise clipping; the primal point is
    recovered as y = x - T* p. Terminates when the duality gap
    lam ||Ty||_1 - <p, Ty> drops to ``tol``; non-convergence is flagged on
    the report.
    """
    t = problem.matrix
    x, lam = problem.x, problem.lam
    if isinstance(problem.operator, AnalysisOperator):
        sigma_max_sq = problem.operator.frame_bounds[1]
    else:
        sigma_max_sq = float(np.linalg.norm(t, 2) ** 2)
    step = 1.0 / sigma_max_sq

    p = np.zeros(t.shape[0])
    y = x - t.T @ p
    gap = np.inf
    for k in range(1, max_iter + 1):
        p = np.clip(p + step * (t @ y), -lam, lam)
        y = x - t.T @ p
        ty = t @ y
        gap = float(lam * np.sum(np.abs(ty)) - p @ ty)
        if gap <= tol:
            return SolveReport(
                minimizer=y,
                objective=analysis_objective(problem, y),
                iterations=k,
                residual=gap,
                tolerance=tol,
                converged=True,
            )
    return SolveReport(
        minimizer=y,
        objective=analysis_objective(problem, y),
        iterations=max_iter,
        residual=gap,
        tolerance=tol,
        converged=False,
    )


def synthesis_solution(x: np.ndarray, t: np.ndarray, lam: float, row_tol: float = 1e-10) -> np.ndarray:
    """Closed-form analysis minimizer for matrices with orthonormal rows.

    Requires T T* = I (n <= d). The minimizer of
    1/2 ||x - y||^2 + lam ||Ty||_1 is then (I - T*T) x + T* S_lam(T x).
    """
    if not lam > 0:
        raise NonPositiveLambda(f"lambda must be positive, got {lam}")
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    n, d = t.shape
    if n > d:
        raise NotParsevalRow(f"expected n <= d for row-orthonormal T, got {n} x {d}")
    gram_err = float(np.max(np.abs(t @ t.T - np.eye(n))))
    if gram_err > row_tol:
        raise NotParsevalRow(f"T T* deviates from identity by {gram_err:.3e}")
    tx = t @ x
    return x + t.T @ (soft_shrink(tx, lam) - tx)


def forward_backward_t_metric(
    grad_h,
    fs: FrameShrinkage,
    x0: np.ndarray,
    step: float,
    tol: float = 1e-10,
    max_iter: int = 100000,
    h=None,
    callback=None,
) -> SolveReport:
    """Forward-backward iteration in the T metric with the shrinkage backward step.

    ``grad_h`` supplies the Euclidean gradient of the smooth term; each
    iteration converts it to the T-metric gradient, steps, and applies the
    shrinkage:  x <- frame_prox(x - step * (T*T)^{-1} grad_h(x)).  Stops when
    the T-norm of the iterate change reaches ``tol``. ``step`` must not
    exceed the reciprocal of the T-metric Lipschitz constant of grad_h, and
    equals 1 when the target objective is h plus the induced regularizer.

    With ``h`` given, the report's objective is h plus the induced
    regularizer at the final iterate. ``callback(x)`` runs once per iteration.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    op = fs.operator
    x = np.asarray(x0, dtype=float).copy()
    change = np.inf
    it = 0
    converged = False
    for it in range(1, max_iter + 1):
        grad_t = op.solve_gram(np.asarray(grad_h(x), dtype=float))
        x_new = frame_prox(fs, x - step * grad_t)
        change = float(np.linalg.norm(op.matrix @ (x_new - x)))
        x = x_new
        if callback is not None:
            callback(x)
        if change <= tol:
            converged = True
            break

    objective = None
    if h is not None and fs.inner_prox.function is not None:
        reg = InducedRegularizer.from_shrinkage(fs)
        objective = float(h(x)) + float(induced_regularizer(reg, x, tol=1e-10))
    return SolveReport(
        minimizer=x,
        objective=objective,
        iterations=it,
        residual=change,
        tolerance=tol,
        converged=converged,
    )
