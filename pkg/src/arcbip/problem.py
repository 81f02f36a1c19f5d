"""Problem abstraction for ``minimize f(x) subject to g(x) <= 0``."""
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .exceptions import NonFiniteEvaluation


@dataclass
class NlpProblem:
    """Smooth inequality-constrained problem with ``n`` variables and ``m`` constraints.

    Attributes
    ----------
    objective : callable
        ``f(x) -> float``.
    constraints : callable
        ``g(x) -> ndarray, shape (m,)``.
    objective_gradient : callable
        ``grad_f(x) -> ndarray, shape (n,)``.
    constraint_jacobian : callable
        ``A(x) -> ndarray, shape (n, m)``; column ``i`` is the gradient of
        ``g_i``.
    lagrangian_hessian : callable, optional
        ``H(x, lam) -> ndarray, shape (n, n)``, the Hessian in ``x`` of
        ``f(x) + lam @ g(x)``. When omitted the solver uses a quasi-Newton
        approximation.
    """

    n: int
    m: int
    objective: Callable
    constraints: Callable
    objective_gradient: Callable
    constraint_jacobian: Callable
    lagrangian_hessian: Optional[Callable] = None
    name: str = ""

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError(f"n and m must be positive, got n={self.n}, m={self.m}")


@dataclass
class EvalCounters:
    """Number of calls to each problem callback during a solve."""

    nf: int = 0
    ng_eval: int = 0
    ngrad: int = 0
    nj: int = 0
    nh: int = 0


def _finite(name, value):
    if not np.all(np.isfinite(value)):
        raise NonFiniteEvaluation(f"{name} returned a non-finite value")
    return value


def eval_objective(problem, x, counters=None):
    if counters is not None:
        counters.nf += 1
    return float(_finite("objective", problem.objective(x)))


def eval_constraints(problem, x, counters=None):
    if counters is not None:
        counters.ng_eval += 1
    g = np.asarray(problem.constraints(x), dtype=float).reshape(problem.m)
    return _finite("constraints", g)


def eval_gradient(problem, x, counters=None):
    if counters is not None:
        counters.ngrad += 1
    gf = np.asarray(problem.objective_gradient(x), dtype=float).reshape(problem.n)
    return _finite("objective_gradient", gf)


def eval_jacobian(problem, x, counters=None):
    if counters is not None:
        counters.nj += 1
    A = np.asarray(problem.constraint_jacobian(x), dtype=float).reshape(problem.n, problem.m)
    return _finite("constraint_jacobian", A)


def eval_hessian(problem, x, lam, counters=None):
    if counters is not None:
        counters.nh += 1
    H = np.asarray(problem.lagrangian_hessian(x, lam), dtype=float).reshape(problem.n, problem.n)
    return _finite("lagrangian_hessian", H)


def evaluate_all(problem, x, counters=None):
    """Return ``(f, g, grad_f, A)`` at ``x``.

    Each callback is invoked exactly once and counted in ``counters``.

    Raises
    ------
    NonFiniteEvaluation
        If any returned entry is NaN or Inf.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.n,) or not np.all(np.isfinite(x)):
        raise ValueError(f"x must be a finite vector of length {problem.n}")
    f = eval_objective(problem, x, counters)
    g = eval_constraints(problem, x, counters)
    gf = eval_gradient(problem, x, counters)
    A = eval_jacobian(problem, x, counters)
    return f, g, gf, A


def finite_difference_check(problem, x, h=1e-6):
    """Largest relative mismatch between analytic and central-difference derivatives.

    Both ``grad_f`` and the Jacobian ``A`` are compared entry by entry;
    each discrepancy is divided by ``max(1, |analytic entry|)``.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    x = np.asarray(x, dtype=float)
    _, _, gf, A = evaluate_all(problem, x)
    fd_grad = np.empty(problem.n)
    fd_jac = np.empty((problem.n, problem.m))
    for j in range(problem.n):
        e = np.zeros(problem.n)
        e[j] = h
        fd_grad[j] = (eval_objective(problem, x + e) - eval_objective(problem, x - e)) / (2 * h)
        fd_jac[j] = (eval_constraints(problem, x + e) - eval_constraints(problem, x - e)) / (2 * h)
    err_grad = np.abs(fd_grad - gf) / np.maximum(1.0, np.abs(gf))
    err_jac = np.abs(fd_jac - A) / np.maximum(1.0, np.abs(A))
    return float(max(err_grad.max(), err_jac.max()))
