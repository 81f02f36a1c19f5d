"""Normal step: reduce the linearised infeasibility ``||g + y + A'n_x + n_y||``.

Works in the scaled variables ``u = (n_x, n_y / y)`` where the subproblem is
a standard cubic model with Hessian ``M M'`` and gradient ``M (g + y)``,
``M = (A; Y)``.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cubic import backtrack_to_bound, minimize_cubic_1d, shrink_into_bound, solve_cubic
from .linalg import least_squares

# backtracking steps tried when the squared-model Cauchy step has npred < 0
_MAX_CAUCHY_SHRINK = 60


@dataclass
class NormalStepResult:
    n_x: np.ndarray
    n_y: np.ndarray
    npred: float
    used_cauchy_fallback: bool
    omega: Optional[np.ndarray] = None
    npred_cauchy: float = 0.0
    backtracks: int = 0


def eval_npred(A, g, y, sigma_tilde, n_x, n_y):
    """Normal predicted reduction of a step ``(n_x, n_y)``."""
    r = g + y
    u = np.concatenate([n_x, n_y / y])
    return float(np.linalg.norm(r) - np.linalg.norm(r + A.T @ n_x + n_y)
                 - sigma_tilde / 3.0 * np.linalg.norm(u) ** 3)


def normal_cauchy_point(A, g, y, sigma_tilde, xi, tau, b=0.5):
    """Minimise the squared normal model along its steepest-descent direction.

    Returns ``(alpha_c, (n_x, n_y), npred_c)`` where ``(n_x, n_y)`` is the
    unscaled Cauchy direction ``-(A; Y^2)(g + y)``; the step is
    ``alpha_c`` times it.
    """
    r = g + y
    u_x = -(A @ r)
    u_y = -(y * r)
    n_c = (u_x, y * u_y)
    v = A.T @ u_x + y * u_y
    c1 = float(r @ v)
    c2 = float(v @ v)
    unorm = float(np.sqrt(u_x @ u_x + u_y @ u_y))
    c3 = sigma_tilde * unorm ** 3
    neg = u_y < 0
    alpha_max = float(np.min(-xi * tau / u_y[neg])) if np.any(neg) else np.inf
    if unorm == 0.0:
        return 0.0, n_c, 0.0
    alpha = minimize_cubic_1d(c1, c2, c3, alpha_max)
    npred = eval_npred(A, g, y, sigma_tilde, alpha * n_c[0], alpha * n_c[1])
    # the squared model can be decreased while the unsquared npred is negative
    shrink = 0
    while npred < 0.0 and shrink < _MAX_CAUCHY_SHRINK:
        alpha *= b
        shrink += 1
        npred = eval_npred(A, g, y, sigma_tilde, alpha * n_c[0], alpha * n_c[1])
    if npred < 0.0:
        alpha, npred = 0.0, 0.0
    alpha = shrink_into_bound(alpha, n_c[1], np.zeros_like(y), -xi * tau * y)
    return alpha, n_c, npred


def solve_normal(A, g, y, sigma, config):
    """Normal step satisfying the range-space and Cauchy-decrease conditions.

    Parameters
    ----------
    A : ndarray, shape (n, m)
        Constraint Jacobian, column ``i`` is ``grad g_i``.
    g, y : ndarray, shape (m,)
        Constraint values and (positive) slacks.
    sigma : float
        Current regularisation weight; the normal model uses
        ``sigma / xi**3``.
    config : SolverConfig
        Supplies ``xi``, ``tau``, ``b`` and ``gamma_n``.
    """
    n, m = A.shape
    r = g + y
    if not np.any(r):
        zero_m = np.zeros(m)
        return NormalStepResult(np.zeros(n), np.zeros(m), 0.0, False, omega=zero_m)

    sigma_tilde = sigma / config.xi ** 3
    M = np.vstack([A, np.diag(y)])
    sol = solve_cubic(M @ r, M @ M.T, sigma_tilde)
    u = sol.s
    omega = least_squares(M, u)

    lower = np.concatenate([np.full(n, -np.inf), np.full(m, -config.xi * config.tau)])
    u_b, j = backtrack_to_bound(u, lower, config.b)
    scale = shrink_into_bound(1.0, y * u_b[n:], np.zeros(m), -config.xi * config.tau * y)
    n_x, n_y = scale * u_b[:n], scale * (y * u_b[n:])
    npred = eval_npred(A, g, y, sigma_tilde, n_x, n_y)
    if j:
        omega = None

    alpha_c, n_c, npred_c = normal_cauchy_point(A, g, y, sigma_tilde, config.xi, config.tau, config.b)
    if npred < config.gamma_n * npred_c:
        return NormalStepResult(alpha_c * n_c[0], alpha_c * n_c[1], npred_c, True,
                                omega=None, npred_cauchy=npred_c, backtracks=j)
    return NormalStepResult(n_x, n_y, npred, False, omega=omega,
                            npred_cauchy=npred_c, backtracks=j)
