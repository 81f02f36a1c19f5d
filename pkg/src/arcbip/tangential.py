"""Tangential step: reduce the barrier model inside the null space of ``(A' I)``.

With ``N = (N_x; N_y)`` an orthonormal basis of that null space the step is
``t = N p`` and ``p`` minimises a standard cubic model.
"""
from dataclasses import dataclass

import numpy as np

from .cubic import backtrack_to_bound, minimize_cubic_1d, shrink_into_bound, solve_cubic


@dataclass
class TangentialStepResult:
    t_x: np.ndarray
    t_y: np.ndarray
    p: np.ndarray
    tpred: float
    used_cauchy_fallback: bool
    tpred_cauchy: float = 0.0
    backtracks: int = 0


def tangential_gradient(N, grad_f, B, n_x, mu, y, n_y):
    """Steepest-descent direction ``p_c`` of the reduced model at ``p = 0``."""
    n = grad_f.shape[0]
    N_x, N_y = N[:n], N[n:]
    return -N_x.T @ (grad_f + B @ n_x) + mu * N_y.T @ (1.0 / y - n_y / y ** 2)


def reduced_hessian(N, B, mu, y):
    n = B.shape[0]
    N_x, N_y = N[:n], N[n:]
    Ny_s = N_y / y[:, None]
    W = N_x.T @ B @ N_x + mu * Ny_s.T @ Ny_s
    return 0.5 * (W + W.T)


def eval_tpred(B, mu, y, grad_f, n_x, n_y, sigma, t_x, t_y):
    """Tangential predicted reduction of ``t = (t_x, t_y)`` after the normal step."""
    ty_s = t_y / y
    scaled = np.concatenate([t_x, ty_s])
    return float(-(grad_f + B @ n_x) @ t_x - 0.5 * t_x @ B @ t_x
                 + mu * (np.sum(ty_s) - (n_y / y ** 2) @ t_y - 0.5 * ty_s @ ty_s)
                 - sigma / 3.0 * np.linalg.norm(scaled) ** 3)


def tangential_cauchy_point(N, B, mu, y, grad_f, n_x, n_y, sigma, tau, p_c=None):
    """Best multiple ``beta_c`` of ``N p_c`` for the tangential predicted reduction.

    Returns ``(beta_c, tpred_c)``.
    """
    n = grad_f.shape[0]
    if p_c is None:
        p_c = tangential_gradient(N, grad_f, B, n_x, mu, y, n_y)
    if not np.any(p_c):
        return 0.0, 0.0
    W = reduced_hessian(N, B, mu, y)
    t = N @ p_c
    t_x, t_y = t[:n], t[n:]
    c1 = -float(p_c @ p_c)
    c2 = float(p_c @ W @ p_c)
    c3 = sigma * float(np.linalg.norm(np.concatenate([t_x, t_y / y]))) ** 3
    neg = t_y < 0
    beta_max = float(np.min((-tau * y[neg] - n_y[neg]) / t_y[neg])) if np.any(neg) else np.inf
    beta = minimize_cubic_1d(c1, c2, c3, max(beta_max, 0.0))
    beta = shrink_into_bound(beta, t_y, n_y, -tau * y)
    tpred = eval_tpred(B, mu, y, grad_f, n_x, n_y, sigma, beta * t_x, beta * t_y)
    if tpred < 0.0:
        # rounding at a (near) zero step; beta = 0 is always feasible
        beta, tpred = 0.0, 0.0
    return beta, tpred


def solve_tangential(N, B, mu, y, grad_f, n_x, n_y, sigma, config):
    """Tangential step satisfying the fraction-to-the-boundary rule and Cauchy decrease.

    Parameters
    ----------
    N : ndarray, shape (n + m, n)
        Orthonormal basis with ``(A' I) N = 0``.
    B : ndarray, shape (n, n)
        Lagrangian Hessian or its approximation.
    n_x, n_y : ndarray
        Normal step, with ``n_y / y >= -xi * tau``.
    config : SolverConfig
        Supplies ``tau``, ``b`` and ``gamma_t``.
    """
    n, m = grad_f.shape[0], y.shape[0]
    p_c = tangential_gradient(N, grad_f, B, n_x, mu, y, n_y)
    if not np.any(p_c):
        return TangentialStepResult(np.zeros(n), np.zeros(m), np.zeros(n), 0.0, False)

    W = reduced_hessian(N, B, mu, y)
    p = solve_cubic(-p_c, W, sigma).s
    N_y = N[n:]
    lower = -config.tau - n_y / y
    w = (N_y @ p) / y
    _, j = backtrack_to_bound(w, lower, config.b)
    p = shrink_into_bound(config.b ** j, N_y @ p, n_y, -config.tau * y) * p
    t = N @ p
    t_x, t_y = t[:n], t[n:]
    tpred = eval_tpred(B, mu, y, grad_f, n_x, n_y, sigma, t_x, t_y)

    beta_c, tpred_c = tangential_cauchy_point(N, B, mu, y, grad_f, n_x, n_y, sigma, config.tau, p_c)
    if tpred < config.gamma_t * tpred_c:
        t = beta_c * (N @ p_c)
        return TangentialStepResult(t[:n], t[n:], beta_c * p_c, tpred_c, True,
                                    tpred_cauchy=tpred_c, backtracks=j)
    return TangentialStepResult(t_x, t_y, p, tpred, False, tpred_cauchy=tpred_c, backtracks=j)
