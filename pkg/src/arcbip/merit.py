"""Exact-penalty merit function, reductions and parameter updates."""
import math

import numpy as np
import scipy.linalg

from .exceptions import DomainError, RankDeficient
from .problem import eval_constraints, eval_objective

LAMBDA_FLOOR = 1e-3
# singular values of (A; Y) below this fraction of the largest make the estimate undefined
MULTIPLIER_RANK_RTOL = 1e-12
# Cholesky pivots below this fraction of the diagonal send the solve to the SVD path
NORMAL_EQUATIONS_RTOL = 1e-10


def eval_merit(f, y, c_norm, mu, nu):
    """``f - mu * sum(log y) + nu * ||g + y||`` with ``c_norm = ||g + y||``."""
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0.0):
        raise DomainError("slack variables must be strictly positive")
    return float(f - mu * np.sum(np.log(y)) + nu * c_norm)


def eval_pred(grad_f, B, mu, y, nu, A, g, sigma, d_x, d_y):
    """Predicted reduction of the merit model for the full step ``d``."""
    r = g + y
    dy_s = d_y / y
    scaled = np.linalg.norm(np.concatenate([d_x, dy_s]))
    return float(-grad_f @ d_x - 0.5 * d_x @ B @ d_x - sigma / 3.0 * scaled ** 3
                 + mu * (np.sum(dy_s) - 0.5 * dy_s @ dy_s)
                 + nu * (np.linalg.norm(r) - np.linalg.norm(r + A.T @ d_x + d_y)))


def eval_chi(grad_f, B, mu, y, n_x, n_y):
    """Part of the predicted reduction contributed by the normal step alone."""
    ny_s = n_y / y
    return float(-grad_f @ n_x - 0.5 * n_x @ B @ n_x + mu * (np.sum(ny_s) - 0.5 * ny_s @ ny_s))


def pred_from_parts(tpred, npred, chi, nu, sigma, sigma_tilde, Dn_norm, Dt_norm, Dd_norm):
    """Predicted reduction assembled from its normal/tangential decomposition."""
    return (tpred + nu * npred + chi
            + (sigma * Dt_norm ** 3 + nu * sigma_tilde * Dn_norm ** 3 - sigma * Dd_norm ** 3) / 3.0)


def eval_ared(problem, x, y, d_x, d_y, mu, nu, counters=None, f=None, g=None):
    """Actual merit reduction from ``(x, y)`` to ``(x + d_x, y + d_y)``.

    ``f`` and ``g`` at the current point may be passed to avoid
    re-evaluating them. Returns ``(ared, f_trial, g_trial)``.
    """
    y_new = y + d_y
    if np.any(y_new <= 0.0):
        raise DomainError("trial slacks are not strictly positive")
    if f is None:
        f = eval_objective(problem, x, counters)
    if g is None:
        g = eval_constraints(problem, x, counters)
    x_new = x + d_x
    f_new = eval_objective(problem, x_new, counters)
    g_new = eval_constraints(problem, x_new, counters)
    phi = eval_merit(f, y, np.linalg.norm(g + y), mu, nu)
    phi_new = eval_merit(f_new, y_new, np.linalg.norm(g_new + y_new), mu, nu)
    return phi - phi_new, f_new, g_new


def descent_ratio(ared, pred):
    """``ared / pred``, or ``-inf`` when ``pred`` is not safely positive."""
    if pred > 1e-16 * max(1.0, abs(ared)):
        return ared / pred
    return -math.inf


def update_penalty(nu_prev, npred, tpred, chi, sigma, sigma_tilde, Dn_norm, Dt_norm, Dd_norm, delta):
    """Smallest admissible penalty, increased by at least 50% when it must grow."""
    cubic_gap = sigma / 3.0 * (Dt_norm ** 3 - Dd_norm ** 3)
    reg_n = sigma_tilde / 3.0 * Dn_norm ** 3
    den1 = (1.0 - delta) * npred + reg_n
    den2 = 0.5 * npred + reg_n
    if den1 <= 0.0 and den2 <= 0.0:
        nu_tilde = nu_prev
    else:
        nu_tilde = max(-(tpred + cubic_gap + chi) / den1, -cubic_gap / den2)
    if nu_tilde <= nu_prev:
        return nu_prev
    return max(nu_tilde, 1.5 * nu_prev)


def update_sigma(sigma_prev, rho, config):
    if rho >= config.eta2:
        return max(config.sigma_min, 0.5 * sigma_prev)
    if rho >= config.eta1:
        return sigma_prev
    return config.gamma1 * sigma_prev


def least_squares_multipliers(A, y, grad_f, mu):
    """Multipliers minimising ``||grad_f + A lam||^2 + ||Y lam - mu e||^2`` (no sign fix).

    Well-conditioned instances are solved through the normal equations
    ``(A'A + Y^2) lam = -A'grad_f + mu y``. When slacks of order ``sqrt(eps)``
    make those equations lose too much accuracy the SVD of the stacked matrix
    ``(A; Y)`` is used instead, which only sees the square root of the condition
    number.
    """
    K = A.T @ A + np.diag(y * y)
    rhs = -(A.T @ grad_f) + mu * y
    try:
        c = scipy.linalg.cho_factor(K)
    except np.linalg.LinAlgError:
        c = None
    if c is not None and np.min(np.diag(c[0])) ** 2 > NORMAL_EQUATIONS_RTOL * np.max(np.diag(K)):
        return scipy.linalg.cho_solve(c, rhs)
    M = np.vstack([A, np.diag(y)])
    U, sv, Vt = np.linalg.svd(M, full_matrices=False)
    if sv.size == 0 or sv[-1] <= MULTIPLIER_RANK_RTOL * sv[0]:
        raise RankDeficient("multiplier normal equations are singular to working precision")
    return Vt.T @ ((U.T @ np.concatenate([-grad_f, mu * np.ones_like(y)])) / sv)


def update_multipliers(A, y, grad_f, mu):
    """Least-squares multipliers with nonpositive entries replaced by ``min(1e-3, mu/y_i)``."""
    lam = least_squares_multipliers(A, y, grad_f, mu)
    bad = lam <= 0.0
    lam[bad] = np.minimum(LAMBDA_FLOOR, mu / y[bad])
    return lam


def barrier_floor(config):
    return max(config.mu_min, config.e_t / 10.0)


def update_barrier(y, lam, mu_prev, config):
    """Adaptive barrier update driven by the spread of the complementarity products.

    ``mu_prev`` is accepted for interface symmetry; the rule depends only on
    the current products ``y_i * lam_i``.
    """
    prod = y * lam
    avg = float(np.sum(prod)) / y.shape[0]
    spread = float(np.min(prod)) / avg
    theta = 0.1 * min(0.05 * (1.0 - spread) / spread, 2.0)
    return max(theta * avg, barrier_floor(config))


def error_function(grad_f, A, lam, y, g, mu):
    return max(float(np.linalg.norm(grad_f + A @ lam)),
               float(np.linalg.norm(y * lam - mu)),
               float(np.linalg.norm(g + y)))
