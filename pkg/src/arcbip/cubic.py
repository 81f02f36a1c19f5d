"""Cubic-regularised model minimisation.

``solve_cubic`` returns the global minimiser of

    m(s) = g @ s + 0.5 * s @ H @ s + (sigma / 3) * ||s||**3

characterised by ``(H + sigma*||s|| I) s = -g`` with ``H + sigma*||s|| I``
positive semidefinite. The scalar multiplier is found on the eigenbasis of
``H``; the hard case (gradient orthogonal to the leftmost eigenspace) adds an
explicit eigenvector component.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .exceptions import MaxSecularIterations, Unbounded
from .linalg import symmetric_eigendecomposition

SECULAR_RTOL = 1e-10
MAX_SECULAR_ITERATIONS = 200
# eigenvalues within this distance of the smallest (relative to max |eigenvalue|) form the
# leftmost cluster; a few ulps, so small but resolvable eigenvalues stay separate
CLUSTER_RTOL = 1e-14
# gradient components below this fraction of ||g|| in the leftmost cluster count as zero
HARD_CASE_RTOL = 1e-13


@dataclass
class CubicSolution:
    s: np.ndarray
    multiplier: float
    model_value: float
    hard_case: bool = False
    iterations: int = 0


def cubic_model(grad, hess, sigma, s):
    s = np.asarray(s, dtype=float)
    return float(grad @ s + 0.5 * s @ hess @ s + sigma / 3.0 * np.linalg.norm(s) ** 3)


def solve_cubic(grad, hess, sigma, tol=1e-10):
    """Globally minimise the cubic model ``g's + s'Hs/2 + sigma/3 ||s||^3``.

    Parameters
    ----------
    grad : ndarray, shape (k,)
    hess : ndarray, shape (k, k)
        Symmetric, possibly indefinite.
    sigma : float
        Regularisation weight, strictly positive.
    tol : float
        Target for the optimality residual
        ``||(hess + multiplier I) s + grad|| / max(1, ||grad||)``.

    Returns
    -------
    CubicSolution

    Raises
    ------
    MaxSecularIterations
        If the multiplier root-find fails to converge.
    """
    if not sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    grad = np.asarray(grad, dtype=float)
    lam, Q = symmetric_eigendecomposition(hess)
    gam = Q.T @ grad
    gnorm = float(np.linalg.norm(grad))
    lam1 = float(lam[0])
    nu_lo = max(0.0, -lam1)

    scale = max(1.0, float(np.abs(lam).max()))
    cluster = lam <= lam1 + CLUSTER_RTOL * scale
    small = np.abs(gam) <= HARD_CASE_RTOL * gnorm
    hard = False
    iters = 0
    if np.all(small[cluster]) and lam1 <= CLUSTER_RTOL * scale:
        # gradient (numerically) orthogonal to a singular or negative leftmost eigenspace
        gam = np.where(cluster, 0.0, gam)
        rest = ~cluster
        s_rest = -gam[rest] / (lam[rest] + nu_lo)
        if np.linalg.norm(s_rest) <= nu_lo / sigma:
            hard = True

    if hard:
        nu = nu_lo
        coords = np.zeros_like(gam)
        rest = ~cluster
        coords[rest] = -gam[rest] / (lam[rest] + nu)
        extra = (nu / sigma) ** 2 - float(coords @ coords)
        coords[0] += math.sqrt(max(extra, 0.0))
    elif gnorm == 0.0:
        nu = 0.0
        coords = np.zeros_like(gam)
    else:
        nu_hi = 0.5 * (-lam1 + math.sqrt(lam1 * lam1 + 4.0 * sigma * gnorm))
        nu_hi = max(nu_hi, nu_lo)
        atol = 0.1 * tol * max(1.0, gnorm)
        nu, iters = kernels.secular_root(
            np.ascontiguousarray(lam), np.ascontiguousarray(gam), float(sigma),
            float(nu_lo), float(nu_hi), SECULAR_RTOL, atol, MAX_SECULAR_ITERATIONS)
        if iters > MAX_SECULAR_ITERATIONS:
            raise MaxSecularIterations(
                f"multiplier root-find did not converge in {MAX_SECULAR_ITERATIONS} iterations")
        coords = -gam / (lam + nu)
        coords = _match_norm(coords, lam, nu, sigma)

    s = Q @ coords
    snorm = float(np.linalg.norm(coords))
    value = float(gam @ coords + 0.5 * np.sum(lam * coords * coords) + sigma / 3.0 * snorm ** 3)
    return CubicSolution(s=s, multiplier=sigma * snorm, model_value=value,
                         hard_case=hard, iterations=iters)


def _match_norm(coords, lam, nu, sigma):
    """Move ``coords`` along the leftmost eigenvector so that ``||s|| = nu / sigma``.

    Near the hard case ``||s(nu)||`` changes by many ulps per ulp of ``nu``,
    so the root-find leaves a norm mismatch whose optimality residual is
    ``|sigma ||s|| - nu| ||s||``. The leftmost direction has the smallest
    shifted curvature ``lam[0] + nu``, so it absorbs the mismatch at the
    least cost; the change is kept only when it lowers the residual.
    """
    target = nu / sigma
    rest = float(coords[1:] @ coords[1:])
    room = target * target - rest
    if room < 0.0:
        return coords
    c0 = coords[0]
    new0 = math.copysign(math.sqrt(room), c0) if c0 != 0.0 else math.sqrt(room)
    before = abs(sigma * float(np.linalg.norm(coords)) - nu) * float(np.linalg.norm(coords))
    after = abs(new0 - c0) * (lam[0] + nu)
    if after < before:
        coords = coords.copy()
        coords[0] = new0
    return coords


def minimize_cubic_1d(c1, c2, c3, alpha_max=math.inf):
    """Global minimiser of ``c1*a + c2*a**2/2 + c3*a**3/3`` over ``[0, alpha_max]``.

    Ties are broken towards the smaller step.

    Raises
    ------
    Unbounded
        If ``alpha_max`` is infinite and the model decreases without bound.
    """
    if c3 < 0.0:
        raise ValueError("c3 must be nonnegative")
    if alpha_max < 0.0:
        raise ValueError("alpha_max must be nonnegative")
    alpha = kernels.cubic_1d_min(float(c1), float(c2), float(c3), float(alpha_max))
    if math.isinf(alpha):
        raise Unbounded(f"q(a) = {c1}*a + {c2}/2*a^2 is unbounded below on [0, inf)")
    return alpha


def backtrack_to_bound(s, lower, b):
    """Scale ``s`` by ``b**j`` with the smallest ``j >= 0`` such that the result is ``>= lower``.

    Returns ``(s_scaled, j)``.
    """
    if not 0.0 < b < 1.0:
        raise ValueError("b must lie in (0, 1)")
    s = np.ascontiguousarray(s, dtype=float)
    lower = np.ascontiguousarray(lower, dtype=float)
    factor, j = kernels.backtrack_factor(s, lower, float(b))
    return factor * s, j


def shrink_into_bound(scale, step, base, lower):
    """Shrink ``scale`` by a few ulps until ``base + scale * step >= lower`` holds in floating point."""
    for _ in range(16):
        if np.all(base + scale * step >= lower):
            break
        scale *= 1.0 - 4.0 * np.finfo(float).eps
    return scale
