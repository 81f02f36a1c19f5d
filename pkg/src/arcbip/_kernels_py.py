"""Pure-Python scalar kernels.

Reference implementation and fallback for the compiled ``_kernels``
extension. Both modules expose the same three functions with identical
semantics; ``arcbip.kernels`` picks one at import time.
"""
import math

import numpy as np

_EPS = np.finfo(float).eps


def secular_root(lam, gam, sigma, nu_lo, nu_hi, rtol, atol, maxiter):
    """Find nu in (nu_lo, nu_hi] with sigma * ||s(nu)|| = nu.

    ``s(nu)`` has eigen-coordinates ``-gam / (lam + nu)``. The caller
    guarantees ``||s(nu)|| - nu / sigma`` is positive just right of
    ``nu_lo`` and non-positive at ``nu_hi``.

    Returns ``(nu, iterations)``; ``iterations > maxiter`` means the
    iteration did not converge.
    """
    lam = np.asarray(lam, dtype=float)
    g2 = np.asarray(gam, dtype=float) ** 2
    lo, hi = nu_lo, nu_hi
    nu = nu_hi
    for it in range(1, maxiter + 1):
        den = lam + nu
        ns2 = float(np.sum(g2 / (den * den)))
        snorm = math.sqrt(ns2)
        gap = sigma * snorm - nu
        if abs(gap) <= rtol * nu and abs(gap) * snorm <= atol:
            return nu, it
        if gap > 0.0:
            lo = nu
        else:
            hi = nu
        if hi - lo <= 4.0 * _EPS * hi:
            return nu, it
        # Newton on 1/||s|| - sigma/nu, bisection when it leaves the bracket
        psi = 1.0 / snorm - sigma / nu
        dpsi = float(np.sum(g2 / (den * den * den))) / (ns2 * snorm) + sigma / (nu * nu)
        trial = nu - psi / dpsi
        if not (lo < trial < hi):
            trial = 0.5 * (lo + hi)
        nu = trial
    return nu, maxiter + 1


def cubic_1d_min(c1, c2, c3, alpha_max):
    """Global minimizer of c1*a + c2*a**2/2 + c3*a**3/3 on [0, alpha_max].

    Returns ``inf`` when the model is unbounded below on [0, inf).
    """
    if math.isinf(alpha_max) and c3 == 0.0 and (c2 < 0.0 or (c2 == 0.0 and c1 < 0.0)):
        return math.inf

    def q(a):
        return a * (c1 + a * (0.5 * c2 + a * c3 / 3.0))

    best, qbest = 0.0, 0.0
    if not math.isinf(alpha_max) and alpha_max > 0.0:
        qa = q(alpha_max)
        if qa < qbest:
            best, qbest = alpha_max, qa

    root = -1.0
    if c3 > 0.0:
        disc = c2 * c2 - 4.0 * c3 * c1
        if disc >= 0.0:
            sq = math.sqrt(disc)
            if c2 > 0.0:
                root = -2.0 * c1 / (c2 + sq)
            else:
                root = (-c2 + sq) / (2.0 * c3)
    elif c2 > 0.0:
        root = -c1 / c2
    if 0.0 < root < alpha_max:
        qr = q(root)
        if qr < qbest:
            best, qbest = root, qr
    return best


def backtrack_factor(w, lower, b):
    """Smallest ``j >= 0`` with ``b**j * w >= lower``; returns ``(b**j, j)``."""
    w = np.asarray(w, dtype=float)
    lower = np.asarray(lower, dtype=float)
    viol = w < lower
    if not np.any(viol):
        return 1.0, 0
    need = float(np.min(lower[viol] / w[viol]))
    j = max(0, int(math.ceil(math.log(need) / math.log(b))))
    while np.any(b ** j * w < lower):
        j += 1
    while j > 0 and np.all(b ** (j - 1) * w >= lower):
        j -= 1
    return b ** j, j
