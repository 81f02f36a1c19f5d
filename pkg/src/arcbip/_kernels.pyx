# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scalar kernels; same contract as ``_kernels_py``."""
from libc.math cimport sqrt, fabs, ceil, log, pow, INFINITY, isinf

cdef double _EPS = 2.220446049250313e-16


def secular_root(const double[::1] lam, const double[::1] gam, double sigma,
                 double nu_lo, double nu_hi, double rtol, double atol,
                 int maxiter):
    cdef Py_ssize_t i, k = lam.shape[0]
    cdef double lo = nu_lo, hi = nu_hi, nu = nu_hi
    cdef double den, g2, ns2, s3, snorm, gap, psi, dpsi, trial
    cdef int it
    for it in range(1, maxiter + 1):
        ns2 = 0.0
        s3 = 0.0
        for i in range(k):
            g2 = gam[i] * gam[i]
            if g2 != 0.0:
                den = lam[i] + nu
                ns2 += g2 / (den * den)
                s3 += g2 / (den * den * den)
        snorm = sqrt(ns2)
        gap = sigma * snorm - nu
        if fabs(gap) <= rtol * nu and fabs(gap) * snorm <= atol:
            return nu, it
        if gap > 0.0:
            lo = nu
        else:
            hi = nu
        if hi - lo <= 4.0 * _EPS * hi:
            return nu, it
        psi = 1.0 / snorm - sigma / nu
        dpsi = s3 / (ns2 * snorm) + sigma / (nu * nu)
        trial = nu - psi / dpsi
        if not (lo < trial < hi):
            trial = 0.5 * (lo + hi)
        nu = trial
    return nu, maxiter + 1


cdef inline double _q(double a, double c1, double c2, double c3):
    return a * (c1 + a * (0.5 * c2 + a * c3 / 3.0))


def cubic_1d_min(double c1, double c2, double c3, double alpha_max):
    cdef double best = 0.0, qbest = 0.0, qa, root = -1.0, disc, sq
    if isinf(alpha_max) and c3 == 0.0 and (c2 < 0.0 or (c2 == 0.0 and c1 < 0.0)):
        return INFINITY
    if not isinf(alpha_max) and alpha_max > 0.0:
        qa = _q(alpha_max, c1, c2, c3)
        if qa < qbest:
            best = alpha_max
            qbest = qa
    if c3 > 0.0:
        disc = c2 * c2 - 4.0 * c3 * c1
        if disc >= 0.0:
            sq = sqrt(disc)
            if c2 > 0.0:
                root = -2.0 * c1 / (c2 + sq)
            else:
                root = (-c2 + sq) / (2.0 * c3)
    elif c2 > 0.0:
        root = -c1 / c2
    if 0.0 < root < alpha_max:
        qa = _q(root, c1, c2, c3)
        if qa < qbest:
            best = root
    return best


cdef bint _feasible(const double[::1] w, const double[::1] lower, double t):
    cdef Py_ssize_t i
    for i in range(w.shape[0]):
        if t * w[i] < lower[i]:
            return False
    return True


def backtrack_factor(const double[::1] w, const double[::1] lower, double b):
    cdef Py_ssize_t i
    cdef double need = 1.0, r
    cdef int j
    for i in range(w.shape[0]):
        if w[i] < lower[i]:
            r = lower[i] / w[i]
            if r < need:
                need = r
    if need >= 1.0:
        return 1.0, 0
    j = <int>ceil(log(need) / log(b))
    if j < 0:
        j = 0
    while not _feasible(w, lower, pow(b, j)):
        j += 1
    while j > 0 and _feasible(w, lower, pow(b, j - 1)):
        j -= 1
    return pow(b, j), j
