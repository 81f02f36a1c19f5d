"""Independent reference solvers used as test oracles.

None of these use the eigen-decomposition or secular-equation machinery of
the package, so agreement is a genuine cross-check.
"""
import numpy as np
from scipy.optimize import minimize


def cubic_value(g, H, sigma, s):
    return float(g @ s + 0.5 * s @ H @ s + sigma / 3.0 * np.linalg.norm(s) ** 3)


def cubic_oracle(g, H, sigma, rng, starts=30):
    """Global minimum of the cubic model by multi-start BFGS plus a grid polish.

    Returns ``(s, value)``.
    """
    k = g.shape[0]
    hn = np.linalg.norm(H)
    radius = (hn + np.sqrt(hn * hn + 4.0 * sigma * np.linalg.norm(g))) / sigma + 1.0

    def fun(s):
        ns = np.linalg.norm(s)
        return cubic_value(g, H, sigma, s), g + H @ s + sigma * ns * s

    candidates = [np.zeros(k)] + [rng.uniform(-radius, radius, size=k) for _ in range(starts)]
    candidates += [radius * 0.5 * e for e in np.vstack([np.eye(k), -np.eye(k)])]
    best_s, best_v = np.zeros(k), 0.0
    for s0 in candidates:
        res = minimize(fun, s0, jac=True, method="BFGS", options={"gtol": 1e-12, "maxiter": 2000})
        if res.fun < best_v:
            best_s, best_v = res.x, float(res.fun)
    # polish on a local grid around the best point
    h = 1e-3 * max(1.0, np.linalg.norm(best_s))
    for _ in range(30):
        improved = False
        for i in range(k):
            for sign in (-1.0, 1.0):
                trial = best_s.copy()
                trial[i] += sign * h
                v = cubic_value(g, H, sigma, trial)
                if v < best_v:
                    best_s, best_v, improved = trial, v, True
        if not improved:
            h *= 0.5
    return best_s, best_v


def cubic_1d_grid(c1, c2, c3, alpha_max, points=10 ** 6):
    """Minimise ``c1 a + c2 a^2 / 2 + c3 a^3 / 3`` over a uniform grid on ``[0, alpha_max]``."""
    a = np.linspace(0.0, alpha_max, points)
    q = a * (c1 + a * (0.5 * c2 + a * c3 / 3.0))
    i = int(np.argmin(q))
    return float(a[i]), float(q[i])


def q1d(c1, c2, c3, a):
    return a * (c1 + a * (0.5 * c2 + a * c3 / 3.0))
