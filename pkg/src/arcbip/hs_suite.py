"""Registry of small inequality-constrained test problems.

Each problem is written as ``min f(x)`` subject to ``g(x) <= 0`` with exact
first and second derivatives. Equalities are split into two inequalities.
Minimax problems carry the auxiliary level variable ``u`` last.
"""
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import UnknownProblem
from .problem import NlpProblem


@dataclass(frozen=True)
class SuiteEntry:
    """A registered problem with its start point and reference counters.

    ``paper_*`` fields hold the published iteration counts and final
    residual; ``f_star`` is the objective value at the known solution.
    """

    name: str
    problem: NlpProblem
    x0: np.ndarray
    paper_NO: int
    paper_NI: int
    paper_NIF: int
    paper_NIG: int
    paper_Res: float
    f_star: float


def _make(name, n, m, f, grad, hess_f, g, jac_rows, hess_g):
    """Build an ``NlpProblem`` from row-oriented derivative callbacks.

    ``jac_rows(x)`` returns the ``(m, n)`` Jacobian and ``hess_g(x)`` the
    ``(m, n, n)`` stack of constraint Hessians.
    """
    def jacobian(x):
        return np.asarray(jac_rows(np.asarray(x, dtype=float)), dtype=float).T

    def lagrangian_hessian(x, lam):
        x = np.asarray(x, dtype=float)
        return hess_f(x) + np.einsum("i,ijk->jk", np.asarray(lam, dtype=float), hess_g(x))

    return NlpProblem(
        n=n, m=m,
        objective=lambda x: float(f(np.asarray(x, dtype=float))),
        constraints=lambda x: np.asarray(g(np.asarray(x, dtype=float)), dtype=float),
        objective_gradient=lambda x: np.asarray(grad(np.asarray(x, dtype=float)), dtype=float),
        constraint_jacobian=jacobian,
        lagrangian_hessian=lagrangian_hessian,
        name=name,
    )


def _diag(*v):
    return np.diag(np.array(v, dtype=float))


def _zeros(n):
    return lambda x: np.zeros((n, n))


# minimax problems: f = u (optionally plus a linear term), constraints c_i(x1, x2) - u


def _minimax(name, pieces, f_lin=None):
    """Problem ``min f_lin . z`` s.t. ``c_i(x1, x2) - u <= 0`` with ``z = (x1, x2, u)``.

    ``pieces`` is a list of ``(c, grad_c, hess_c)`` on ``(x1, x2)``.
    """
    lin = np.array([0.0, 0.0, 1.0]) if f_lin is None else np.asarray(f_lin, dtype=float)
    m = len(pieces)

    def g(z):
        return np.array([c(z[0], z[1]) - z[2] for c, _, _ in pieces])

    def jac(z):
        return np.array([[*gc(z[0], z[1]), -1.0] for _, gc, _ in pieces])

    def hess_g(z):
        out = np.zeros((m, 3, 3))
        for i, (_, _, hc) in enumerate(pieces):
            out[i, :2, :2] = hc(z[0], z[1])
        return out

    return _make(name, 3, m, lambda z: float(lin @ z), lambda z: lin.copy(), _zeros(3),
                 g, jac, hess_g)


_CB2_PIECES = [
    (lambda a, b: a ** 2 + b ** 4, lambda a, b: (2 * a, 4 * b ** 3),
     lambda a, b: _diag(2.0, 12 * b ** 2)),
    (lambda a, b: (2 - a) ** 2 + (2 - b) ** 2, lambda a, b: (-2 * (2 - a), -2 * (2 - b)),
     lambda a, b: _diag(2.0, 2.0)),
    (lambda a, b: 2 * math.exp(b - a), lambda a, b: (-2 * math.exp(b - a), 2 * math.exp(b - a)),
     lambda a, b: 2 * math.exp(b - a) * np.array([[1.0, -1.0], [-1.0, 1.0]])),
]
_CB3_PIECES = [
    (lambda a, b: a ** 4 + b ** 2, lambda a, b: (4 * a ** 3, 2 * b),
     lambda a, b: _diag(12 * a ** 2, 2.0)),
] + _CB2_PIECES[1:]

_DEMYMALO_PIECES = [
    (lambda a, b: 5 * a + b, lambda a, b: (5.0, 1.0), lambda a, b: np.zeros((2, 2))),
    (lambda a, b: -5 * a + b, lambda a, b: (-5.0, 1.0), lambda a, b: np.zeros((2, 2))),
    (lambda a, b: a ** 2 + b ** 2 + 4 * b, lambda a, b: (2 * a, 2 * b + 4),
     lambda a, b: _diag(2.0, 2.0)),
]
_KIWCRESC_PIECES = [
    (lambda a, b: a ** 2 + (b - 1) ** 2 + b - 1, lambda a, b: (2 * a, 2 * (b - 1) + 1),
     lambda a, b: _diag(2.0, 2.0)),
    (lambda a, b: -a ** 2 - (b - 1) ** 2 + b + 1, lambda a, b: (-2 * a, -2 * (b - 1) + 1),
     lambda a, b: _diag(-2.0, -2.0)),
]
_MAKELA1_PIECES = [
    (lambda a, b: -a - b, lambda a, b: (-1.0, -1.0), lambda a, b: np.zeros((2, 2))),
    (lambda a, b: -a - b + a ** 2 + b ** 2 - 1, lambda a, b: (-1 + 2 * a, -1 + 2 * b),
     lambda a, b: _diag(2.0, 2.0)),
]


def _mifflin1():
    # min -x1 + 20u  s.t.  x1^2 + x2^2 - 1 <= u,  u >= 0
    lin = np.array([-1.0, 0.0, 20.0])

    def g(z):
        return np.array([z[0] ** 2 + z[1] ** 2 - 1 - z[2], -z[2]])

    def jac(z):
        return np.array([[2 * z[0], 2 * z[1], -1.0], [0.0, 0.0, -1.0]])

    def hess_g(z):
        out = np.zeros((2, 3, 3))
        out[0, 0, 0] = out[0, 1, 1] = 2.0
        return out

    return _make("MIFFLIN1", 3, 2, lambda z: float(lin @ z), lambda z: lin.copy(), _zeros(3),
                 g, jac, hess_g)


def _hs10():
    return _make(
        "HS10", 2, 1,
        lambda x: x[0] - x[1],
        lambda x: np.array([1.0, -1.0]),
        _zeros(2),
        lambda x: np.array([3 * x[0] ** 2 - 2 * x[0] * x[1] + x[1] ** 2 - 1]),
        lambda x: np.array([[6 * x[0] - 2 * x[1], -2 * x[0] + 2 * x[1]]]),
        lambda x: np.array([[[6.0, -2.0], [-2.0, 2.0]]]),
    )


def _hs11():
    return _make(
        "HS11", 2, 1,
        lambda x: (x[0] - 5) ** 2 + x[1] ** 2 - 25,
        lambda x: np.array([2 * (x[0] - 5), 2 * x[1]]),
        lambda x: _diag(2.0, 2.0),
        lambda x: np.array([x[0] ** 2 - x[1]]),
        lambda x: np.array([[2 * x[0], -1.0]]),
        lambda x: np.array([_diag(2.0, 0.0)]),
    )


def _hs12():
    return _make(
        "HS12", 2, 1,
        lambda x: 0.5 * x[0] ** 2 + x[1] ** 2 - x[0] * x[1] - 7 * x[0] - 7 * x[1],
        lambda x: np.array([x[0] - x[1] - 7, 2 * x[1] - x[0] - 7]),
        lambda x: np.array([[1.0, -1.0], [-1.0, 2.0]]),
        lambda x: np.array([4 * x[0] ** 2 + x[1] ** 2 - 25]),
        lambda x: np.array([[8 * x[0], 2 * x[1]]]),
        lambda x: np.array([_diag(8.0, 2.0)]),
    )


def _hs14():
    # the equality x1 - 2 x2 + 1 = 0 is split into a pair of inequalities
    return _make(
        "HS14", 2, 3,
        lambda x: (x[0] - 2) ** 2 + (x[1] - 1) ** 2,
        lambda x: np.array([2 * (x[0] - 2), 2 * (x[1] - 1)]),
        lambda x: _diag(2.0, 2.0),
        lambda x: np.array([x[0] - 2 * x[1] + 1, -(x[0] - 2 * x[1] + 1),
                            x[0] ** 2 / 4 + x[1] ** 2 - 1]),
        lambda x: np.array([[1.0, -2.0], [-1.0, 2.0], [x[0] / 2, 2 * x[1]]]),
        lambda x: np.array([np.zeros((2, 2)), np.zeros((2, 2)), _diag(0.5, 2.0)]),
    )


def _hs22():
    return _make(
        "HS22", 2, 2,
        lambda x: (x[0] - 2) ** 2 + (x[1] - 1) ** 2,
        lambda x: np.array([2 * (x[0] - 2), 2 * (x[1] - 1)]),
        lambda x: _diag(2.0, 2.0),
        lambda x: np.array([x[0] + x[1] - 2, x[0] ** 2 - x[1]]),
        lambda x: np.array([[1.0, 1.0], [2 * x[0], -1.0]]),
        lambda x: np.array([np.zeros((2, 2)), _diag(2.0, 0.0)]),
    )


def _hs29():
    def hess_f(x):
        return -np.array([[0.0, x[2], x[1]], [x[2], 0.0, x[0]], [x[1], x[0], 0.0]])

    return _make(
        "HS29", 3, 1,
        lambda x: -x[0] * x[1] * x[2],
        lambda x: -np.array([x[1] * x[2], x[0] * x[2], x[0] * x[1]]),
        hess_f,
        lambda x: np.array([x[0] ** 2 + 2 * x[1] ** 2 + 4 * x[2] ** 2 - 48]),
        lambda x: np.array([[2 * x[0], 4 * x[1], 8 * x[2]]]),
        lambda x: np.array([_diag(2.0, 4.0, 8.0)]),
    )


def _hs43():
    # Rosen-Suzuki
    c = np.array([-5.0, -5.0, -21.0, 7.0])
    q = np.array([1.0, 1.0, 2.0, 1.0])
    Q = np.array([[1.0, 1.0, 1.0, 1.0], [1.0, 2.0, 1.0, 2.0], [2.0, 1.0, 1.0, 0.0]])
    L = np.array([[1.0, -1.0, 1.0, -1.0], [-1.0, 0.0, 0.0, -1.0], [2.0, -1.0, 0.0, -1.0]])
    rhs = np.array([8.0, 10.0, 5.0])
    return _make(
        "HS43", 4, 3,
        lambda x: float(q @ x ** 2 + c @ x),
        lambda x: 2 * q * x + c,
        lambda x: np.diag(2 * q),
        lambda x: Q @ x ** 2 + L @ x - rhs,
        lambda x: 2 * Q * x + L,
        lambda x: np.array([np.diag(2 * Qi) for Qi in Q]),
    )


# (factory, x0, NO, NI, NIF, NIG, Res, f*)
_TABLE = {
    "CB2": (lambda: _minimax("CB2", _CB2_PIECES), (2.0, 2.0, 1.0),
            4, 11, 12, 12, 8.2592e-09, 1.9522245),
    "CB3": (lambda: _minimax("CB3", _CB3_PIECES), (2.0, 2.0, 1.0),
            5, 11, 12, 12, 9.1045e-09, 2.0),
    "CHACONN1": (lambda: _minimax("CHACONN1", _CB2_PIECES), (1.0, -0.1, 1.0),
                 4, 11, 12, 12, 1.0000e-09, 1.9522245),
    "CHACONN2": (lambda: _minimax("CHACONN2", _CB3_PIECES), (1.0, -0.1, 1.0),
                 6, 11, 12, 12, 8.7100e-09, 2.0),
    "DEMYMALO": (lambda: _minimax("DEMYMALO", _DEMYMALO_PIECES), (1.0, 1.0, 1.0),
                 5, 13, 14, 14, 3.4620e-09, -3.0),
    "HS10": (_hs10, (-10.0, 10.0), 2, 10, 11, 11, 7.4074e-09, -1.0),
    "HS11": (_hs11, (4.9, 0.1), 8, 8, 9, 9, 6.6897e-10, -8.498464223),
    "HS12": (_hs12, (0.0, 0.0), 13, 9, 10, 10, 3.2684e-09, -30.0),
    "HS14": (_hs14, (2.0, 2.0), 13, 13, 14, 14, 8.9474e-09, 9.0 - 23.0 * math.sqrt(7.0) / 8.0),
    "HS22": (_hs22, (2.0, 2.0), 2, 5, 6, 6, 6.6849e-09, 1.0),
    "HS29": (_hs29, (1.0, 1.0, 1.0), 2, 8, 9, 9, 6.7619e-09, -16.0 * math.sqrt(2.0)),
    "HS43": (_hs43, (0.0, 0.0, 0.0, 0.0), 3, 11, 12, 12, 9.9850e-09, -44.0),
    "KIWCRESC": (lambda: _minimax("KIWCRESC", _KIWCRESC_PIECES), (-1.5, 2.0, 0.0),
                 2, 12, 13, 13, 1.0643e-09, 0.0),
    "MAKELA1": (lambda: _minimax("MAKELA1", _MAKELA1_PIECES), (-1.0, 5.0, 0.0),
                3, 12, 13, 13, 8.4986e-09, -math.sqrt(2.0)),
    "MIFFLIN1": (_mifflin1, (0.8, 0.6, 0.0), 2, 8, 9, 9, 8.6619e-09, -1.0),
}


def get_problem(name):
    """Return the ``SuiteEntry`` registered under ``name``.

    Raises
    ------
    UnknownProblem
        If ``name`` is not registered; the error lists the valid names.
    """
    try:
        factory, x0, NO, NI, NIF, NIG, res, f_star = _TABLE[name]
    except KeyError:
        raise UnknownProblem(name, sorted(_TABLE)) from None
    return SuiteEntry(name=name, problem=factory(), x0=np.array(x0, dtype=float),
                      paper_NO=NO, paper_NI=NI, paper_NIF=NIF, paper_NIG=NIG,
                      paper_Res=res, f_star=f_star)


def list_problems():
    """``(name, n, m)`` for every registered problem, sorted by name."""
    out = []
    for name in sorted(_TABLE):
        p = get_problem(name).problem
        out.append((name, p.n, p.m))
    return out
