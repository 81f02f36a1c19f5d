import numpy as np
import pytest

from arcbip import NlpProblem, kernels
from arcbip.kernels import available_backends

BACKENDS = sorted(available_backends())


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Route the scalar kernels through one backend for the duration of a test."""
    mod = available_backends()[request.param]
    for name in ("secular_root", "cubic_1d_min", "backtrack_factor"):
        monkeypatch.setattr(kernels, name, getattr(mod, name))
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def quadratic_box_problem():
    """min x^2 s.t. x - 1 <= 0; the unconstrained minimiser x = 0 is interior."""
    return NlpProblem(
        n=1, m=1,
        objective=lambda x: float(x[0] ** 2),
        constraints=lambda x: np.array([x[0] - 1.0]),
        objective_gradient=lambda x: np.array([2.0 * x[0]]),
        constraint_jacobian=lambda x: np.array([[1.0]]),
        lagrangian_hessian=lambda x, lam: np.array([[2.0]]),
        name="QUADBOX",
    )


def disk_problem(with_hessian=True):
    """min x1 + x2 s.t. x1^2 + x2^2 - 2 <= 0; solution (-1, -1), multiplier 1/2."""
    return NlpProblem(
        n=2, m=1,
        objective=lambda x: float(x[0] + x[1]),
        constraints=lambda x: np.array([x[0] ** 2 + x[1] ** 2 - 2.0]),
        objective_gradient=lambda x: np.array([1.0, 1.0]),
        constraint_jacobian=lambda x: np.array([[2.0 * x[0]], [2.0 * x[1]]]),
        lagrangian_hessian=(lambda x, lam: 2.0 * lam[0] * np.eye(2)) if with_hessian else None,
        name="DISK",
    )


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
