"""Outer barrier loop and inner cubic-regularised iteration."""
import dataclasses
import enum
import logging
import math
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .exceptions import InvariantViolation, MaxSecularIterations, NonFiniteEvaluation, RankDeficient
from .linalg import null_space_basis
from .merit import (barrier_floor, descent_ratio, error_function, eval_chi, eval_merit,
                    eval_pred, pred_from_parts, update_barrier, update_multipliers,
                    update_penalty, update_sigma)
from .normal import solve_normal
from .problem import (EvalCounters, eval_constraints, eval_gradient, eval_hessian,
                      eval_jacobian, eval_objective, evaluate_all)
from .tangential import solve_tangential

_log = logging.getLogger(__name__)

STAGNATION_SIGMA = 1e20
STAGNATION_COUNT = 50
# largest value of the adaptive centrality factor
MAX_BARRIER_FACTOR = 0.2
SOC_RATIO = 0.1


@dataclass
class SolverConfig:
    """Algorithm constants. Defaults satisfy every admissibility inequality."""

    eta1: float = 0.1
    eta2: float = 0.9
    gamma1: float = 2.0
    gamma2: float = 5.0
    xi: float = 0.8
    delta: float = 0.3
    tau: float = 0.995
    b: float = 0.5
    a: float = 100.0
    e_t: float = 1e-8
    sigma0: float = 1.0
    mu0: float = 0.1
    nu1: float = 1.0
    gamma_n: float = 0.9
    gamma_t: float = 0.9
    sigma_min: float = 1e-14
    mu_min: float = 1e-12
    y_floor: float = 1e-2
    max_inner_per_mu: int = 500
    max_total_iters: int = 3000
    # "exact" uses the problem's Lagrangian Hessian when it has one, "bfgs" never does
    hessian: str = "exact"
    # retry a rejected, mostly tangential step with a second-order feasibility correction
    second_order_correction: bool = True
    check_invariants: bool = True

    def __post_init__(self):
        self.validate()

    def validate(self):
        checks = [
            (0 < self.eta1 <= self.eta2 < 1, "0 < eta1 <= eta2 < 1"),
            (1 < self.gamma1 < self.gamma2, "1 < gamma1 < gamma2"),
            (0 < self.xi < 1, "0 < xi < 1"),
            (0 < self.delta < 1, "0 < delta < 1"),
            (0 < self.tau < 1, "0 < tau < 1"),
            (0 < self.b < 1, "0 < b < 1"),
            (self.a > 0, "a > 0"),
            (self.e_t > 0, "e_t > 0"),
            (self.sigma0 > 0 and self.mu0 > 0 and self.nu1 > 0, "sigma0, mu0, nu1 > 0"),
            (0 < self.gamma_n <= 1 and 0 < self.gamma_t <= 1, "gamma_n, gamma_t in (0, 1]"),
            (self.sigma_min > 0 and self.mu_min > 0 and self.y_floor > 0,
             "sigma_min, mu_min, y_floor > 0"),
            (self.max_inner_per_mu >= 1 and self.max_total_iters >= 1, "iteration caps >= 1"),
            (self.hessian in ("exact", "bfgs"), "hessian in {'exact', 'bfgs'}"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ValueError(f"invalid SolverConfig: {msg}")


@dataclass
class IterateState:
    x: np.ndarray
    y: np.ndarray
    lam: np.ndarray
    mu: float
    nu: float
    sigma: float
    B: np.ndarray
    f: float
    g: np.ndarray
    grad_f: np.ndarray
    A: np.ndarray


@dataclass
class IterationRecord:
    k: int
    rho: float
    accepted: bool
    sigma_after: float
    nu_after: float
    npred: float
    tpred: float
    pred: float
    ared: float
    step_norms: tuple
    E_mu: float
    E_0: float
    mu: float = 0.0
    sigma_before: float = 0.0
    nu_before: float = 0.0
    pred_parts: float = 0.0
    y_min: float = 0.0
    # min_i (d_y + tau*y)_i and min_i (n_y + xi*tau*y)_i; nonnegative when the bounds hold
    dy_margin: float = 0.0
    ny_margin: float = 0.0
    normal_fallback: bool = False
    tangential_fallback: bool = False
    subproblem_failed: bool = False
    soc: bool = False


class Status(enum.Enum):
    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterations"
    SUBPROBLEM_FAILURE = "SubproblemFailure"
    EVALUATION_ERROR = "EvaluationError"


@dataclass
class SolveResult:
    status: Status
    x: np.ndarray
    y: np.ndarray
    lam: np.ndarray
    f: float
    E_final: float
    NO: int
    NI: int
    NIF: int
    NIG: int
    counters: EvalCounters
    merit_evals: int = 0
    log: List[IterationRecord] = field(default_factory=list)
    message: str = ""

    @property
    def converged(self):
        return self.status is Status.CONVERGED

    x_final = property(lambda self: self.x)
    y_final = property(lambda self: self.y)
    lambda_final = property(lambda self: self.lam)
    f_final = property(lambda self: self.f)


def initialize(problem, x0, config, counters=None):
    """Starting iterate: slacks ``max(-g, y_floor)``, least-squares multipliers."""
    x = np.array(x0, dtype=float)
    f, g, gf, A = evaluate_all(problem, x, counters)
    y = np.maximum(-g, config.y_floor)
    lam = update_multipliers(A, y, gf, config.mu0)
    B = _initial_hessian(problem, x, lam, config, counters)
    return IterateState(x=x, y=y, lam=lam, mu=config.mu0, nu=config.nu1, sigma=config.sigma0,
                        B=B, f=f, g=g, grad_f=gf, A=A)


def _use_exact(problem, config):
    return config.hessian == "exact" and problem.lagrangian_hessian is not None


def _initial_hessian(problem, x, lam, config, counters):
    if _use_exact(problem, config):
        return eval_hessian(problem, x, lam, counters)
    return np.eye(problem.n)


def damped_bfgs(B, s, r, threshold=1e-8):
    """Powell-damped BFGS update of ``B`` with step ``s`` and gradient change ``r``.

    The update is skipped (``B`` returned unchanged) when the damped
    curvature ``s'r`` falls below ``threshold * ||s||^2``.
    """
    Bs = B @ s
    sBs = float(s @ Bs)
    sr = float(s @ r)
    if sBs <= 0.0:
        return B
    if sr < 0.2 * sBs:
        theta = 0.8 * sBs / (sBs - sr)
        r = theta * r + (1.0 - theta) * Bs
        sr = float(s @ r)
    if sr <= threshold * float(s @ s):
        return B
    B_new = B - np.outer(Bs, Bs) / sBs + np.outer(r, r) / sr
    return 0.5 * (B_new + B_new.T)


def second_order_correction(A, y, d_y, residual, tau):
    """Least-norm correction ``w`` in the scaled metric with ``A'w_x + w_y = -residual``.

    ``residual`` is ``g(x + d) + y + d_y`` at the trial point. Returns
    ``(w_x, w_y)``, or ``None`` when the corrected slacks would violate
    ``d_y + w_y >= -tau * y``.
    """
    n = A.shape[0]
    M = np.vstack([A, np.diag(y)])
    try:
        z = np.linalg.solve(M.T @ M, residual)
    except np.linalg.LinAlgError:
        return None
    u = -M @ z
    w_x, w_y = u[:n], y * u[n:]
    if np.any(d_y + w_y < -tau * y):
        return None
    return w_x, w_y


def _scaled_norm(v_x, v_y, y):
    return float(np.sqrt(v_x @ v_x + np.sum((v_y / y) ** 2)))


def inner_iteration(state, problem, config, counters, k=0):
    """One trial step: normal, tangential, penalty update, ratio test, sigma update.

    Returns ``(state, record)``. On rejection ``x`` and ``y`` are left
    untouched.
    """
    x, y, A, g, gf, B = state.x, state.y, state.A, state.g, state.grad_f, state.B
    mu, sigma, nu_prev = state.mu, state.sigma, state.nu
    m = problem.m
    E_mu = error_function(gf, A, state.lam, y, g, mu)
    E_0 = error_function(gf, A, state.lam, y, g, 0.0)

    try:
        normal = solve_normal(A, g, y, sigma, config)
        N = null_space_basis(np.vstack([A, np.eye(m)]))
        tang = solve_tangential(N, B, mu, y, gf, normal.n_x, normal.n_y, sigma, config)
    except MaxSecularIterations as exc:
        _log.debug("iteration %d: subproblem failed (%s)", k, exc)
        sigma_new = update_sigma(sigma, -math.inf, config)
        state = dataclasses.replace(state, sigma=sigma_new)
        rec = IterationRecord(k=k, rho=-math.inf, accepted=False, sigma_after=sigma_new,
                              nu_after=nu_prev, npred=0.0, tpred=0.0, pred=0.0, ared=0.0,
                              step_norms=(0.0, 0.0, 0.0), E_mu=E_mu, E_0=E_0, mu=mu,
                              sigma_before=sigma, nu_before=nu_prev, y_min=float(y.min()),
                              subproblem_failed=True)
        return state, rec

    d_x = normal.n_x + tang.t_x
    d_y = normal.n_y + tang.t_y
    sigma_tilde = sigma / config.xi ** 3
    Dn = _scaled_norm(normal.n_x, normal.n_y, y)
    Dt = _scaled_norm(tang.t_x, tang.t_y, y)
    Dd = _scaled_norm(d_x, d_y, y)
    chi = eval_chi(gf, B, mu, y, normal.n_x, normal.n_y)
    nu = update_penalty(nu_prev, normal.npred, tang.tpred, chi, sigma, sigma_tilde,
                        Dn, Dt, Dd, config.delta)
    pred = eval_pred(gf, B, mu, y, nu, A, g, sigma, d_x, d_y)
    parts = pred_from_parts(tang.tpred, normal.npred, chi, nu, sigma, sigma_tilde, Dn, Dt, Dd)

    x_new, y_new = x + d_x, y + d_y
    try:
        f_new = eval_objective(problem, x_new, counters)
        g_new = eval_constraints(problem, x_new, counters)
        phi = eval_merit(state.f, y, np.linalg.norm(g + y), mu, nu)
        phi_new = eval_merit(f_new, y_new, np.linalg.norm(g_new + y_new), mu, nu)
        ared = phi - phi_new
    except NonFiniteEvaluation:
        ared = -math.inf
    rho = descent_ratio(ared, pred)
    accepted = rho >= config.eta1
    used_soc = False
    if (not accepted and config.second_order_correction and np.isfinite(ared)
            and Dn <= SOC_RATIO * Dt):
        corr = second_order_correction(A, y, d_y, g_new + y_new, config.tau)
        if corr is not None:
            x_soc, y_soc = x_new + corr[0], y_new + corr[1]
            try:
                f_soc = eval_objective(problem, x_soc, counters)
                g_soc = eval_constraints(problem, x_soc, counters)
                phi_soc = eval_merit(f_soc, y_soc, np.linalg.norm(g_soc + y_soc), mu, nu)
                rho_soc = descent_ratio(phi - phi_soc, pred)
            except NonFiniteEvaluation:
                rho_soc = -math.inf
            if rho_soc >= config.eta1:
                used_soc, accepted, rho, ared = True, True, rho_soc, phi - phi_soc
                d_x, d_y = x_soc - x, y_soc - y
                x_new, y_new, f_new, g_new = x_soc, y_soc, f_soc, g_soc

    if accepted:
        gf_new = eval_gradient(problem, x_new, counters)
        A_new = eval_jacobian(problem, x_new, counters)
        lam_new = update_multipliers(A_new, y_new, gf_new, mu)
        if _use_exact(problem, config):
            B_new = eval_hessian(problem, x_new, lam_new, counters)
        else:
            r = (gf_new + A_new @ lam_new) - (gf + A @ lam_new)
            B_new = damped_bfgs(B, d_x, r)
        state = dataclasses.replace(state, x=x_new, y=y_new, lam=lam_new, f=f_new, g=g_new,
                                    grad_f=gf_new, A=A_new, B=B_new)
    sigma_new = update_sigma(sigma, rho, config)
    state = dataclasses.replace(state, sigma=sigma_new, nu=nu)

    rec = IterationRecord(
        k=k, rho=rho, accepted=accepted, sigma_after=sigma_new, nu_after=nu,
        npred=normal.npred, tpred=tang.tpred, pred=pred, ared=ared, step_norms=(Dn, Dt, Dd),
        E_mu=E_mu, E_0=E_0, mu=mu, sigma_before=sigma, nu_before=nu_prev, pred_parts=parts,
        y_min=float(state.y.min()),
        dy_margin=float(np.min(d_y + config.tau * y)),
        ny_margin=float(np.min(normal.n_y + config.xi * config.tau * y)),
        normal_fallback=normal.used_cauchy_fallback,
        tangential_fallback=tang.used_cauchy_fallback,
        soc=used_soc,
    )
    if config.check_invariants:
        check_record(rec, config)
    return state, rec


def check_record(rec, config):
    """Raise ``InvariantViolation`` if an iteration record breaks a guaranteed inequality."""
    problems = []
    if not rec.npred >= 0.0:
        problems.append(f"npred = {rec.npred:.3e} < 0")
    if not rec.tpred >= 0.0:
        problems.append(f"tpred = {rec.tpred:.3e} < 0")
    if not rec.pred >= config.delta * rec.nu_after * rec.npred - 1e-12 * max(1.0, abs(rec.pred)):
        problems.append(f"pred = {rec.pred:.3e} < delta*nu*npred")
    if not rec.nu_after >= rec.nu_before:
        problems.append("penalty parameter decreased")
    if not rec.sigma_after >= config.sigma_min:
        problems.append("sigma below sigma_min")
    if not rec.subproblem_failed:
        if not rec.y_min > 0.0:
            problems.append("slack not strictly positive")
        if rec.dy_margin < 0.0 or rec.ny_margin < 0.0:
            problems.append("fraction-to-the-boundary bound violated")
        if abs(rec.pred - rec.pred_parts) > 1e-10 * max(1.0, abs(rec.pred), abs(rec.pred_parts)):
            problems.append(f"pred decomposition mismatch {rec.pred:.6e} vs {rec.pred_parts:.6e}")
    if problems:
        raise InvariantViolation(f"iteration {rec.k}: " + "; ".join(problems))


def next_barrier(state, config):
    """Adaptive barrier update, forced to decrease when the rule would not.

    The adaptive rule can return ``mu >= mu_prev`` (it depends only on
    ``y * lam``), which makes the continuation cycle without progress.
    In that case ``mu`` is cut by the largest factor the rule allows.
    """
    mu = update_barrier(state.y, state.lam, state.mu, config)
    if mu >= state.mu:
        mu = max(MAX_BARRIER_FACTOR * state.mu, barrier_floor(config))
    return mu


def solve(problem, x0, config=None):
    """Minimise ``problem`` from ``x0``.

    Runs the barrier continuation: inner iterations at fixed ``mu`` until
    ``E(x, y; mu) < a * mu``, then an adaptive ``mu`` update, until
    ``E(x, y; 0) <= e_t``.

    Returns
    -------
    SolveResult
        ``NO`` counts barrier updates, ``NI`` inner iterations, ``NIF``
        objective evaluations and ``NIG`` objective-gradient evaluations.
    """
    config = config or SolverConfig()
    counters = EvalCounters()
    log = []
    try:
        state = initialize(problem, x0, config, counters)
    except (NonFiniteEvaluation, RankDeficient) as exc:
        x = np.array(x0, dtype=float)
        status = (Status.EVALUATION_ERROR if isinstance(exc, NonFiniteEvaluation)
                  else Status.SUBPROBLEM_FAILURE)
        return SolveResult(status=status, x=x, y=np.full(problem.m, np.nan),
                           lam=np.full(problem.m, np.nan), f=math.nan, E_final=math.inf,
                           NO=0, NI=0, NIF=counters.nf, NIG=counters.ngrad,
                           counters=counters, message=str(exc))

    def E(st, mu):
        return error_function(st.grad_f, st.A, st.lam, st.y, st.g, mu)

    floor = barrier_floor(config)
    NO = NI = 0
    stalled = 0
    status, message = None, ""
    while E(state, 0.0) >= config.e_t:
        inner = 0
        while True:
            need_mu = E(state, state.mu) >= config.a * state.mu
            # at the barrier floor a further mu update cannot help; keep iterating on E(.;0)
            at_floor = state.mu <= floor and E(state, 0.0) >= config.e_t
            if not (need_mu or at_floor) or inner >= config.max_inner_per_mu:
                break
            if NI >= config.max_total_iters:
                status, message = Status.MAX_ITERATIONS, f"reached {NI} inner iterations"
                break
            try:
                state, rec = inner_iteration(state, problem, config, counters, k=NI)
            except NonFiniteEvaluation as exc:
                status, message = Status.EVALUATION_ERROR, str(exc)
                break
            except RankDeficient as exc:
                status, message = Status.SUBPROBLEM_FAILURE, str(exc)
                break
            log.append(rec)
            NI += 1
            inner += 1
            stalled = stalled + 1 if (not rec.accepted and state.sigma > STAGNATION_SIGMA) else 0
            if stalled >= STAGNATION_COUNT:
                status = Status.SUBPROBLEM_FAILURE
                message = f"{stalled} consecutive rejected steps with sigma > {STAGNATION_SIGMA:g}"
                break
        if status is not None:
            break
        state = dataclasses.replace(state, mu=next_barrier(state, config))
        NO += 1
        _log.debug("outer %d: mu=%.3e E0=%.3e NI=%d", NO, state.mu, E(state, 0.0), NI)

    E_final = E(state, 0.0)
    if status is None:
        status = Status.CONVERGED
    return SolveResult(status=status, x=state.x, y=state.y, lam=state.lam, f=state.f,
                       E_final=E_final, NO=NO, NI=NI, NIF=counters.nf, NIG=counters.ngrad,
                       counters=counters, merit_evals=NI + 1, log=log, message=message)
