"""Tests for the merit function, reductions and parameter updates."""
import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from arcbip import DomainError, RankDeficient, SolverConfig
from arcbip.merit import (barrier_floor, descent_ratio, error_function, eval_ared, eval_chi,
                          eval_merit, eval_pred, least_squares_multipliers, pred_from_parts,
                          update_barrier, update_multipliers, update_penalty, update_sigma)
from arcbip.normal import eval_npred
from arcbip.tangential import eval_tpred

from conftest import disk_problem

CFG = SolverConfig()


class TestMerit:
    def test_unit_slacks(self):
        assert eval_merit(0.0, np.ones(3), 0.0, 0.3, 2.0) == 0.0

    def test_hand_value(self):
        np.testing.assert_allclose(eval_merit(1.0, np.array([math.e]), 0.5, 1.0, 2.0), 1.0)

    def test_zero_slack(self):
        with pytest.raises(DomainError):
            eval_merit(0.0, np.array([1.0, 0.0]), 0.0, 1.0, 1.0)


def _random_reduction_data(rng):
    n, m = 3, 2
    A = rng.normal(size=(n, m))
    y = rng.uniform(0.5, 2.0, size=m)
    g = rng.normal(size=m)
    X = rng.normal(size=(n, n))
    return dict(A=A, y=y, g=g, B=X + X.T, grad_f=rng.normal(size=n), mu=0.3, nu=2.5, sigma=0.7,
                sigma_tilde=0.7 / 0.8 ** 3, n_x=rng.normal(size=n), n_y=rng.normal(size=m),
                t_x=rng.normal(size=n), t_y=rng.normal(size=m))


class TestPred:
    def test_zero_step(self):
        assert eval_pred(np.ones(2), np.eye(2), 0.1, np.ones(1), 1.0, np.ones((2, 1)),
                         np.zeros(1), 1.0, np.zeros(2), np.zeros(1)) == 0.0

    def test_decomposition_identity(self, rng):
        for _ in range(20):
            D = _random_reduction_data(rng)
            # t in the null space of (A' I): take t_y = -A' t_x
            t_x = D["t_x"]
            t_y = -D["A"].T @ t_x
            d_x, d_y = D["n_x"] + t_x, D["n_y"] + t_y
            y = D["y"]
            pred = eval_pred(D["grad_f"], D["B"], D["mu"], y, D["nu"], D["A"], D["g"],
                             D["sigma"], d_x, d_y)
            npred = eval_npred(D["A"], D["g"], y, D["sigma_tilde"], D["n_x"], D["n_y"])
            tpred = eval_tpred(D["B"], D["mu"], y, D["grad_f"], D["n_x"], D["n_y"], D["sigma"],
                               t_x, t_y)
            chi = eval_chi(D["grad_f"], D["B"], D["mu"], y, D["n_x"], D["n_y"])

            def scaled(vx, vy):
                return np.linalg.norm(np.concatenate([vx, vy / y]))
            parts = pred_from_parts(tpred, npred, chi, D["nu"], D["sigma"], D["sigma_tilde"],
                                    scaled(D["n_x"], D["n_y"]), scaled(t_x, t_y), scaled(d_x, d_y))
            np.testing.assert_allclose(parts, pred, rtol=1e-10, atol=1e-12)

    def test_feasible_tangential_only(self, rng):
        D = _random_reduction_data(rng)
        g = -D["y"]
        t_x = D["t_x"]
        t_y = -D["A"].T @ t_x
        pred = eval_pred(D["grad_f"], D["B"], D["mu"], D["y"], D["nu"], D["A"], g, D["sigma"],
                         t_x, t_y)
        tpred = eval_tpred(D["B"], D["mu"], D["y"], D["grad_f"], np.zeros(3), np.zeros(2),
                           D["sigma"], t_x, t_y)
        np.testing.assert_allclose(pred, tpred, rtol=1e-12)


class TestAred:
    def test_zero_step(self):
        prob = disk_problem()
        ared, _, _ = eval_ared(prob, np.array([0.1, 0.2]), np.array([1.0]), np.zeros(2),
                               np.zeros(1), 0.1, 1.0)
        assert ared == 0.0

    def test_affine_objective(self):
        prob = disk_problem()
        x, y = np.array([0.1, 0.2]), np.array([1.95])
        d_x = np.array([0.01, -0.03])
        # keep g + y fixed and log y unchanged by compensating the slack
        g0 = prob.constraints(x)
        d_y = (g0 - prob.constraints(x + d_x))
        ared, _, _ = eval_ared(prob, x, y, d_x, d_y, 0.0, 1.0)
        np.testing.assert_allclose(ared, -np.ones(2) @ d_x, rtol=1e-12)

    def test_nonpositive_trial_slack(self):
        with pytest.raises(DomainError):
            eval_ared(disk_problem(), np.zeros(2), np.ones(1), np.zeros(2), np.array([-1.0]),
                      0.1, 1.0)

    def test_second_order_agreement_with_pred(self, rng):
        prob = disk_problem()
        x, y = np.array([0.3, -0.4]), np.array([1.2])
        lam = np.array([0.5])
        B = prob.lagrangian_hessian(x, lam)
        g, A, gf = prob.constraints(x), prob.constraint_jacobian(x), prob.objective_gradient(x)
        d_x, d_y = rng.normal(size=2), rng.normal(size=1) * 0.5
        gaps = []
        for h in 0.1 * 0.5 ** np.arange(5):
            ared, _, _ = eval_ared(prob, x, y, h * d_x, h * d_y, 0.1, 2.0)
            pred = eval_pred(gf, B, 0.1, y, 2.0, A, g, 0.0, h * d_x, h * d_y)
            gaps.append(abs(ared - pred))
        # |ared - pred| = O(h^2): halving h cuts the gap by about four or more
        rates = np.log2(np.array(gaps[:-1]) / np.array(gaps[1:]))
        assert np.all(rates > 1.7)


class TestDescentRatio:
    def test_equal(self):
        assert descent_ratio(2.0, 2.0) == 1.0

    def test_fraction(self):
        assert descent_ratio(0.9, 1.0) == 0.9

    def test_degenerate(self):
        assert descent_ratio(1.0, 0.0) == -math.inf
        assert descent_ratio(1.0, -1.0) == -math.inf


class TestUpdatePenalty:
    def test_no_increase(self):
        assert update_penalty(5.0, 1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.3) == 5.0

    def test_jump_to_candidate(self):
        # nu_tilde = -(tpred + chi) / ((1 - delta) npred) = 2 with zero step norms
        nu = update_penalty(1.0, 1.0, -1.4, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.3)
        np.testing.assert_allclose(nu, 2.0)

    def test_at_least_half_again(self):
        nu = update_penalty(1.0, 1.0, -0.84, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.3)
        assert nu == 1.5

    def test_degenerate_denominators(self):
        assert update_penalty(3.0, 0.0, -5.0, -1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.3) == 3.0

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 2 ** 31))
    def test_penalty_guarantees_sufficient_pred(self, seed):
        rng = np.random.default_rng(seed)
        npred = float(rng.uniform(0, 2))
        tpred = float(rng.uniform(0, 2))
        chi = float(rng.normal() * 3)
        sigma, st_ = float(rng.uniform(0.01, 3)), float(rng.uniform(0.01, 3))
        Dn, Dt = float(rng.uniform(0, 1)), float(rng.uniform(0, 1))
        Dd = float(rng.uniform(0, Dn + Dt))
        nu_prev = float(rng.uniform(0.1, 5))
        nu = update_penalty(nu_prev, npred, tpred, chi, sigma, st_, Dn, Dt, Dd, 0.3)
        assert nu >= nu_prev
        if npred > 0 or Dn > 0:
            pred = pred_from_parts(tpred, npred, chi, nu, sigma, st_, Dn, Dt, Dd)
            assert pred >= 0.3 * nu * npred - 1e-12 * max(1.0, abs(pred))


class TestUpdateSigma:
    def test_very_successful(self):
        assert update_sigma(4.0, 0.95, CFG) == 2.0

    def test_floor(self):
        assert update_sigma(CFG.sigma_min, 0.95, CFG) == CFG.sigma_min

    def test_successful(self):
        assert update_sigma(4.0, 0.5, CFG) == 4.0

    def test_unsuccessful(self):
        assert update_sigma(4.0, -1.0, CFG) == 8.0
        assert update_sigma(4.0, -math.inf, CFG) == 8.0


def _lstsq_oracle(A, y, grad_f, mu):
    """Least-squares multipliers from a QR solve of the stacked system."""
    M = np.vstack([A, np.diag(y)])
    rhs = np.concatenate([-grad_f, mu * np.ones_like(y)])
    return scipy.linalg.lstsq(M, rhs, lapack_driver="gelsy")[0]


class TestMultipliers:
    def test_zero_estimate_replaced(self):
        lam = update_multipliers(np.array([[1.0]]), np.array([1.0]), np.array([1.0]), 1.0)
        np.testing.assert_array_equal(lam, [1e-3])

    def test_positive_estimate_kept(self):
        # stationarity grad_f + A lam = 0 with grad_f = -3 and mu y = 1: 2 lam = 3 + 1
        lam = update_multipliers(np.array([[1.0]]), np.array([1.0]), np.array([-3.0]), 1.0)
        np.testing.assert_allclose(lam, [2.0])

    def test_negative_estimate_uses_barrier_ratio(self):
        lam = update_multipliers(np.array([[1.0]]), np.array([100.0]), np.array([1e3]), 1e-3)
        np.testing.assert_allclose(lam, [1e-5])

    def test_matches_qr_oracle(self, rng):
        for _ in range(30):
            n, m = int(rng.integers(1, 6)), int(rng.integers(1, 6))
            A, y = rng.normal(size=(n, m)), rng.uniform(0.01, 3, size=m)
            gf, mu = rng.normal(size=n), float(rng.uniform(0, 1))
            np.testing.assert_allclose(least_squares_multipliers(A, y, gf, mu),
                                       _lstsq_oracle(A, y, gf, mu), rtol=1e-9, atol=1e-11)

    def test_residual_orthogonal_to_range(self, rng):
        A, y = rng.normal(size=(3, 2)), rng.uniform(0.1, 2, size=2)
        gf, mu = rng.normal(size=3), 0.2
        lam = least_squares_multipliers(A, y, gf, mu)
        M = np.vstack([A, np.diag(y)])
        res = np.concatenate([gf + A @ lam, -mu + y * lam])
        np.testing.assert_allclose(M.T @ res, 0.0, atol=1e-12)

    def test_rank_deficient(self):
        with pytest.raises(RankDeficient):
            least_squares_multipliers(np.zeros((2, 1)), np.array([0.0]), np.ones(2), 0.1)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2 ** 31))
    def test_always_positive(self, seed):
        rng = np.random.default_rng(seed)
        n, m = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        lam = update_multipliers(rng.normal(size=(n, m)), rng.uniform(1e-3, 5, size=m),
                                 rng.normal(size=n) * 10, float(rng.uniform(1e-8, 1)))
        assert np.all(lam > 0)


class TestUpdateBarrier:
    def test_perfectly_centred_hits_floor(self):
        assert update_barrier(np.ones(2), np.ones(2), 0.1, CFG) == barrier_floor(CFG)

    def test_moderately_centred(self):
        mu = update_barrier(np.array([0.5, 1.5]), np.ones(2), 0.1, CFG)
        assert abs(mu - 0.005) <= 1e-15

    def test_uncentred_second_arm(self):
        y = np.array([0.01, 1.99])
        mu = update_barrier(y, np.ones(2), 0.1, CFG)
        np.testing.assert_allclose(mu, 0.2 * 1.0, rtol=1e-14)

    def test_floor_value(self):
        assert barrier_floor(CFG) == max(CFG.mu_min, CFG.e_t / 10.0)

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.floats(1e-12, 1e3), min_size=1, max_size=6), st.integers(0, 2 ** 31))
    def test_never_below_floor(self, y, seed):
        y = np.array(y)
        lam = np.random.default_rng(seed).uniform(1e-12, 1e3, size=y.shape)
        assert update_barrier(y, lam, 1.0, CFG) >= barrier_floor(CFG)


class TestErrorFunction:
    def test_exact_kkt(self):
        E = error_function(np.zeros(1), np.ones((1, 1)), np.zeros(1), np.ones(1), -np.ones(1), 0.0)
        assert E == 0.0

    def test_complementarity_only(self):
        E = error_function(np.zeros(1), np.ones((1, 1)), np.zeros(1), np.ones(1), -np.ones(1), 0.1)
        np.testing.assert_allclose(E, 0.1)

    def test_componentwise_max(self, rng):
        gf, A, lam = rng.normal(size=3), rng.normal(size=(3, 2)), rng.uniform(size=2)
        y, g, mu = rng.uniform(size=2), rng.normal(size=2), 0.05
        parts = [np.sqrt(np.sum((gf + A @ lam) ** 2)), np.sqrt(np.sum((y * lam - mu) ** 2)),
                 np.sqrt(np.sum((g + y) ** 2))]
        np.testing.assert_allclose(error_function(gf, A, lam, y, g, mu), max(parts), rtol=1e-15)
