"""Tests for the interior-point method on the L2-weighted dual."""

import logging

import numpy as np
import pytest

from chebydual.config import IpmConfig, RefcheckConfig, Z0Mode
from chebydual.errors import AllWeightsFiltered
from chebydual.evaluation.refcheck import detect_reference_points
from chebydual.models.problem import Mode, MonomialDim, WeightVector
from chebydual.problems.builtin import builtin_problem, make_problem
from chebydual.models.result import Method, Status, StopReason
from chebydual.solvers.ipm import (
    DualState,
    ipm_solve,
    kkt_residual,
    newton_direction,
    smw_solve,
    step_lengths,
    update_mu,
)
from chebydual.solvers.lp import lp_solve
from chebydual.solvers.wls import HessianFactor, dual_gradient, hessian_dense, hessian_factor, solve_wls

X2_OPT = np.array([0.25, 0.5, 0.25])


def _state(w, y, z, mu):
    w = np.asarray(w, dtype=np.float64)
    return DualState(w=w, y=y, z=np.asarray(z, dtype=np.float64), mu=mu, k=0, support=np.arange(w.size))


def _dense_newton(sol, state):
    """Solve the full (2m+1) linearized KKT system directly."""
    m = state.size
    hess = hessian_dense(sol)
    e = np.ones((m, 1))
    jac = np.block(
        [
            [-hess, -e, -np.eye(m)],
            [np.diag(state.z), np.zeros((m, 1)), np.diag(state.w)],
            [e.T, np.zeros((1, 1)), np.zeros((1, m))],
        ]
    )
    rhs = -kkt_residual(state, dual_gradient(sol))
    step = np.linalg.solve(jac, rhs)
    return step[:m], step[m], step[m + 1 :]


class TestKktResidual:
    def test_uniform_complementarity_block(self):
        m = 4
        state = _state(np.full(m, 1.0 / m), 0.0, np.ones(m), 1.0)
        res = kkt_residual(state, np.zeros(m))
        np.testing.assert_allclose(res[m : 2 * m], 1.0 / m - 1.0)
        assert res[-1] == pytest.approx(0.0)

    def test_central_point(self):
        """z = -grad - y e and W z = mu e zero the first two blocks."""
        grad = np.array([0.3, 0.1, 0.2])
        z = -grad + 0.5
        w = 0.01 / z
        state = _state(w, -0.5, z, 0.01)
        res = kkt_residual(state, grad)
        np.testing.assert_allclose(res[:6], 0.0, atol=1e-15)

    def test_x2_optimum(self, x2_problem):
        """At w*, grad = 1/4 everywhere; z = mu / w -> 0 as mu -> 0."""
        sol = solve_wls(x2_problem, WeightVector(X2_OPT))
        grad = dual_gradient(sol)
        np.testing.assert_allclose(grad, 0.25)
        for mu in (1e-4, 1e-8, 1e-12):
            res = kkt_residual(_state(X2_OPT, -0.25, mu / X2_OPT, mu), grad)
            assert np.max(np.abs(res)) <= 10.0 * mu


class TestSmwSolve:
    def test_no_low_rank_term(self):
        factor = HessianFactor(k=np.zeros((1, 3)), kr=np.zeros((1, 3)), ki=np.zeros((0, 3)), support=np.arange(3))
        w, z = np.array([0.2, 0.3, 0.5]), np.array([1.0, 2.0, 4.0])
        rhs = np.array([1.0, -1.0, 2.0])
        np.testing.assert_allclose(smw_solve(factor, w, z, rhs), w / z * rhs)

    def test_two_node(self, two_node):
        sol = solve_wls(two_node, WeightVector([0.5, 0.5]))
        w = z = np.array([0.5, 0.5])
        dense = np.array([[2.0, -2.0], [-2.0, 2.0]]) + np.eye(2)
        rhs = np.array([0.3, -1.2])
        np.testing.assert_allclose(
            smw_solve(hessian_factor(sol), w, z, rhs), np.linalg.solve(dense, rhs), atol=1e-12
        )

    @pytest.mark.parametrize("kind", ["real", "complex"])
    def test_matches_dense(self, kind, make_real, make_complex, make_weights, rng):
        problem = (make_real if kind == "real" else make_complex)(50, 6)
        w = make_weights(50)
        z = rng.uniform(0.1, 2.0, 50)
        sol = solve_wls(problem, WeightVector(w))
        dense = -hessian_dense(sol) + np.diag(z / w)
        rhs = rng.standard_normal((50, 2))
        got = smw_solve(hessian_factor(sol), w, z, rhs)
        expected = np.linalg.solve(dense, rhs)
        assert np.max(np.abs(got - expected)) <= 1e-9 * np.max(np.abs(expected))


class TestNewtonDirection:
    @pytest.mark.parametrize("kind", ["real", "complex"])
    def test_matches_dense_system(self, kind, make_real, make_complex, make_weights, rng):
        m = 6
        problem = (make_real if kind == "real" else make_complex)(m, 2)
        w = make_weights(m)
        state = _state(w, -0.3, rng.uniform(0.5, 1.5, m), 0.05)
        sol = solve_wls(problem, WeightVector(w))
        got = newton_direction(state, sol, hessian_factor(sol), state.mu)
        n_w, n_y, n_z = _dense_newton(sol, state)
        np.testing.assert_allclose(got.n_w, n_w, atol=1e-9)
        assert got.n_y == pytest.approx(n_y, abs=1e-9)
        np.testing.assert_allclose(got.n_z, n_z, atol=1e-9)

    def test_preserves_simplex(self, make_real, make_weights, rng):
        w = make_weights(20)
        state = _state(w, -1.0, rng.uniform(0.5, 1.5, 20), 1e-3)
        sol = solve_wls(make_real(20, 4), WeightVector(w))
        direction = newton_direction(state, sol, hessian_factor(sol), state.mu)
        assert abs(direction.n_w.sum()) <= 1e-9

    def test_vanishes_at_x2_optimum(self, x2_problem):
        mu = 1e-12
        state = _state(X2_OPT, -0.25, mu / X2_OPT, mu)
        sol = solve_wls(x2_problem, WeightVector(X2_OPT))
        direction = newton_direction(state, sol, hessian_factor(sol), mu)
        assert np.max(np.abs(direction.n_w)) <= 1e-8


class TestStepControl:
    def test_full_step(self):
        a_w, a_z = step_lengths(np.ones(2), np.ones(2), np.array([0.1, 0.0]), np.array([1.0, 2.0]), 0.99)
        assert (a_w, a_z) == (1.0, 1.0)

    def test_fraction_to_boundary(self):
        a_w, _ = step_lengths(np.array([0.5, 0.5]), np.ones(2), np.array([-1.0, 1.0]), np.zeros(2), 0.9)
        assert a_w == pytest.approx(0.45)

    def test_smallest_ratio(self):
        a_w, _ = step_lengths(np.array([0.1, 0.9]), np.ones(2), np.array([-0.2, -0.9]), np.zeros(2), 0.5)
        assert a_w == pytest.approx(0.25)

    def test_centered_products(self):
        assert update_mu(np.array([0.5, 0.25]), np.array([1.0, 2.0])) == 0.0

    def test_half_centrality(self):
        """xi = 0.5, mean 1: sigma = 0.1 * 0.05^3."""
        assert update_mu(np.array([0.5, 1.5]), np.ones(2)) == pytest.approx(1.25e-5)

    def test_capped_ratio(self):
        assert update_mu(np.array([0.0, 2.0]), np.ones(2)) == pytest.approx(0.8)


class TestIpmSolve:
    def test_x2(self, x2_problem):
        report = ipm_solve(x2_problem)
        assert report.method is Method.IPM
        assert report.status is Status.CONVERGED
        np.testing.assert_allclose(report.w, X2_OPT, atol=1e-6)
        assert report.eta == pytest.approx(0.5, abs=1e-8)
        assert report.d == pytest.approx(0.25, rel=1e-8)
        refset = detect_reference_points(report.r, report.eta, tol=1e-4)
        assert refset.indices == [0, 1, 2]

    def test_x2_mu_over_w_start(self, x2_problem):
        report = ipm_solve(x2_problem, IpmConfig(z0_mode=Z0Mode.MU_OVER_W))
        assert report.converged
        assert report.eta == pytest.approx(0.5, rel=1e-5)

    def test_history(self, x2_problem):
        report = ipm_solve(x2_problem)
        assert len(report.history) == report.iterations + 1
        first = report.history[0]
        assert first.alpha_w is None
        # mu0 is scaled by max grad d(w0) = (2/3)^2 at uniform weights
        assert first.mu == pytest.approx(1e-5 * 4.0 / 9.0)
        assert all(h.kkt_inf is not None for h in report.history)
        assert report.history[-1].alpha_w is not None

    def test_iteration_cap(self, make_real):
        report = ipm_solve(make_real(40, 4), IpmConfig(k_max=2))
        assert report.status is Status.ITER_CAPPED
        assert report.stop_reason is StopReason.MAX_ITER
        assert report.iterations == 2

    def test_agrees_with_lp(self, make_real):
        problem = make_real(40, 4)
        ipm = ipm_solve(problem)
        lp = lp_solve(problem, RefcheckConfig())
        assert ipm.converged
        assert ipm.eta == pytest.approx(lp.eta, rel=1e-6)
        assert ipm.eta_dual <= lp.eta * (1.0 + 1e-8)

    def test_filtering(self, make_real, caplog):
        problem = make_real(60, 4)
        with caplog.at_level(logging.WARNING, logger="chebydual.solvers.ipm"):
            report = ipm_solve(problem, IpmConfig(eps_w=1e-6 / problem.m))
        assert "Filtered" in caplog.text
        assert report.n + 1 <= report.active_nodes < problem.m
        assert np.count_nonzero(report.w) == report.active_nodes

    def test_filter_too_aggressive(self, make_real):
        with pytest.raises(AllWeightsFiltered):
            ipm_solve(make_real(10, 4), IpmConfig(eps_w=0.5))

    @pytest.mark.parametrize("factor", [1e-5, 1e5])
    def test_invariant_under_data_scaling(self, make_real, factor):
        """Scaling f scales eta and leaves the weights and the stopping point alone."""
        problem = make_real(40, 4)
        scaled = make_problem(problem.nodes, factor * problem.values, MonomialDim(4), Mode.REAL)
        base, ours = ipm_solve(problem), ipm_solve(scaled)
        assert ours.status is Status.CONVERGED
        assert abs(ours.iterations - base.iterations) <= 1
        assert ours.eta == pytest.approx(factor * base.eta, rel=1e-8)
        np.testing.assert_allclose(ours.w, base.w, atol=1e-8)

    def test_small_scale_not_stopped_early(self, make_real):
        """With |f| ~ 1e-5, d is ~1e-12 and every residual sits below the default tolerances."""
        problem = make_real(40, 4)
        small = make_problem(problem.nodes, 1e-5 * problem.values, MonomialDim(4), Mode.REAL)
        report = ipm_solve(small)
        assert report.status is Status.CONVERGED
        assert report.eta == pytest.approx(lp_solve(small).eta, rel=1e-6)
        assert report.diagnostics.slackness_violation <= 1e-6 * report.eta

    def test_zero_data(self):
        problem = make_problem([-1.0, 0.0, 1.0], [0.0, 0.0, 0.0], MonomialDim(1))
        report = ipm_solve(problem)
        assert report.status is Status.CONVERGED
        assert report.stop_reason is StopReason.INTERPOLATION
        assert report.iterations == 0
        assert report.eta == 0.0


def _check_optimality(report, problem):
    """Slackness, support size, alternation and weak duality along the path."""
    diag = report.diagnostics
    assert report.status is Status.CONVERGED
    assert diag.slackness_violation <= 1e-6 * report.eta
    assert diag.support_above_1e8 >= problem.n + 1
    if problem.is_real:
        assert diag.alternation_run >= problem.n + 1
    for entry in report.history:
        assert np.sqrt(max(entry.d, 0.0)) <= entry.r_inf + 1e-8


def test_agrees_with_lp_on_random_instances(rng):
    for _ in range(30):
        n = int(rng.integers(1, 7))
        m = int(rng.integers(n + 2, 41))
        x = np.sort(rng.uniform(-1.0, 1.0, m))
        problem = make_problem(x, rng.uniform(-1.0, 1.0, m), MonomialDim(n), Mode.REAL)
        report = ipm_solve(problem)
        _check_optimality(report, problem)
        assert report.eta == pytest.approx(lp_solve(problem).eta, rel=1e-6)


@pytest.mark.slow
@pytest.mark.parametrize("name,dim", [("f1", 21), ("f1", 31), ("g1", 9), ("g2", 21)])
def test_optimality_on_builtin(name, dim):
    problem = builtin_problem(name, dim)
    report = ipm_solve(problem, IpmConfig(eps_w=1e-6 / problem.m))
    assert report.iterations <= 150
    _check_optimality(report, problem)


@pytest.mark.slow
def test_f1_convergence_factor_near_one():
    """On a dense grid a neighbour of a reference node nearly attains eta."""
    problem = builtin_problem("f1", 16)
    report = ipm_solve(problem, IpmConfig(eps_w=1e-6 / problem.m))
    assert report.converged
    assert report.rho_estimate > 0.9


@pytest.mark.slow
def test_f2_alternation():
    problem = builtin_problem("f2", 21)
    report = ipm_solve(problem, IpmConfig(eps_w=1e-6 / problem.m))
    assert report.converged
    assert report.diagnostics.alternation_ok
    assert report.diagnostics.alternation_run >= 22
