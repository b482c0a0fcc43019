"""Tests for the dense simplex solver and the LP minimax reference."""

import dataclasses

import numpy as np
import pytest
from scipy.optimize import linprog

from chebydual.config import IpmConfig, RefcheckConfig
from chebydual.errors import (
    CapExceeded,
    ComplexModeUnsupported,
    LpInfeasible,
    LpPivotLimit,
    LpResidualMismatch,
    LpUnbounded,
)
from chebydual.models.problem import MonomialDim, WeightVector
from chebydual.models.result import Method, StopReason
from chebydual.problems.builtin import builtin_problem, make_problem
from chebydual.solvers.ipm import ipm_solve
from chebydual.solvers import lp as lp_module
from chebydual.solvers.lp import LpSolution, lp_reference, lp_solve, simplex_bland
from chebydual.solvers.wls import solve_wls


def _linprog_minimax(problem):
    """min eta s.t. |f - V a| <= eta with HiGHS, variables (a, eta)."""
    v = np.vander(problem.nodes, problem.n, increasing=True)
    f = problem.values
    ones = np.ones((problem.m, 1))
    a_ub = np.block([[v, -ones], [-v, -ones]])
    b_ub = np.concatenate([f, -f])
    c = np.zeros(problem.n + 1)
    c[-1] = 1.0
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * problem.n + [(0, None)], method="highs")
    assert res.success
    return res.fun


class TestSimplexBland:
    def test_small_lp(self):
        """min -x1 - x2, x1 + 2 x2 <= 4, 3 x1 + x2 <= 6 (with slacks)."""
        a = np.array([[1.0, 2.0, 1.0, 0.0], [3.0, 1.0, 0.0, 1.0]])
        b = np.array([4.0, 6.0])
        c = np.array([-1.0, -1.0, 0.0, 0.0])
        res = simplex_bland(a, b, c)
        np.testing.assert_allclose(res.x[:2], [1.6, 1.2], atol=1e-12)
        assert res.objective == pytest.approx(-2.8)
        # multipliers satisfy c_B = A_B^T y
        np.testing.assert_allclose(res.duals, [-0.4, -0.2], atol=1e-12)

    def test_negative_rhs_row(self):
        a = np.array([[-1.0, -1.0, 1.0]])
        b = np.array([-2.0])
        res = simplex_bland(a, b, np.array([1.0, 2.0, 0.0]))
        np.testing.assert_allclose(res.x, [2.0, 0.0, 0.0], atol=1e-12)
        assert res.duals[0] == pytest.approx(-1.0)

    def test_unbounded(self):
        with pytest.raises(LpUnbounded):
            simplex_bland(np.array([[1.0, -1.0]]), np.array([0.0]), np.array([-1.0, 0.0]))

    def test_infeasible(self):
        with pytest.raises(LpInfeasible):
            simplex_bland(np.array([[1.0, 1.0]]), np.array([-1.0]), np.array([1.0, 1.0]))

    def test_degenerate_cycling_example(self):
        """Beale's LP cycles under textbook Dantzig pricing; optimum -5/4 at x4 = x6 = 1."""
        a = np.array(
            [
                [1.0, 0.0, 0.0, 0.25, -8.0, -1.0, 9.0],
                [0.0, 1.0, 0.0, 0.5, -12.0, -0.5, 3.0],
                [0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0],
            ]
        )
        b = np.array([0.0, 0.0, 1.0])
        c = np.array([0.0, 0.0, 0.0, -0.75, 20.0, -0.5, 6.0])
        res = simplex_bland(a, b, c)
        assert res.objective == pytest.approx(-1.25, abs=1e-12)
        np.testing.assert_allclose(res.x, [0.75, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0], atol=1e-12)

    def test_pivot_budget(self):
        a = np.array([[1.0, 2.0, 1.0, 0.0], [3.0, 1.0, 0.0, 1.0]])
        with pytest.raises(LpPivotLimit):
            simplex_bland(a, np.array([4.0, 6.0]), np.array([-1.0, -1.0, 0.0, 0.0]), max_pivots=1)

    def test_redundant_row(self):
        """The second row repeats the first; its artificial stays basic at zero."""
        a = np.array([[1.0, 1.0], [1.0, 1.0]])
        res = simplex_bland(a, np.array([1.0, 1.0]), np.array([1.0, 2.0]))
        np.testing.assert_allclose(res.x, [1.0, 0.0], atol=1e-12)
        assert res.objective == pytest.approx(1.0)


class TestLpReference:
    def test_x2_line(self, x2_linear):
        """Best line for x^2 on {-1, 0, 1} is 1/2, equioscillating at every node."""
        sol = lp_reference(x2_linear)
        assert isinstance(sol, LpSolution)
        assert sol.eta == pytest.approx(0.5, abs=1e-12)
        np.testing.assert_allclose(sol.fitted(), 0.5, atol=1e-12)
        np.testing.assert_allclose(sol.multipliers, [0.25, -0.5, 0.25], atol=1e-12)
        np.testing.assert_allclose(sol.weights, [0.25, 0.5, 0.25], atol=1e-12)
        assert sol.basic_indices == [0, 1, 2]

    def test_dimension_override(self, x2_problem):
        assert lp_reference(x2_problem, n=2).eta == pytest.approx(0.5, abs=1e-12)

    def test_data_in_span(self):
        x = np.array([-1.0, -0.5, 0.25, 1.0])
        problem = make_problem(x, 2.0 * x + 1.0, MonomialDim(2))
        assert lp_reference(problem).eta == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("m,n", [(30, 3), (60, 6)])
    def test_matches_highs(self, make_real, m, n):
        problem = make_real(m, n)
        sol = lp_reference(problem)
        assert sol.eta == pytest.approx(_linprog_minimax(problem), rel=1e-8)
        assert np.max(np.abs(sol.residual)) == pytest.approx(sol.eta, rel=1e-9)

    def test_multipliers_alternate(self, make_real):
        problem = make_real(50, 5)
        sol = lp_reference(problem)
        support = np.flatnonzero(np.abs(sol.multipliers) > 1e-12)
        signs = np.sign(sol.multipliers[support])
        assert support.size == problem.n + 1
        assert np.all(signs[1:] != signs[:-1])
        np.testing.assert_allclose(np.abs(sol.residual[support]), sol.eta, rtol=1e-9)
        assert sol.weights.sum() == pytest.approx(1.0)

    def test_weak_duality(self, make_real, make_weights):
        problem = make_real(30, 4)
        eta = lp_reference(problem).eta
        for _ in range(50):
            assert solve_wls(problem, WeightVector(make_weights(30))).d <= eta**2 + 1e-12

    @pytest.mark.parametrize("n", [8, 12])
    def test_abs_on_200_nodes(self, n):
        """f = |x| on 200 equispaced nodes: agreement with HiGHS and an exact residual level."""
        x = np.linspace(-1.0, 1.0, 200)
        problem = make_problem(x, np.abs(x), MonomialDim(n))
        sol = lp_reference(problem)
        assert sol.eta == pytest.approx(_linprog_minimax(problem), rel=1e-7)
        assert abs(np.max(np.abs(sol.residual)) - sol.eta) <= 1e-9 * max(1.0, sol.eta)
        assert sol.eta == pytest.approx(ipm_solve(problem).eta, rel=1e-6)

    def test_residual_mismatch_raises(self, x2_linear, monkeypatch):
        simplex = lp_module.simplex_bland

        def perturbed(a, b, c):
            res = simplex(a, b, c)
            duals = res.duals.copy()
            duals[0] += 1e-3
            return dataclasses.replace(res, duals=duals)

        monkeypatch.setattr(lp_module, "simplex_bland", perturbed)
        with pytest.raises(LpResidualMismatch) as exc:
            lp_reference(x2_linear)
        assert exc.value.r_inf > exc.value.eta

    def test_cap(self, x2_linear):
        with pytest.raises(CapExceeded):
            lp_reference(x2_linear, cap=2)

    def test_complex_rejected(self, make_complex):
        with pytest.raises(ComplexModeUnsupported):
            lp_reference(make_complex(10, 2))


class TestLpSolve:
    def test_report(self, x2_linear):
        report = lp_solve(x2_linear, RefcheckConfig())
        assert report.method is Method.LP
        assert report.stop_reason is StopReason.OPTIMAL
        assert report.converged
        assert report.iterations == 0
        assert report.eta == pytest.approx(0.5)
        # strong duality at the Chebyshev weights
        assert report.d == pytest.approx(0.25)
        assert report.diagnostics.lp_pivots > 0
        assert report.diagnostics.alternation_ok
        assert report.active_nodes == 3
        assert len(report.history) == 1

    def test_cap_from_config(self, make_real):
        with pytest.raises(CapExceeded):
            lp_solve(make_real(30, 3), RefcheckConfig(lp_cap=20))


@pytest.mark.slow
@pytest.mark.parametrize("name", ["f1", "f2"])
def test_builtin_lp_matches_ipm(name):
    problem = builtin_problem(name, 21)
    lp = lp_solve(problem)
    ipm = ipm_solve(problem, IpmConfig(eps_w=1e-6 / problem.m))
    assert ipm.eta == pytest.approx(lp.eta, rel=1e-6)
    assert lp.diagnostics.alternation_ok


@pytest.mark.slow
def test_f2_differs_from_published_level():
    """f2 as defined reaches eta ~ 9.0391e-3 in P21, far below the printed 2.8473e-1."""
    lp = lp_solve(builtin_problem("f2", 21))
    assert lp.eta == pytest.approx(9.0391e-3, rel=1e-3)
