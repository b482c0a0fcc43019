"""Exact discrete minimax fit of real data by linear programming.

The primal problem is

    min eta  s.t.  -eta <= f_i - (B a)_i <= eta,

with B = sqrt(m) Q the uniform-weight orthonormal basis scaled so that B a
gives fitted values. It is solved through its dual in standard form

    max f^T (y+ - y-)  s.t.  B^T (y+ - y-) = 0,  e^T (y+ + y-) = 1,  y+, y- >= 0,

whose simplex multipliers recover (a, eta). The terminal basis sits on the
reference nodes; y+ + y- are Chebyshev dual weights on the simplex.
"""

import logging
import time
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import LinAlgError, LinAlgWarning, lu_factor, lu_solve

from ..config import RefcheckConfig
from ..errors import (
    CapExceeded,
    ChebyDualError,
    ComplexModeUnsupported,
    LpInfeasible,
    LpPivotLimit,
    LpResidualMismatch,
    LpSingularBasis,
    LpUnbounded,
)
from ..models.problem import Problem, WeightVector
from ..models.result import HistoryEntry, Method, SolveReport, Status, StopReason
from ..problems.builtin import with_dim
from .orthobasis import WeightedBasis, build_basis
from .summary import build_report
from .wls import solve_wls

logger = logging.getLogger(__name__)

PIVOT_TOL = 1e-11
RATIO_PIVOT_TOL = 1e-9
LP_REPORT_TOL = 1e-8
RESIDUAL_GAP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SimplexResult:
    """Terminal basic solution of ``min c^T x, A x = b, x >= 0``."""

    x: np.ndarray
    basis: np.ndarray
    duals: np.ndarray
    objective: float
    pivots: int


def _factor(full: np.ndarray, basis: np.ndarray):
    with warnings.catch_warnings():
        warnings.simplefilter("error", LinAlgWarning)
        try:
            return lu_factor(full[:, basis], check_finite=False)
        except (LinAlgError, LinAlgWarning, ValueError) as exc:
            raise LpSingularBasis(str(exc)) from exc


def _basic_solution(lu, b: np.ndarray) -> np.ndarray:
    # x_B >= 0 up to roundoff
    return np.maximum(lu_solve(lu, b), 0.0)


def _run_phase(
    full: np.ndarray,
    b: np.ndarray,
    cost: np.ndarray,
    basis: np.ndarray,
    allowed: np.ndarray,
    col_scale: np.ndarray,
    tol: float,
    budget: int,
) -> int:
    """Revised simplex iterations until no allowed column prices out.

    B is refactorized from the original columns at every pivot. Pricing is
    Dantzig's rule on scaled reduced costs; after a degenerate pivot the
    phase uses Bland's rule until a pivot makes progress again.
    """
    pivots = 0
    bland = False
    while True:
        lu = _factor(full, basis)
        x_b = _basic_solution(lu, b)
        pi = lu_solve(lu, cost[basis], trans=1)
        reduced = cost - full.T @ pi
        threshold = tol * (1.0 + np.abs(cost) + col_scale * np.max(np.abs(pi), initial=0.0))
        entering = np.flatnonzero(allowed & (reduced < -threshold))
        entering = entering[~np.isin(entering, basis)]
        if entering.size == 0:
            return pivots
        if bland:
            col = int(entering[0])
        else:
            col = int(entering[np.argmin(reduced[entering] / col_scale[entering])])

        direction = lu_solve(lu, full[:, col])
        pivot_tol = max(tol, RATIO_PIVOT_TOL * float(np.max(np.abs(direction))))
        eligible = np.flatnonzero(direction > pivot_tol)
        if eligible.size == 0:
            raise LpUnbounded(f"column {col} has no positive pivot candidate")
        ratios = x_b[eligible] / direction[eligible]
        best = float(ratios.min())
        ties = eligible[ratios <= best + tol * (1.0 + abs(best))]
        if bland:
            row = int(ties[np.argmin(basis[ties])])
        else:
            row = int(ties[np.argmax(direction[ties])])

        basis[row] = col
        pivots += 1
        bland = best <= tol * max(1.0, float(np.max(x_b)))
        if pivots >= budget:
            raise LpPivotLimit(pivots)


def _drive_out_artificials(
    full: np.ndarray, basis: np.ndarray, n_var: int, col_scale: np.ndarray, tol: float
) -> int:
    """Swap zero-level artificials for structural columns; rows with no candidate are redundant."""
    pivots = 0
    for row in np.flatnonzero(basis >= n_var):
        lu = _factor(full, basis)
        unit = np.zeros(basis.size)
        unit[row] = 1.0
        reduced_row = lu_solve(lu, unit, trans=1) @ full[:, :n_var]
        reduced_row[basis[basis < n_var]] = 0.0
        scaled = np.abs(reduced_row) / col_scale[:n_var]
        col = int(np.argmax(scaled))
        if scaled[col] > tol:
            basis[row] = col
            pivots += 1
        else:
            logger.debug("constraint row %d is redundant", row)
    return pivots


def simplex_bland(
    a: np.ndarray,
    b: np.ndarray,
    c: np.ndarray,
    tol: float = PIVOT_TOL,
    max_pivots: Optional[int] = None,
) -> SimplexResult:
    """Two-phase revised simplex with Bland's rule on degenerate stretches.

    Minimizes ``c^T x`` subject to ``A x = b``, ``x >= 0``. Phase one starts
    from an artificial identity basis; artificials never re-enter in phase
    two. The basic solution and the multipliers come from a fresh
    factorization of the terminal basis.
    """
    a = np.array(a, dtype=np.float64)
    b = np.array(b, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    p, n_var = a.shape
    flip = b < 0
    a[flip] *= -1.0
    b[flip] *= -1.0

    full = np.hstack([a, np.eye(p)])
    col_scale = np.max(np.abs(full), axis=0)
    col_scale[col_scale == 0.0] = 1.0
    basis = np.arange(n_var, n_var + p)
    budget = max_pivots or 50 * (n_var + p)

    phase_one = np.concatenate([np.zeros(n_var), np.ones(p)])
    everything = np.ones(n_var + p, dtype=bool)
    pivots = _run_phase(full, b, phase_one, basis, everything, col_scale, tol, budget)
    x_b = _basic_solution(_factor(full, basis), b)
    infeasibility = float(x_b[basis >= n_var].sum())
    if infeasibility > 1e-9 * max(1.0, float(b.sum())):
        raise LpInfeasible(f"phase one ended with infeasibility {infeasibility:.3e}")

    pivots += _drive_out_artificials(full, basis, n_var, col_scale, tol)

    costs = np.concatenate([c, np.zeros(p)])
    structural = np.arange(n_var + p) < n_var
    pivots += _run_phase(full, b, costs, basis, structural, col_scale, tol, budget - pivots)

    lu = _factor(full, basis)
    x_b = _basic_solution(lu, b)
    duals = lu_solve(lu, costs[basis], trans=1)
    duals[flip] *= -1.0

    x = np.zeros(n_var + p)
    x[basis] = x_b
    return SimplexResult(
        x=x[:n_var],
        basis=basis.copy(),
        duals=duals,
        objective=float(c @ x[:n_var]),
        pivots=pivots,
    )


@dataclass(frozen=True, eq=False)
class LpSolution:
    """Minimax fit from the LP route.

    ``atilde`` are coordinates in ``basis`` (uniform weights), so
    ``fitted = sqrt(m) * basis.q @ atilde``; ``multipliers`` is y+ - y-,
    nonzero on the reference nodes only.
    """

    problem: Problem
    eta: float
    atilde: np.ndarray
    basic_indices: list[int]
    multipliers: np.ndarray
    weights: np.ndarray
    residual: np.ndarray
    basis: WeightedBasis
    pivots: int

    def fitted(self) -> np.ndarray:
        return self.problem.values - self.residual


def lp_reference(
    problem: Problem, n: Optional[int] = None, cap: int = 5000
) -> LpSolution:
    """Solve the discrete minimax problem of real data exactly."""
    if not problem.is_real:
        raise ComplexModeUnsupported("The LP reference solver")
    if n is not None and n != problem.n:
        problem = with_dim(problem, n)
    m, nb = problem.m, problem.n
    if m > cap:
        raise CapExceeded(m, cap)

    basis = build_basis(problem, WeightVector.uniform(m))
    bmat = np.sqrt(m) * basis.q
    f = problem.values

    ones = np.ones((1, m))
    a = np.block([[bmat.T, -bmat.T], [ones, ones]])
    b = np.zeros(nb + 1)
    b[-1] = 1.0
    c = np.concatenate([-f, f])

    res = simplex_bland(a, b, c)
    atilde = -res.duals[:nb]
    eta = max(-float(res.duals[nb]), 0.0)
    residual = f - bmat @ atilde

    r_inf = float(np.max(np.abs(residual)))
    if abs(r_inf - eta) > RESIDUAL_GAP_TOL * max(1.0, eta):
        raise LpResidualMismatch(eta, r_inf)

    y_plus, y_minus = res.x[:m], res.x[m:]
    basic = res.basis[res.basis < 2 * m] % m
    logger.info("lp m=%d n=%d: eta=%.17g after %d pivots", m, nb, eta, res.pivots)
    return LpSolution(
        problem=problem,
        eta=eta,
        atilde=atilde,
        basic_indices=sorted({int(i) for i in basic}),
        multipliers=y_plus - y_minus,
        weights=y_plus + y_minus,
        residual=residual,
        basis=basis,
        pivots=res.pivots,
    )


def lp_solve(problem: Problem, cfg: Optional[RefcheckConfig] = None) -> SolveReport:
    """Run the LP route and wrap the result as a SolveReport."""
    cfg = cfg or RefcheckConfig()
    start = time.perf_counter()
    sol = lp_reference(problem, cap=cfg.lp_cap)

    weights = np.clip(sol.weights, 0.0, None)
    d: Optional[float] = None
    try:
        d = solve_wls(problem, WeightVector(weights)).d
    except ChebyDualError as exc:
        logger.debug("d at the LP weights unavailable: %s", exc)

    entry = HistoryEntry(
        iter=0,
        d=d if d is not None else float("nan"),
        r_inf=float(np.max(np.abs(sol.residual))),
        w_inf=float(weights.max()),
        active=int(np.count_nonzero(weights > LP_REPORT_TOL)),
    )
    return build_report(
        method=Method.LP,
        problem=problem,
        r=sol.residual,
        d=d,
        w_full=weights / weights.sum(),
        history=[entry],
        status=Status.CONVERGED,
        stop_reason=StopReason.OPTIMAL,
        iterations=0,
        eps_report=LP_REPORT_TOL,
        ref_tol=cfg.tol,
        config=cfg.model_dump(mode="json"),
        wall_ms=(time.perf_counter() - start) * 1e3,
        lp_pivots=sol.pivots,
        final=sol,
    )
