"""Assemble a SolveReport from a finished run."""

from typing import Any, Optional

import numpy as np

from ..evaluation.refcheck import (
    check_alternation,
    check_complementary_slackness,
    convergence_factor_estimate,
    detect_reference_points,
)
from ..models.problem import Problem
from ..models.result import (
    Diagnostics,
    HistoryEntry,
    Method,
    ReferenceSet,
    SolveReport,
    Status,
    StopReason,
)
from .wls import WlsSolution


def history_entry(
    k: int, sol: WlsSolution, w_full: np.ndarray, active: int, **extra: Optional[float]
) -> HistoryEntry:
    return HistoryEntry(
        iter=k,
        d=sol.d,
        r_inf=sol.r_inf,
        w_inf=float(np.max(w_full)),
        active=active,
        **extra,
    )


def build_report(
    *,
    method: Method,
    problem: Problem,
    r: np.ndarray,
    d: Optional[float],
    w_full: np.ndarray,
    history: list[HistoryEntry],
    status: Status,
    stop_reason: StopReason,
    iterations: int,
    eps_report: float,
    ref_tol: float = 1e-6,
    snapshots: Optional[dict[int, np.ndarray]] = None,
    config: Optional[dict[str, Any]] = None,
    wall_ms: float = 0.0,
    monotone_violations: int = 0,
    lp_pivots: Optional[int] = None,
    final: Any = None,
) -> SolveReport:
    eta = float(np.max(np.abs(r)))
    eta_dual = float(np.sqrt(max(d, 0.0))) if d is not None else None

    if eta > 0:
        refset = detect_reference_points(r, eta, ref_tol, problem.mode)
        rho = convergence_factor_estimate(r, refset)
        slackness = check_complementary_slackness(w_full, r, eta)
    else:
        refset = ReferenceSet(indices=[], magnitudes=[], signs=None, eta=0.0, tol_used=ref_tol)
        rho = None
        slackness = 0.0

    alternation = None
    if problem.is_real and refset.indices:
        alternation = check_alternation(refset, problem.n, problem.nodes)

    diagnostics = Diagnostics(
        slackness_violation=slackness,
        weak_duality_gap=eta - eta_dual if eta_dual is not None else None,
        support_above_1e8=int(np.count_nonzero(w_full > 1e-8)),
        alternation_run=alternation.alternating_run if alternation else None,
        alternation_ok=alternation.ok if alternation else None,
        monotone_violations=monotone_violations,
        lp_pivots=lp_pivots,
    )
    return SolveReport(
        method=method,
        problem=problem.label,
        n=problem.n,
        m=problem.m,
        status=status,
        stop_reason=stop_reason,
        iterations=iterations,
        history=history,
        w=w_full,
        r=r,
        eta=eta,
        eta_dual=eta_dual,
        d=d,
        reference_set=refset,
        rho_estimate=rho,
        active_nodes=int(np.count_nonzero(w_full > eps_report)),
        diagnostics=diagnostics,
        snapshots=snapshots or {},
        config=config or {},
        wall_ms=wall_ms,
        final=final,
    )
