"""Lawson's iteration for the L2-weighted dual.

Multiplicative reweighting w <- w |r|^q / sum(w |r|^q). With q = 1 this is the
classical scheme; q = 2 is the gradient-scaled variant w <- w * grad d / d,
whose dual values also increase monotonically but whose residuals may
oscillate.
"""

import logging
import time
from typing import Optional

import numpy as np

from ..config import LawsonConfig
from ..errors import AllWeightsFiltered, InvalidWeights, MonotonicityViolation, ZeroDenominator
from ..models.problem import Problem, WeightVector
from ..models.result import HistoryEntry, Method, SolveReport, Status, StopReason
from .summary import build_report, history_entry
from .wls import solve_wls

logger = logging.getLogger(__name__)

MONOTONE_SLACK = 1e-12


def lawson_step(w: WeightVector, r: np.ndarray, q: int) -> WeightVector:
    """One normalized multiplicative update."""
    num = w.w * np.abs(np.asarray(r)) ** q
    total = num.sum()
    if not total > 0.0:
        raise ZeroDenominator()
    return WeightVector(num / total)


def filter_weights(w: np.ndarray, eps_w: float, n: int) -> np.ndarray:
    """Zero out weights below ``eps_w`` and renormalize."""
    if eps_w <= 0.0:
        return w
    kept = np.where(w >= eps_w, w, 0.0)
    support = int(np.count_nonzero(kept))
    if support < n + 1:
        raise AllWeightsFiltered(support, n)
    before = int(np.count_nonzero(w))
    if support < before:
        logger.warning(
            "Filtered %d weights below %.3e; support %d -> %d", before - support, eps_w, before, support
        )
    return kept / kept.sum()


def initial_weights(m: int, w0: Optional[list[float]]) -> np.ndarray:
    if w0 is None:
        return np.full(m, 1.0 / m)
    w = np.asarray(w0, dtype=np.float64)
    if w.shape != (m,):
        raise InvalidWeights(f"w0 has {w.size} entries for {m} nodes")
    if np.any(w <= 0.0):
        raise InvalidWeights("w0 must be strictly positive")
    return w / w.sum()


def _stop_quantity(d: float, q: int) -> float:
    # q = 1 tracks sqrt(sum w |r|^2); q = 2 tracks d itself
    return float(np.sqrt(d)) if q == 1 else d


def lawson_solve(problem: Problem, cfg: Optional[LawsonConfig] = None) -> SolveReport:
    """Run Lawson's iteration and report the final iterate."""
    cfg = cfg or LawsonConfig()
    start = time.perf_counter()
    n, q = problem.n, cfg.q

    w = initial_weights(problem.m, cfg.w0)
    history: list[HistoryEntry] = []
    snapshots: dict[int, np.ndarray] = {}
    violations = 0
    status, reason = Status.ITER_CAPPED, StopReason.MAX_ITER

    k = 0
    w = filter_weights(w, cfg.eps_w, n)
    sol = solve_wls(problem, WeightVector(w))
    prev_stop = _stop_quantity(sol.d, q)
    history.append(
        history_entry(k, sol, w, int(np.count_nonzero(w)), d_stop=prev_stop)
    )
    if k in cfg.snapshot_iters:
        snapshots[k] = w.copy()

    while k < cfg.max_iter:
        try:
            w = lawson_step(WeightVector(w), sol.r, q).w
        except ZeroDenominator:
            status, reason = Status.CONVERGED, StopReason.INTERPOLATION
            break
        w = filter_weights(w, cfg.eps_w, n)
        k += 1
        sol = solve_wls(problem, WeightVector(w))
        stop = _stop_quantity(sol.d, q)
        history.append(history_entry(k, sol, w, int(np.count_nonzero(w)), d_stop=stop))
        if k in cfg.snapshot_iters:
            snapshots[k] = w.copy()

        if stop < prev_stop - MONOTONE_SLACK * max(prev_stop, 1.0):
            if cfg.strict_monotone:
                raise MonotonicityViolation(k, prev_stop, stop)
            violations += 1
            logger.warning("Lawson dual decreased at k=%d: %.17g -> %.17g", k, prev_stop, stop)
        logger.debug("k=%d d=%.6e r_inf=%.6e active=%d", k, sol.d, sol.r_inf, history[-1].active)

        if prev_stop > 0 and abs(prev_stop - stop) / prev_stop <= cfg.eps_stop:
            status, reason = Status.CONVERGED, StopReason.D_CHANGE
            break
        prev_stop = stop

    eps_report = cfg.eps_w if cfg.eps_w > 0 else cfg.report_tol
    report = build_report(
        method=Method.LAWSON,
        problem=problem,
        r=sol.r,
        d=sol.d,
        w_full=w,
        history=history,
        status=status,
        stop_reason=reason,
        iterations=k,
        eps_report=eps_report,
        snapshots=snapshots,
        config=cfg.model_dump(mode="json", exclude={"w0"}),
        wall_ms=(time.perf_counter() - start) * 1e3,
        monotone_violations=violations,
        final=sol,
    )
    logger.info(
        "lawson q=%d %s after %d iterations: eta=%.10e d=%.10e",
        q, report.status.value, k, report.eta, sol.d,
    )
    return report
