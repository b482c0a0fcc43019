"""Primal-dual interior-point method on the L2-weighted dual.

Maximizes d(w) over the probability simplex. The barrier KKT system is

    -grad d(w) - y e - z = 0,   W z = mu e,   e^T w = 1,

solved by damped Newton steps. The (negated) Hessian of d is a rank-2n
(rank-n for real data) update of zero, so the Newton matrix -Hess + Z/W is
inverted with the Sherman-Morrison-Woodbury identity at O(m n^2) cost.
"""

import logging
import time
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from ..config import IpmConfig, Z0Mode
from ..errors import AllWeightsFiltered, IndefiniteSystem, NonFiniteIterate
from ..models.problem import Problem, WeightVector
from ..models.result import HistoryEntry, Method, SolveReport, Status, StopReason
from .lawson import initial_weights
from .summary import build_report, history_entry
from .wls import HessianFactor, WlsSolution, dual_gradient, hessian_factor, solve_wls

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DualState:
    """Interior iterate restricted to the active nodes.

    ``support`` maps the entries of ``w`` and ``z`` back to node indices.
    """

    w: np.ndarray
    y: float
    z: np.ndarray
    mu: float
    k: int
    support: np.ndarray

    @property
    def size(self) -> int:
        return int(self.w.size)

    def full_weights(self, m: int) -> np.ndarray:
        out = np.zeros(m)
        out[self.support] = self.w
        return out


@dataclass(frozen=True)
class NewtonDirection:
    n_w: np.ndarray
    n_y: float
    n_z: np.ndarray


def kkt_residual(state: DualState, grad: np.ndarray) -> np.ndarray:
    """Perturbed KKT residual [-grad - y e - z; W z - mu e; e^T w - 1]."""
    grad = np.asarray(grad, dtype=np.float64)
    return np.concatenate(
        [
            -grad - state.y - state.z,
            state.w * state.z - state.mu,
            [state.w.sum() - 1.0],
        ]
    )


def smw_solve(factor: HessianFactor, w: np.ndarray, z: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Apply (-Hess d + Z/W)^(-1) to ``rhs`` (a vector or a column stack).

    -Hess d = 2 W^(-1/2) K^T K W^(-1/2), so with D = sqrt(w)/z

        (-Hess d + Z/W)^(-1) = W/Z - 2 D K^T (I + 2 K Z^(-1) K^T)^(-1) K D.
    """
    rhs = np.asarray(rhs, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    base = w / z
    if rhs.ndim == 2:
        base = base[:, None]
    out = base * rhs

    k = factor.k
    if k.size == 0:
        return out
    scale = np.sqrt(w) / z
    if rhs.ndim == 2:
        scale = scale[:, None]

    inner = np.eye(k.shape[0]) + 2.0 * (k / z) @ k.T
    try:
        chol = cho_factor(inner, lower=True, check_finite=True)
    except (LinAlgError, ValueError) as exc:
        raise IndefiniteSystem(str(exc)) from exc
    t = cho_solve(chol, k @ (scale * rhs))
    return out - 2.0 * scale * (k.T @ t)


def newton_direction(
    state: DualState, sol: WlsSolution, factor: HessianFactor, mu: float
) -> NewtonDirection:
    """Newton direction of the barrier KKT system, eliminating n_z first."""
    w, z, y = state.w, state.z, state.y
    grad = dual_gradient(sol)[state.support]

    h1 = -grad - y - mu / w
    h2 = w.sum() - 1.0
    both = smw_solve(factor, w, z, np.column_stack([np.ones_like(w), h1]))
    v_e, v_h = both[:, 0], both[:, 1]

    denom = v_e.sum()
    if not denom > 0.0:
        raise IndefiniteSystem(f"e^T A^-1 e = {denom:.3e}")
    n_y = float((v_h.sum() - h2) / denom)
    n_w = n_y * v_e - v_h
    n_z = -z + mu / w - (z / w) * n_w
    return NewtonDirection(n_w=n_w, n_y=n_y, n_z=n_z)


def _max_step(v: np.ndarray, dv: np.ndarray, tau: float) -> float:
    neg = dv < 0
    if not neg.any():
        return 1.0
    return float(min(1.0, np.min(tau * v[neg] / -dv[neg])))


def step_lengths(
    w: np.ndarray, z: np.ndarray, n_w: np.ndarray, n_z: np.ndarray, tau: float
) -> tuple[float, float]:
    """Fraction-to-boundary step lengths (alpha_w, alpha_z)."""
    return _max_step(np.asarray(w), np.asarray(n_w), tau), _max_step(np.asarray(z), np.asarray(n_z), tau)


def update_mu(w: np.ndarray, z: np.ndarray) -> float:
    """Adaptive barrier: mu = sigma * w^T z / m, sigma from the centrality ratio xi."""
    prod = np.asarray(w) * np.asarray(z)
    avg = float(prod.mean())
    if avg <= 0.0:
        return 0.0
    xi = float(prod.min()) / avg
    ratio = 2.0 if xi <= 0.0 else min((1.0 - xi) / (20.0 * xi), 2.0)
    sigma = 0.1 * max(ratio, 0.0) ** 3
    return sigma * avg


def _filter(state: DualState, eps_w: float, n: int) -> DualState:
    """Drop nodes with w < eps_w for the rest of the run; y and mu are kept."""
    if eps_w <= 0.0:
        return state
    keep = state.w >= eps_w
    if keep.all():
        return state
    support = int(np.count_nonzero(keep))
    if support < n + 1:
        raise AllWeightsFiltered(support, n)
    logger.warning(
        "Filtered %d weights below %.3e at k=%d; support %d -> %d",
        state.size - support, eps_w, state.k, state.size, support,
    )
    w = state.w[keep]
    return replace(state, w=w / w.sum(), z=state.z[keep], support=state.support[keep])


def ipm_solve(problem: Problem, cfg: Optional[IpmConfig] = None) -> SolveReport:
    """Run the interior-point method and report the final iterate."""
    cfg = cfg or IpmConfig()
    start = time.perf_counter()
    m, n = problem.m, problem.n

    w0 = initial_weights(m, cfg.w0)
    state = DualState(w=w0, y=0.0, z=np.ones(m), mu=cfg.mu0, k=0, support=np.arange(m))
    state = _filter(state, cfg.eps_w, n)

    sol = solve_wls(problem, WeightVector(state.full_weights(m)))
    grad = dual_gradient(sol)[state.support]

    # d, grad d, y, z and mu all scale like |f|^2; tolerances follow.
    scale = float(grad.max())
    mu0 = cfg.mu0 * scale
    z0 = mu0 / state.w if cfg.z0_mode is Z0Mode.MU_OVER_W else np.full(state.size, scale)
    state = replace(state, y=-scale, z=z0, mu=mu0)
    kkt_tol = cfg.eps_K * scale
    mu_floor = cfg.mu_floor * scale

    history: list[HistoryEntry] = []
    status, reason = Status.ITER_CAPPED, StopReason.MAX_ITER
    d_prev: Optional[float] = None
    step = (None, None)

    while True:
        kkt = float(np.max(np.abs(kkt_residual(state, grad))))
        history.append(
            history_entry(
                state.k,
                sol,
                state.full_weights(m),
                state.size,
                kkt_inf=kkt,
                mu=state.mu,
                alpha_w=step[0],
                alpha_z=step[1],
            )
        )
        logger.debug(
            "k=%d d=%.6e r_inf=%.6e kkt=%.3e mu=%.3e active=%d",
            state.k, sol.d, sol.r_inf, kkt, state.mu, state.size,
        )

        if scale <= 0.0:
            status, reason = Status.CONVERGED, StopReason.INTERPOLATION
            break
        if d_prev is not None and d_prev > 0 and abs(sol.d - d_prev) / d_prev < cfg.eps_d:
            status, reason = Status.CONVERGED, StopReason.D_CHANGE
            break
        if kkt < kkt_tol:
            status, reason = Status.CONVERGED, StopReason.KKT
            break
        if state.k >= cfg.k_max:
            break

        factor = hessian_factor(sol)
        direction = newton_direction(state, sol, factor, state.mu)
        a_w, a_z = step_lengths(state.w, state.z, direction.n_w, direction.n_z, cfg.tau)

        w = state.w + a_w * direction.n_w
        z = state.z + a_z * direction.n_z
        y = state.y + a_z * direction.n_y
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(z)) and np.isfinite(y)):
            raise NonFiniteIterate(state.k + 1)
        w = w / w.sum()

        mu = max(update_mu(w, z), cfg.mu_decay_floor * state.mu, mu_floor)
        state = replace(state, w=w, y=float(y), z=z, mu=mu, k=state.k + 1)
        state = _filter(state, cfg.eps_w, n)
        step = (a_w, a_z)

        d_prev = sol.d
        sol = solve_wls(problem, WeightVector(state.full_weights(m)))
        grad = dual_gradient(sol)[state.support]

    eps_report = cfg.eps_w if cfg.eps_w > 0 else cfg.report_tol
    report = build_report(
        method=Method.IPM,
        problem=problem,
        r=sol.r,
        d=sol.d,
        w_full=state.full_weights(m),
        history=history,
        status=status,
        stop_reason=reason,
        iterations=state.k,
        eps_report=eps_report,
        config=cfg.model_dump(mode="json", exclude={"w0"}),
        wall_ms=(time.perf_counter() - start) * 1e3,
        final=sol,
    )
    logger.info(
        "ipm %s after %d iterations (%s): eta=%.10e d=%.10e active=%d",
        report.status.value, state.k, reason.value, report.eta, sol.d, report.active_nodes,
    )
    return report
