"""Reference-point detection and optimality diagnostics."""

from typing import Optional

import numpy as np

from ..models.problem import Mode
from ..models.result import AlternationCheck, ReferenceSet


def detect_reference_points(
    r: np.ndarray, eta: float, tol: float = 1e-6, mode: Mode | str = Mode.REAL
) -> ReferenceSet:
    """Indices with |r_i| >= (1 - tol) * eta, in index order."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    r = np.asarray(r)
    mag = np.abs(r)
    idx = np.flatnonzero(mag >= (1.0 - tol) * eta)
    signs = None
    if Mode(mode) is Mode.REAL:
        signs = [1 if v >= 0 else -1 for v in np.real(r[idx])]
    return ReferenceSet(
        indices=[int(i) for i in idx],
        magnitudes=[float(v) for v in mag[idx]],
        signs=signs,
        eta=float(eta),
        tol_used=float(tol),
    )


def check_alternation(
    refset: ReferenceSet, n: int, nodes: Optional[np.ndarray] = None
) -> AlternationCheck:
    """Longest sign-alternating subsequence of the reference set, in node order.

    Without ``nodes`` the index order is taken as node order.
    """
    if refset.signs is None:
        raise ValueError("alternation is defined for real residuals only")
    signs = np.asarray(refset.signs)
    if signs.size == 0:
        return AlternationCheck(ok=False, alternating_run=0)
    if nodes is not None:
        order = np.argsort(np.real(np.asarray(nodes)[refset.indices]), kind="stable")
        signs = signs[order]
    # longest alternating subsequence = number of constant-sign runs
    run = 1 + int(np.count_nonzero(signs[1:] != signs[:-1]))
    return AlternationCheck(ok=run >= n + 1, alternating_run=run)


def check_complementary_slackness(
    w: np.ndarray, r: np.ndarray, eta: float, tol: float = 0.0
) -> float:
    """max_j w_j (eta - |r_j|) / eta; nodes within ``tol`` of eta count as zero."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    gap = eta - np.abs(np.asarray(r))
    gap[gap <= tol * eta] = 0.0
    return float(max(0.0, np.max(np.asarray(w) * gap) / eta))


def convergence_factor_estimate(r: np.ndarray, refset: ReferenceSet) -> Optional[float]:
    """Largest non-reference residual over eta, or None if every node is a member."""
    if not refset.indices:
        raise ValueError("reference set is empty")
    mag = np.abs(np.asarray(r))
    mask = np.ones(mag.size, dtype=bool)
    mask[refset.indices] = False
    if not mask.any():
        return None
    return float(mag[mask].max() / refset.eta)
