"""Solve result models."""

from enum import Enum
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class Method(str, Enum):
    IPM = "ipm"
    LAWSON = "lawson"
    LP = "lp"


class Status(str, Enum):
    CONVERGED = "converged"
    ITER_CAPPED = "iter-capped"


class StopReason(str, Enum):
    D_CHANGE = "d-change"
    KKT = "kkt"
    MAX_ITER = "max-iter"
    INTERPOLATION = "interpolation"
    OPTIMAL = "optimal"


class ReferenceSet(BaseModel):
    """Nodes where the residual attains its maximum modulus (to a tolerance)."""

    indices: list[int]
    magnitudes: list[float]
    signs: Optional[list[int]] = None
    eta: float
    tol_used: float

    def __len__(self) -> int:
        return len(self.indices)


class AlternationCheck(BaseModel):
    ok: bool
    alternating_run: int


class HistoryEntry(BaseModel):
    """One row of the iteration history."""

    iter: int
    d: float
    r_inf: float
    w_inf: float
    kkt_inf: Optional[float] = None
    d_stop: Optional[float] = None
    active: int
    mu: Optional[float] = None
    alpha_w: Optional[float] = None
    alpha_z: Optional[float] = None


class Diagnostics(BaseModel):
    """Post-solve structural checks."""

    slackness_violation: float
    weak_duality_gap: Optional[float] = None
    support_above_1e8: int
    alternation_run: Optional[int] = None
    alternation_ok: Optional[bool] = None
    monotone_violations: int = 0
    lp_pivots: Optional[int] = None


class SolveReport(BaseModel):
    """Outcome of one solver run.

    ``w`` and ``r`` cover every original node; filtered nodes carry zero
    weight. ``final`` is the weighted least-squares solution at the final
    weights, or the LP solution for LP runs.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    method: Method
    problem: str
    n: int
    m: int
    status: Status
    stop_reason: StopReason
    iterations: int
    history: list[HistoryEntry]
    w: np.ndarray
    r: np.ndarray
    eta: float
    eta_dual: Optional[float] = None
    d: Optional[float] = None
    reference_set: ReferenceSet
    rho_estimate: Optional[float] = None
    active_nodes: int
    diagnostics: Diagnostics
    snapshots: dict[int, np.ndarray] = Field(default_factory=dict)
    config: dict[str, Any] = Field(default_factory=dict)
    wall_ms: float = 0.0
    final: Optional[Any] = None

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED
