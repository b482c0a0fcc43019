"""Configuration management for chebydual."""

import re
from enum import Enum
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, field_validator
from pydantic_settings import BaseSettings

MACHINE_EPS = float(np.finfo(np.float64).eps)

_PER_M = re.compile(r"^\s*([0-9eE.+-]+)\s*/\s*m\s*$")


def resolve_filter_tol(value: Union[str, float, None], m: int) -> float:
    """Resolve a filter tolerance, accepting the ``c/m`` notation (``1e-6/m``).

    ``eps`` and ``u`` stand for the float64 unit roundoff.
    """
    if value is None:
        return 0.0
    if isinstance(value, (int, float)):
        return float(value)
    text = value.strip()
    if text.lower() in ("eps", "u"):
        return MACHINE_EPS
    match = _PER_M.match(text)
    if match:
        return float(match.group(1)) / m
    return float(text)


class Z0Mode(str, Enum):
    """Initial z: the scaled unit vector max grad d(w0) e, or exactly centered mu0 / w0."""

    ONES = "ones"
    MU_OVER_W = "mu_over_w"


class LawsonConfig(BaseModel):
    """Lawson iteration settings."""

    q: Literal[1, 2] = Field(default=1, description="Exponent of the multiplicative update")
    max_iter: int = Field(default=1000, gt=0, description="Iteration cap")
    eps_stop: float = Field(default=1e-10, gt=0.0, description="Relative dual-change tolerance")
    eps_w: float = Field(default=0.0, ge=0.0, description="Weight filtering threshold")
    w0: Optional[list[float]] = Field(default=None, description="Initial weights (uniform if unset)")
    report_tol: float = Field(default=1e-8, gt=0.0, description="Active-node threshold when eps_w = 0")
    snapshot_iters: list[int] = Field(default_factory=list, description="Record weights at these k")
    strict_monotone: bool = Field(default=False, description="Raise instead of warning when the dual decreases")

    @field_validator("snapshot_iters")
    @classmethod
    def _nonnegative(cls, v: list[int]) -> list[int]:
        if any(k < 0 for k in v):
            raise ValueError("snapshot iterations must be nonnegative")
        return sorted(set(v))


class IpmConfig(BaseModel):
    """Interior-point settings.

    d, grad d, y, z and mu all scale with |f|^2, so mu0, eps_K and mu_floor
    are multiplied by max grad d(w0) = ||r(w0)||_inf^2 at the start of a run.
    """

    tau: float = Field(default=0.99, gt=0.0, lt=1.0, description="Fraction-to-boundary parameter")
    mu0: float = Field(
        default=1e-5, gt=0.0, description="Initial barrier parameter, relative to max grad d(w0)"
    )
    eps_d: float = Field(default=1e-10, gt=0.0, description="Relative dual-change tolerance")
    eps_K: float = Field(
        default=1e-10, gt=0.0, description="KKT residual tolerance, relative to max grad d(w0)"
    )
    k_max: int = Field(default=200, gt=0, description="Iteration cap")
    eps_w: float = Field(default=0.0, ge=0.0, description="Weight filtering threshold")
    w0: Optional[list[float]] = Field(default=None, description="Initial weights (uniform if unset)")
    z0_mode: Z0Mode = Field(default=Z0Mode.ONES, description="Initial z")
    report_tol: float = Field(default=1e-8, gt=0.0, description="Active-node threshold when eps_w = 0")
    mu_floor: float = Field(
        default=1e-16, ge=0.0, description="Lower clamp for the barrier update, relative to max grad d(w0)"
    )
    mu_decay_floor: float = Field(
        default=1e-2, ge=0.0, le=1.0, description="Barrier may shrink at most by this factor per step"
    )


class RefcheckConfig(BaseModel):
    """Diagnostics and oracle settings."""

    tol: float = Field(default=1e-6, gt=0.0, lt=1.0, description="Reference-set relative tolerance")
    lp_cap: int = Field(default=5000, gt=0, description="Largest m accepted by the LP oracle")
    brute_force_cap: int = Field(default=4, gt=0, description="Largest m for simplex-grid search")


class ChebyDualConfig(BaseSettings):
    """Top-level configuration, overridable from the environment."""

    tables_dir: Path = Field(default=Path("tables"), description="Published reference tables")
    results_dir: Path = Field(default=Path("results"), description="Default output directory")

    # Sub-configurations
    lawson: LawsonConfig = Field(default_factory=LawsonConfig)
    ipm: IpmConfig = Field(default_factory=IpmConfig)
    refcheck: RefcheckConfig = Field(default_factory=RefcheckConfig)

    table_concurrency: int = Field(default=3, gt=0, description="Concurrent table cells")

    model_config = {
        "env_prefix": "CHEBYDUAL_",
        "env_nested_delimiter": "__",
        "env_file": ".env",
        "extra": "ignore",
    }
