"""Run specification, persisted model and reference-table models."""

from pathlib import Path
from typing import Literal, Optional, Union

from pydantic import BaseModel, Field, model_validator

from .result import Method, Status


class RunSpec(BaseModel):
    """One solver invocation as assembled by the CLI."""

    problem: Optional[str] = None
    input: Optional[Path] = None
    dim: int = Field(gt=0)
    method: Method = Method.IPM
    q: Literal[1, 2] = 1

    # Overrides; None keeps the configured default
    max_iter: Optional[int] = Field(default=None, gt=0)
    tol_d: Optional[float] = Field(default=None, gt=0.0)
    tol_kkt: Optional[float] = Field(default=None, gt=0.0)
    tol_stop: Optional[float] = Field(default=None, gt=0.0)
    filter_tol: Optional[Union[float, str]] = None
    tau: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    mu0: Optional[float] = Field(default=None, gt=0.0)
    z0: Optional[str] = None
    snapshots: list[int] = Field(default_factory=list)

    # Outputs
    out: Optional[Path] = None
    history: Optional[Path] = None
    weights: Optional[Path] = None
    curve: Optional[Path] = None
    grid: Optional[Path] = None
    model: Optional[Path] = None

    @model_validator(mode="after")
    def _one_source(self) -> "RunSpec":
        if (self.problem is None) == (self.input is None):
            raise ValueError("exactly one of problem and input must be given")
        return self


class ModelFile(BaseModel):
    """Persisted fit: recurrence and orthonormal-basis coefficients.

    Monomial coefficients are never stored; evaluation replays the Arnoldi
    recurrence.
    """

    problem: str
    mode: Literal["real", "complex"]
    n: int
    m: int
    source: str
    node_digest: str
    norm0: float
    h_re: list[list[float]]
    h_im: list[list[float]]
    atilde_re: list[float]
    atilde_im: list[float]
    eta: float


class TableCell(BaseModel):
    """One published reference value set."""

    problem: str
    dim: int
    eps_w: str
    method: Literal["lawson", "ipm"]
    iterations: int
    r_inf: float
    d: float
    final_nodes: int
    known_divergent: bool = False

    @property
    def key(self) -> str:
        return f"{self.problem}/P{self.dim}/{self.eps_w}/{self.method}"


class TableReference(BaseModel):
    table: int
    title: str = ""
    cells: list[TableCell]


class CellOutcome(BaseModel):
    """What a reproduction run produced for one cell."""

    cell: TableCell
    success: bool
    iterations: Optional[int] = None
    r_inf: Optional[float] = None
    d: Optional[float] = None
    final_nodes: Optional[int] = None
    status: Optional[Status] = None
    wall_ms: Optional[float] = None
    error: Optional[str] = None
