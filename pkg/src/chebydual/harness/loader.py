"""Loaders for node files, evaluation grids, reference tables and model files."""

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from ..errors import InputFormatError
from ..models.problem import Mode, MonomialDim, Problem
from ..models.run import ModelFile, TableReference
from ..problems.builtin import make_problem
from ..solvers.orthobasis import replay_recurrence


def _read_frame(path: Path, required: tuple[str, ...]) -> pd.DataFrame:
    path = Path(path)
    try:
        frame = pd.read_csv(
            path, dtype=str, skipinitialspace=True, skip_blank_lines=False, encoding="utf-8"
        )
    except pd.errors.EmptyDataError:
        raise InputFormatError(path, 1, "file is empty") from None
    except pd.errors.ParserError as exc:
        raise InputFormatError(path, 1, str(exc)) from exc

    frame.columns = [c.strip() for c in frame.columns]
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise InputFormatError(path, 1, f"missing column(s) {', '.join(missing)}")
    if frame.empty:
        raise InputFormatError(path, 2, "no data rows")
    return frame


def _numeric(frame: pd.DataFrame, column: str, path: Path) -> np.ndarray:
    values = pd.to_numeric(frame[column], errors="coerce")
    bad = np.flatnonzero(values.isna().to_numpy())
    if bad.size:
        row = int(bad[0])
        # header is line 1
        raise InputFormatError(
            path, row + 2, f"{column}: cannot parse {frame[column].iloc[row]!r} as a number"
        )
    return values.to_numpy(dtype=np.float64)


def _complex_column(frame: pd.DataFrame, prefix: str, path: Path) -> tuple[np.ndarray, bool]:
    re = _numeric(frame, f"{prefix}_re", path)
    if f"{prefix}_im" in frame.columns:
        return re + 1j * _numeric(frame, f"{prefix}_im", path), True
    return re, False


def load_nodes_csv(
    path: Path, dim: int, name: Optional[str] = None
) -> Problem:
    """Read ``x_re,x_im,f_re,f_im`` rows; without imaginary columns the data are real."""
    path = Path(path)
    frame = _read_frame(path, ("x_re", "f_re"))
    nodes, x_complex = _complex_column(frame, "x", path)
    values, f_complex = _complex_column(frame, "f", path)
    mode = Mode.COMPLEX if (x_complex or f_complex) else Mode.REAL
    return make_problem(nodes, values, MonomialDim(dim), mode, name=name or path.stem)


def load_grid(path: Path) -> np.ndarray:
    """Evaluation points from a CSV with ``x_re`` and optional ``x_im``."""
    path = Path(path)
    frame = _read_frame(path, ("x_re",))
    points, _ = _complex_column(frame, "x", path)
    return points


def load_model(path: Path) -> ModelFile:
    return ModelFile.model_validate_json(Path(path).read_text(encoding="utf-8"))


def evaluate_model(model: ModelFile, points: np.ndarray) -> np.ndarray:
    """Values of a persisted fit at ``points``."""
    h = np.asarray(model.h_re) + 1j * np.asarray(model.h_im)
    atilde = np.asarray(model.atilde_re) + 1j * np.asarray(model.atilde_im)
    if model.mode == "real":
        h, atilde = h.real, atilde.real
    h = h.reshape(model.n, max(model.n - 1, 0))
    return replay_recurrence(h, model.norm0, atilde, points)


class TableLoader:
    """Load the published reference tables from TOML files."""

    def __init__(self, tables_dir: Path):
        self.tables_dir = Path(tables_dir)

    def path_for(self, which: int) -> Path:
        return self.tables_dir / f"table{which}.toml"

    def load(self, which: int) -> TableReference:
        with open(self.path_for(which), "rb") as f:
            data = tomllib.load(f)
        return TableReference(**data)

    def available(self) -> list[int]:
        out = []
        for path in sorted(self.tables_dir.glob("table*.toml")):
            suffix = path.stem.removeprefix("table")
            if suffix.isdigit():
                out.append(int(suffix))
        return out
