"""Report formatters for solver runs and table reproductions."""

import hashlib
import json
import math
from pathlib import Path
from typing import Any, Optional

import numpy as np
import pandas as pd

from ..errors import NoRecurrence
from ..evaluation.table import QuantityComparison
from ..models.problem import Problem
from ..models.result import SolveReport
from ..models.run import CellOutcome, ModelFile
from ..solvers.orthobasis import BasisSource, evaluate_at

FLOAT_FORMAT = "%.17g"


def _finite(value: Optional[float]) -> Optional[float]:
    if value is None or not math.isfinite(value):
        return None
    return float(value)


def _point(z: complex) -> Any:
    """Real nodes as floats, complex ones as [re, im]."""
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


def node_digest(nodes: np.ndarray) -> str:
    """SHA-256 of the nodes as complex128, independent of the data mode."""
    data = np.ascontiguousarray(np.asarray(nodes, dtype=np.complex128))
    return hashlib.sha256(data.tobytes()).hexdigest()


def fit_values(report: SolveReport, points: np.ndarray) -> np.ndarray:
    """Fitted function of ``report`` evaluated at ``points`` by the reverse recurrence."""
    final = report.final
    if final is None:
        raise NoRecurrence()
    return evaluate_at(final.basis, final.atilde, points)


class ReportFormatter:
    """Write solve reports, histories and tables."""

    @staticmethod
    def report_dict(report: SolveReport, problem: Problem) -> dict[str, Any]:
        refset = report.reference_set
        return {
            "method": report.method.value,
            "problem": report.problem,
            "n": report.n,
            "m": report.m,
            "status": report.status.value,
            "stop_reason": report.stop_reason.value,
            "eta": report.eta,
            "eta_dual": _finite(report.eta_dual),
            "d": _finite(report.d),
            "iterations": report.iterations,
            "active_nodes": report.active_nodes,
            "reference_indices": refset.indices,
            "reference_nodes": [_point(problem.nodes[i]) for i in refset.indices],
            "rho_estimate": report.rho_estimate,
            "diagnostics": report.diagnostics.model_dump(),
            "config": report.config,
            "wall_ms": report.wall_ms,
        }

    @staticmethod
    def to_json(report: SolveReport, problem: Problem, path: Path) -> None:
        """Export the report to JSON (floats round-trip exactly)."""
        with open(path, "w") as f:
            json.dump(ReportFormatter.report_dict(report, problem), f, indent=2)

    @staticmethod
    def history_frame(report: SolveReport) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "iter": [h.iter for h in report.history],
                "d": [h.d for h in report.history],
                "r_inf": [h.r_inf for h in report.history],
                "w_inf": [h.w_inf for h in report.history],
                "kkt_inf": [h.kkt_inf for h in report.history],
            }
        ).astype({"kkt_inf": "float64"})

    @staticmethod
    def weights_frame(report: SolveReport, problem: Problem) -> pd.DataFrame:
        nodes = np.asarray(problem.nodes, dtype=np.complex128)
        frame = pd.DataFrame(
            {
                "index": np.arange(problem.m),
                "x_re": nodes.real,
                "x_im": nodes.imag,
                "w": report.w,
                "r_abs": np.abs(report.r),
            }
        )
        for k, w in sorted(report.snapshots.items()):
            frame[f"w_k{k}"] = w
        return frame

    @staticmethod
    def curve_frame(
        report: SolveReport, problem: Problem, points: Optional[np.ndarray] = None
    ) -> pd.DataFrame:
        """Fitted values at ``points``, or at the problem nodes with the error columns."""
        on_nodes = points is None
        if on_nodes:
            points = problem.nodes
            if report.final is not None and report.final.basis.source is BasisSource.EXPLICIT_QR:
                values = report.final.fitted()
            else:
                values = fit_values(report, points)
        else:
            values = fit_values(report, points)

        frame = ReportFormatter.curve_frame_from_values(points, values)
        if on_nodes:
            p = np.asarray(values, dtype=np.complex128)
            f = np.asarray(problem.values, dtype=np.complex128)
            frame["f_re"] = f.real
            frame["f_im"] = f.imag
            frame["err_abs"] = np.abs(f - p)
        return frame

    @staticmethod
    def curve_frame_from_values(points: np.ndarray, values: np.ndarray) -> pd.DataFrame:
        v = np.asarray(points, dtype=np.complex128)
        p = np.asarray(values, dtype=np.complex128)
        return pd.DataFrame({"v_re": v.real, "v_im": v.imag, "p_re": p.real, "p_im": p.imag})

    @staticmethod
    def compare_history_frame(reports: dict[str, SolveReport]) -> pd.DataFrame:
        """Stacked histories with a leading ``method`` column."""
        frames = []
        for method, report in reports.items():
            frame = ReportFormatter.history_frame(report)
            frame.insert(0, "method", method)
            frames.append(frame)
        return pd.concat(frames, ignore_index=True)

    @staticmethod
    def compare_weights_frame(reports: dict[str, SolveReport], problem: Problem) -> pd.DataFrame:
        nodes = np.asarray(problem.nodes, dtype=np.complex128)
        frame = pd.DataFrame({"index": np.arange(problem.m), "x_re": nodes.real, "x_im": nodes.imag})
        for method, report in reports.items():
            frame[f"w_{method}"] = report.w
        return frame

    @staticmethod
    def write_csv(frame: pd.DataFrame, path: Path) -> None:
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)

    @staticmethod
    def model_file(report: SolveReport, problem: Problem) -> ModelFile:
        final = report.final
        if final is None or final.basis.h is None:
            raise NoRecurrence()
        h = np.asarray(final.basis.h, dtype=np.complex128)
        atilde = np.asarray(final.atilde, dtype=np.complex128)
        return ModelFile(
            problem=report.problem,
            mode=problem.mode.value,
            n=report.n,
            m=report.m,
            source=final.basis.source.value,
            node_digest=node_digest(problem.nodes),
            norm0=final.basis.norm0,
            h_re=h.real.tolist(),
            h_im=h.imag.tolist(),
            atilde_re=atilde.real.tolist(),
            atilde_im=atilde.imag.tolist(),
            eta=report.eta,
        )

    @staticmethod
    def table_frame(rows: list[QuantityComparison]) -> pd.DataFrame:
        return pd.DataFrame([row.model_dump() for row in rows])

    @staticmethod
    def table_markdown(rows: list[QuantityComparison]) -> str:
        lines = [
            "| Cell | Quantity | Published | Ours | Rel. diff | OK |",
            "|------|----------|-------|------|-----------|----|",
        ]
        for r in rows:
            ours = f"{r.ours:.4e}" if r.ours is not None else "ERROR"
            diff = f"{r.rel_diff:.1e}" if r.rel_diff is not None else ""
            if r.known_divergent:
                verdict = "known-divergent"
            else:
                verdict = "yes" if r.within_tolerance else "no"
            lines.append(f"| {r.key} | {r.quantity} | {r.published:.4e} | {ours} | {diff} | {verdict} |")
        return "\n".join(lines)

    @staticmethod
    def print_summary(report: SolveReport) -> None:
        """Print a summary to stdout."""
        print("\n" + "=" * 60)
        print(f"{report.method.value.upper()} on {report.problem} (n={report.n}, m={report.m})")
        print("=" * 60)
        print(f"  Status:        {report.status.value} ({report.stop_reason.value})")
        print(f"  Iterations:    {report.iterations}")
        print(f"  ||r||_inf:     {report.eta:.10e}")
        if report.eta_dual is not None:
            print(f"  sqrt(d):       {report.eta_dual:.10e}")
        print(f"  Active nodes:  {report.active_nodes}")
        print(f"  Reference set: {len(report.reference_set)} nodes")
        diag = report.diagnostics
        print(f"  Slackness:     {diag.slackness_violation:.2e}")
        if diag.alternation_run is not None:
            print(f"  Alternation:   {diag.alternation_run} ({'ok' if diag.alternation_ok else 'short'})")
        if report.rho_estimate is not None:
            print(f"  rho estimate:  {report.rho_estimate:.4f}")
        print(f"  Time:          {report.wall_ms / 1e3:.2f}s")

    @staticmethod
    def print_table_summary(outcomes: list[CellOutcome], rows: list[QuantityComparison]) -> None:
        graded = [r for r in rows if r.quantity != "iterations" and not r.known_divergent]
        divergent = {r.key for r in rows if r.known_divergent}
        passed = sum(r.within_tolerance for r in graded)
        failed_cells = sum(not o.success for o in outcomes)
        print("\n" + "=" * 60)
        print("TABLE REPRODUCTION")
        print("=" * 60)
        print(f"  Cells:      {len(outcomes)} ({failed_cells} failed)")
        print(f"  Quantities: {passed}/{len(graded)} within tolerance")
        if divergent:
            print(f"  Divergent:  {len(divergent)} cells flagged known-divergent, not graded")
