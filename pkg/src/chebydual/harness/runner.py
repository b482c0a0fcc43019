"""Run dispatch and the table reproduction runner."""

import asyncio
from typing import Optional

from ..config import (
    ChebyDualConfig,
    IpmConfig,
    LawsonConfig,
    RefcheckConfig,
    Z0Mode,
    resolve_filter_tol,
)
from ..errors import ChebyDualError
from ..models.problem import Problem
from ..models.result import Method, SolveReport
from ..models.run import CellOutcome, RunSpec, TableCell, TableReference
from ..problems.builtin import builtin_problem
from ..solvers.ipm import ipm_solve
from ..solvers.lawson import lawson_solve
from ..solvers.lp import lp_solve
from .loader import TableLoader, load_nodes_csv


def load_problem(spec: RunSpec) -> Problem:
    if spec.problem is not None:
        return builtin_problem(spec.problem, spec.dim)
    return load_nodes_csv(spec.input, spec.dim)


def lawson_config(spec: RunSpec, base: LawsonConfig, m: int) -> LawsonConfig:
    updates = {"q": spec.q}
    if spec.max_iter is not None:
        updates["max_iter"] = spec.max_iter
    if spec.tol_stop is not None:
        updates["eps_stop"] = spec.tol_stop
    if spec.filter_tol is not None:
        updates["eps_w"] = resolve_filter_tol(spec.filter_tol, m)
    if spec.snapshots:
        updates["snapshot_iters"] = spec.snapshots
    return LawsonConfig(**{**base.model_dump(), **updates})


def ipm_config(spec: RunSpec, base: IpmConfig, m: int) -> IpmConfig:
    updates: dict = {}
    if spec.max_iter is not None:
        updates["k_max"] = spec.max_iter
    if spec.tol_d is not None:
        updates["eps_d"] = spec.tol_d
    if spec.tol_kkt is not None:
        updates["eps_K"] = spec.tol_kkt
    if spec.filter_tol is not None:
        updates["eps_w"] = resolve_filter_tol(spec.filter_tol, m)
    if spec.tau is not None:
        updates["tau"] = spec.tau
    if spec.mu0 is not None:
        updates["mu0"] = spec.mu0
    if spec.z0 is not None:
        updates["z0_mode"] = Z0Mode(spec.z0)
    return IpmConfig(**{**base.model_dump(), **updates})


def solve(
    problem: Problem,
    method: Method,
    lawson: Optional[LawsonConfig] = None,
    ipm: Optional[IpmConfig] = None,
    refcheck: Optional[RefcheckConfig] = None,
) -> SolveReport:
    if method is Method.LAWSON:
        return lawson_solve(problem, lawson)
    if method is Method.IPM:
        return ipm_solve(problem, ipm)
    return lp_solve(problem, refcheck)


def run_spec(spec: RunSpec, config: Optional[ChebyDualConfig] = None) -> tuple[Problem, SolveReport]:
    """Load the problem named by ``spec`` and solve it."""
    config = config or ChebyDualConfig()
    problem = load_problem(spec)
    report = solve(
        problem,
        spec.method,
        lawson=lawson_config(spec, config.lawson, problem.m),
        ipm=ipm_config(spec, config.ipm, problem.m),
        refcheck=config.refcheck,
    )
    return problem, report


def run_cell(cell: TableCell, config: ChebyDualConfig) -> CellOutcome:
    """Reproduce one published cell; solver failures are captured, not raised."""
    try:
        problem = builtin_problem(cell.problem, cell.dim)
        eps_w = resolve_filter_tol(cell.eps_w, problem.m)
        if cell.method == "lawson":
            cfg = config.lawson.model_copy(update={"eps_w": eps_w, "q": 1})
            report = lawson_solve(problem, cfg)
        else:
            report = ipm_solve(problem, config.ipm.model_copy(update={"eps_w": eps_w}))
    except ChebyDualError as exc:
        return CellOutcome(cell=cell, success=False, error=str(exc))

    return CellOutcome(
        cell=cell,
        success=True,
        iterations=report.iterations,
        r_inf=report.eta,
        d=report.d,
        final_nodes=report.active_nodes,
        status=report.status,
        wall_ms=report.wall_ms,
    )


class TableRunner:
    """Reproduce a published table, several cells at a time."""

    def __init__(self, config: Optional[ChebyDualConfig] = None):
        self.config = config or ChebyDualConfig()
        self.loader = TableLoader(self.config.tables_dir)

    async def run(
        self,
        which: int,
        problems: Optional[list[str]] = None,
        methods: Optional[list[str]] = None,
    ) -> list[CellOutcome]:
        reference = self.loader.load(which)
        return await self.run_reference(reference, problems, methods)

    async def run_reference(
        self,
        reference: TableReference,
        problems: Optional[list[str]] = None,
        methods: Optional[list[str]] = None,
    ) -> list[CellOutcome]:
        cells = [
            c
            for c in reference.cells
            if (not problems or c.problem in problems) and (not methods or c.method in methods)
        ]
        if not cells:
            raise ValueError("No table cells match the specified filters")

        print(f"Reproducing table {reference.table}: {len(cells)} cells")
        semaphore = asyncio.Semaphore(self.config.table_concurrency)
        loop = asyncio.get_running_loop()
        done = 0

        async def run_one(cell: TableCell) -> CellOutcome:
            nonlocal done
            async with semaphore:
                outcome = await loop.run_in_executor(None, run_cell, cell, self.config)
            done += 1
            if outcome.success:
                print(
                    f"  [{done}/{len(cells)}] {cell.key}: r_inf={outcome.r_inf:.4e} "
                    f"d={outcome.d:.4e} nodes={outcome.final_nodes} k={outcome.iterations}"
                )
            else:
                print(f"  [{done}/{len(cells)}] {cell.key}: Error: {outcome.error}")
            return outcome

        return list(await asyncio.gather(*(run_one(c) for c in cells)))
