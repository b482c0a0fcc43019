"""Problem construction, validation and the built-in test problems."""

from typing import Callable, Optional

import numpy as np

from ..errors import (
    DuplicateNodes,
    NonFiniteData,
    NonRealData,
    RankDeficientBasis,
    TooFewNodes,
    UnknownProblem,
)
from ..models.problem import BasisSpec, ExplicitMatrix, Mode, MonomialDim, Problem


def _find_duplicate(nodes: np.ndarray) -> Optional[tuple[int, int]]:
    """First pair (i, j), i < j, of exactly equal nodes, or None."""
    order = np.lexsort((nodes.imag, nodes.real))
    sorted_nodes = nodes[order]
    same = np.flatnonzero(sorted_nodes[1:] == sorted_nodes[:-1])
    if same.size == 0:
        return None
    pairs = sorted(
        tuple(sorted((int(order[k]), int(order[k + 1])))) for k in same
    )
    return pairs[0]


def make_problem(
    nodes,
    values,
    basis: BasisSpec,
    mode: Mode | str = Mode.REAL,
    name: Optional[str] = None,
    allow_duplicates: bool = False,
) -> Problem:
    """Validate sampled data and package it as a :class:`Problem`.

    Nodes keep their input order. Duplicate detection uses exact equality
    and is skipped only for trusted built-in grids.
    """
    mode = Mode(mode)
    x = np.asarray(nodes, dtype=np.complex128).ravel()
    f = np.asarray(values, dtype=np.complex128).ravel()
    if x.shape != f.shape:
        raise ValueError(f"{x.size} nodes but {f.size} values")

    for what, arr in (("node", x), ("value", f)):
        bad = np.flatnonzero(~np.isfinite(arr))
        if bad.size:
            raise NonFiniteData(what, int(bad[0]))

    if mode is Mode.REAL:
        nonreal = np.flatnonzero((x.imag != 0) | (f.imag != 0))
        if nonreal.size:
            raise NonRealData(int(nonreal[0]))

    dup = None if allow_duplicates else _find_duplicate(x)
    if dup is not None:
        raise DuplicateNodes(*dup)

    m, n = x.size, basis.dim
    if n < 1:
        raise ValueError("Basis dimension must be positive")
    if m < n + 1:
        raise TooFewNodes(m, n)

    if isinstance(basis, ExplicitMatrix):
        psi = basis.psi
        if psi.shape[0] != m:
            raise ValueError(f"Basis matrix has {psi.shape[0]} rows for {m} nodes")
        if not np.all(np.isfinite(psi)):
            raise NonFiniteData("basis entry", int(np.flatnonzero(~np.isfinite(psi.ravel()))[0]))
        if mode is Mode.REAL and np.iscomplexobj(psi) and np.any(psi.imag != 0):
            raise NonRealData(int(np.flatnonzero((psi.imag != 0).any(axis=1))[0]))
        rank = int(np.linalg.matrix_rank(psi))
        if rank < n:
            raise RankDeficientBasis(rank, n)
        dtype = np.float64 if mode is Mode.REAL else np.complex128
        basis = ExplicitMatrix(np.asarray(psi.real if mode is Mode.REAL else psi, dtype=dtype))

    if mode is Mode.REAL:
        x, f = x.real.copy(), f.real.copy()
    return Problem(nodes=x, values=f, basis=basis, mode=mode, name=name)


def with_dim(problem: Problem, n: int) -> Problem:
    """Same data with the monomial basis of dimension ``n``.

    The node set was validated when ``problem`` was built.
    """
    return make_problem(
        problem.nodes, problem.values, MonomialDim(n), problem.mode, problem.name,
        allow_duplicates=True,
    )


# Built-in problems. Grids are pure functions of the index, so they are
# bit-reproducible.

M_BUILTIN = 2001


def _real_grid() -> np.ndarray:
    i = np.arange(1, M_BUILTIN + 1, dtype=np.float64)
    return -1.0 + (i - 1.0) / 1000.0


def _f1() -> tuple[np.ndarray, np.ndarray, Mode]:
    x = _real_grid()
    return x, np.sin(20.0 * np.abs(x) * x), Mode.REAL


def _f2() -> tuple[np.ndarray, np.ndarray, Mode]:
    x = _real_grid()
    return x, 1.0 / (1.0 + 25.0 * x**2), Mode.REAL


def _g1() -> tuple[np.ndarray, np.ndarray, Mode]:
    k = np.arange(1, M_BUILTIN + 1, dtype=np.float64)
    z = np.exp(-0.5j * np.pi + (k - 1.0) * np.pi * 1j / 2000.0)
    # numpy's complex power uses the principal branch
    return z, (2.0 * z + 1.0) ** -0.5, Mode.COMPLEX


def _g2() -> tuple[np.ndarray, np.ndarray, Mode]:
    k = np.arange(1, M_BUILTIN + 1, dtype=np.float64)
    # denominator 1000 as published: tanh argument spans [-12, 36]
    z = np.exp(1j * np.pi / 4.0 * np.tanh(-12.0 + 24.0 * (k - 1.0) / 1000.0))
    return z, (1.0 + z**4) ** 0.5, Mode.COMPLEX


BUILTIN_PROBLEMS: dict[str, Callable[[], tuple[np.ndarray, np.ndarray, Mode]]] = {
    "f1": _f1,
    "f2": _f2,
    "g1": _g1,
    "g2": _g2,
}


def builtin_problem(name: str, n: int = 1) -> Problem:
    """Return a built-in test problem on its published grid (m = 2001).

    The basis dimension is a solve-time choice; ``n`` defaults to the
    constant basis.
    """
    factory = BUILTIN_PROBLEMS.get(name)
    if factory is None:
        raise UnknownProblem(name)
    x, f, mode = factory()
    # The g2 grid is taken as published; tanh saturates to exactly 1.0 in
    # float64 for arguments above ~19.1, so its tail holds coincident nodes.
    return make_problem(x, f, MonomialDim(n), mode, name, allow_duplicates=True)
