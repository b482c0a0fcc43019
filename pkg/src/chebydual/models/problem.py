"""Approximation problem data model."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

import numpy as np

from ..errors import InvalidWeights


class Mode(str, Enum):
    """Arithmetic of the problem data."""

    REAL = "real"
    COMPLEX = "complex"


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MonomialDim:
    """span{1, x, ..., x^(n-1)}."""

    n: int

    @property
    def dim(self) -> int:
        return self.n


@dataclass(frozen=True, eq=False)
class ExplicitMatrix:
    """Basis given by its values at the nodes, Psi[i, j] = psi_j(x_i)."""

    psi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "psi", _frozen(np.atleast_2d(self.psi)))

    @property
    def dim(self) -> int:
        return int(self.psi.shape[1])


BasisSpec = Union[MonomialDim, ExplicitMatrix]


@dataclass(frozen=True, eq=False)
class Problem:
    """Sampled data of a best linear Chebyshev approximation problem.

    Use :func:`chebydual.problems.builtin.make_problem` to build validated
    instances; the constructor itself performs no checks.
    """

    nodes: np.ndarray
    values: np.ndarray
    basis: BasisSpec
    mode: Mode
    name: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "nodes", _frozen(self.nodes))
        object.__setattr__(self, "values", _frozen(self.values))

    @property
    def m(self) -> int:
        return int(self.nodes.shape[0])

    @property
    def n(self) -> int:
        return self.basis.dim

    @property
    def is_real(self) -> bool:
        return self.mode is Mode.REAL

    @property
    def label(self) -> str:
        return self.name or f"custom(m={self.m})"


@dataclass(frozen=True, eq=False)
class WeightVector:
    """A point of the probability simplex."""

    w: np.ndarray = field()

    def __post_init__(self):
        w = np.asarray(self.w, dtype=np.float64).ravel()
        if w.size == 0:
            raise InvalidWeights("Weight vector is empty")
        if not np.all(np.isfinite(w)):
            raise InvalidWeights("Weight vector has non-finite entries")
        if np.any(w < -1e-15):
            raise InvalidWeights(f"Negative weight {w.min():.3e}")
        w = np.clip(w, 0.0, None)
        total = w.sum()
        if total <= 0.0:
            raise InvalidWeights("Weights sum to zero")
        object.__setattr__(self, "w", _frozen(w / total))

    @classmethod
    def uniform(cls, m: int) -> "WeightVector":
        return cls(np.full(m, 1.0 / m))

    @property
    def m(self) -> int:
        return int(self.w.shape[0])

    @property
    def support(self) -> np.ndarray:
        """Indices carrying strictly positive weight."""
        return np.flatnonzero(self.w > 0.0)

    def __len__(self) -> int:
        return self.m
