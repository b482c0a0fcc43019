"""Exception hierarchy for chebydual."""

from pathlib import Path
from typing import Optional


class ChebyDualError(Exception):
    """Base class for all chebydual errors."""


# Problem validation


class DuplicateNodes(ChebyDualError):
    def __init__(self, i: int, j: int):
        self.i = i
        self.j = j
        super().__init__(f"Nodes {i} and {j} coincide")


class TooFewNodes(ChebyDualError):
    def __init__(self, m: int, n: int):
        self.m = m
        self.n = n
        super().__init__(f"Need at least n + 1 = {n + 1} nodes for basis dimension {n}, got m = {m}")


class RankDeficientBasis(ChebyDualError):
    def __init__(self, rank: Optional[int] = None, n: Optional[int] = None):
        self.rank = rank
        self.n = n
        detail = f" (rank {rank} < {n})" if rank is not None else ""
        super().__init__(f"Basis matrix is not of full column rank{detail}")


class NonRealData(ChebyDualError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"Real mode requested but entry {index} has a nonzero imaginary part")


class NonFiniteData(ChebyDualError):
    def __init__(self, what: str, index: int):
        self.what = what
        self.index = index
        super().__init__(f"Non-finite {what} at index {index}")


class InvalidWeights(ChebyDualError):
    pass


class UnknownProblem(ChebyDualError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"Unknown built-in problem: {name!r}")


# Basis construction and evaluation


class BreakdownRankDeficient(ChebyDualError):
    def __init__(self, k: int):
        self.k = k
        super().__init__(f"Arnoldi breakdown at step {k}: weight support too small")


class NoRecurrence(ChebyDualError):
    def __init__(self):
        super().__init__("Basis was built by explicit QR and carries no recurrence")


class DivisionByZeroSubdiagonal(ChebyDualError):
    def __init__(self, k: int):
        self.k = k
        super().__init__(f"Zero subdiagonal H[{k + 1}, {k}] in the recurrence")


# Solvers


class ZeroDenominator(ChebyDualError):
    def __init__(self):
        super().__init__("All residuals vanish on the support; the data are interpolated")


class AllWeightsFiltered(ChebyDualError):
    def __init__(self, support: int, n: int):
        self.support = support
        self.n = n
        super().__init__(f"Filtering left {support} nodes, fewer than n + 1 = {n + 1}")


class IndefiniteSystem(ChebyDualError):
    def __init__(self, detail: str = ""):
        super().__init__(f"Newton system is not positive definite{': ' + detail if detail else ''}")


class NonFiniteIterate(ChebyDualError):
    def __init__(self, k: int):
        self.k = k
        super().__init__(f"Non-finite iterate at iteration {k}")


class MonotonicityViolation(ChebyDualError):
    def __init__(self, k: int, previous: float, current: float):
        self.k = k
        self.previous = previous
        self.current = current
        super().__init__(f"Dual sequence decreased at iteration {k}: {previous:.17g} -> {current:.17g}")


class LpUnbounded(ChebyDualError):
    pass


class LpInfeasible(ChebyDualError):
    pass


class LpSingularBasis(ChebyDualError):
    def __init__(self, detail: str = ""):
        super().__init__(f"Simplex basis matrix is singular{': ' + detail if detail else ''}")


class LpResidualMismatch(ChebyDualError):
    def __init__(self, eta: float, r_inf: float):
        self.eta = eta
        self.r_inf = r_inf
        super().__init__(f"LP optimum eta = {eta:.17g} but the fit has max |r| = {r_inf:.17g}")


class LpPivotLimit(ChebyDualError):
    def __init__(self, pivots: int):
        self.pivots = pivots
        super().__init__(f"Simplex stopped after {pivots} pivots without reaching optimality")


class ComplexModeUnsupported(ChebyDualError):
    def __init__(self, what: str):
        super().__init__(f"{what} is defined for real data only")


class CapExceeded(ChebyDualError):
    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(f"Problem size {size} exceeds the configured cap {cap}")


# Input / output


class DigestMismatch(ChebyDualError):
    def __init__(self, expected: str, actual: str):
        self.expected = expected
        self.actual = actual
        super().__init__(f"Node digest mismatch: model has {expected[:12]}, grid has {actual[:12]}")


class InputFormatError(ChebyDualError):
    def __init__(self, path: Path, line: int, message: str):
        self.path = Path(path)
        self.line = line
        super().__init__(f"{self.path.name}:{line}: {message}")
