"""Independent cross-checks of the dual function and its derivatives."""

import itertools
import math
from typing import Iterator

import numpy as np

from ..errors import CapExceeded, InvalidWeights
from ..models.problem import ExplicitMatrix, Problem, WeightVector
from ..solvers.wls import dual_gradient, hessian_dense, solve_wls

MAX_DIRECTIONS = 50
GRID_CHUNK = 20000
MAX_GRID_POINTS = 20_000_000


def _tangent_directions(w: np.ndarray) -> list[np.ndarray]:
    """Simplex-tangent directions c (e_i - e_j) over cyclic index pairs."""
    m = w.size
    pairs = [(i, (i + 1) % m) for i in range(m)]
    if m == 2:
        pairs = pairs[:1]
    out = []
    for i, j in pairs[:MAX_DIRECTIONS]:
        v = np.zeros(m)
        c = min(w[i], w[j])
        v[i], v[j] = c, -c
        out.append(v)
    return out


def _check_weights(w) -> np.ndarray:
    w = WeightVector(w).w
    if np.any(w <= 0.0):
        raise InvalidWeights("finite-difference checks need strictly positive weights")
    return w


def _check_step(h: float) -> None:
    if not 1e-7 <= h <= 1e-3:
        raise ValueError(f"step {h} outside [1e-7, 1e-3]")


def _data_floor(problem: Problem) -> float:
    """Smallest derivative scale central differences can resolve for this data."""
    return float(np.sqrt(np.finfo(np.float64).eps) * np.max(np.abs(problem.values)) ** 2)


def _relative(errors: list[float], scale: float) -> float:
    return float(max(errors) / max(scale, np.finfo(np.float64).tiny))


def fd_gradient_check(problem: Problem, w, h: float = 1e-5) -> float:
    """Max discrepancy between grad d . v and central differences of d.

    Errors are measured against ||grad d||_inf ||v||_1, which stays away from
    zero at stationary points where grad d . v itself vanishes.
    """
    _check_step(h)
    w = _check_weights(w)
    grad = dual_gradient(solve_wls(problem, WeightVector(w)))
    grad_scale = max(float(np.max(np.abs(grad))), _data_floor(problem))

    errors, scales = [], []
    for v in _tangent_directions(w):
        plus = solve_wls(problem, WeightVector(w + h * v)).d
        minus = solve_wls(problem, WeightVector(w - h * v)).d
        errors.append(abs((plus - minus) / (2.0 * h) - float(grad @ v)))
        scales.append(grad_scale * float(np.sum(np.abs(v))))
    return _relative(errors, max(scales))


def fd_hessian_check(problem: Problem, w, h: float = 1e-4) -> float:
    """Max discrepancy between Hess d . v and central differences of grad d.

    Errors are measured against ||Hess d||_inf ||v||_inf.
    """
    _check_step(h)
    w = _check_weights(w)
    hess = hessian_dense(solve_wls(problem, WeightVector(w)))
    hess_scale = max(float(np.max(np.sum(np.abs(hess), axis=1))), _data_floor(problem))

    errors, scales = [], []
    for v in _tangent_directions(w):
        plus = dual_gradient(solve_wls(problem, WeightVector(w + h * v)))
        minus = dual_gradient(solve_wls(problem, WeightVector(w - h * v)))
        errors.append(float(np.max(np.abs((plus - minus) / (2.0 * h) - hess @ v))))
        scales.append(hess_scale * float(np.max(np.abs(v))))
    return _relative(errors, max(scales))


def _basis_matrix(problem: Problem) -> np.ndarray:
    if isinstance(problem.basis, ExplicitMatrix):
        return np.asarray(problem.basis.psi)
    return np.vander(problem.nodes, problem.n, increasing=True)


def _simplex_grid(m: int, steps: int) -> Iterator[np.ndarray]:
    """Chunks of all weight vectors with entries k_i / steps."""
    bars = itertools.combinations(range(steps + m - 1), m - 1)
    while True:
        chunk = np.array(list(itertools.islice(bars, GRID_CHUNK)), dtype=np.int64)
        if chunk.size == 0:
            return
        chunk = chunk.reshape(-1, m - 1)
        rows = chunk.shape[0]
        edges = np.hstack([np.full((rows, 1), -1), chunk, np.full((rows, 1), steps + m - 1)])
        yield (np.diff(edges, axis=1) - 1) / steps


def _batch_dual(v: np.ndarray, f: np.ndarray, w: np.ndarray) -> np.ndarray:
    """d(w) = f^H W f - b^H G^+ b for each row of ``w``, G = V^H W V, b = V^H W f."""
    vw = w[:, :, None] * v[None, :, :]
    gram = np.einsum("mi,kmj->kij", v.conj(), vw)
    rhs = np.einsum("mi,km->ki", v.conj(), w * f[None, :])
    coef = np.einsum("kij,kj->ki", np.linalg.pinv(gram, hermitian=True), rhs)
    return (w @ np.abs(f) ** 2) - np.real(np.einsum("ki,ki->k", rhs.conj(), coef))


def brute_force_dual(
    problem: Problem, h: float = 1e-3, cap: int = 4, max_points: int = MAX_GRID_POINTS
) -> float:
    """Max of d over the simplex grid with spacing ``h``.

    The grid has C(1/h + m - 1, m - 1) points; m = 4 at h = 1e-3 is about
    1.7e8 and is refused under the default ``max_points``.
    """
    m = problem.m
    if m > cap:
        raise CapExceeded(m, cap)
    steps = int(round(1.0 / h))
    points = math.comb(steps + m - 1, m - 1)
    if points > max_points:
        raise CapExceeded(points, max_points)
    v = _basis_matrix(problem)
    f = np.asarray(problem.values)

    best = -np.inf
    for w in _simplex_grid(m, steps):
        best = max(best, float(np.max(_batch_dual(v, f, w))))
    return max(best, 0.0)
