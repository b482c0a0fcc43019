"""Orthonormal weighted bases via Vandermonde-with-Arnoldi.

The weighted Vandermonde matrix sqrt(W) V_x = [sqrt(w), X sqrt(w), ...,
X^(n-1) sqrt(w)] spans a Krylov space. Building an orthonormal basis of it
with the Arnoldi process yields the thin QR factor Q without ever forming
V_x; the Hessenberg recurrence H lets the fitted function be evaluated at
new points (V_v = S R) by running the same recurrence in reverse.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy.linalg import qr, solve_triangular

from ..errors import (
    BreakdownRankDeficient,
    DivisionByZeroSubdiagonal,
    NoRecurrence,
    RankDeficientBasis,
)
from ..models.problem import ExplicitMatrix, MonomialDim, Problem, WeightVector

BREAKDOWN_RTOL = 1e-14


class BasisSource(str, Enum):
    ARNOLDI = "arnoldi"
    EXPLICIT_QR = "explicit-qr"


@dataclass(frozen=True, eq=False)
class WeightedBasis:
    """Orthonormal basis of sqrt(W) * span(basis) at the nodes.

    Rows of ``q`` at zero-weight nodes are zero. For Arnoldi bases, ``h`` is
    the leading n x (n-1) block of the Hessenberg recurrence, i.e.
    x * q[:, k] = sum_{i <= k+1} h[i, k] q[:, i]; ``norm0`` is ||sqrt(w)||_2.
    """

    q: np.ndarray
    source: BasisSource
    sqrt_w: np.ndarray
    support: np.ndarray
    norm0: float
    h: Optional[np.ndarray] = None
    r_factor: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return int(self.q.shape[1])

    @property
    def m(self) -> int:
        return int(self.q.shape[0])

    def orthogonality_error(self) -> float:
        """max |Q^H Q - I|."""
        g = self.q.conj().T @ self.q
        return float(np.max(np.abs(g - np.eye(self.n))))


def _work_dtype(problem: Problem) -> type:
    return np.float64 if problem.is_real else np.complex128


def weighted_arnoldi(problem: Problem, w: WeightVector) -> WeightedBasis:
    """Arnoldi on K_n(diag(x), sqrt(w)) restricted to the weight support.

    Modified Gram-Schmidt with one reorthogonalization pass.
    """
    if not isinstance(problem.basis, MonomialDim):
        raise TypeError("weighted_arnoldi requires a monomial basis")
    n = problem.n
    support = w.support
    if support.size < n:
        raise BreakdownRankDeficient(int(support.size))

    dtype = _work_dtype(problem)
    x = problem.nodes[support].astype(dtype)
    sqrt_w = np.sqrt(w.w)
    s = sqrt_w[support]

    norm0 = float(np.linalg.norm(s))
    qs = np.zeros((support.size, n), dtype=dtype)
    h = np.zeros((n, max(n - 1, 0)), dtype=dtype)
    qs[:, 0] = s / norm0

    scale = float(np.max(np.abs(x))) if x.size else 0.0
    threshold = BREAKDOWN_RTOL * scale
    for k in range(n - 1):
        v = x * qs[:, k]
        for _ in range(2):
            for i in range(k + 1):
                coef = np.vdot(qs[:, i], v)
                v -= coef * qs[:, i]
                h[i, k] += coef
        beta = float(np.linalg.norm(v))
        if beta <= threshold or beta == 0.0:
            raise BreakdownRankDeficient(k + 1)
        h[k + 1, k] = beta
        qs[:, k + 1] = v / beta

    q = np.zeros((problem.m, n), dtype=dtype)
    q[support] = qs
    return WeightedBasis(
        q=q,
        source=BasisSource.ARNOLDI,
        sqrt_w=sqrt_w,
        support=support,
        norm0=norm0,
        h=h,
    )


def explicit_weighted_qr(problem: Problem, w: WeightVector) -> WeightedBasis:
    """Thin QR of W^(1/2) Psi for an explicit basis matrix.

    Columns are phased so that diag(R) is real positive.
    """
    if not isinstance(problem.basis, ExplicitMatrix):
        raise TypeError("explicit_weighted_qr requires an explicit basis matrix")
    n = problem.n
    support = w.support
    if support.size < n:
        raise RankDeficientBasis(int(support.size), n)

    dtype = _work_dtype(problem)
    sqrt_w = np.sqrt(w.w)
    a = sqrt_w[support, None] * problem.basis.psi[support].astype(dtype)
    qs, r = qr(a, mode="economic")
    diag = np.diag(r)
    if np.min(np.abs(diag)) <= 1e-12 * max(np.max(np.abs(diag)), np.finfo(float).tiny):
        raise RankDeficientBasis()
    phase = diag / np.abs(diag)
    qs = qs * phase
    r = phase.conj()[:, None] * r

    q = np.zeros((problem.m, n), dtype=dtype)
    q[support] = qs
    return WeightedBasis(
        q=q,
        source=BasisSource.EXPLICIT_QR,
        sqrt_w=sqrt_w,
        support=support,
        norm0=float(np.linalg.norm(sqrt_w[support])),
        r_factor=r,
    )


def build_basis(problem: Problem, w: WeightVector) -> WeightedBasis:
    if isinstance(problem.basis, MonomialDim):
        return weighted_arnoldi(problem, w)
    return explicit_weighted_qr(problem, w)


def evaluate_at(basis: WeightedBasis, coeffs: np.ndarray, v) -> np.ndarray:
    """Evaluate the fitted function sum_k coeffs[k] * s_k at new nodes ``v``."""
    if basis.source is not BasisSource.ARNOLDI or basis.h is None:
        raise NoRecurrence()
    return replay_recurrence(basis.h, basis.norm0, coeffs, v)


def replay_recurrence(h: np.ndarray, norm0: float, coeffs: np.ndarray, v) -> np.ndarray:
    """Run the Arnoldi recurrence in reverse at the points ``v``.

    s_1 = 1 / norm0, s_(k+1) = (v * s_k - sum_(i<=k) H[i,k] s_i) / H[k+1,k].
    """
    v = np.atleast_1d(np.asarray(v))
    coeffs = np.asarray(coeffs)
    h = np.asarray(h)
    n = coeffs.shape[0]
    dtype = np.result_type(v.dtype, h.dtype, coeffs.dtype, np.float64)

    s = np.zeros((v.size, n), dtype=dtype)
    s[:, 0] = 1.0 / norm0
    for k in range(n - 1):
        sub = h[k + 1, k]
        if sub == 0:
            raise DivisionByZeroSubdiagonal(k)
        t = v * s[:, k] - s[:, : k + 1] @ h[: k + 1, k]
        s[:, k + 1] = t / sub
    return s @ coeffs


def explicit_values(basis: WeightedBasis, psi_rows: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """Values of an explicit-basis fit at rows of the basis matrix.

    Recovers a = R^(-1) coeffs, which is as well conditioned as the user's
    basis matrix.
    """
    if basis.r_factor is None:
        raise NoRecurrence()
    a = solve_triangular(basis.r_factor, np.asarray(coeffs), lower=False)
    return psi_rows @ a
