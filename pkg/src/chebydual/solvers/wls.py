"""Weighted least-squares inner problem and the derivatives of the dual.

For weights w on the simplex,

    d(w) = min_a sum_j w_j |f_j - (Psi a)_j|^2,

with gradient |r|^2 and Hessian -2 W^(-1/2) Re(R^H Q Q^H R) W^(-1/2) on the
support, where Q is the orthonormal factor of W^(1/2) Psi and R = diag(r).
"""

from dataclasses import dataclass

import numpy as np

from ..models.problem import ExplicitMatrix, Problem, WeightVector
from .orthobasis import WeightedBasis, build_basis, evaluate_at, explicit_values


@dataclass(frozen=True, eq=False)
class WlsSolution:
    """Solution of the weighted least-squares problem for one weight vector.

    ``r`` covers every original node; off-support entries come from the
    reverse recurrence (or the explicit basis rows).
    """

    problem: Problem
    basis: WeightedBasis
    atilde: np.ndarray
    r: np.ndarray
    d: float
    w_used: WeightVector

    @property
    def support(self) -> np.ndarray:
        return self.basis.support

    @property
    def r_inf(self) -> float:
        return float(np.max(np.abs(self.r)))

    def fitted(self) -> np.ndarray:
        return self.problem.values - self.r


@dataclass(frozen=True, eq=False)
class HessianFactor:
    """K = [Re(Q^H R); Im(Q^H R)] restricted to the support columns.

    In real mode only the real block is kept, so K is n x s; otherwise 2n x s.
    """

    k: np.ndarray
    kr: np.ndarray
    ki: np.ndarray
    support: np.ndarray


def solve_wls(problem: Problem, w: WeightVector) -> WlsSolution:
    """Solve the weighted least-squares problem for the weights ``w``."""
    basis = build_basis(problem, w)
    sup = basis.support
    f = problem.values
    s = basis.sqrt_w[sup]
    qs = basis.q[sup]

    atilde = qs.conj().T @ (s * f[sup])
    r = np.zeros(problem.m, dtype=np.result_type(f.dtype, qs.dtype))
    r[sup] = f[sup] - (qs @ atilde) / s

    off = np.setdiff1d(np.arange(problem.m), sup, assume_unique=True)
    if off.size:
        if isinstance(problem.basis, ExplicitMatrix):
            p_off = explicit_values(basis, problem.basis.psi[off], atilde)
        else:
            p_off = evaluate_at(basis, atilde, problem.nodes[off])
        r[off] = f[off] - p_off

    d = float(np.sum(w.w * np.abs(r) ** 2))
    return WlsSolution(problem=problem, basis=basis, atilde=atilde, r=r, d=d, w_used=w)


def dual_gradient(sol: WlsSolution) -> np.ndarray:
    """Gradient of d at w: [|r_1|^2, ..., |r_m|^2]."""
    return np.abs(sol.r) ** 2


def hessian_factor(sol: WlsSolution) -> HessianFactor:
    sup = sol.support
    c = sol.basis.q[sup].conj().T * sol.r[sup]
    kr = np.ascontiguousarray(c.real, dtype=np.float64)
    if sol.problem.is_real:
        ki = np.zeros((0, sup.size))
        k = kr
    else:
        ki = np.ascontiguousarray(c.imag, dtype=np.float64)
        k = np.vstack([kr, ki])
    return HessianFactor(k=k, kr=kr, ki=ki, support=sup)


def hessian_dense(sol: WlsSolution) -> np.ndarray:
    """Dense m x m Hessian of d; rows and columns off the support are zero.

    Meant for diagnostics on small problems.
    """
    sup = sol.support
    qs = sol.basis.q[sup]
    proj = qs @ qs.conj().T
    rs = sol.r[sup]
    s = sol.basis.sqrt_w[sup]
    block = -2.0 * np.real(rs.conj()[:, None] * proj * rs[None, :]) / np.outer(s, s)
    block = 0.5 * (block + block.T)
    out = np.zeros((sol.problem.m, sol.problem.m))
    out[np.ix_(sup, sup)] = block
    return out
