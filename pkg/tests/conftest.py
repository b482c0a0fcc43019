"""Shared fixtures: small problems with known minimax solutions."""

import numpy as np
import pytest

from chebydual.models.problem import Mode, MonomialDim
from chebydual.problems.builtin import make_problem


@pytest.fixture
def x2_problem():
    """x^2 on {-1, 0, 1} with constants: p* = 1/2, w* = [1/4, 1/2, 1/4]."""
    return make_problem([-1.0, 0.0, 1.0], [1.0, 0.0, 1.0], MonomialDim(1), Mode.REAL, "x2")


@pytest.fixture
def x2_linear():
    """x^2 on {-1, 0, 1} with lines: p*(x) = 1/2, eta = 1/2."""
    return make_problem([-1.0, 0.0, 1.0], [1.0, 0.0, 1.0], MonomialDim(2), Mode.REAL, "x2")


@pytest.fixture
def two_node():
    """f = [1, -1] with constants: d(w) = 4 w_1 w_2."""
    return make_problem([0.0, 1.0], [1.0, -1.0], MonomialDim(1), Mode.REAL, "two-node")


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


def random_real_problem(rng, m: int, n: int, name: str = "random-real"):
    x = np.sort(rng.uniform(-1.0, 1.0, m))
    f = np.exp(x) * np.sin(3.0 * x) + 0.1 * rng.standard_normal(m)
    return make_problem(x, f, MonomialDim(n), Mode.REAL, name)


def random_complex_problem(rng, m: int, n: int, name: str = "random-complex"):
    x = np.exp(1j * np.sort(rng.uniform(0.0, np.pi, m)))
    f = 1.0 / (x + 1.5) + 0.1 * (rng.standard_normal(m) + 1j * rng.standard_normal(m))
    return make_problem(x, f, MonomialDim(n), Mode.COMPLEX, name)


def random_weights(rng, m: int) -> np.ndarray:
    w = rng.uniform(0.5, 1.5, m)
    return w / w.sum()


@pytest.fixture
def make_real(rng):
    return lambda m, n: random_real_problem(rng, m, n)


@pytest.fixture
def make_complex(rng):
    return lambda m, n: random_complex_problem(rng, m, n)


@pytest.fixture
def make_weights(rng):
    return lambda m: random_weights(rng, m)
