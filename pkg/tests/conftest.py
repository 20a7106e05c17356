import numpy as np
import pytest

from wavekit.config import SolverSettings
from wavekit.model.decomposition import decompose
from wavekit.model.problem import Problem

EX1 = dict(g="u^2 - u + K", f="0", D="(3/4 - u) * sqrt(u - u^2)", rho="sqrt(u - u^2)")
EX2 = dict(g="u^2 - u + K", f="0", D="(1/2 - u) * (u - u^2)^a", rho="(u - u^2)^b")
EX3 = dict(g="1", f="1", D="(1/2 - u)^2", rho="u - u^2")
KPP = dict(g="1", f="0", D="d", rho="u - u^2")
SHARP = dict(g="1", f="6 - 5*u", D="-u*(1 - u)", rho="u - u^2")


def example_1(K: float = 0.25) -> Problem:
    return Problem.from_sources(name="ex1", params={'K': K}, **EX1)


def kpp(d: float = 1.0) -> Problem:
    return Problem.from_sources(name="kpp", params={'d': d}, **KPP)


def random_problem(seed: int) -> Problem:
    """g = 1 + a u, f = b u, D = (u0 - u)(1 + e u), rho = u (1 - u)(1 + r u) with small random coefficients"""
    rng = np.random.default_rng(seed)
    params = {
        'a': rng.uniform(-0.3, 0.3),
        'b': rng.uniform(-0.5, 0.5),
        'u0': rng.uniform(0.3, 0.7),
        'e': rng.uniform(0.0, 0.5),
        'r': rng.uniform(0.0, 0.5),
    }
    return Problem.from_sources(
        g="1 + a*u", f="b*u", D="(u0 - u) * (1 + e*u)", rho="u * (1 - u) * (1 + r*u)",
        name=f"random_{seed}", params=params,
    )


@pytest.fixture
def settings():
    return SolverSettings()


@pytest.fixture
def ex1():
    return example_1(0.25)


@pytest.fixture
def ex1_k1():
    return example_1(1.0)


@pytest.fixture
def ex2():
    return Problem.from_sources(name="ex2", params={'K': 0.25, 'a': 1.0, 'b': 1.0}, **EX2)


@pytest.fixture
def ex3():
    return Problem.from_sources(name="ex3", **EX3)


@pytest.fixture
def kpp_problem():
    return kpp(1.0)


@pytest.fixture
def sharp_problem():
    return Problem.from_sources(name="sharp", **SHARP)


@pytest.fixture
def decomposed():
    """Decompose a problem with default settings"""
    return lambda p: decompose(p)
