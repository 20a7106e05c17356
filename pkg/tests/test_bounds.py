import math

import numpy as np
import pytest

from wavekit.bounds.constants import cosine_grid, interval_constants, slice_constants, speed_bracket
from wavekit.config import SolverSettings
from wavekit.errors import GridNonConvergence
from wavekit.model.decomposition import decompose
from wavekit.shooting.reflection import reflect_interval

from conftest import example_1, kpp

SQRT3 = math.sqrt(3.0)


@pytest.mark.parametrize("K", [0.25, 0.5, 1.0])
def test_example_1_constants(K):
    p = example_1(K)
    d = decompose(p)
    plus = interval_constants(p, d.intervals[0])
    minus = interval_constants(p, d.intervals[1])

    assert plus.hdot_endpoint == pytest.approx(0.75, rel=1e-6)
    assert plus.H == pytest.approx(0.75, rel=1e-6)
    assert plus.G == pytest.approx(K - 3 / 16, rel=1e-5)
    assert plus.F == pytest.approx(0.0, abs=1e-12)

    assert minus.anchor == 1.0
    assert minus.hdot_endpoint == pytest.approx(0.25, rel=1e-6)
    assert minus.H == pytest.approx(0.25, rel=1e-5)
    assert minus.G == pytest.approx(K - 5 / 48, rel=1e-5)


@pytest.mark.parametrize("K", [0.25, 1.0])
def test_example_1_bracket(K):
    p = example_1(K)
    bracket = speed_bracket(p, decompose(p))
    assert bracket.lower == pytest.approx(SQRT3 / K, rel=1e-5)
    assert bracket.upper == pytest.approx(SQRT3 / (K - 3 / 16), rel=1e-4)
    assert bracket.k0_term is None
    assert bracket.contains(0.5 * (bracket.lower + bracket.upper))


@pytest.mark.parametrize("name", ["ex1", "ex1_k1", "ex2"])
def test_negative_interval_constants_match_the_reflected_slice(name, request):
    p = request.getfixturevalue(name)
    minus = decompose(p).intervals[1]
    sl, _ = reflect_interval(p, minus)
    direct = interval_constants(p, minus)
    reflected = slice_constants(sl)
    for field in ("G", "F", "H", "hdot_endpoint", "f_endpoint", "g_endpoint"):
        assert getattr(reflected, field) == pytest.approx(getattr(direct, field), rel=1e-8, abs=1e-12)
    assert reflected.upper == pytest.approx(direct.upper, rel=1e-8)


def test_example_1_bracket_at_K_one_matches_the_published_values(ex1_k1):
    bracket = speed_bracket(ex1_k1, decompose(ex1_k1))
    assert bracket.lower == pytest.approx(1.7321, abs=1e-3)
    assert bracket.upper == pytest.approx(2.1314, abs=1e-3)


@pytest.mark.parametrize("d0", [1.0, 0.25, 4.0])
def test_kpp_bracket_collapses(d0):
    p = kpp(d0)
    bracket = speed_bracket(p, decompose(p))
    assert bracket.lower == pytest.approx(2.0 * math.sqrt(d0), rel=1e-6)
    assert bracket.upper == pytest.approx(2.0 * math.sqrt(d0), rel=1e-6)


def test_example_3_bracket_is_a_point(ex3):
    bracket = speed_bracket(ex3, decompose(ex3))
    assert bracket.lower == pytest.approx(2.0, abs=1e-6)
    assert bracket.upper == pytest.approx(2.0, abs=1e-6)
    k, lower, upper = bracket.per_interval[1]
    assert k == 2
    assert lower == pytest.approx(1.0, abs=1e-5)
    assert upper < 2.0
    assert bracket.for_interval(2) == (lower, upper)
    with pytest.raises(KeyError):
        bracket.for_interval(3)


def test_k0_minus_term_enters_the_bracket():
    from wavekit.model.problem import Problem
    p = Problem.from_sources(g="1", f="3*u", D="-(u - 1/2)^3", rho="u - u^2")
    d = decompose(p)
    bracket = speed_bracket(p, d)
    assert bracket.k0_term == pytest.approx(1.5)
    assert bracket.lower >= 1.5
    assert bracket.upper >= 1.5


def test_cosine_grid_endpoints():
    x = cosine_grid(0.75, 64)
    assert x[0] == 0.0 and x[-1] == 0.75
    assert np.all(np.diff(x) > 0.0)
    # clustered at both ends
    assert x[1] - x[0] < x[33] - x[32]


def test_coarse_grid_is_reported():
    # a kink inside the interval keeps the running-mean extrema moving under grid doubling
    from wavekit.model.problem import Problem
    p = Problem.from_sources(g="1 + 50*abs(u - 0.3137)", f="0", D="1", rho="u - u^2")
    with pytest.raises(GridNonConvergence):
        speed_bracket(p, decompose(p), SolverSettings(grid=16, grid_rel_tol=1e-12))
