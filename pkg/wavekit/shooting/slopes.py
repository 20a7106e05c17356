import math
from dataclasses import dataclass
from typing import Union

from ..expressions.differentiation import secant_limit_at
from ..model.decomposition import SignInterval
from ..model.problem import Problem


@dataclass(frozen=True)
class BoundarySlopes:
    """Roots of r^2 - (f - c g) r + hdot = 0, the admissible slopes of z at an endpoint"""
    r_plus: float
    r_minus: float
    discriminant: float
    real: bool = True


@dataclass(frozen=True)
class NoRealSlope:
    """Negative discriminant: no solution can leave or reach this endpoint at the given speed"""
    discriminant: float
    real: bool = False


Slopes = Union[BoundarySlopes, NoRealSlope]


def slopes_from(a: float, hdot: float) -> Slopes:
    """Slopes for drift a = f - c g and endpoint derivative hdot of h"""
    discriminant = a * a - 4.0 * hdot
    if discriminant < 0.0:
        return NoRealSlope(discriminant=discriminant)
    root = math.sqrt(discriminant)
    # the small root comes from r_plus * r_minus = hdot; the difference form cancels to 0
    # when hdot << a^2, which loses the z ~ (hdot / a) x slow-manifold start
    if a < 0.0:
        r_minus = 0.5 * (a - root)
        r_plus = hdot / r_minus
    else:
        r_plus = 0.5 * (a + root)
        r_minus = hdot / r_plus if r_plus != 0.0 else 0.5 * (a - root)
    return BoundarySlopes(r_plus=r_plus, r_minus=r_minus, discriminant=discriminant)


def r_pm(p: Problem, u0: float, c: float, hdot: float) -> Slopes:
    return slopes_from(p.f(u0) - c * p.g(u0), hdot)


def endpoint_slope(p: Problem, iv: SignInterval, endpoint: float, c: float, at_threshold: bool = False) -> float:
    """Analytic derivative of z at an endpoint of iv

    The endpoint where z leaves along r_plus is fixed (beta for positive h,
    alpha for negative h). At the other one z arrives along r_plus above the
    interval threshold and along r_minus at the threshold itself.
    """
    side = 'right' if endpoint == iv.alpha else 'left'
    hdot = secant_limit_at(p.h, endpoint, side, span=iv.length).value
    slopes = r_pm(p, endpoint, c, hdot)
    if not slopes.real:
        return math.nan
    free = endpoint == (iv.alpha if iv.positive else iv.beta)
    return slopes.r_minus if free and at_threshold else slopes.r_plus
