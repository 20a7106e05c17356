import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Mapping, Optional

from scipy.integrate import quad

from ..config import DEFAULT_SETTINGS, SolverSettings
from ..expressions.functions import ScalarFunction
from ..expressions.parser import negated, product


@dataclass(frozen=True)
class Problem:
    """g(u)u_t + f(u)u_x = (D(u)u_x)_x + rho(u) on the state interval [0, 1]"""

    g: ScalarFunction
    f: ScalarFunction
    D: ScalarFunction
    rho: ScalarFunction
    name: str = "problem"
    params: Dict[str, float] = field(default_factory=dict)

    @classmethod
    def from_sources(cls, g: str, f: str, D: str, rho: str, name: str = "problem",
                     params: Optional[Mapping[str, float]] = None,
                     settings: SolverSettings = DEFAULT_SETTINGS) -> 'Problem':
        params = {key: float(value) for key, value in (params or {}).items()}
        build = lambda source: ScalarFunction.from_source(source, params, settings.eval_clamp)
        return cls(g=build(g), f=build(f), D=build(D), rho=build(rho), name=name, params=params)

    @cached_property
    def h(self) -> ScalarFunction:
        """h = D * rho, whose sign pattern drives the interval decomposition"""
        return self.D.derive(product(self.D.expr, self.rho.expr))

    def sources(self) -> Dict[str, str]:
        return {
            'g': self.g.expr.source,
            'f': self.f.expr.source,
            'D': self.D.expr.source,
            'rho': self.rho.expr.source,
        }


def necessary_speed_condition(p: Problem, c: float) -> bool:
    """Admissible speeds satisfy the integral of c*g - f over [0, 1] being positive"""
    value, error = quad(lambda s: c * p.g(s) - p.f(s), 0.0, 1.0, epsabs=1e-10, limit=200)
    logging.debug(f"{p.name}: integral of c*g - f at c={c} is {value:.6g} (+/- {error:.1e})")
    return value > 0.0


def negate_g_transform(p: Problem) -> Problem:
    """Problem with g replaced by -g; thresholds of the result map back through c -> -c"""
    g = p.g.derive(negated(p.g.expr))
    return Problem(g=g, f=p.f, D=p.D, rho=p.rho, name=f"{p.name} (g negated)", params=dict(p.params))
