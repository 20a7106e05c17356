import logging
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from scipy.integrate import cumulative_trapezoid

from ..config import DEFAULT_SETTINGS, SolverSettings
from .decomposition import Decomposition, SignInterval
from .problem import Problem


@dataclass(frozen=True)
class ConditionCheck:
    name: str
    passed: bool
    k: Optional[int] = None
    violating_u: Optional[float] = None
    value: Optional[float] = None
    detail: str = ""


@dataclass
class ValidationReport:
    problem: str
    checks: List[ConditionCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[ConditionCheck]:
        return [check for check in self.checks if not check.passed]

    def get_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(check) for check in self.checks])

    def to_dict(self) -> Dict:
        return {
            'problem': self.problem,
            'passed': self.passed,
            'checks': [asdict(check) for check in self.checks],
        }


def running_integral_minimum(p: Problem, iv: SignInterval, points: int):
    """Minimum over the interval of the integral of g taken from the interval's anchor

    Returns (min value, u where it is attained); the anchor point itself is excluded.
    """
    x = np.linspace(0.0, iv.length, points + 1)
    u = iv.anchor + iv.direction * x
    integral = cumulative_trapezoid(p.g(u), x, initial=0.0)
    i = int(np.argmin(integral[1:])) + 1
    return float(integral[i]), float(u[i])


def _check_g_integral(p: Problem, iv: SignInterval, settings: SolverSettings) -> ConditionCheck:
    coarse, _ = running_integral_minimum(p, iv, settings.validation_grid)
    fine, u_min = running_integral_minimum(p, iv, 2 * settings.validation_grid)
    detail = "" if (coarse > 0.0) == (fine > 0.0) else "verdict changed under grid doubling"
    side = "from alpha" if iv.positive else "up to beta"
    return ConditionCheck(
        name='g_integral_positive',
        passed=fine > 0.0,
        k=iv.k,
        violating_u=None if fine > 0.0 else u_min,
        value=fine,
        detail=detail or f"minimum running integral of g {side}",
    )


def validate_hypotheses(p: Problem, d: Decomposition,
                        settings: SolverSettings = DEFAULT_SETTINGS) -> ValidationReport:
    """Check every hypothesis the existence theory needs; failures are reported, not raised"""
    report = ValidationReport(problem=p.name)

    rho_ends = max(abs(p.rho(0.0)), abs(p.rho(1.0)))
    report.checks.append(ConditionCheck(
        name='rho_vanishes_at_equilibria', passed=rho_ends <= 1e-10, value=rho_ends,
        violating_u=None if rho_ends <= 1e-10 else (0.0 if abs(p.rho(0.0)) > 1e-10 else 1.0)))

    n = settings.validation_grid
    interior = np.linspace(0.0, 1.0, n + 1)[1:-1]
    rho_values = p.rho(interior)
    i = int(np.argmin(rho_values))
    rho_min = float(rho_values[i])
    report.checks.append(ConditionCheck(
        name='rho_positive', passed=rho_min > 0.0, value=rho_min,
        violating_u=None if rho_min > 0.0 else float(interior[i])))

    for iv in d.intervals:
        g_anchor = p.g(iv.anchor)
        report.checks.append(ConditionCheck(
            name='g_positive_at_anchor', passed=g_anchor > 0.0, k=iv.k, value=g_anchor,
            violating_u=None if g_anchor > 0.0 else iv.anchor))
        report.checks.append(_check_g_integral(p, iv, settings))

    for u0 in d.D00:
        g_u0 = p.g(u0)
        report.checks.append(ConditionCheck(
            name='g_positive_on_D00', passed=g_u0 > 0.0, value=g_u0,
            violating_u=None if g_u0 > 0.0 else u0))

    for failure in report.failures:
        where = f" at u = {failure.violating_u:.6g}" if failure.violating_u is not None else ""
        interval = f" (interval {failure.k})" if failure.k is not None else ""
        logging.warning(f"{p.name}: hypothesis {failure.name} fails{interval}{where}")
    return report
