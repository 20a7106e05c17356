import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..config import DEFAULT_SETTINGS, SolverSettings
from ..model.decomposition import Decomposition
from ..model.problem import Problem
from ..model.validation import validate_hypotheses
from .gluing import GluedZ, at_threshold

EXISTS = ('yes', 'no', 'undetermined_at_c_hat', 'undetermined')
EXTENDABLE = ('smooth_quotient', 'p_limite_limit')


@dataclass
class ExistenceVerdict:
    c: float
    exists: str
    per_zero: Dict[float, str] = field(default_factory=dict)
    phi_values_at_zeros: Dict[float, Optional[float]] = field(default_factory=dict)
    one_sided_slopes: Dict[float, Tuple[float, float]] = field(default_factory=dict)
    reasons: List[str] = field(default_factory=list)

    def __post_init__(self):
        if self.exists not in EXISTS:
            raise ValueError(f"Unknown existence verdict: {self.exists}")

    def to_dict(self) -> Dict:
        return {
            'c': self.c,
            'exists': self.exists,
            'per_zero': {f"{u0:.12g}": kind for u0, kind in self.per_zero.items()},
            'phi_values_at_zeros': {f"{u0:.12g}": value for u0, value in self.phi_values_at_zeros.items()},
            'one_sided_slopes': {f"{u0:.12g}": list(pair) for u0, pair in self.one_sided_slopes.items()},
            'reasons': list(self.reasons),
        }


def _quotient_trend_ok(p: Problem, glued: GluedZ, u0: float, predicted: float) -> bool:
    """Sampled z/D on both sides of u0 must approach the predicted limit"""
    for side in (-1.0, 1.0):
        piece = next(piece for piece in glued.pieces
                     if abs((piece.beta if side < 0 else piece.alpha) - u0) <= 1e-12)
        floor = 2.0 * piece.delta0
        values = []
        for j in range(3, 7):
            distance = max(10.0 ** -j, floor)
            u = u0 + side * distance
            D = p.D(u)
            if D == 0.0:
                return False
            values.append(piece.z_at(u) / D)
        if not all(math.isfinite(v) for v in values):
            return False
        if abs(values[-1] - predicted) > 5e-2 * max(abs(predicted), 1e-12):
            return False
    return True


def corollary_one_existence_at_c_hat(p: Problem, d: Decomposition,
                                     settings: SolverSettings = DEFAULT_SETTINGS) -> str:
    """Existence at the threshold itself when D changes sign exactly once, from positive to negative"""
    if len(d.D0) != 1 or len(d.intervals) != 2:
        return 'not_applicable'
    first, second = d.intervals
    if not (first.positive and not second.positive):
        return 'not_applicable'

    u0 = d.D0[0]
    report = validate_hypotheses(p, d, settings)
    g_checks = [check for check in report.checks if check.name in ('g_positive_at_anchor', 'g_integral_positive')]
    if not all(check.passed for check in g_checks):
        return 'applies_conditions_fail'

    if u0 in d.D00:
        g_u0 = p.g(u0)
        if g_u0 <= 0.0:
            return 'applies_conditions_fail'
        ratio_ok = p.f(u0) / g_u0 < max(p.f(0.0) / p.g(0.0), p.f(1.0) / p.g(1.0))
        n = settings.validation_grid
        left = np.linspace(0.0, u0, n + 1)[1:-1]
        right = np.linspace(u0, 1.0, n + 1)[1:-1]
        f_vanishes = bool(np.all(np.abs(p.f(left)) <= settings.zero_tol)
                          or np.all(np.abs(p.f(right)) <= settings.zero_tol))
        if not (ratio_ok or f_vanishes):
            return 'applies_conditions_fail'
    return 'applies_exists'


def extension_check(p: Problem, d: Decomposition, glued: GluedZ, c_hat: Optional[float] = None,
                    settings: SolverSettings = DEFAULT_SETTINGS) -> ExistenceVerdict:
    """Does z/D extend continuously across every interior zero of D at this speed?"""
    c = glued.c
    verdict = ExistenceVerdict(c=c, exists='yes', one_sided_slopes=dict(glued.one_sided_slopes))

    if not glued.feasible:
        verdict.exists = 'no'
        verdict.reasons.append(f"no solution of the first-order problem on interval(s) {glued.infeasible}")
        return verdict

    cross_check_failed = False
    for u0 in d.D0:
        left, right = glued.one_sided_slopes[u0]
        slope_D = d.D_slopes[u0]
        drift = p.f(u0) - c * p.g(u0)
        phi0 = None
        if abs(slope_D) > settings.derivative_zero_tol:
            q_left, q_right = left / slope_D, right / slope_D
            if abs(q_left - q_right) <= settings.slope_tol * (1.0 + abs(q_left)):
                kind = 'smooth_quotient'
                phi0 = 0.5 * (q_left + q_right)
            else:
                kind = 'jump'
                verdict.reasons.append(f"quotient jump at {u0:.6g}: {q_left:.6g} vs {q_right:.6g}")
        elif abs(drift) <= settings.derivative_zero_tol:
            kind = 'infinite_quotient'
            verdict.reasons.append(f"f - c g vanishes at the degenerate zero {u0:.6g}")
        elif max(abs(left), abs(right)) <= settings.slope_tol:
            if drift < 0.0:
                kind = 'p_limite_limit'
                phi0 = p.rho(u0) / drift
            else:
                kind = 'jump'
                verdict.reasons.append(f"f - c g > 0 at the degenerate zero {u0:.6g}")
        else:
            kind = 'infinite_quotient'
            verdict.reasons.append(f"z has slope ({left:.6g}, {right:.6g}) where D and its derivative vanish "
                                   f"at {u0:.6g}")

        verdict.per_zero[u0] = kind
        verdict.phi_values_at_zeros[u0] = phi0
        if phi0 is not None and not _quotient_trend_ok(p, glued, u0, phi0):
            cross_check_failed = True
            verdict.reasons.append(f"sampled z/D near {u0:.6g} does not approach {phi0:.6g}")

    extendable = all(kind in EXTENDABLE for kind in verdict.per_zero.values())
    if not extendable:
        verdict.exists = 'no'
    elif cross_check_failed:
        verdict.exists = 'undetermined'

    if at_threshold(c, c_hat, settings) and verdict.exists != 'no':
        corollary = corollary_one_existence_at_c_hat(p, d, settings)
        if corollary == 'applies_exists':
            verdict.exists = 'yes'
            verdict.reasons.append("single sign change of D: waves exist at the threshold")
        elif not d.D0:
            verdict.exists = 'yes'
            verdict.reasons.append("no interior zero of D: the interval threshold is attained")
        elif corollary == 'not_applicable' and d.D00:
            # at c_hat the threshold solutions meeting at a degenerate zero of D have
            # different derivatives there; the sampled slopes stay in one_sided_slopes
            for u0 in d.D00:
                verdict.per_zero[u0] = 'jump'
                verdict.phi_values_at_zeros[u0] = None
                verdict.reasons.append(f"quotient jump at {u0:.6g}: threshold solutions do not join "
                                       f"where D and its derivative vanish")
            verdict.exists = 'no'
        else:
            verdict.exists = 'undetermined_at_c_hat'
            verdict.reasons.append(f"existence at c_hat is not settled (single sign change check: {corollary})")

    logging.info(f"{p.name}: existence at c = {c:.6f}: {verdict.exists}")
    return verdict
