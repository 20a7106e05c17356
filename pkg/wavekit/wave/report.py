import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional

from ..bounds.constants import SpeedBracket
from ..config import DEFAULT_SETTINGS, SolverSettings
from ..errors import HypothesisError
from ..logging.event_logger import ShootingEventLogger
from ..model.decomposition import Decomposition, decompose
from ..model.problem import Problem, necessary_speed_condition
from ..model.validation import validate_hypotheses
from ..shooting.threshold import ThresholdResult
from .classification import Classification, classify
from .existence import ExistenceVerdict, corollary_one_existence_at_c_hat, extension_check
from .gluing import GluedZ, at_threshold, compute_c_hat, glue_solution
from .profile import WaveProfile, reconstruct_profile


def _finite_or_none(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


def _signed(value: Optional[float], negated_g: bool) -> Optional[float]:
    """Speed of the solved problem back in the caller's sign; solving with -g maps c to -c"""
    if value is None:
        return None
    return -value if negated_g else value


def _bracket_pair(lower: float, upper: float, negated_g: bool) -> List[Optional[float]]:
    if negated_g:
        lower, upper = -upper, -lower
    return [_finite_or_none(lower), _finite_or_none(upper)]


@dataclass
class ThresholdReport:
    problem: str
    c_hat: float
    bracket: SpeedBracket
    thresholds: List[ThresholdResult]
    corollary: str
    negated_g: bool = False

    def to_dict(self) -> Dict:
        negated = self.negated_g
        return {
            'problem': self.problem,
            'c_hat': _signed(self.c_hat, negated),
            'speed_direction': 'below' if negated else 'above',
            'bracket': _bracket_pair(self.bracket.lower, self.bracket.upper, negated),
            'k0_term': self.bracket.k0_term,
            'per_interval': [
                {
                    'k': k,
                    'lower': _bracket_pair(lower, upper, negated)[0],
                    'upper': _bracket_pair(lower, upper, negated)[1],
                    'c_star': _signed(next((r.c_star for r in self.thresholds if r.k == k), None), negated),
                    'iterations': next((r.iterations for r in self.thresholds if r.k == k), None),
                    'note': next((r.note for r in self.thresholds if r.k == k), None),
                }
                for k, lower, upper in self.bracket.per_interval
            ],
            'corollary_at_c_hat': self.corollary,
        }


@dataclass
class WaveReport:
    problem: str
    c: float
    c_hat: float
    bracket: SpeedBracket
    verdict: ExistenceVerdict
    classification: Classification
    necessary_condition: bool
    profile: Optional[WaveProfile] = None
    glued: Optional[GluedZ] = field(default=None, repr=False)
    notes: List[str] = field(default_factory=list)
    negated_g: bool = False

    @property
    def a_finite(self) -> Optional[bool]:
        return self.classification.a_finite

    @property
    def b_finite(self) -> Optional[bool]:
        return self.classification.b_finite

    def to_dict(self) -> Dict:
        negated = self.negated_g
        existence = self.verdict.to_dict()
        existence['c'] = _signed(existence['c'], negated)
        report = {
            'problem': self.problem,
            'c': _signed(self.c, negated),
            'c_hat': _signed(self.c_hat, negated),
            'speed_direction': 'below' if negated else 'above',
            'bracket': _bracket_pair(self.bracket.lower, self.bracket.upper, negated),
            'necessary_condition': self.necessary_condition,
            'existence': existence,
            'classification': self.classification.label,
            'a_finite': self.a_finite,
            'b_finite': self.b_finite,
            'classification_notes': list(self.classification.notes),
            'notes': list(self.notes),
        }
        if self.profile is not None:
            report['profile'] = {
                'points': len(self.profile.t),
                'u_ref': self.profile.u_ref,
                'a_tail': asdict(self.profile.a_tail),
                'b_tail': asdict(self.profile.b_tail),
            }
        return report


def _glue_speed(c: float, c_hat: float, settings: SolverSettings) -> float:
    """Speeds inside the threshold band are solved at c_hat, the first speed the bisection found feasible"""
    return max(c, c_hat) if at_threshold(c, c_hat, settings) else c


def prepare(p: Problem, settings: SolverSettings = DEFAULT_SETTINGS) -> Decomposition:
    """Decompose and refuse to go on when the hypotheses fail"""
    d = decompose(p, settings)
    report = validate_hypotheses(p, d, settings)
    if not report.passed:
        names = ', '.join(sorted({check.name for check in report.failures}))
        raise HypothesisError(f"{p.name}: hypotheses fail ({names})")
    return d


def threshold_report(p: Problem, settings: SolverSettings = DEFAULT_SETTINGS,
                     events: Optional[ShootingEventLogger] = None, negated_g: bool = False) -> ThresholdReport:
    d = prepare(p, settings)
    c_hat, bracket, thresholds = compute_c_hat(p, d, settings, events)
    return ThresholdReport(problem=p.name, c_hat=c_hat, bracket=bracket, thresholds=thresholds,
                           corollary=corollary_one_existence_at_c_hat(p, d, settings), negated_g=negated_g)


def wave_report(p: Problem, speed: Optional[float] = None, speed_offset: Optional[float] = None,
                settings: SolverSettings = DEFAULT_SETTINGS,
                events: Optional[ShootingEventLogger] = None, negated_g: bool = False) -> WaveReport:
    """Threshold, existence verdict, classification and profile at one speed

    The speed is `speed` when given, otherwise c_hat + `speed_offset` (default 0).
    With `negated_g`, `p` is the problem with g replaced by -g and `speed` is given
    in the sign of the original problem; the offset then moves below its threshold.
    """
    d = prepare(p, settings)
    c_hat, bracket, thresholds = compute_c_hat(p, d, settings, events)
    if speed is not None:
        c = _signed(speed, negated_g)
    else:
        c = c_hat + (speed_offset or 0.0)

    case_id = events.new_case(f"wave_c{c:.6f}") if events is not None else None
    glued = glue_solution(p, d, _glue_speed(c, c_hat, settings), settings, events, case_id)
    verdict = extension_check(p, d, glued, c_hat, settings)
    classification = classify(p, d, c, verdict, c_hat, thresholds, settings)

    report = WaveReport(problem=p.name, c=c, c_hat=c_hat, bracket=bracket, verdict=verdict,
                        classification=classification, necessary_condition=necessary_speed_condition(p, c),
                        glued=glued, negated_g=negated_g)
    if verdict.exists == 'yes':
        report.profile = reconstruct_profile(p, d, glued, verdict, settings)
        tails = (report.profile.a_finite, report.profile.b_finite)
        if classification.label != 'undetermined' and tails != (classification.a_finite, classification.b_finite):
            message = (f"tail quadrature gives (a_finite, b_finite) = {tails}, "
                       f"classification gives {(classification.a_finite, classification.b_finite)}")
            logging.warning(f"{p.name}: {message}")
            report.notes.append(message)
    return report


def sweep_row(p: Problem, d: Decomposition, c: float, c_hat: float, settings: SolverSettings = DEFAULT_SETTINGS,
              events: Optional[ShootingEventLogger] = None, negated_g: bool = False) -> Dict:
    """Feasibility per interval and the existence verdict at one speed of a sweep

    With `negated_g`, `c` is in the sign of the original problem and `c_hat` is the
    threshold of `p`, the problem with g replaced by -g.
    """
    solved = _signed(c, negated_g)
    case_id = events.new_case(f"sweep_c{solved:.6f}") if events is not None else None
    glued = glue_solution(p, d, _glue_speed(solved, c_hat, settings), settings, events, case_id)
    verdict = extension_check(p, d, glued, c_hat, settings)
    row = {'c': c}
    for piece in glued.pieces:
        row[f"feasible_k{piece.k}"] = piece.feasible
    row['exists'] = verdict.exists
    return row
