import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

from ..config import DEFAULT_SETTINGS, SolverSettings
from ..model.decomposition import Decomposition
from ..model.problem import Problem
from ..shooting.slopes import endpoint_slope
from ..shooting.threshold import ThresholdResult
from .existence import ExistenceVerdict
from .gluing import at_threshold

CLASSES = ('classical', 'sharp_type_1', 'sharp_type_2', 'sharp_type_3', 'undetermined')

_LABELS: Dict[Tuple[bool, bool], str] = {
    (False, False): 'classical',
    (False, True): 'sharp_type_1',
    (True, False): 'sharp_type_2',
    (True, True): 'sharp_type_3',
}


@dataclass(frozen=True)
class Classification:
    label: str
    a_finite: Optional[bool]  # the wave reaches 1 at a finite time a
    b_finite: Optional[bool]  # the wave reaches 0 at a finite time b
    notes: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.label not in CLASSES:
            raise ValueError(f"Unknown wave class: {self.label}")


def label_for(a_finite: bool, b_finite: bool) -> str:
    return _LABELS[(bool(a_finite), bool(b_finite))]


def _finite_above_threshold(D_end: float, D_slope: float, drift: float, sharp_side: bool,
                            settings: SolverSettings) -> Optional[bool]:
    """Endpoint rule for speeds above the threshold; None when all three quantities vanish"""
    degenerate_D = abs(D_end) <= settings.zero_tol
    if not sharp_side:
        return False
    if degenerate_D and abs(D_slope) <= settings.derivative_zero_tol and abs(drift) <= settings.derivative_zero_tol:
        return None
    return degenerate_D and D_slope > -math.inf and drift > 0.0


def _finite_at_threshold(D_end: float, D_slope: float, drift: float, z_slope: float,
                         settings: SolverSettings) -> Optional[bool]:
    """Endpoint rule at the threshold, from the limit of z/D at the endpoint"""
    if abs(D_end) > settings.zero_tol or math.isinf(D_slope):
        return False
    if not math.isfinite(z_slope):
        return None
    if abs(z_slope) > settings.slope_tol:
        return True
    if abs(D_slope) > settings.derivative_zero_tol or drift < 0.0:
        return False
    return None


def classify(p: Problem, d: Decomposition, c: float, verdict: ExistenceVerdict, c_hat: Optional[float] = None,
             thresholds: Optional[Sequence[ThresholdResult]] = None,
             settings: SolverSettings = DEFAULT_SETTINGS) -> Classification:
    """Classical or sharp (type 1, 2 or 3) from the behaviour of z/D at u = 0 and u = 1"""
    if verdict.exists != 'yes':
        return Classification('undetermined', None, None, (f"no wave established at c = {c:.6g}",))

    first, last = d.intervals[0], d.intervals[-1]
    D_0, D_1 = p.D(0.0), p.D(1.0)
    drift_0 = p.f(0.0) - c * p.g(0.0)
    drift_1 = p.f(1.0) - c * p.g(1.0)
    notes = []

    if at_threshold(c, c_hat, settings):
        band = settings.threshold_band
        critical = {result.k for result in (thresholds or []) if abs(result.c_star - c) <= band}
        z_0 = endpoint_slope(p, first, 0.0, c, at_threshold=first.k in critical)
        z_1 = endpoint_slope(p, last, 1.0, c, at_threshold=last.k in critical)
        b = _finite_at_threshold(D_0, d.D_slope_left_end, drift_0, z_0, settings)
        a = _finite_at_threshold(D_1, d.D_slope_right_end, drift_1, z_1, settings)
        notes.append(f"classified at the threshold from z'(0) = {z_0:.6g}, z'(1) = {z_1:.6g}")
    else:
        b = _finite_above_threshold(D_0, d.D_slope_left_end, drift_0, not first.positive, settings)
        a = _finite_above_threshold(D_1, d.D_slope_right_end, drift_1, last.positive, settings)

    if a is None or b is None:
        notes.append("f - c g, D and its derivative vanish together at an equilibrium")
        logging.warning(f"{p.name}: classification at c = {c:.6f} undetermined")
        return Classification('undetermined', a, b, tuple(notes))

    label = label_for(a, b)
    logging.info(f"{p.name}: wave at c = {c:.6f} is {label}")
    return Classification(label, a, b, tuple(notes))
