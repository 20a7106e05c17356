import logging
from dataclasses import dataclass
from typing import Optional, Tuple

from ..config import DEFAULT_SETTINGS, SolverSettings
from ..errors import BracketFailure
from ..logging.event_logger import ShootingEventLogger
from ..model.decomposition import SignInterval
from ..model.problem import Problem
from .reflection import IntervalSlice, positive_slice
from .integrator import solve_interval


@dataclass(frozen=True)
class ThresholdResult:
    k: int
    c_star: float
    bracket_used: Tuple[float, float]
    iterations: int
    tol: float
    expansions: int = 0
    note: Optional[str] = None


def is_feasible(p: Problem, iv: SignInterval, c: float, settings: SolverSettings = DEFAULT_SETTINGS,
                events: Optional[ShootingEventLogger] = None, case_id: Optional[str] = None,
                sl: Optional[IntervalSlice] = None) -> bool:
    return solve_interval(p, iv, c, settings, events, case_id, sl=sl).feasible


def threshold_for_interval(p: Problem, iv: SignInterval, bracket: Tuple[float, float],
                           settings: SolverSettings = DEFAULT_SETTINGS,
                           events: Optional[ShootingEventLogger] = None) -> ThresholdResult:
    """Smallest feasible speed on one interval, by bisection inside the analytic bracket"""
    sl = positive_slice(p, iv)
    case_id = events.new_case(f"threshold_k{iv.k}") if events is not None else None
    feasible = lambda c: is_feasible(p, iv, c, settings, events, case_id, sl)

    lo, hi = float(bracket[0]), float(max(bracket))
    expansions = 0
    while not feasible(hi):
        if expansions == settings.max_expansions:
            raise BracketFailure(
                f"interval {iv.k}: no feasible speed up to {hi:.6g} after {expansions} expansions")
        width = max(hi - lo, 0.1) * settings.expansion_factor
        lo, hi = hi, hi + width
        expansions += 1
        logging.info(f"interval {iv.k}: upper estimate infeasible, expanding to [{lo:.6f}, {hi:.6f}]")

    used = (lo, hi)
    if expansions == 0 and feasible(lo):
        logging.info(f"interval {iv.k}: lower estimate {lo:.9f} already feasible")
        return ThresholdResult(k=iv.k, c_star=lo, bracket_used=used, iterations=0, tol=settings.tol_c,
                               note='BracketDegenerate: lower estimate is feasible')

    iterations = 0
    while hi - lo > settings.tol_c:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
        iterations += 1

    logging.info(f"interval {iv.k}: c* = {hi:.9f} after {iterations} bisection steps")
    return ThresholdResult(k=iv.k, c_star=hi, bracket_used=used, iterations=iterations, tol=settings.tol_c,
                           expansions=expansions)
