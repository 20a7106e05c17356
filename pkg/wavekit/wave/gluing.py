import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..bounds.constants import SpeedBracket, speed_bracket
from ..config import DEFAULT_SETTINGS, SolverSettings
from ..logging.event_logger import ShootingEventLogger
from ..model.decomposition import Decomposition
from ..model.problem import Problem
from ..shooting.integrator import IntervalSolution, solve_interval
from ..shooting.threshold import ThresholdResult, threshold_for_interval

# one-sided slopes of z at interior zeros are sampled this many delta0 away from the zero
_SLOPE_OFFSET = 100.0


@dataclass(frozen=True)
class GluedZ:
    c: float
    pieces: Tuple[IntervalSolution, ...]
    one_sided_slopes: Dict[float, Tuple[float, float]] = field(default_factory=dict)
    phi_u: np.ndarray = field(default_factory=lambda: np.empty(0))
    phi: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def feasible(self) -> bool:
        return all(piece.feasible for piece in self.pieces)

    @property
    def infeasible(self) -> List[int]:
        return [piece.k for piece in self.pieces if not piece.feasible]

    def piece_for(self, u: float) -> IntervalSolution:
        for piece in self.pieces:
            if piece.alpha <= u <= piece.beta:
                return piece
        raise ValueError(f"u = {u} is not covered by any piece")

    def z_at(self, u: float) -> float:
        """z at u; zero at interval endpoints"""
        piece = self.piece_for(u)
        if u <= piece.alpha or u >= piece.beta:
            return 0.0
        return float(piece.z_at(u))


def one_sided_slope(piece: IntervalSolution, u0: float, side: str) -> float:
    """Derivative of z at the endpoint u0 of a piece, from the dense solution

    Secant slopes at distances s and s/2 are combined as 2 m(s/2) - m(s).
    """
    s = _SLOPE_OFFSET * piece.delta0
    sign = -1.0 if side == 'left' else 1.0
    secant = lambda d: piece.z_at(u0 + sign * d) / (sign * d)
    return 2.0 * secant(0.5 * s) - secant(s)


def glue_solution(p: Problem, d: Decomposition, c: float, settings: SolverSettings = DEFAULT_SETTINGS,
                  events: Optional[ShootingEventLogger] = None, case_id: Optional[str] = None) -> GluedZ:
    """Solve every sign interval at speed c and join the pieces into z on (0, 1)"""
    pieces = tuple(solve_interval(p, iv, c, settings, events, case_id) for iv in d.intervals)

    slopes = {}
    if all(piece.feasible for piece in pieces):
        for u0 in d.D0:
            left = next(piece for piece in pieces if abs(piece.beta - u0) <= 1e-12)
            right = next(piece for piece in pieces if abs(piece.alpha - u0) <= 1e-12)
            slopes[u0] = (one_sided_slope(left, u0, 'left'), one_sided_slope(right, u0, 'right'))

    phi_u, phi = [], []
    for piece in pieces:
        if not piece.feasible:
            continue
        inner = piece.u[1:-1]
        if inner.size == 0:
            continue
        D_values = p.D(inner)
        mask = D_values != 0.0
        phi_u.append(inner[mask])
        phi.append(piece.z[1:-1][mask] / D_values[mask])

    glued = GluedZ(
        c=c,
        pieces=pieces,
        one_sided_slopes=slopes,
        phi_u=np.concatenate(phi_u) if phi_u else np.empty(0),
        phi=np.concatenate(phi) if phi else np.empty(0),
    )
    if not glued.feasible:
        logging.info(f"{p.name}: c = {c:.6f} infeasible on interval(s) {glued.infeasible}")
    return glued


def compute_c_hat(p: Problem, d: Decomposition, settings: SolverSettings = DEFAULT_SETTINGS,
                  events: Optional[ShootingEventLogger] = None
                  ) -> Tuple[float, SpeedBracket, List[ThresholdResult]]:
    """Threshold speed: the largest interval threshold, raised to the K0- term when present"""
    bracket = speed_bracket(p, d, settings)
    thresholds = [threshold_for_interval(p, iv, bracket.for_interval(iv.k), settings, events)
                  for iv in d.intervals]
    c_star = max(result.c_star for result in thresholds)
    c_hat = c_star if bracket.k0_term is None else max(c_star, bracket.k0_term)

    if not bracket.contains(c_hat):
        logging.warning(f"{p.name}: c_hat = {c_hat:.6f} falls outside the analytic bracket "
                        f"[{bracket.lower:.6f}, {bracket.upper:.6f}]")
    logging.info(f"{p.name}: c* = {c_star:.9f}, c_hat = {c_hat:.9f}")
    return c_hat, bracket, thresholds


def at_threshold(c: float, c_hat: Optional[float], settings: SolverSettings = DEFAULT_SETTINGS) -> bool:
    return c_hat is not None and math.isfinite(c_hat) and abs(c - c_hat) <= settings.threshold_band
