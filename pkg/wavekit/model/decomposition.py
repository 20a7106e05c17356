import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from ..config import DEFAULT_SETTINGS, SolverSettings
from ..errors import PlateauError, TangentZeroWarning
from ..expressions.differentiation import derivative_at
from .problem import Problem

# roots closer than this to each other or to 0 / 1 are merged
_ROOT_MERGE = 1e-9


@dataclass(frozen=True)
class SignInterval:
    k: int
    alpha: float
    beta: float
    h_sign: str  # 'positive' or 'negative'

    def __post_init__(self):
        if not 0.0 <= self.alpha < self.beta <= 1.0:
            raise ValueError(f"Invalid sign interval ({self.alpha}, {self.beta})")
        if self.h_sign not in ('positive', 'negative'):
            raise ValueError(f"h_sign must be 'positive' or 'negative', got {self.h_sign!r}")

    @property
    def positive(self) -> bool:
        return self.h_sign == 'positive'

    @property
    def length(self) -> float:
        return self.beta - self.alpha

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.alpha + self.beta)

    @property
    def anchor(self) -> float:
        """Endpoint the mean-value constants are taken from"""
        return self.alpha if self.positive else self.beta

    @property
    def direction(self) -> int:
        return 1 if self.positive else -1

    def contains(self, u: float) -> bool:
        return self.alpha < u < self.beta


@dataclass(frozen=True)
class Decomposition:
    intervals: Tuple[SignInterval, ...]
    D0: Tuple[float, ...]
    D00: Tuple[float, ...]
    K0_minus: Tuple[int, ...]
    D_slopes: Dict[float, float] = field(default_factory=dict)
    D_slope_left_end: float = math.nan   # one-sided derivative of D at 0
    D_slope_right_end: float = math.nan  # one-sided derivative of D at 1
    notes: Tuple[str, ...] = ()

    @property
    def K_plus(self) -> List[int]:
        return [iv.k for iv in self.intervals if iv.positive]

    @property
    def K_minus(self) -> List[int]:
        return [iv.k for iv in self.intervals if not iv.positive]

    def interval(self, k: int) -> SignInterval:
        return self.intervals[k - 1]

    def interval_containing(self, u: float) -> Optional[SignInterval]:
        for iv in self.intervals:
            if iv.alpha <= u <= iv.beta:
                return iv
        return None


def _refine_dip(D, a: float, b: float, c: float) -> float:
    result = minimize_scalar(lambda u: abs(D(u)), bracket=(a, b, c), method='golden', tol=1e-10)
    x = float(result.x)
    return min(max(x, a), c)


def _find_roots(p: Problem, settings: SolverSettings) -> Tuple[List[float], List[str]]:
    n = settings.scan_cells
    grid = np.linspace(0.0, 1.0, n + 1)
    values = p.D(grid)
    zero = np.abs(values) <= settings.zero_tol

    run = 0
    for i, is_zero in enumerate(zero):
        run = run + 1 if is_zero else 0
        if run >= 3:
            raise PlateauError(
                f"D vanishes on consecutive scan cells around u = {grid[i - 1]:.6f}; its zero set is not finite")

    roots = [float(grid[i]) for i in range(1, n) if zero[i]]
    notes = []

    for i in range(n):
        if zero[i] or zero[i + 1]:
            continue
        if values[i] * values[i + 1] < 0.0:
            roots.append(brentq(p.D, grid[i], grid[i + 1], xtol=1e-12))

    magnitudes = np.abs(values)
    for i in range(1, n):
        if zero[i - 1] or zero[i] or zero[i + 1]:
            continue
        if not (magnitudes[i] < magnitudes[i - 1] and magnitudes[i] < magnitudes[i + 1]):
            continue
        if np.sign(values[i - 1]) != np.sign(values[i]) or np.sign(values[i + 1]) != np.sign(values[i]):
            continue
        x = _refine_dip(p.D, grid[i - 1], grid[i], grid[i + 1])
        dip = abs(p.D(x))
        if dip <= settings.zero_tol:
            logging.info(f"{p.name}: even-order zero of D at u = {x:.9f}")
            roots.append(x)
        elif dip < settings.dip_tol:
            message = f"|D| dips to {dip:.2e} at u = {x:.9f} without a sign change; interval not split"
            warnings.warn(message, TangentZeroWarning)
            notes.append(message)

    roots.sort()
    merged = []
    for r in roots:
        if r < _ROOT_MERGE or r > 1.0 - _ROOT_MERGE:
            continue
        if merged and r - merged[-1] < _ROOT_MERGE:
            continue
        merged.append(r)
    return merged, notes


def _sign_of_h(p: Problem, a: float, b: float) -> str:
    # midpoint first, then a few fallbacks in case h happens to vanish there
    for t in (0.5, 1.0 / 3.0, 2.0 / 3.0):
        value = p.h(a + t * (b - a))
        if value > 0.0:
            return 'positive'
        if value < 0.0:
            return 'negative'
    raise ValueError(f"h vanishes inside ({a}, {b}); cannot assign a sign")


def decompose(p: Problem, settings: SolverSettings = DEFAULT_SETTINGS) -> Decomposition:
    """Split (0, 1) at the interior zeros of D into intervals of constant sign of h"""
    if settings.scan_cells < 64:
        raise ValueError(f"scan_cells must be at least 64, got {settings.scan_cells}")

    roots, notes = _find_roots(p, settings)
    edges = [0.0] + roots + [1.0]
    intervals = tuple(
        SignInterval(k=i + 1, alpha=a, beta=b, h_sign=_sign_of_h(p, a, b))
        for i, (a, b) in enumerate(zip(edges[:-1], edges[1:]))
    )

    slopes = {}
    for i, r in enumerate(roots):
        gap = min(r - edges[i], edges[i + 2] - r)
        slopes[r] = derivative_at(p.D, r, 'central', span=gap,
                                  step=settings.derivative_step, halvings=settings.derivative_halvings,
                                  cap=settings.divergence_cap)
    D00 = tuple(r for r in roots if abs(slopes[r]) <= settings.derivative_zero_tol)

    K0_minus = tuple(
        iv.k for iv in intervals
        if iv.k >= 2 and not iv.positive and any(abs(iv.alpha - r) <= _ROOT_MERGE for r in D00)
    )

    left_end = derivative_at(p.D, 0.0, 'right', span=edges[1], step=settings.derivative_step,
                             halvings=settings.derivative_halvings, cap=settings.divergence_cap)
    right_end = derivative_at(p.D, 1.0, 'left', span=1.0 - edges[-2], step=settings.derivative_step,
                              halvings=settings.derivative_halvings, cap=settings.divergence_cap)

    signs = ''.join('+' if iv.positive else '-' for iv in intervals)
    logging.info(f"{p.name}: {len(intervals)} sign interval(s) [{signs}], D0 = {[round(r, 9) for r in roots]}, "
                 f"D00 = {[round(r, 9) for r in D00]}")

    return Decomposition(
        intervals=intervals,
        D0=tuple(roots),
        D00=D00,
        K0_minus=K0_minus,
        D_slopes=slopes,
        D_slope_left_end=left_end,
        D_slope_right_end=right_end,
        notes=tuple(notes),
    )
