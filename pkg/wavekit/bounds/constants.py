import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid

from ..config import DEFAULT_SETTINGS, SolverSettings
from ..errors import GridNonConvergence
from ..expressions.differentiation import secant_limit_at
from ..model.decomposition import Decomposition, SignInterval
from ..model.problem import Problem


@dataclass(frozen=True)
class IntervalConstants:
    """Mean-value constants of one sign interval, taken from its anchor endpoint"""
    k: int
    G: float
    F: float
    H: float
    hdot_endpoint: float
    f_endpoint: float
    g_endpoint: float
    anchor: float
    hdot_converged: bool = True

    @property
    def lower(self) -> float:
        return (2.0 * math.sqrt(max(self.hdot_endpoint, 0.0)) + self.f_endpoint) / self.g_endpoint

    @property
    def upper(self) -> float:
        return (2.0 * math.sqrt(max(self.H, 0.0)) + self.F) / self.G


@dataclass(frozen=True)
class SpeedBracket:
    lower: float
    upper: float
    per_interval: Tuple[Tuple[int, float, float], ...]
    k0_term: Optional[float] = None
    constants: Tuple[IntervalConstants, ...] = ()

    def for_interval(self, k: int) -> Tuple[float, float]:
        for index, lower, upper in self.per_interval:
            if index == k:
                return lower, upper
        raise KeyError(f"No interval {k} in the bracket")

    def contains(self, c: float, slack: float = 1e-3) -> bool:
        return self.lower - slack <= c <= self.upper + slack


def cosine_grid(length: float, n: int) -> np.ndarray:
    """Distances from 0 to `length` clustered at both ends"""
    theta = np.linspace(0.0, math.pi, n + 1)
    x = 0.5 * length * (1.0 - np.cos(theta))
    x[0], x[-1] = 0.0, length
    return x


def _running_means(values: np.ndarray, x: np.ndarray, at_anchor: float) -> np.ndarray:
    integral = cumulative_trapezoid(values, x, initial=0.0)
    means = np.empty_like(integral)
    means[0] = at_anchor
    means[1:] = integral[1:] / x[1:]
    return means


def _mean_extrema(g, f, h, anchor: float, direction: int, length: float, n: int,
                  hdot: float) -> Tuple[float, float, float]:
    x = cosine_grid(length, n)
    u = anchor + direction * x
    g_values = g(u)
    f_values = f(u)
    quotient = np.empty_like(x)
    quotient[0] = hdot
    quotient[1:] = h(u[1:]) / (u[1:] - anchor)

    G = float(np.min(_running_means(g_values, x, float(g_values[0]))))
    F = float(np.max(_running_means(f_values, x, float(f_values[0]))))
    H = float(np.max(_running_means(quotient, x, hdot)))
    return G, F, H


def _close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * max(abs(a), abs(b)) + tol * 1e-6


def _constants(g, f, h, k: int, anchor: float, direction: int, length: float,
               settings: SolverSettings) -> IntervalConstants:
    side = 'right' if direction > 0 else 'left'
    limit = secant_limit_at(h, anchor, side, span=length, step=settings.derivative_step,
                            halvings=settings.derivative_halvings)
    if not limit.converged:
        logging.warning(f"interval {k}: secant limit of h at {anchor:.6g} did not settle; using {limit.value:.6g}")

    coarse = _mean_extrema(g, f, h, anchor, direction, length, settings.grid, limit.value)
    fine = _mean_extrema(g, f, h, anchor, direction, length, 2 * settings.grid, limit.value)
    for name, a, b in zip('GFH', coarse, fine):
        if not _close(a, b, settings.grid_rel_tol):
            raise GridNonConvergence(
                f"interval {k}: {name} moved from {a:.10g} to {b:.10g} when doubling the grid to {2 * settings.grid}")

    G, F, H = fine
    return IntervalConstants(
        k=k, G=G, F=F, H=H,
        hdot_endpoint=limit.value,
        f_endpoint=float(f(anchor)),
        g_endpoint=float(g(anchor)),
        anchor=anchor,
        hdot_converged=limit.converged,
    )


def interval_constants(p: Problem, iv: SignInterval,
                       settings: SolverSettings = DEFAULT_SETTINGS) -> IntervalConstants:
    """G, F, H of one interval; K+ intervals anchor at alpha, K- intervals at beta"""
    return _constants(p.g, p.f, p.h, iv.k, iv.anchor, iv.direction, iv.length, settings)


def slice_constants(sl, settings: SolverSettings = DEFAULT_SETTINGS) -> IntervalConstants:
    """Constants of a positive interval slice (its own f, g, h restricted to (alpha, beta))"""
    if sl.h_sign != 'positive':
        raise ValueError("slice_constants expects a slice with positive h; reflect it first")
    return _constants(sl.g, sl.f, sl.h, sl.k, sl.alpha, 1, sl.beta - sl.alpha, settings)


def speed_bracket(p: Problem, d: Decomposition, settings: SolverSettings = DEFAULT_SETTINGS) -> SpeedBracket:
    """Analytic lower and upper estimates of the threshold speed"""
    constants = [interval_constants(p, iv, settings) for iv in d.intervals]
    per_interval = tuple((c.k, c.lower, c.upper) for c in constants)

    k0_term = None
    if d.K0_minus:
        k0_term = max(p.f(d.interval(k).alpha) / p.g(d.interval(k).alpha) for k in d.K0_minus)

    lowers: List[float] = [c.lower for c in constants]
    uppers: List[float] = [c.upper for c in constants]
    if k0_term is not None:
        lowers.append(k0_term)
        uppers.append(k0_term)
    lower = max(lowers, default=-math.inf)
    upper = max(uppers, default=-math.inf)

    if lower > upper + 1e-9:
        logging.warning(f"{p.name}: bracket lower {lower:.9g} exceeds upper {upper:.9g}")
    logging.info(f"{p.name}: speed bracket [{lower:.6f}, {upper:.6f}]")
    return SpeedBracket(lower=lower, upper=upper, per_interval=per_interval, k0_term=k0_term,
                        constants=tuple(constants))
