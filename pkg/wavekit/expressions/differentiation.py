"""Finite-difference derivatives and endpoint limits with Richardson extrapolation"""
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from ..config import DEFAULT_SETTINGS

SIDES = ('left', 'right', 'central')

# an extrapolation sequence counts as divergent when its power-law projection
# to this step size exceeds the cap
_VANISHING_STEP = 1e-300


@dataclass(frozen=True)
class LimitEstimate:
    value: float
    converged: bool


def _richardson(values: Sequence[float], factors: Sequence[float]) -> List[float]:
    """Eliminate successive error orders; values are ordered from coarse to fine step"""
    table = list(values)
    for factor in factors:
        table = [(factor * fine - coarse) / (factor - 1.0) for coarse, fine in zip(table, table[1:])]
    return table


def _diverges(values: Sequence[float], steps: Sequence[float], cap: float) -> bool:
    """Detect |quotient| ~ C h^-p growth with a stable exponent p > 0"""
    magnitudes = np.abs(np.asarray(values, dtype=float))
    if np.any(magnitudes == 0.0) or not np.all(np.diff(magnitudes) > 0.0):
        return False
    exponents = np.log(magnitudes[1:] / magnitudes[:-1]) / np.log(np.asarray(steps[:-1]) / np.asarray(steps[1:]))
    if np.any(exponents <= 0.05) or exponents.max() > 2.0 * exponents.min():
        return False
    p = float(exponents[-1])
    projected = math.log10(magnitudes[-1]) + p * math.log10(steps[-1] / _VANISHING_STEP)
    return projected > math.log10(cap)


def _base_step(f, span: Optional[float], step: float) -> float:
    lo, hi = f.domain
    return step * (span if span is not None else hi - lo)


def derivative_at(f, u0: float, side: str = 'central', span: Optional[float] = None,
                  step: float = DEFAULT_SETTINGS.derivative_step,
                  halvings: int = DEFAULT_SETTINGS.derivative_halvings,
                  cap: float = DEFAULT_SETTINGS.divergence_cap) -> float:
    """Richardson-extrapolated derivative of f at u0

    Returns a signed infinity when the difference quotients blow up like a
    negative power of the step (e.g. sqrt behaviour at an endpoint).
    """
    if side not in SIDES:
        raise ValueError(f"Unknown side {side!r}, expected one of {SIDES}")
    lo, hi = f.domain
    if not lo <= u0 <= hi:
        raise ValueError(f"u0 = {u0} outside the domain [{lo}, {hi}]")

    h0 = _base_step(f, span, step)
    if side == 'central':
        room = min(u0 - lo, hi - u0)
        if room <= 0.0:
            raise ValueError(f"Central difference needs both sides of u0 = {u0}; use a one-sided derivative")
        h0 = min(h0, 0.5 * room)
    else:
        room = hi - u0 if side == 'right' else u0 - lo
        if room <= 0.0:
            raise ValueError(f"No room on the {side} of u0 = {u0}")
        h0 = min(h0, room)

    steps = [h0 / 2 ** i for i in range(halvings + 1)]
    if side == 'central':
        quotients = [(f(u0 + h) - f(u0 - h)) / (2.0 * h) for h in steps]
        factors = (4.0, 16.0)
    else:
        direction = 1.0 if side == 'right' else -1.0
        f0 = f(u0)
        quotients = [(f(u0 + direction * h) - f0) / (direction * h) for h in steps]
        factors = (2.0, 4.0)

    if not all(math.isfinite(q) for q in quotients):
        bad = next(q for q in quotients if not math.isfinite(q))
        return math.copysign(math.inf, bad) if not math.isnan(bad) else math.nan

    if _diverges(quotients, steps, cap):
        return math.copysign(math.inf, quotients[-1])

    return _richardson(quotients[-3:], factors)[-1]


def secant_limit_at(h, u0: float, side: str, span: Optional[float] = None,
                    step: float = DEFAULT_SETTINGS.derivative_step,
                    halvings: int = DEFAULT_SETTINGS.derivative_halvings,
                    rel_tol: float = 1e-6) -> LimitEstimate:
    """Limit of h(u) / (u - u0) as u -> u0 from one side, where h(u0) = 0

    The sign of the limit is forced by the sign of h on the sampled side, so a
    slightly wrong-signed extrapolant is clamped to zero.
    """
    if side not in ('left', 'right'):
        raise ValueError(f"Secant limits are one-sided, got side {side!r}")
    h_u0 = h(u0)
    if abs(h_u0) > 1e-8:
        raise ValueError(f"h({u0}) = {h_u0:.3e} is not a zero of h")

    lo, hi = h.domain
    direction = 1.0 if side == 'right' else -1.0
    room = hi - u0 if side == 'right' else u0 - lo
    if room <= 0.0:
        raise ValueError(f"No room on the {side} of u0 = {u0}")
    d0 = min(_base_step(h, span, step), 0.5 * room)

    steps = [d0 / 2 ** i for i in range(halvings + 1)]
    quotients = [(h(u0 + direction * d) - h_u0) / (direction * d) for d in steps]

    finest = _richardson(quotients[-3:], (2.0, 4.0))[-1]
    previous = _richardson(quotients[-4:-1], (2.0, 4.0))[-1]
    converged = abs(finest - previous) <= rel_tol * abs(finest) + 1e-10

    edge_value = h(u0 + direction * steps[-1])
    expected = math.copysign(1.0, edge_value) * direction if edge_value != 0.0 else 0.0
    value = finest
    if expected > 0.0:
        value = max(value, 0.0)
    elif expected < 0.0:
        value = min(value, 0.0)
    return LimitEstimate(value=float(value), converged=bool(converged))
