import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import cumulative_trapezoid

from ..config import DEFAULT_SETTINGS, SolverSettings
from ..errors import PhiSingular
from ..model.decomposition import Decomposition
from ..model.problem import Problem
from .existence import ExistenceVerdict
from .gluing import GluedZ

# increments of t shrinking faster than this ratio per graded cell mean the tail integral converges
_TAIL_RATIO = 0.99
# a tail counts as sharp when phi keeps at least this fraction of its size over two decades of u
_DETACHED = 0.5


@dataclass(frozen=True)
class TailBehaviour:
    finite_time: bool
    sharp: bool
    t_end: Optional[float]
    phi_end: float


@dataclass(frozen=True)
class WaveProfile:
    """Wave profile u(t) with z(u(t)) and phi = u'(t), ordered by increasing t"""
    c: float
    t: np.ndarray
    u: np.ndarray
    z: np.ndarray
    phi: np.ndarray
    u_ref: float
    a_tail: TailBehaviour  # behaviour as u -> 1
    b_tail: TailBehaviour  # behaviour as u -> 0

    @property
    def a_finite(self) -> bool:
        return self.a_tail.sharp

    @property
    def b_finite(self) -> bool:
        return self.b_tail.sharp

    def get_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame({'t': self.t, 'u': self.u, 'z': self.z, 'phi': self.phi})


def _graded_points(alpha: float, beta: float, delta: float, n: int) -> np.ndarray:
    half = 0.5 * (beta - alpha)
    x = np.geomspace(min(delta, 0.5 * half), half, n)
    return np.unique(np.concatenate([alpha + x, beta - x[::-1]]))


def _tail(t: np.ndarray, u: np.ndarray, phi: np.ndarray, cap: float) -> TailBehaviour:
    """Tail at the start of the arrays (the end nearest the equilibrium)"""
    increments = np.abs(np.diff(t[:4]))
    ratio = increments[0] / increments[1] if increments[1] > 0.0 else 0.0
    finite_time = ratio < _TAIL_RATIO and abs(t[0]) <= cap
    t_end = None
    if finite_time:
        remaining = increments[0] * ratio / (1.0 - ratio)
        t_end = float(t[0] + np.sign(t[0] - t[1]) * remaining)

    # phi two decades of distance further from the equilibrium than the last sample
    distance = np.abs(u - np.round(u[0]))
    far = int(np.searchsorted(distance, 100.0 * distance[0])) if distance[0] < distance[-1] else 0
    far = min(far, len(phi) - 1)
    detached = abs(phi[0]) >= _DETACHED * abs(phi[far])
    return TailBehaviour(finite_time=bool(finite_time), sharp=bool(finite_time and detached),
                         t_end=t_end, phi_end=float(phi[0]))


def reconstruct_profile(p: Problem, d: Decomposition, glued: GluedZ, verdict: ExistenceVerdict,
                        settings: SolverSettings = DEFAULT_SETTINGS) -> WaveProfile:
    """Integrate t(u) = int_{u_ref}^{u} ds / phi(s) on graded grids and invert to u(t)"""
    if verdict.exists != 'yes':
        raise ValueError(f"No wave to reconstruct at c = {glued.c} (existence: {verdict.exists})")

    us, zs, phis = [], [], []
    for piece in glued.pieces:
        u = _graded_points(piece.alpha, piece.beta, piece.delta0, settings.profile_points)
        z = np.asarray(piece.z_at(u), dtype=float)
        phi = z / p.D(u)

        guard = 100.0 * piece.delta0
        interior = (u > guard) & (u < 1.0 - guard)
        if np.any(np.abs(phi[interior]) < 1e-13):
            bad = float(u[interior][np.argmin(np.abs(phi[interior]))])
            raise PhiSingular(f"phi vanishes at u = {bad:.9f} on interval {piece.k}")
        us.append(u)
        zs.append(z)
        phis.append(phi)

    for u0, value in verdict.phi_values_at_zeros.items():
        us.append(np.array([u0]))
        zs.append(np.array([0.0]))
        phis.append(np.array([value]))

    u = np.concatenate(us)
    order = np.argsort(u)
    u, z, phi = u[order], np.concatenate(zs)[order], np.concatenate(phis)[order]
    if np.any(phi >= 0.0):
        logging.warning(f"{p.name}: phi is not negative at {int(np.sum(phi >= 0.0))} profile point(s)")

    widest = max(d.intervals, key=lambda iv: iv.length)
    u_ref = widest.midpoint
    t = cumulative_trapezoid(1.0 / phi, u, initial=0.0)
    t -= np.interp(u_ref, u, t)

    # ascending u: the start of the arrays is the tail at 0, the end is the tail at 1
    cap = settings.t_span_cap
    b_tail = _tail(t, u, phi, cap)
    a_tail = _tail(t[::-1], u[::-1], phi[::-1], cap)

    if b_tail.finite_time and b_tail.t_end is not None:
        t, u, z, phi = (np.insert(t, 0, b_tail.t_end), np.insert(u, 0, 0.0),
                        np.insert(z, 0, 0.0), np.insert(phi, 0, b_tail.phi_end))
    if a_tail.finite_time and a_tail.t_end is not None:
        t, u, z, phi = (np.append(t, a_tail.t_end), np.append(u, 1.0),
                        np.append(z, 0.0), np.append(phi, a_tail.phi_end))

    keep = np.abs(t) <= cap
    t, u, z, phi = t[keep][::-1], u[keep][::-1], z[keep][::-1], phi[keep][::-1]
    logging.info(f"{p.name}: profile at c = {glued.c:.6f} spans t in [{t[0]:.3f}, {t[-1]:.3f}] "
                 f"({len(t)} points)")
    return WaveProfile(c=glued.c, t=t, u=u, z=z, phi=phi, u_ref=u_ref, a_tail=a_tail, b_tail=b_tail)


def profile_residuals(p: Problem, profile: WaveProfile, glued: GluedZ, step: float = 1e-4) -> np.ndarray:
    """(D u')' + (c g - f) u' + rho along the profile

    With D u' = z(u) and u' = phi(u), the flux derivative is z'(u) phi(u); z' is a
    central difference of the dense solution. Points within 2 steps of an endpoint
    of a sign interval are skipped.
    """
    c = profile.c
    residuals = []
    for u, phi in zip(profile.u, profile.phi):
        piece = next((pc for pc in glued.pieces if pc.alpha + 2 * step < u < pc.beta - 2 * step), None)
        if piece is None:
            continue
        dz = (piece.z_at(u + step) - piece.z_at(u - step)) / (2.0 * step)
        residuals.append(dz * phi + (c * p.g(u) - p.f(u)) * phi + p.rho(u))
    return np.asarray(residuals)


def boundary_flux(p: Problem, profile: WaveProfile) -> Tuple[float, float]:
    """|D(u) u'| at the first and last profile samples"""
    first = abs(p.D(profile.u[0]) * profile.phi[0])
    last = abs(p.D(profile.u[-1]) * profile.phi[-1])
    return float(first), float(last)
