import logging
import math
import threading
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from ..config import DEFAULT_SETTINGS, SolverSettings
from ..errors import NumericalError, StepUnderflow
from ..logging.event_logger import ShootingEventLogger
from ..model.decomposition import SignInterval
from ..model.problem import Problem
from .reflection import IntervalSlice, positive_slice
from .slopes import slopes_from

FEASIBILITY = ('feasible', 'interior_zero_crossing', 'terminal_mismatch', 'ambiguous')

# the crossing threshold -z_floor ramps to zero within this many delta0 of either endpoint,
# so solutions vanishing to second order at an endpoint do not trip it
_RAMP = 100.0

# LSODA wraps non-reentrant Fortran; sweeps call the integrator from worker threads
_STIFF_LOCK = threading.Lock()


@dataclass(frozen=True)
class IntervalSolution:
    k: int
    c: float
    u: np.ndarray
    z: np.ndarray
    endpoint_slope_alpha: float
    endpoint_slope_beta: float
    feasibility: str
    alpha: float
    beta: float
    delta0: float
    reflected: bool = False
    n_steps: int = 0
    retries: int = 0
    message: str = ""
    interpolant: Optional[Callable] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.feasibility not in FEASIBILITY:
            raise ValueError(f"Unknown feasibility: {self.feasibility}")

    @property
    def feasible(self) -> bool:
        return self.feasibility == 'feasible'

    def z_at(self, u):
        """Dense-output value of z; valid on the sampled range and a few delta0 beyond it"""
        if self.interpolant is None:
            return np.interp(u, self.u, self.z)
        value = self.interpolant(np.asarray(u, dtype=float))
        return float(value) if np.ndim(value) == 0 else value


def integrate_z(sl: IntervalSlice, c: float, settings: SolverSettings = DEFAULT_SETTINGS,
                delta0_frac: Optional[float] = None, events: Optional[ShootingEventLogger] = None,
                case_id: Optional[str] = None) -> IntervalSolution:
    """Shoot z' = f - c g - h/z backward from beta to alpha on a slice with h > 0

    The launch uses the first-order series z = r_plus (u - beta) with the secant
    slope of h at the launch point; arrival near alpha is judged by the slope
    z(alpha + delta0) / delta0 against the smaller admissible slope r_minus.
    """
    if sl.h_sign != 'positive':
        raise ValueError(f"integrate_z needs positive h on interval {sl.k}; reflect it first")

    alpha, beta = sl.alpha, sl.beta
    delta0 = (delta0_frac or settings.delta0_frac) * sl.length
    ramp = _RAMP * delta0
    z_floor = settings.z_floor
    f, g, h = sl.f, sl.g, sl.h

    def drift(u: float) -> float:
        return f(u) - c * g(u)

    def rhs(u, y):
        return [drift(u) - h(u) / y[0]]

    def crossing(u, y):
        return y[0] + z_floor * min(1.0, (u - alpha) / ramp, (beta - u) / ramp)

    crossing.terminal = True
    crossing.direction = 1

    u_launch, u_arrive = beta - delta0, alpha + delta0
    q_launch = h(u_launch) / (-delta0)
    launch = slopes_from(drift(beta), q_launch)
    # with hdot(beta) = 0 and f - c g < 0 this is the slow-manifold start (h / a) * delta0
    z0 = launch.r_plus * (-delta0)
    if z0 >= 0.0:
        z0 = -z_floor

    # h vanishing to second order at an endpoint makes z hug a slow manifold z ~ x^2 there
    q_arrive = h(u_arrive) / delta0
    stiff = (abs(q_launch) <= settings.stiff_ratio * (1.0 + drift(beta) ** 2)
             or abs(q_arrive) <= settings.stiff_ratio * (1.0 + drift(alpha) ** 2))

    if stiff:
        def jac(u, y):
            return [[h(u) / (y[0] * y[0])]]

        # z starts far below delta0 on the slow manifold
        atol = settings.ode_tol * min(delta0, abs(z0))
        methods = (settings.stiff_ode_method,) + tuple(
            m for m in settings.stiff_fallback_methods if m != settings.stiff_ode_method)
    else:
        jac = None
        atol = settings.ode_tol * delta0
        methods = (settings.ode_method,)

    sol = None
    for method in methods:
        options = dict(rtol=settings.ode_tol, atol=atol, dense_output=True, events=crossing)
        if jac is not None:
            options['jac'] = jac
        if method == 'LSODA':
            with _STIFF_LOCK:
                sol = solve_ivp(rhs, (u_launch, u_arrive), [z0], method=method, **options)
        else:
            sol = solve_ivp(rhs, (u_launch, u_arrive), [z0], method=method, **options)
        if sol.status != -1:
            break
        logging.debug(f"interval {sl.k}, c = {c}: {method} failed ({sol.message})")
    if sol.status == -1:
        if 'step size' in sol.message:
            raise StepUnderflow(f"interval {sl.k}, c = {c}: {sol.message}")
        raise NumericalError(f"interval {sl.k}, c = {c}: {sol.message}")

    u_end, z_end = float(sol.t[-1]), float(sol.y[0][-1])
    feasibility = None
    slope_alpha = math.nan
    if sol.status == 1:
        u_end = float(sol.t_events[0][0])
        z_end = float(sol.y_events[0][0][0])
        if u_end - alpha > ramp:
            feasibility = 'interior_zero_crossing'

    if feasibility is None:
        x = u_end - alpha
        slope_alpha = z_end / x
        arrival = slopes_from(drift(alpha), h(alpha + x) / x)
        if not math.isfinite(slope_alpha) or not arrival.real:
            feasibility = 'terminal_mismatch'
        elif abs(slope_alpha - arrival.r_minus) <= 1e-6 * (1.0 + abs(arrival.r_minus)):
            feasibility = 'ambiguous'
        elif slope_alpha >= arrival.r_minus:
            feasibility = 'feasible'
        else:
            feasibility = 'terminal_mismatch'

    n_steps = len(sol.t) - 1
    slope_beta = z0 / (-delta0)
    if events is not None:
        events.log_event(case_id, sl.k, c, delta0, feasibility, z_end, slope_alpha, slope_beta, n_steps,
                         reflected=sl.reflected)
    logging.debug(f"interval {sl.k}, c = {c:.9f}, delta0 = {delta0:.2e}: "
                  f"{feasibility} after {n_steps} {method} steps")

    dense = sol.sol
    return IntervalSolution(
        k=sl.k, c=c,
        u=sol.t[::-1].copy(),
        z=sol.y[0][::-1].copy(),
        endpoint_slope_alpha=slope_alpha,
        endpoint_slope_beta=slope_beta,
        feasibility=feasibility,
        alpha=alpha, beta=beta, delta0=delta0,
        reflected=sl.reflected,
        n_steps=n_steps,
        interpolant=lambda u: dense(u)[0],
    )


def _map_back(solution: IntervalSolution) -> IntervalSolution:
    """Undo the reflection: z(u) = -zeta(alpha + beta - u)"""
    total = solution.alpha + solution.beta
    inner = solution.interpolant
    return replace(
        solution,
        u=(total - solution.u)[::-1].copy(),
        z=(-solution.z)[::-1].copy(),
        endpoint_slope_alpha=solution.endpoint_slope_beta,
        endpoint_slope_beta=solution.endpoint_slope_alpha,
        reflected=True,
        interpolant=lambda u: -inner(total - u),
    )


def solve_interval(p: Problem, iv: SignInterval, c: float, settings: SolverSettings = DEFAULT_SETTINGS,
                   events: Optional[ShootingEventLogger] = None, case_id: Optional[str] = None,
                   delta0_frac: Optional[float] = None, sl: Optional[IntervalSlice] = None) -> IntervalSolution:
    """z on one sign interval in the original variables, halving delta0 while the arrival is ambiguous"""
    sl = sl or positive_slice(p, iv)
    frac = delta0_frac or settings.delta0_frac
    for retry in range(settings.max_retries + 1):
        solution = integrate_z(sl, c, settings, frac, events, case_id)
        if solution.feasibility != 'ambiguous':
            solution = replace(solution, retries=retry)
            break
        frac /= 2.0
    else:
        solution = replace(solution, feasibility='feasible', retries=settings.max_retries,
                           message='arrival slope stayed at r_minus; accepted as the threshold solution')
    return _map_back(solution) if not iv.positive else solution
