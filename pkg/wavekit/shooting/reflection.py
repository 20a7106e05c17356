from dataclasses import dataclass
from typing import Tuple

from ..expressions.functions import ScalarFunction
from ..expressions.parser import negated, reflected
from ..model.decomposition import SignInterval
from ..model.problem import Problem


@dataclass(frozen=True)
class IntervalSlice:
    """f, g and h restricted to one sign interval; `reflected` marks data produced by u -> alpha + beta - u"""
    k: int
    alpha: float
    beta: float
    f: ScalarFunction
    g: ScalarFunction
    h: ScalarFunction
    h_sign: str
    reflected: bool = False

    @property
    def length(self) -> float:
        return self.beta - self.alpha

    def mirror(self, u):
        return self.alpha + self.beta - u

    def interval(self) -> SignInterval:
        return SignInterval(k=self.k, alpha=self.alpha, beta=self.beta, h_sign=self.h_sign)


def interval_slice(p: Problem, iv: SignInterval) -> IntervalSlice:
    """The problem data on iv, as is"""
    domain = (iv.alpha, iv.beta)
    return IntervalSlice(
        k=iv.k, alpha=iv.alpha, beta=iv.beta,
        f=p.f.derive(p.f.expr, domain),
        g=p.g.derive(p.g.expr, domain),
        h=p.h.derive(p.h.expr, domain),
        h_sign=iv.h_sign,
    )


def reflect_slice(sl: IntervalSlice) -> IntervalSlice:
    """f(a+b-u), g(a+b-u), -h(a+b-u) on the same interval; flips the sign of h"""
    domain = (sl.alpha, sl.beta)
    a, b = sl.alpha, sl.beta
    return IntervalSlice(
        k=sl.k, alpha=a, beta=b,
        f=sl.f.derive(reflected(sl.f.expr, a, b), domain),
        g=sl.g.derive(reflected(sl.g.expr, a, b), domain),
        h=sl.h.derive(reflected(negated(sl.h.expr), a, b), domain),
        h_sign='positive' if sl.h_sign == 'negative' else 'negative',
        reflected=not sl.reflected,
    )


def reflect_interval(p: Problem, iv: SignInterval) -> Tuple[IntervalSlice, SignInterval]:
    """Turn a K- interval into positive-h data; solutions map back by z(u) = -zeta(alpha + beta - u)"""
    if iv.positive:
        raise ValueError(f"Interval {iv.k} already has positive h")
    sl = reflect_slice(interval_slice(p, iv))
    return sl, sl.interval()


def positive_slice(p: Problem, iv: SignInterval) -> IntervalSlice:
    """Slice with positive h, reflecting when needed"""
    if iv.positive:
        return interval_slice(p, iv)
    return reflect_interval(p, iv)[0]
