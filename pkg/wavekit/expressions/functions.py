import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Optional, Tuple, Union

import numpy as np

from ..errors import EvaluationError, UnknownIdentifierError
from .parser import (Binary, Constant, Expression, Group, Node, Parameter, Unary, Variable,
                     constant_params, parse)

ArrayLike = Union[float, np.ndarray]

# points used to check that a function is defined on its whole domain
_CHECK_POINTS = 257


def _scalar_sqrt(x: float, clamp: float) -> float:
    if x < 0.0:
        if x < -clamp:
            raise EvaluationError(f"sqrt of negative argument {x:.3e}")
        return 0.0
    return math.sqrt(x)


def _scalar_ln(x: float, clamp: float) -> float:
    if x <= 0.0:
        if x < -clamp:
            raise EvaluationError(f"ln of negative argument {x:.3e}")
        return -math.inf
    return math.log(x)


def _scalar_pow(base: float, exponent: float, clamp: float) -> float:
    if base < 0.0 and not float(exponent).is_integer():
        if base < -clamp:
            raise EvaluationError(f"fractional power {exponent} of negative base {base:.3e}")
        base = 0.0
    try:
        return base ** exponent
    except ZeroDivisionError:
        raise EvaluationError(f"division by zero in 0 ^ {exponent}") from None
    except OverflowError:
        raise EvaluationError(f"overflow in {base} ^ {exponent}") from None


def _scalar_div(a: float, b: float) -> float:
    if b == 0.0:
        raise EvaluationError("division by zero")
    return a / b


def _scalar_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        raise EvaluationError(f"overflow in exp({x})") from None


_SCALAR_BINARY = {
    '+': lambda a, b: a + b,
    '-': lambda a, b: a - b,
    '*': lambda a, b: a * b,
}

_SCALAR_UNARY = {
    'neg': lambda x: -x,
    'abs': abs,
    'exp': _scalar_exp,
    'sin': math.sin,
    'cos': math.cos,
}


def _compile_scalar(node: Node, params: Mapping[str, float], clamp: float) -> Callable[[float], float]:
    if isinstance(node, Constant):
        value = float(node.value)
        return lambda u: value
    if isinstance(node, Variable):
        return lambda u: u
    if isinstance(node, Parameter):
        value = float(params[node.name])
        return lambda u: value
    if isinstance(node, Group):
        return _compile_scalar(node.inner, params, clamp)
    if isinstance(node, Unary):
        inner = _compile_scalar(node.operand, params, clamp)
        if node.op == 'sqrt':
            return lambda u: _scalar_sqrt(inner(u), clamp)
        if node.op == 'ln':
            return lambda u: _scalar_ln(inner(u), clamp)
        op = _SCALAR_UNARY[node.op]
        return lambda u: op(inner(u))
    if isinstance(node, Binary):
        left = _compile_scalar(node.left, params, clamp)
        right = _compile_scalar(node.right, params, clamp)
        if node.op == '/':
            return lambda u: _scalar_div(left(u), right(u))
        if node.op == '^':
            return lambda u: _scalar_pow(left(u), right(u), clamp)
        op = _SCALAR_BINARY[node.op]
        return lambda u: op(left(u), right(u))
    raise TypeError(f"Not an expression node: {node!r}")


def _array_sqrt(x: np.ndarray, clamp: float) -> np.ndarray:
    if np.any(x < -clamp):
        raise EvaluationError(f"sqrt of negative argument {float(np.min(x)):.3e}")
    return np.sqrt(np.maximum(x, 0.0))


def _array_ln(x: np.ndarray, clamp: float) -> np.ndarray:
    if np.any(x < -clamp):
        raise EvaluationError(f"ln of negative argument {float(np.min(x)):.3e}")
    with np.errstate(divide='ignore'):
        return np.log(np.maximum(x, 0.0))


def _array_pow(base: np.ndarray, exponent: np.ndarray, clamp: float) -> np.ndarray:
    fractional = np.broadcast_to(np.mod(exponent, 1.0) != 0.0, np.shape(base))
    negative = (base < 0.0) & fractional
    if np.any(negative & (base < -clamp)):
        raise EvaluationError("fractional power of a negative base")
    base = np.where(negative, 0.0, base)
    with np.errstate(divide='raise', over='raise', invalid='raise'):
        try:
            return np.power(base, exponent)
        except FloatingPointError as exc:
            raise EvaluationError(f"invalid power: {exc}") from None


def _array_div(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if np.any(b == 0.0):
        raise EvaluationError("division by zero")
    return a / b


def _array_exp(x: np.ndarray) -> np.ndarray:
    with np.errstate(over='raise'):
        try:
            return np.exp(x)
        except FloatingPointError:
            raise EvaluationError("overflow in exp") from None


_ARRAY_UNARY = {
    'neg': np.negative,
    'abs': np.abs,
    'exp': _array_exp,
    'sin': np.sin,
    'cos': np.cos,
}

_ARRAY_BINARY = {
    '+': np.add,
    '-': np.subtract,
    '*': np.multiply,
}


def _compile_array(node: Node, params: Mapping[str, float], clamp: float) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(node, Constant):
        value = float(node.value)
        return lambda u: np.full_like(u, value)
    if isinstance(node, Variable):
        return lambda u: u
    if isinstance(node, Parameter):
        value = float(params[node.name])
        return lambda u: np.full_like(u, value)
    if isinstance(node, Group):
        return _compile_array(node.inner, params, clamp)
    if isinstance(node, Unary):
        inner = _compile_array(node.operand, params, clamp)
        if node.op == 'sqrt':
            return lambda u: _array_sqrt(inner(u), clamp)
        if node.op == 'ln':
            return lambda u: _array_ln(inner(u), clamp)
        op = _ARRAY_UNARY[node.op]
        return lambda u: op(inner(u))
    if isinstance(node, Binary):
        left = _compile_array(node.left, params, clamp)
        right = _compile_array(node.right, params, clamp)
        if node.op == '/':
            return lambda u: _array_div(left(u), right(u))
        if node.op == '^':
            return lambda u: _array_pow(left(u), right(u), clamp)
        op = _ARRAY_BINARY[node.op]
        return lambda u: op(left(u), right(u))
    raise TypeError(f"Not an expression node: {node!r}")


@dataclass(frozen=True)
class ScalarFunction:
    """Real function of u built from an expression, evaluable on floats and numpy arrays"""

    expr: Expression
    params: Dict[str, float] = field(default_factory=dict)
    eval_clamp: float = 1e-12
    domain: Tuple[float, float] = (0.0, 1.0)
    _scalar: Callable = field(init=False, repr=False, compare=False)
    _array: Callable = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        params = constant_params(self.params)
        object.__setattr__(self, 'params', params)
        missing = sorted(self.expr.parameter_names() - set(params))
        if missing:
            raise UnknownIdentifierError(f"Unbound parameters: {', '.join(missing)}")
        lo, hi = self.domain
        if not lo < hi:
            raise ValueError(f"Empty domain {self.domain}")
        object.__setattr__(self, '_scalar', _compile_scalar(self.expr.ast, params, self.eval_clamp))
        object.__setattr__(self, '_array', _compile_array(self.expr.ast, params, self.eval_clamp))

        # fails construction when the expression is undefined somewhere on the domain
        values = self._array(np.linspace(lo, hi, _CHECK_POINTS))
        if not np.all(np.isfinite(values)):
            raise EvaluationError(f"Expression {self.expr.source!r} is not finite on [{lo}, {hi}]")

    @classmethod
    def from_source(cls, source: str, params: Optional[Mapping[str, float]] = None,
                    eval_clamp: float = 1e-12, domain: Tuple[float, float] = (0.0, 1.0)) -> 'ScalarFunction':
        params = constant_params(params)
        return cls(parse(source, params), params, eval_clamp, domain)

    def derive(self, expr: Expression, domain: Optional[Tuple[float, float]] = None) -> 'ScalarFunction':
        """A new function sharing this one's parameters and clamp"""
        return ScalarFunction(expr, dict(self.params), self.eval_clamp, domain or self.domain)

    def __call__(self, u: ArrayLike) -> ArrayLike:
        return self.eval(u)

    def eval(self, u: ArrayLike) -> ArrayLike:
        lo, hi = self.domain
        slack = 1e-12 * (hi - lo)
        if np.ndim(u) == 0:
            u = float(u)
            if u < lo - slack or u > hi + slack:
                raise ValueError(f"u = {u} outside the domain [{lo}, {hi}]")
            return float(self._scalar(u))
        u = np.asarray(u, dtype=float)
        if u.size and (u.min() < lo - slack or u.max() > hi + slack):
            raise ValueError(f"Samples outside the domain [{lo}, {hi}]")
        return np.asarray(self._array(u), dtype=float)
