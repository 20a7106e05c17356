import math

import numpy as np
import pytest

from wavekit.errors import (ArityError, EvaluationError, ExpressionSyntaxError, UnknownIdentifierError)
from wavekit.expressions.differentiation import derivative_at, secant_limit_at
from wavekit.expressions.functions import ScalarFunction
from wavekit.expressions.parser import (Binary, Parameter, Unary, Variable, negated, parse, product,
                                        reflected, tokenize, unparse)


def test_precedence_and_right_associative_power():
    f = ScalarFunction.from_source("1 + 2 * u ^ 2 ^ 1")
    assert f(0.5) == pytest.approx(1.5)
    g = ScalarFunction.from_source("2 ^ 3 ^ 2")
    assert g(0.5) == pytest.approx(512.0)


def test_unary_minus_binds_to_the_atom():
    # '-' atom sits below '^' in the grammar, so -u^2 reads as (-u)^2
    f = ScalarFunction.from_source("-u^2")
    assert f(0.5) == pytest.approx(0.25)
    assert ScalarFunction.from_source("-(u^2)")(0.5) == pytest.approx(-0.25)


def test_parameters_bind_at_parse_time():
    expr = parse("u^2 - u + K", {'K': 0.25})
    assert expr.parameter_names() == {'K'}
    assert isinstance(expr.ast, Binary)
    f = ScalarFunction(expr, {'K': 0.25})
    assert f(0.5) == pytest.approx(0.0)


def test_unknown_identifier_reports_offset():
    with pytest.raises(UnknownIdentifierError) as info:
        parse("u + Kappa")
    assert info.value.offset == 4


def test_unknown_function_is_rejected():
    with pytest.raises(UnknownIdentifierError):
        parse("tanh(u)")


@pytest.mark.parametrize("source", ["sqrt()", "sqrt(u, 2)", "sqrt u"])
def test_function_arity(source):
    with pytest.raises(ArityError):
        parse(source)


@pytest.mark.parametrize("source, offset", [("u +", 3), ("(u", 2), ("u $ 1", 2), ("", 0)])
def test_syntax_errors(source, offset):
    with pytest.raises(ExpressionSyntaxError) as info:
        parse(source)
    assert info.value.offset == offset


def test_tokenize_numbers_with_exponents():
    tokens = tokenize("1.5e-3*u")
    assert [t.kind for t in tokens] == ['number', 'op', 'name', 'end']
    assert tokens[0].text == "1.5e-3"


def test_unparse_reparses_to_same_tree():
    for source in ["(3/4 - u) * sqrt(u - u^2)", "u - (u - 1)", "2 ^ (1 / 2)", "-(u + 1) / 3", "a - b - c"]:
        params = {'a': 1.0, 'b': 2.0, 'c': 3.0}
        expr = parse(source, params)
        again = parse(unparse(expr.ast), params)
        f, g = ScalarFunction(expr, params), ScalarFunction(again, params)
        u = np.linspace(0.0, 1.0, 11)
        np.testing.assert_allclose(f(u), g(u))


def test_helpers_build_new_expressions():
    g = parse("u^2 - u + 1")
    neg = ScalarFunction(negated(g))
    assert neg(0.5) == pytest.approx(-0.75)

    h = ScalarFunction(product(parse("1/2 - u"), parse("u - u^2")))
    assert h(0.25) == pytest.approx(0.25 * 0.1875)


def test_reflected_expression_is_defined_on_the_slice():
    expr = reflected(parse("u - 1/2"), 0.5, 1.0)
    f = ScalarFunction(expr, domain=(0.5, 1.0))
    assert f(0.5) == pytest.approx(0.5)
    assert f(1.0) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        f(0.25)


def test_scalar_and_array_evaluation_agree():
    f = ScalarFunction.from_source("(3/4 - u) * sqrt(u - u^2) + exp(-u) * cos(u)")
    u = np.linspace(0.0, 1.0, 33)
    np.testing.assert_allclose(f(u), [f(x) for x in u], rtol=1e-12)


def test_sqrt_clamps_rounding_noise():
    # u - u^2 is slightly negative in floating point near 1 for some u
    f = ScalarFunction.from_source("sqrt(u - u^2)")
    assert f(1.0) == 0.0
    assert f(0.0) == 0.0


def test_evaluation_errors_fail_construction():
    with pytest.raises(EvaluationError):
        ScalarFunction.from_source("1 / (u - 1/2)")
    with pytest.raises(EvaluationError):
        ScalarFunction.from_source("sqrt(u - 1)")
    with pytest.raises(EvaluationError):
        ScalarFunction.from_source("ln(u)")


def test_missing_parameter_binding():
    expr = parse("u + K", {'K': 1.0})
    with pytest.raises(UnknownIdentifierError):
        ScalarFunction(expr, {})


def test_central_derivative_is_accurate():
    f = ScalarFunction.from_source("sin(3*u)")
    assert derivative_at(f, 0.4) == pytest.approx(3.0 * math.cos(1.2), rel=1e-8)


def test_one_sided_derivatives_at_the_domain_edges():
    f = ScalarFunction.from_source("(1/2 - u) * (u - u^2)")
    assert derivative_at(f, 0.0, 'right') == pytest.approx(0.5, rel=1e-8)
    assert derivative_at(f, 1.0, 'left') == pytest.approx(0.5, rel=1e-8)


def test_sqrt_endpoint_derivative_diverges():
    f = ScalarFunction.from_source("(3/4 - u) * sqrt(u - u^2)")
    assert derivative_at(f, 0.0, 'right') == math.inf
    assert derivative_at(f, 1.0, 'left') == math.inf


def test_derivative_rejects_bad_arguments():
    f = ScalarFunction.from_source("u")
    with pytest.raises(ValueError):
        derivative_at(f, 0.0, 'central')
    with pytest.raises(ValueError):
        derivative_at(f, 0.5, 'up')


def test_secant_limit_at_simple_and_double_zero():
    h = ScalarFunction.from_source("(3/4 - u) * (u - u^2)")
    limit = secant_limit_at(h, 0.0, 'right')
    assert limit.converged
    assert limit.value == pytest.approx(0.75, rel=1e-7)

    double = ScalarFunction.from_source("(1/2 - u)^2 * (u - u^2)")
    assert secant_limit_at(double, 0.5, 'left').value == pytest.approx(0.0, abs=1e-9)
    assert secant_limit_at(double, 0.5, 'right').value >= 0.0


def test_secant_limit_needs_a_zero():
    h = ScalarFunction.from_source("1 + u")
    with pytest.raises(ValueError):
        secant_limit_at(h, 0.0, 'right')


def test_ast_node_types():
    expr = parse("K * u", {'K': 2.0})
    assert isinstance(expr.ast.left, Parameter)
    assert isinstance(expr.ast.right, Variable)
    assert isinstance(parse("abs(u)").ast, Unary)
