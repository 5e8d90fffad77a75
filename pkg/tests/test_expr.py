import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jetgeo import (
    EvaluationError,
    FieldParseError,
    UnboundParameterError,
    eval_field,
    parse_expression,
    parse_field,
    partial,
    second_partial,
)
from jetgeo import expr as E
from jetgeo.lorenz5 import LORENZ5_TEXT

from conftest import random_polynomial_fields, random_polynomial_text


# --- parsing ------------------------------------------------------------------

def test_parse_lorenz_text():
    f = parse_field(LORENZ5_TEXT, {"eps": 0.1})
    assert f.n == 5
    assert dict(f.params) == {"eps": 0.1}
    assert f.parameter_names == {"eps"}


def test_parse_zero_field():
    f = parse_field("X1 = 0")
    assert f.n == 1
    assert f.components == (E.Const(0.0),)
    assert eval_field(f, [3.7]).tolist() == [0.0]


def test_parse_then_evaluate_hand_values():
    f = parse_field("X1 = x2^2\nX2 = sin(x1)")
    assert eval_field(f, [0.0, 3.0]).tolist() == [9.0, 0.0]


def test_comments_and_blank_lines_and_order():
    f = parse_field("# header\n\nX2 = x1  # trailing\n   \nX1 = 2*x2\n")
    np.testing.assert_array_equal(f([1.0, 5.0]), [10.0, 1.0])


@pytest.mark.parametrize("text, value", [
    ("2 + 3 * 4", 14.0),
    ("(2 + 3) * 4", 20.0),
    ("2 ^ 3 ^ 2", 512.0),
    ("-2 ^ 2", -4.0),
    ("(-2) ^ 2", 4.0),
    ("8 / 4 / 2", 1.0),
    ("10 - 4 - 3", 3.0),
    ("2 ^ -1", 0.5),
    ("2 ^ (-2)", 0.25),
    ("1.5e2 + .5 + 3.", 153.5),
    ("--3", 3.0),
    ("+3 * -x1", -6.0),
    ("exp(0) + cos(0) + sin(0)", 2.0),
])
def test_precedence_and_associativity(text, value):
    assert parse_expression(text).evaluate([2.0]) == pytest.approx(value, rel=1e-15)


@pytest.mark.parametrize("text, line, col", [
    ("X1 = x1 +", 1, 10),
    ("X1 = x1\nX2 = 3 $ 4", 2, 8),
    ("X1 = (x1", 1, 9),
    ("X1 = x1)", 1, 8),
    ("X1 = sin x1", 1, 10),
])
def test_syntax_errors_report_position(text, line, col):
    with pytest.raises(FieldParseError) as info:
        parse_field(text)
    assert (info.value.line, info.value.column) == (line, col)


@pytest.mark.parametrize("text, fragment", [
    ("X1 = x2", "x2"),
    ("X1 = x1\nX1 = x1", "duplicate"),
    ("X1 = x1\nX3 = x3", "missing"),
    ("X1 = x1 + t", "autonomous"),
    ("X1 = x1^1.5", "integer"),
    ("X1 = x1^a", "integer"),
    ("X1 = x0", "start at 1"),
    ("Y1 = x1", "component definition"),
    ("# nothing here\n", "no components"),
    ("X1 = ", "empty"),
])
def test_structural_errors(text, fragment):
    with pytest.raises(FieldParseError, match=fragment):
        parse_field(text)


def test_unbound_parameter_recorded_then_enforced():
    f = parse_field("X1 = a*x1 + b")
    assert f.unbound == {"a", "b"}
    with pytest.raises(UnboundParameterError):
        f([1.0])
    g = f.with_params(a=2.0, b=1.0)
    assert g([3.0]).tolist() == [7.0]


def test_division_by_zero_names_component():
    f = parse_field("X1 = x1\nX2 = 1/x1\nX3 = x3")
    with pytest.raises(EvaluationError) as info:
        f([0.0, 1.0, 1.0])
    assert info.value.component == 2
    with pytest.raises(EvaluationError):
        f.jacobian([0.0, 1.0, 1.0])


def test_negative_power_of_zero_is_an_evaluation_error():
    f = parse_field("X1 = x1^(-2)")
    with pytest.raises(EvaluationError):
        f([0.0])
    assert f([2.0]).tolist() == [0.25]


def test_wrong_dimension_point():
    f = parse_field(LORENZ5_TEXT, {"eps": 0.1})
    with pytest.raises(ValueError):
        f([1.0, 2.0, 3.0])


def test_batched_evaluation_matches_pointwise(rng):
    f = parse_field(LORENZ5_TEXT, {"eps": 0.3})
    P = rng.uniform(-3, 3, (7, 5))
    batch = f(P)
    for p, row in zip(P, batch):
        np.testing.assert_array_equal(f(p), row)
    assert f.jacobian(P).shape == (7, 5, 5)
    assert f.hessian(P[:2]).shape == (2, 5, 5, 5)


# --- symbolic derivatives -------------------------------------------------------

def test_lorenz_partial_1_2():
    f = parse_field(LORENZ5_TEXT, {"eps": 0.1})
    d = partial(f, 1, 2)
    assert d == parse_expression("-x3 + eps*x5")
    assert str(d) == "-x3 + eps * x5"


def test_lorenz_partial_4_4_is_zero():
    f = parse_field(LORENZ5_TEXT)
    assert partial(f, 4, 4) == E.ZERO


def test_power_rule():
    f = parse_field("X1 = x1^3")
    d = partial(f, 1, 1)
    assert str(d) == "3 * x1^2"
    assert d.evaluate([2.0]) == 12.0


def test_lorenz_second_partial():
    f = parse_field(LORENZ5_TEXT)
    assert second_partial(f, 1, 2, 3) == E.Const(-1.0)
    assert second_partial(f, 1, 3, 2) == E.Const(-1.0)


def test_linear_field_has_zero_second_partials():
    f = parse_field("X1 = 2*x1 - x2 + 3\nX2 = a*x2 - x1")
    for i in (1, 2):
        for j in (1, 2):
            for k in (1, 2):
                assert second_partial(f, i, j, k) == E.ZERO


@pytest.mark.parametrize("seed", range(5))
def test_second_partial_symmetry_is_structural(seed):
    f = parse_field(random_polynomial_text(np.random.default_rng(seed), 4))
    for i in range(1, 5):
        for j in range(1, 5):
            for k in range(1, 5):
                assert second_partial(f, i, j, k) == second_partial(f, i, k, j)


def test_second_partial_matches_other_differentiation_order(rng):
    # the table differentiates in ascending order; the reverse order must agree
    f = parse_field("X1 = sin(x1*x2)*exp(x3) + x1^3*x2/x3\nX2 = x2\nX3 = x3")
    for _ in range(20):
        x = rng.uniform(0.5, 2.0, 3)
        for j in (1, 2, 3):
            for k in (1, 2, 3):
                other = f.components[0].diff(k).diff(j)
                assert second_partial(f, 1, j, k).evaluate(x) == pytest.approx(
                    other.evaluate(x), rel=1e-12, abs=1e-12)


def test_index_bounds():
    f = parse_field("X1 = x1\nX2 = x2")
    with pytest.raises(IndexError):
        partial(f, 3, 1)
    with pytest.raises(IndexError):
        second_partial(f, 1, 0, 1)


@pytest.mark.parametrize("text, j, expected", [
    ("sin(x1)", 1, lambda x: math.cos(x)),
    ("cos(2*x1)", 1, lambda x: -2 * math.sin(2 * x)),
    ("exp(x1^2)", 1, lambda x: 2 * x * math.exp(x * x)),
    ("1/x1", 1, lambda x: -1 / x ** 2),
    ("x1^(-3)", 1, lambda x: -3 * x ** -4),
    ("x1 / (1 + x1^2)", 1, lambda x: (1 - x * x) / (1 + x * x) ** 2),
])
def test_elementary_derivatives(text, j, expected):
    d = parse_expression(text).diff(j)
    for x in (0.3, 1.1, 2.7):
        assert d.evaluate([x]) == pytest.approx(expected(x), rel=1e-13)


@pytest.mark.parametrize("text, simplified", [
    ("0*x1 + x2", "x2"),
    ("x1 + 0", "x1"),
    ("x1^1", "x1"),
    ("x1^0", "1"),
    ("1*x1*1", "x1"),
    ("2*3 + x1", "6 + x1"),
    ("x1 - 0", "x1"),
    ("0 - x1", "-x1"),
    ("--x1", "x1"),
    ("0/x1", "0"),
    ("x1/1", "x1"),
    ("-1*x1", "-x1"),
    ("sin(0) + x1", "x1"),
])
def test_simplification(text, simplified):
    assert str(E.simplify(parse_expression(text))) == simplified


def test_division_by_literal_zero_is_not_folded():
    e = E.simplify(parse_expression("1/0"))
    assert isinstance(e, E.BinOp)
    with pytest.raises(ZeroDivisionError):
        e.evaluate([])


def test_partial_matches_finite_differences_on_polynomials():
    rng = np.random.default_rng(3)
    for f in random_polynomial_fields(seed=11, count=6):
        for _ in range(20):
            x = rng.uniform(-2, 2, f.n)
            J = f.jacobian(x)
            for j in range(f.n):
                e = np.zeros(f.n)
                e[j] = 1e-6
                fd = (f(x + e) - f(x - e)) / 2e-6
                np.testing.assert_allclose(J[:, j], fd, rtol=1e-6, atol=1e-6)


def test_partial_is_linear(rng):
    F = "x1^2*x2 - sin(x2)"
    G = "exp(x1)*x2 + x1/(2 + x2^2)"
    a, b = 1.7, -0.4
    fa = parse_expression(F)
    fg = parse_expression(G)
    combo = parse_expression(f"({a!r})*({F}) + ({b!r})*({G})")
    for _ in range(50):
        x = rng.uniform(-2, 2, 2)
        for j in (1, 2):
            lhs = combo.diff(j).evaluate(x)
            rhs = a * fa.diff(j).evaluate(x) + b * fg.diff(j).evaluate(x)
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


# --- printing round trip ----------------------------------------------------------

_leaves = st.one_of(
    st.floats(min_value=-50, max_value=50, allow_nan=False).map(E.Const),
    st.integers(1, 3).map(E.Var),
    st.just(E.Param("k")),
)


def _extend(children):
    return st.one_of(
        children.map(E.Neg),
        st.tuples(st.sampled_from("+-*/"), children, children).map(lambda t: E.BinOp(*t)),
        st.tuples(children, st.integers(-3, 4)).map(lambda t: E.Pow(*t)),
        st.tuples(st.sampled_from(E.FUNCTIONS), children).map(lambda t: E.Func(*t)),
    )


expressions = st.recursive(_leaves, _extend, max_leaves=12)


def _safe_eval(e, pts):
    f = E.compile_expressions([e])
    out = []
    with np.errstate(all="ignore"):
        for p in pts:
            try:
                out.append(float(f(list(p), {"k": 0.75})[0]))
            except (ZeroDivisionError, OverflowError, FloatingPointError):
                out.append(None)
    return out


@settings(max_examples=200, deadline=None)
@given(expressions)
def test_print_parse_round_trip(e):
    pts = np.random.default_rng(0).uniform(-2, 2, (100, 3))
    again = parse_expression(str(e))
    first, second = _safe_eval(e, pts), _safe_eval(again, pts)
    for a, b in zip(first, second):
        if a is None or b is None:
            assert a is None and b is None
        elif math.isnan(a):
            assert math.isnan(b)
        else:
            assert a == b or abs(a - b) <= 1e-15
    # printing is a fixed point after one round
    assert str(parse_expression(str(again))) == str(again)


def test_field_text_round_trip(rng):
    for f in random_polynomial_fields(seed=5, count=5):
        g = parse_field(f.to_text())
        P = rng.uniform(-3, 3, (100, f.n))
        assert np.max(np.abs(f(P) - g(P))) <= 1e-15
