import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracivp.expr import (
    ArityError,
    BinOp,
    Call,
    EvalDomainError,
    Neg,
    Num,
    ParseError,
    UnknownIdentifierError,
    Var,
    evaluate,
    parse,
    to_string,
    variables,
)
from fracivp.specfun import gamma


class TestParsing:
    def test_structure(self):
        e = parse("t/gamma(1-0.5)")
        assert isinstance(e, BinOp) and e.op == "/"
        assert e.left == Var("t")
        assert isinstance(e.right, Call) and e.right.func == "gamma"

    def test_power_right_associative(self):
        assert evaluate(parse("2^3^2"), 0.0, 0.0) == 512.0

    def test_power_binds_tighter_than_unary_minus(self):
        assert evaluate(parse("-2^2"), 0.0, 0.0) == -4.0

    def test_mixed_precedence(self):
        assert evaluate(parse("x^(0.5)*t"), 4.0, 3.0) == pytest.approx(6.0)

    def test_example_constant(self):
        # Gamma(1.5)/Gamma(0.5) - 1 = -1/2
        e = parse("(gamma(1.5) - gamma(2)*gamma(0.5))/(gamma(2)*gamma(0.5))")
        assert evaluate(e, 0.0, 0.0) == pytest.approx(-0.5, abs=1e-14)

    def test_max_abs(self):
        assert evaluate(parse("max(x, abs(t-1)/2)"), 0.3, 2.0) == 0.5

    def test_variables(self):
        assert variables(parse("max(x, t)*gamma(2)")) == {"x", "t"}
        assert variables(parse("1+2")) == set()

    @pytest.mark.parametrize(
        "text,exc,position",
        [
            ("2*", ParseError, 3),
            ("(x+1", ParseError, 5),
            ("2 $ 3", ParseError, 3),
            ("foo(1)", UnknownIdentifierError, 1),
            ("x + y", UnknownIdentifierError, 5),
            ("pow(1)", ArityError, 1),
            ("max(1,2,3)", ArityError, 1),
            ("1e999", ParseError, 1),
        ],
    )
    def test_errors_carry_positions(self, text, exc, position):
        with pytest.raises(exc) as info:
            parse(text)
        assert info.value.position == position


class TestEvaluation:
    @pytest.mark.parametrize(
        "text",
        ["gamma(-1)", "gamma(0)", "ln(0)", "ln(0-2)", "sqrt(0-1)",
         "x/(t-t)", "0^(0-1)", "(0-2)^0.5", "exp(1000)", "gamma(200)"],
    )
    def test_domain_violations_raise(self, text):
        with pytest.raises(EvalDomainError):
            evaluate(parse(text), 1.0, 1.0)

    def test_negative_base_integer_exponent_ok(self):
        assert evaluate(parse("(0-2)^3"), 0.0, 0.0) == -8.0

    def test_gamma_matches_specfun(self):
        assert evaluate(parse("gamma(1.7)"), 0.0, 0.0) == gamma(1.7)

    def test_deterministic(self):
        e = parse("sin(x)*exp(t) + gamma(x+1)/sqrt(t)")
        first = evaluate(e, 0.7, 2.3)
        for _ in range(10):
            assert evaluate(e, 0.7, 2.3) == first


# strategy for random well-formed ASTs (printed, then reparsed)
_leaves = st.one_of(
    st.floats(min_value=0.0, max_value=100.0, allow_nan=False).map(Num),
    st.sampled_from(("x", "t")).map(Var),
)


def _compound(children):
    unary = st.builds(Neg, children)
    binary = st.builds(
        BinOp, st.sampled_from("+-*/^"), children, children
    )
    call1 = st.builds(
        lambda f, a: Call(f, (a,)),
        st.sampled_from(("gamma", "sqrt", "abs", "exp", "ln", "sin", "cos")),
        children,
    )
    call2 = st.builds(
        lambda f, a, b: Call(f, (a, b)),
        st.sampled_from(("pow", "max")),
        children,
        children,
    )
    return st.one_of(unary, binary, call1, call2)


expressions = st.recursive(_leaves, _compound, max_leaves=25)


class TestRoundTrip:
    @given(e=expressions)
    @settings(max_examples=1000, deadline=None)
    def test_print_parse_identity(self, e):
        text = to_string(e)
        reparsed = parse(text)
        assert parse(to_string(reparsed)) == reparsed

    @given(e=expressions)
    @settings(max_examples=200, deadline=None)
    def test_generated_tree_survives_printing(self, e):
        assert parse(to_string(e)) == e
