from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from abcmero.nt_abc import IntTriple
from abcmero.parser import ParseError, parse_int_triple, parse_mero_triple, parse_polynomial, parse_rational
from abcmero.rational_core import GaussianRational, Polynomial, RationalFunction, normalize


def test_lowest_terms_quotient():
    f = parse_rational("(z^2-1)/(z+2)")
    assert f.num.degree == 2
    assert f.den.degree == 1
    assert f.den.lead == 1
    assert f == RationalFunction(Polynomial([-1, 0, 1]), Polynomial([2, 1]))


def test_cancellation_gives_zero_function():
    f = parse_rational("z - z")
    assert f.is_zero()
    assert f.den == Polynomial([1])


def test_division_by_zero_polynomial():
    with pytest.raises(ParseError, match="division by zero polynomial"):
        parse_rational("1/(z-z)")


def test_common_factor_is_cancelled():
    f = parse_rational("(z^2-1)/(z-1)")
    assert f == parse_rational("z+1")
    assert f.den.degree == 0


@pytest.mark.parametrize(
    "text, expected",
    [
        ("3", GaussianRational(3)),
        ("-1/2", GaussianRational(Fraction(-1, 2))),
        ("2i", GaussianRational(0, 2)),
        ("1+3/4i", GaussianRational(1, Fraction(3, 4))),
        ("i", GaussianRational(0, 1)),
        (" 7 / 3 ", GaussianRational(Fraction(7, 3))),
    ],
)
def test_complex_literals(text, expected):
    f = parse_rational(text)
    assert f.is_constant()
    assert f.num.lead == expected


def test_caret_binds_tighter_than_unary_minus():
    assert parse_rational("-z^2") == -parse_rational("z^2")
    assert parse_rational("(-z)^2") == parse_rational("z^2")


def test_i_is_a_suffix_not_a_variable():
    assert parse_rational("2i*z") == parse_rational("z*2i")
    with pytest.raises(ParseError):
        parse_rational("zi")


def test_whitespace_is_insignificant():
    assert parse_rational(" ( z ^ 3 - 1 ) / ( z + 2 ) ") == parse_rational("(z^3-1)/(z+2)")


@pytest.mark.parametrize(
    "text, pos",
    [("z^", 2), ("((z)", 4), ("z$", 1), ("2z", 1), ("", 0), ("z^-1", 2), ("1/0", 0)],
)
def test_syntax_errors_carry_position(text, pos):
    with pytest.raises(ParseError) as info:
        parse_rational(text)
    assert info.value.pos == pos
    assert "position" in str(info.value)


def test_parse_polynomial_rejects_true_fractions():
    assert parse_polynomial("(z^2-1)/(z-1)") == Polynomial([1, 1])
    with pytest.raises(ValueError):
        parse_polynomial("1/z")


# ---------------------------------------------------------------- triples


def test_mero_triple_valid():
    P = parse_mero_triple("z", "-1", "1-z")
    assert P.nonconstant


def test_mero_triple_constant_point():
    with pytest.raises(ValueError, match="constant point"):
        parse_mero_triple("1", "1", "-2")


def test_mero_triple_sum_nonzero():
    with pytest.raises(ValueError, match="sum nonzero"):
        parse_mero_triple("z", "1", "1")


def test_mero_triple_zero_coordinate():
    with pytest.raises(ValueError, match="zero coordinate"):
        parse_mero_triple("z", "-z", "0")


def test_int_triple_examples():
    assert parse_int_triple("1,8,-9") == IntTriple(1, 8, -9)
    assert parse_int_triple("2,16,-18") == IntTriple(2, 16, -18)
    big = parse_int_triple("2, 6436341, -6436343")
    assert (big.a, big.b, big.c) == (2, 6436341, -6436343)


@pytest.mark.parametrize(
    "text, message",
    [("1,2,3", "sum nonzero"), ("0,1,-1", "zero entry"), ("1,x,-1", "malformed integer"), ("1,-1", "three")],
)
def test_int_triple_errors(text, message):
    with pytest.raises(ValueError, match=message):
        parse_int_triple(text)


# ---------------------------------------------------------------- properties

small = st.integers(-6, 6)
fracs = st.builds(Fraction, st.integers(-9, 9), st.integers(1, 5))
gauss = st.builds(GaussianRational, fracs, small)
polys = st.lists(gauss, min_size=1, max_size=5).map(Polynomial)


@settings(max_examples=150, deadline=None)
@given(polys, polys.filter(lambda p: not p.is_zero()))
def test_print_parse_round_trip(num, den):
    f = normalize(num, den)
    again = parse_rational(str(f))
    assert again == f
    assert (again.num, again.den) == (f.num, f.den)


def _grammar():
    atoms = st.one_of(
        st.integers(0, 20).map(str),
        st.tuples(st.integers(0, 9), st.integers(0, 5)).map(lambda t: f"{t[0]}/{t[1]}"),
        st.integers(0, 9).map(lambda k: f"{k}i"),
        st.just("z"),
        st.just("i"),
    )

    def extend(inner):
        return st.one_of(
            st.tuples(inner, st.sampled_from("+-*/"), inner).map(lambda t: f"{t[0]} {t[1]} {t[2]}"),
            st.tuples(inner, st.integers(0, 3)).map(lambda t: f"({t[0]})^{t[1]}"),
            inner.map(lambda s: f"-({s})"),
            inner.map(lambda s: f"({s})"),
        )

    return st.recursive(atoms, extend, max_leaves=8)


@settings(max_examples=300, deadline=None)
@given(_grammar())
def test_parser_is_total_on_the_grammar(text):
    try:
        f = parse_rational(text)
    except ParseError as exc:
        assert exc.text == text
        assert "zero" in str(exc)
    else:
        assert isinstance(f, RationalFunction)
        assert not f.den.is_zero()
        assert f.den.lead == 1
