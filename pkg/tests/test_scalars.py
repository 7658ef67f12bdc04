from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from csymplectic.scalars import EXACT, FLOAT, GaussQ, format_rational, parse_rational, to_backend

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=40)
gauss = st.builds(GaussQ, rationals, rationals)


@given(gauss, gauss, gauss)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    if b != 0:
        assert (a / b) * b == a


@given(gauss)
def test_conjugate_and_norm(a):
    assert (a * a.conjugate()).im == 0
    assert (a * a.conjugate()).re == a.abs2()
    assert complex(a.conjugate()) == complex(a).conjugate()


def test_immutability_and_hash():
    a = GaussQ(1, 2)
    with pytest.raises(AttributeError):
        a.re = 3
    assert hash(a) == hash(GaussQ(Fraction(2, 2), 2))
    assert GaussQ(3) == 3


@pytest.mark.parametrize("text,value", [("-1/2", Fraction(-1, 2)), ("3", Fraction(3)), (" 4/6 ", Fraction(2, 3))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


def test_format_rational_roundtrip():
    for q in (Fraction(-1, 2), Fraction(7), Fraction(0), Fraction(-22, 7)):
        assert parse_rational(format_rational(q)) == q
    assert format_rational(Fraction(-1, 2)) == "-1/2"


def test_to_backend():
    assert to_backend(Fraction(1, 2), EXACT) == GaussQ(Fraction(1, 2))
    assert to_backend(GaussQ(1, -1), FLOAT) == complex(1, -1)
