from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncdiffop.scalars import ONE, ZERO, Scalar, ScalarParseError, sc

rationals = st.builds(Fraction, st.integers(-50, 50), st.integers(1, 20))
scalars = st.builds(lambda a, b: Scalar(a, b), rationals, rationals)


@given(scalars, scalars, scalars)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
    assert a * b == b * a
    assert a + ZERO == a
    assert a * ONE == a
    assert a - a == ZERO


@given(scalars)
def test_inverses(a):
    if a:
        assert a * (ONE / a) == ONE


@given(scalars, scalars)
def test_conjugation_is_ring_antiautomorphism(a, b):
    assert a.conj().conj() == a
    assert (a + b).conj() == a.conj() + b.conj()
    assert (a * b).conj() == a.conj() * b.conj()


@given(rationals)
def test_conjugation_fixes_rationals(r):
    assert Scalar(r).conj() == Scalar(r)


@pytest.mark.parametrize(
    "text,expected",
    [
        ("3", Scalar(3)),
        ("-1/2", Scalar(Fraction(-1, 2))),
        ("1/2+1/3i", Scalar(Fraction(1, 2), Fraction(1, 3))),
        ("1/2-1/3i", Scalar(Fraction(1, 2), Fraction(-1, 3))),
        ("i", Scalar(0, 1)),
        ("-i", Scalar(0, -1)),
        ("2i", Scalar(0, 2)),
        ("0", ZERO),
    ],
)
def test_parse(text, expected):
    assert sc(text) == expected


@given(scalars)
def test_str_roundtrip(a):
    assert sc(str(a)) == a


def test_parse_rejects_garbage():
    with pytest.raises(ScalarParseError):
        sc("1/2 + bogus")
    with pytest.raises(ScalarParseError):
        sc("")


def test_complex_division():
    a = sc("1+2i")
    b = sc("3-1i")
    assert a / b * b == a
    with pytest.raises(ZeroDivisionError):
        a / ZERO
