from __future__ import annotations

import math
from decimal import Decimal, getcontext
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from sturmian_lab.quadratic import FieldMismatch, QuadraticNumber, parse_quadratic

getcontext().prec = 60

small = st.integers(-50, 50)
nonzero = st.integers(1, 30)
fields = st.sampled_from([2, 3, 5, 10])


@st.composite
def quads(draw, D=None):
    D = D if D is not None else draw(fields)
    return QuadraticNumber(draw(small), draw(small), draw(nonzero), D)


def as_decimal(x: QuadraticNumber) -> Decimal:
    return (Decimal(x.a) + Decimal(x.b) * Decimal(x.D).sqrt()) / Decimal(x.c)


def test_golden_identity():
    phi = QuadraticNumber(-1, 1, 2, 5)
    assert phi * phi + phi == 1
    assert str(1 + phi) == "(1+√5)/2"


def test_normalisation_and_squarefree():
    assert QuadraticNumber(0, 1, 1, 8) == QuadraticNumber(0, 2, 1, 2)
    assert QuadraticNumber(2, 2, 4, 5) == QuadraticNumber(1, 1, 2, 5)
    assert QuadraticNumber(3, 0, 6, 5).is_rational


def test_field_mismatch():
    with pytest.raises(FieldMismatch):
        QuadraticNumber(0, 1, 1, 2) + QuadraticNumber(0, 1, 1, 3)


@given(quads(D=5), quads(D=5), quads(D=5))
def test_ring_laws(x, y, z):
    assert x + y == y + x
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z


@st.composite
def same_field_pairs(draw):
    D = draw(fields)
    return draw(quads(D=D)), draw(quads(D=D))


@given(same_field_pairs())
def test_division_inverts_multiplication(pair):
    x, y = pair
    if y.sign() == 0:
        return
    assert (x / y) * y == x


@given(quads())
def test_order_matches_decimal_oracle(x):
    d = as_decimal(x)
    assert (x > 0) == (d > 0)
    assert math.floor(x) == math.floor(d)
    assert math.ceil(x) == math.ceil(d)
    assert abs(Decimal(x.decimal(20)) - d) <= Decimal("1e-20")


@given(quads())
def test_literal_round_trip(x):
    assert parse_quadratic(x.literal()) == x


@given(quads(), st.integers(0, 6))
def test_integer_powers(x, n):
    expected = QuadraticNumber(1)
    for _ in range(n):
        expected = expected * x
    assert x**n == expected


def test_to_fraction_for_rationals():
    assert QuadraticNumber(3, 0, 4, 7).to_fraction() == Fraction(3, 4)
    with pytest.raises(ValueError):
        QuadraticNumber(0, 1, 1, 2).to_fraction()


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_quadratic("quad:(1,2)")


@given(quads(D=2), quads(D=3))
def test_cross_field_order_matches_decimal_oracle(x, y):
    if x.is_rational or y.is_rational:
        return
    assert (x < y) == (as_decimal(x) < as_decimal(y))
