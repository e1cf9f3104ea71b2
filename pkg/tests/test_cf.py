from __future__ import annotations

import itertools
from decimal import Decimal, getcontext
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from sturmian_lab.cf import (
    GOLDEN,
    CFExpansion,
    NotIrrational,
    SourceExhausted,
    UnsupportedSource,
    cf_value,
    convergents,
    eval_bracket,
    min_spectrum,
    mirror_limits,
    mirror_value,
    parse_cf,
    quadratic_to_cf,
)
from sturmian_lab.quadratic import QuadraticNumber

getcontext().prec = 50
SILVER = parse_cf("[0;(2)]")

periodic_cfs = st.builds(
    lambda pre, per: CFExpansion.periodic(0, pre, per),
    st.lists(st.integers(1, 5), max_size=3),
    st.lists(st.integers(1, 5), min_size=1, max_size=4),
)


def test_golden_denominators():
    assert [c.q for c in convergents(GOLDEN, 5)] == [0, 1, 1, 2, 3, 5, 8]


def test_silver_denominators():
    assert [c.q for c in convergents(SILVER, 4)] == [0, 1, 2, 5, 12, 29]


def test_minus_one_entry():
    assert [(c.p, c.q) for c in convergents(GOLDEN, -1)] == [(1, 0)]


@given(periodic_cfs, st.integers(1, 25))
def test_convergent_determinant(cf, k):
    cs = convergents(cf, k)
    for prev, cur in zip(cs, cs[1:]):
        assert cur.p * prev.q - prev.p * cur.q == (-1) ** (prev.k)


def test_finite_source_exhausts():
    with pytest.raises(SourceExhausted):
        convergents(parse_cf("[0;1,2,3]"), 4)


def test_brackets():
    assert eval_bracket(GOLDEN, 4) == (Fraction(3, 5), Fraction(5, 8))
    assert eval_bracket(SILVER, 2) == (Fraction(2, 5), Fraction(5, 12))


@given(periodic_cfs, st.integers(1, 20))
def test_bracket_contains_value_with_width(cf, k):
    lo, hi = eval_bracket(cf, k)
    qs = convergents(cf, k + 1)
    assert hi - lo == Fraction(1, qs[-2].q * qs[-1].q)
    assert lo < cf_value(cf) < hi


def test_quadratic_to_cf_examples():
    assert quadratic_to_cf(QuadraticNumber(-1, 1, 2, 5)).literal() == "[0;(1)]"
    assert quadratic_to_cf(QuadraticNumber(-1, 1, 1, 2)).literal() == "[0;(2)]"
    with pytest.raises(NotIrrational):
        quadratic_to_cf(QuadraticNumber(1, 0, 2, 1))
    with pytest.raises(ValueError):
        quadratic_to_cf(QuadraticNumber(1, 1, 1, 2))


@given(periodic_cfs)
def test_quadratic_round_trip(cf):
    x = cf_value(cf)
    back = quadratic_to_cf(x)
    assert cf_value(back) == x
    assert back.quotients(20) == cf.quotients(20)


def test_parse_forms():
    assert parse_cf("[0;1,(2,3)]").quotients(6) == [1, 2, 3, 2, 3, 2]
    assert parse_cf("quad:(-1,1,2,5)").literal() == "[0;(1)]"
    with pytest.raises(ValueError):
        parse_cf("0;1,2")


def test_mirror_values():
    assert mirror_value(GOLDEN, 3) == Fraction(7, 5)
    assert mirror_value(SILVER, 1) == Fraction(4, 3)
    assert mirror_value(parse_cf("[0;1,4,2]"), 1) == Fraction(3, 2)


def test_min_spectrum_golden():
    phi = QuadraticNumber(-1, 1, 2, 5)
    assert min_spectrum(GOLDEN) == 1 + phi * phi
    assert min_spectrum(GOLDEN).decimal(6) == "1.381966"


def test_min_spectrum_silver_against_mirror_oracle():
    exact = min_spectrum(SILVER)
    assert exact == 1 + 1 / (2 + QuadraticNumber.sqrt(2))
    oracle = min(mirror_value(SILVER, k) for k in range(50, 61))
    assert abs(Decimal(oracle.numerator) / oracle.denominator - Decimal(exact.decimal(30))) < Decimal("1e-9")
    assert exact.decimal(6) == "1.292893"


def test_min_spectrum_two_limits():
    cf = parse_cf("[0;(1,2)]")
    limits = [v for _, v in mirror_limits(cf)]
    assert len(limits) == 2
    assert min_spectrum(cf) == min(limits)


@given(periodic_cfs)
def test_mirror_values_approach_limits(cf):
    limits = dict(mirror_limits(cf))
    P, pre = len(cf.period), len(cf.preperiod)
    for j, lim in limits.items():
        ks = [k for k in range(pre + 1, pre + 1 + 8 * P) if (k - 1 - pre) % P == j][-3:]
        errs = [abs(mirror_value(cf, k) - lim.to_decimal_fraction(200)) for k in ks]
        assert errs[-1] <= errs[0]
        assert errs[-1] < Fraction(1, 10**3)


def test_stream_estimate():
    stream = CFExpansion.bounded(0, lambda: itertools.repeat(1), 1)
    est = min_spectrum(stream)
    assert abs(est.value - min_spectrum(GOLDEN).to_decimal_fraction(100)) < Fraction(1, 10**9)


def test_stream_bound_enforced():
    stream = CFExpansion.bounded(0, lambda: iter([1, 7]), 3)
    with pytest.raises(ValueError):
        stream.quotient(2)


def test_finite_min_spectrum_unsupported():
    with pytest.raises(UnsupportedSource):
        min_spectrum(parse_cf("[0;1,2]"))
