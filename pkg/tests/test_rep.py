from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sturmian_lab.cf import GOLDEN, CFExpansion, cf_value
from sturmian_lab.chains import parse_golden_chain, synthesize
from sturmian_lab.rep import (
    InsufficientData,
    InsufficientPrefix,
    RepeatIndex,
    longest_repeated_suffixes,
    profile_csv,
    r_naive,
    r_naive_profile,
    r_profile,
    rep_estimate,
)
from sturmian_lab.words import WordStream, characteristic_prefix, mechanical_prefix

C_PHI = characteristic_prefix(GOLDEN, 200)

slopes = st.builds(
    lambda pre, per: CFExpansion.periodic(0, pre, per),
    st.lists(st.integers(1, 4), max_size=2),
    st.lists(st.integers(1, 4), min_size=1, max_size=3),
)


def test_naive_examples():
    assert r_naive(C_PHI, 1) == 3
    assert r_naive("000000", 2) == 3
    assert r_naive(C_PHI, 4) == 9
    with pytest.raises(InsufficientPrefix):
        r_naive("0110", 3)


@given(st.text("01", min_size=1, max_size=120))
def test_online_index_matches_batch_kernel(w):
    idx = RepeatIndex()
    online = [idx.extend(c) for c in w]
    assert online == longest_repeated_suffixes(w).tolist()


@given(st.text("01", min_size=1, max_size=80))
def test_ell_matches_definition(w):
    ell = longest_repeated_suffixes(w)
    for m in range(1, len(w) + 1):
        n = int(ell[m - 1])
        # the length-n suffix of w[:m] occurs earlier; n+1 does not
        assert n == 0 or w.find(w[m - n : m], 0, m - 1) != -1
        assert n == m - 1 or w.find(w[m - n - 1 : m], 0, m - 1) == -1


@settings(max_examples=40)
@given(slopes, st.fractions(0, 1, max_denominator=40))
def test_profile_matches_oracle_on_sturmian(cf, rho):
    w = mechanical_prefix(cf_value(cf), rho, "floor", 1500)
    prof = r_profile(w, 300)
    assert list(prof.r) == r_naive_profile(w, 300)


@given(st.text("01", min_size=40, max_size=200))
def test_profile_matches_oracle_on_arbitrary_words(w):
    N = len(w) // 4
    try:
        naive = r_naive_profile(w, N)
    except InsufficientPrefix:
        with pytest.raises(InsufficientPrefix):
            r_profile(w, N)
        return
    assert list(r_profile(w, N).r) == naive


def test_golden_lambda_head():
    assert r_profile(WordStream.characteristic(GOLDEN), 12).lambda_ == (1, 2, 4, 7, 12)


def test_periodic_word_never_reaches_bound():
    prof = r_profile("01" * 400, 100)
    assert all(prof.r[n] <= 2 * n for n in range(2, 101))
    assert prof.lambda_ == (1,)


@settings(max_examples=20)
@given(slopes, st.fractions(0, 1, max_denominator=40))
def test_sturmian_profile_increments(cf, rho):
    prof = r_profile(mechanical_prefix(cf_value(cf), rho, "floor", 4000), 500)
    lam = set(prof.lambda_)
    for n in range(2, 501):
        assert prof.r[n] <= 2 * n + 1
        if n not in lam:
            assert prof.r[n] == prof.r[n - 1] + 1


def test_golden_estimate_at_ten_thousand():
    est = rep_estimate(r_profile(WordStream.characteristic(GOLDEN), 10_000), window=0.7)
    assert abs(est.value - Fraction("1.618034")) < Fraction(1, 1000)


def test_ab_chain_estimate_at_ten_thousand():
    word = synthesize(GOLDEN, parse_golden_chain("(ab)"), 30_000)
    est = rep_estimate(r_profile(word, 10_000), window=0.7)
    assert abs(est.value - Fraction("1.472136")) < Fraction(1, 1000)


def test_estimate_details():
    est = rep_estimate([1, 2, 4, 7, 12, 20, 33], window=0)
    assert est.value == 1 + Fraction(1, 2)
    assert est.detail[-1] == 1 + Fraction(20, 33)
    lo, hi = est.bar
    assert lo <= est.value <= hi
    with pytest.raises(InsufficientData):
        rep_estimate([1, 2, 3], window=0.5)


def test_prepending_does_not_change_the_limit():
    x = WordStream.characteristic(GOLDEN)
    y = x.prepend("0110")
    diffs = [abs(rep_estimate(r_profile(x, N)).value - rep_estimate(r_profile(y, N)).value) for N in (1_000, 10_000, 100_000)]
    assert diffs[0] > diffs[1] > diffs[2]
    assert diffs[2] < Fraction(1, 100)


def test_profile_csv_rows():
    text = profile_csv(r_profile(C_PHI, 5))
    rows = text.strip().splitlines()
    assert rows[0] == "n,r(n),r(n)/n,in_lambda"
    assert rows[1].startswith("1,3,") and rows[1].endswith(",1")
    assert len(rows) == 6


def test_million_letters_is_fast():
    w = characteristic_prefix(GOLDEN, 1_000_000)
    ell = longest_repeated_suffixes(w)
    assert ell.dtype == np.int32 and ell.shape == (1_000_000,)


@settings(max_examples=20)
@given(slopes, st.fractions(0, 1, max_denominator=40))
def test_lambda_meets_every_two_level_window(cf, rho):
    from sturmian_lab.cf import convergents

    N = 3000
    prof = r_profile(mechanical_prefix(cf_value(cf), rho, "floor", 2 * N + 2), N)
    q = [c.q for c in convergents(cf, 40)][1:]
    for k in range(len(q) - 2):
        if q[k + 2] > N:
            break
        assert any(q[k] <= n <= q[k + 2] for n in prof.lambda_)
