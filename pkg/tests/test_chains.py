from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from sturmian_lab.cf import GOLDEN, CFExpansion, cf_value, convergents, parse_cf
from sturmian_lab.chains import (
    Chain,
    ChainError,
    GoldenChain,
    NeedsMoreLevels,
    NotSturmianError,
    chain_of,
    chain_states,
    chain_stats,
    characteristic_chain,
    classify_level,
    parse_chain,
    parse_golden_chain,
    predict_lambda,
    random_chain,
    rep_exact_periodic_golden,
    synthesize,
    synthesize_prefix,
)
from sturmian_lab.lab import mu4_family_value
from sturmian_lab.quadratic import QuadraticNumber
from sturmian_lab.rep import r_profile, rep_estimate
from sturmian_lab.words import WordStream, characteristic_prefix, standard_words

PHI = QuadraticNumber(-1, 1, 2, 5)
TABLE = standard_words(GOLDEN, 12)
C_PHI = characteristic_prefix(GOLDEN, 2000)
ONE_C_PHI = "1" + C_PHI
EXAMPLE_WORD = "10101" + "".join(TABLE.M(k) for k in range(4, 12))
GOLDEN_Q = [c.q for c in convergents(GOLDEN, 30)][1:]

golden_chains = st.builds(
    GoldenChain,
    st.text("ab", max_size=6),
    st.text("ab", min_size=1, max_size=5),
    st.booleans(),
)


# -- classification ----------------------------------------------------------


@pytest.mark.parametrize("k", range(1, 8))
def test_characteristic_word_is_case_ii(k):
    st_ = classify_level(C_PHI, TABLE, k)
    assert st_.case == "ii" and st_.w_len == TABLE.q(k)


@pytest.mark.parametrize("k", range(1, 8))
def test_shifted_characteristic_alternates(k):
    st_ = classify_level(ONE_C_PHI, TABLE, k)
    if k % 2:
        assert (st_.case, st_.w_len) == ("i", 1)
    else:
        assert st_.case == "iii"


def test_example_word_level_two():
    st_ = classify_level(EXAMPLE_WORD, TABLE, 2)
    assert (st_.case, st_.w_len) == ("i", 2)


def test_chain_of_characteristic():
    chain, states = chain_of(C_PHI, GOLDEN, 10)
    assert chain.cases == ("ii",) * 10
    assert [s.w_len for s in states] == GOLDEN_Q[1:11]


def test_chain_of_example_word():
    chain, states = chain_of(EXAMPLE_WORD, GOLDEN, 6)
    assert chain.cases == ("ii", "i", "iii", "ii", "ii", "ii")
    assert [s.w_len for s in states] == [1, 2, 2, 2, 5, 10]


def test_silver_steps_carry_unit_multiplicity():
    cf = parse_cf("[0;(2)]")
    rng = random.Random(3)
    seen = 0
    for _ in range(10):
        rho = Fraction(rng.randint(0, 999), 1000)
        chain, states = chain_of(WordStream.mechanical(cf_value(cf), rho), cf, 8)
        assert set(chain.t_map.values()) <= {1}
        seen += len(chain.t_map)
    assert seen > 0


def test_non_sturmian_word_rejected():
    with pytest.raises(NotSturmianError):
        chain_of("0" * 200, GOLDEN, 4)


# -- chains and synthesis ----------------------------------------------------


def test_synthesize_examples():
    assert synthesize_prefix(GOLDEN, parse_golden_chain("(b)"), 13) == "1011010110110"
    assert synthesize_prefix(GOLDEN, parse_golden_chain("(a)"), 300) == ONE_C_PHI[:300]
    chain = Chain(("ii", "i", "iii") + ("ii",) * 8)
    assert synthesize_prefix(GOLDEN, chain, 300) == EXAMPLE_WORD[:300]


def test_synthesize_needs_levels():
    with pytest.raises(NeedsMoreLevels):
        synthesize_prefix(GOLDEN, Chain(("ii", "ii", "ii")), 10_000)


def test_invalid_transitions():
    with pytest.raises(ChainError):
        chain_states(GOLDEN, Chain(("i", "iii", "iii")))
    with pytest.raises(ChainError):
        chain_states(parse_cf("[0;(2)]"), Chain(("i", "i", "ii"), {1: 2, 2: 1}, 1))
    with pytest.raises(ChainError):
        chain_states(GOLDEN, Chain(("i", "ii")))


def test_literals():
    c = parse_golden_chain("(iii)b a2 (b2a2)")
    assert (c.head, c.period, c.leading_iii) == ("baa", "bbaa", True)
    assert parse_golden_chain(c.literal()) == c
    j = Chain(("i", "ii", "iii"), {1: 1}, 2)
    assert parse_chain(str(j.to_json()).replace("'", '"').replace("None", "null")) == j
    assert Chain.from_json(j.to_json()) == j
    with pytest.raises(ChainError):
        parse_golden_chain("abc")


@settings(max_examples=60)
@given(golden_chains)
def test_golden_round_trip(chain):
    K = 14
    word = synthesize(GOLDEN, chain, 3 * GOLDEN_Q[K] + 2 * GOLDEN_Q[K - 1])
    found, _ = chain_of(word, GOLDEN, K)
    assert found.cases == chain.cases(K)
    assert found.golden_letters() == chain.to_chain(K).golden_letters()


@settings(max_examples=40)
@given(st.integers(0, 10_000))
def test_general_round_trip(seed):
    rng = random.Random(seed)
    cf = CFExpansion.periodic(0, [rng.randint(1, 4)], [rng.randint(1, 4) for _ in range(rng.randint(1, 3))])
    K = 7
    chain = random_chain(cf, K + 1, rng)
    word = synthesize_prefix(cf, chain, 1, K + 1)
    from sturmian_lab.chains import _determined_prefixes

    text = _determined_prefixes(cf, chain, K + 1)
    found, _ = chain_of(text, cf, K)
    want = chain.truncate(K)
    assert found.cases == want.cases and found.t_map == want.t_map and found.w1 == want.w1
    assert word == text[:1]


@settings(max_examples=30)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=3))
def test_characteristic_chain_matches_classification(period):
    cf = CFExpansion.periodic(0, (), period)
    K = 6
    q = [c.q for c in convergents(cf, K + 1)][1:]
    word = characteristic_prefix(cf, 3 * q[K] + 2 * q[K - 1])
    found, _ = chain_of(word, cf, K)
    want = characteristic_chain(cf, K)
    assert found.cases == want.cases and found.t_map == want.truncate(K).t_map and found.w1 == want.w1


# -- Lambda prediction -------------------------------------------------------


def test_characteristic_prediction():
    states = chain_states(GOLDEN, parse_golden_chain("(b)"), 12)
    pred = predict_lambda(states, GOLDEN)
    assert pred.values == [q - 1 for q in GOLDEN_Q[2:] if pred.lo <= q - 1 <= pred.hi]
    assert pred.values[:5] == [1, 2, 4, 7, 12]


def test_shifted_prediction():
    states = chain_states(GOLDEN, parse_golden_chain("(a)"), 12)
    pred = predict_lambda(states, GOLDEN)
    expected = set()
    for k in range(1, 12, 2):
        expected |= {GOLDEN_Q[k + 1], GOLDEN_Q[k + 2] - 1}
    assert set(pred.values) <= expected
    assert set(pred.tagged("L'1")) == set(pred.values)


def test_silver_case_two_elements():
    cf = parse_cf("[0;(2)]")
    chain = Chain(("ii", "i", "ii", "ii", "ii", "ii", "ii"), {2: 1}, 1)
    states = chain_states(cf, chain)
    pred = predict_lambda(states, cf)
    q = [c.q for c in convergents(cf, 8)][1:]
    w2 = states[1].w_len
    v1, u2, v2 = w2 + q[2] + q[1] - 1, 2 * q[2] + q[1] - 1, w2 + 2 * q[2] + q[1] - 1
    lo, hi = q[2] + q[1] - 1, q[3] + q[2] - 2
    assert pred.tagged("L2") == [n for n in (v1, u2, v2) if lo <= n <= hi]
    from sturmian_lab.chains import _determined_prefixes

    prof = r_profile(_determined_prefixes(cf, chain, 7), pred.hi)
    assert [n for n in prof.lambda_ if n >= pred.lo] == pred.values


@settings(max_examples=40)
@given(golden_chains, st.integers(2, 14))
def test_prediction_matches_brute_force(chain, K):
    pred = predict_lambda(chain_states(GOLDEN, chain, K), GOLDEN)
    if pred.hi < pred.lo:
        return
    word = synthesize_prefix(GOLDEN, chain, 2 * pred.hi + 2)
    prof = r_profile(word, pred.hi)
    assert [n for n in prof.lambda_ if n >= pred.lo] == pred.values


# -- statistics and exact rep ------------------------------------------------


def test_chain_stats_examples():
    s = chain_stats(parse_golden_chain("(iii)bbabbabaabbbab(ab)"))
    assert s.c_prefix == "(iii)bb"
    assert s.m[:3] == (1, 1, 2) and s.l[:3] == (2, 1, 3)
    s = chain_stats(parse_golden_chain("(ab)"))
    assert set(s.m) == set(s.l) == {1}
    s = chain_stats(parse_golden_chain("ab" + "bbaa" * 3 + "ba" + "bbaa" * 5 + "ba" + "(bbaabbaaba)"))
    assert s.e[:2] == (3, 5)


def test_chain_stats_single_letter_tail():
    with pytest.raises(ChainError):
        chain_stats(parse_golden_chain("ab(a)"))


def test_exact_rep_endpoints():
    assert rep_exact_periodic_golden("(b)") == 1 + PHI
    assert rep_exact_periodic_golden("(ab)") == 1 + 2 * PHI**3
    mu3 = 1 + PHI**2 * (PHI**4 + PHI**2 + 1) / (PHI**5 + PHI**3 + 1)
    assert rep_exact_periodic_golden("(b2a2)") == mu3
    assert rep_exact_periodic_golden("(b2a2b2a2ba)") == mu4_family_value(2)


def test_exact_rep_ignores_head():
    assert rep_exact_periodic_golden("(iii)abba(ab)") == rep_exact_periodic_golden("(ab)")


@pytest.mark.parametrize("literal", ["(ab)", "(b2a2)", "b(abb)"])
def test_estimates_approach_exact(literal):
    exact = rep_exact_periodic_golden(literal).to_decimal_fraction(100)
    chain = parse_golden_chain(literal)
    errs = [abs(rep_estimate(predict_lambda(chain_states(GOLDEN, chain, K), GOLDEN).values).value - exact) for K in (20, 30, 40)]
    assert errs[0] >= errs[1] >= errs[2]
    assert errs[2] < Fraction(1, 1000)
