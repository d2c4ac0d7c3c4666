"""The constructive witness finder and its cyclic EGZ building blocks."""

from __future__ import annotations

import itertools
import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from zerosum.group import IDENTITY, Element, make_cyclic, make_group
from zerosum.sequence import Sequence, has_product_one_of_length, parse_sequence, verify_witness
from zerosum.structure import EGZ_EVEN, EGZ_ODD, GAO_EVEN, family_member, generating_pairs, quotients
from zerosum.witness import (
    FALLBACK_DP,
    QUOTIENT_COMBINE,
    BelowThreshold,
    NoDominantPair,
    block_decompose,
    commutes,
    egz_cyclic,
    egz_cyclic_inverse_pair,
    find_exp_product_one,
    find_two_disjoint,
    fuzz,
    plan_for,
    quotient_egz_constant,
    random_sequence,
    reflections_commute,
    rotation_commutes_with_reflection,
    zero_sum_positions,
)


def assert_product_one(G, S, w, length):
    assert w is not None
    assert len(w) == length
    assert G.product(w.elements) == IDENTITY
    assert verify_witness(S, w)


# -- cyclic EGZ ----------------------------------------------------------------------


def test_egz_cyclic_examples():
    w = egz_cyclic(3, [0, 0, 1, 1, 2])
    assert len(w) == 3 and sum(g.k for g in w.elements) % 3 == 0
    for n in range(2, 9):
        for a in range(n):
            w = egz_cyclic(n, [a] * (2 * n - 1))
            assert w.elements == (Element(0, a),) * n


def test_egz_cyclic_below_threshold():
    with pytest.raises(BelowThreshold):
        egz_cyclic(4, [0, 0, 0, 1, 1, 1])
    w = egz_cyclic(4, [1, 1, 1, 1])
    assert len(w) == 4


def test_egz_cyclic_on_sequences():
    G = make_group(8, 3)
    S = parse_sequence("y^3^[7] . y^5^[8]", G)
    w = egz_cyclic(8, S)
    assert sum(g.k for g in w.elements) % 8 == 0
    assert all(S.elements()[p] == g for p, g in zip(w.positions, w.elements))
    with pytest.raises(ValueError):
        egz_cyclic(8, parse_sequence("x^[15]", G))


@pytest.mark.parametrize("n", range(2, 6))
def test_egz_cyclic_exhaustive_small(n):
    for combo in itertools.combinations_with_replacement(range(n), 2 * n - 1):
        w = egz_cyclic(n, combo)
        assert len(w) == n and sum(g.k for g in w.elements) % n == 0
        assert sorted(combo[p] for p in w.positions) == sorted(g.k for g in w.elements)


@given(st.integers(2, 12), st.data())
def test_zero_sum_positions_against_brute(n, data):
    values = data.draw(st.lists(st.integers(0, n - 1), min_size=0, max_size=9))
    m = data.draw(st.integers(0, 9))
    target = data.draw(st.integers(0, n - 1))
    got = zero_sum_positions(n, values, m, target)
    brute = any(sum(c) % n == target for c in itertools.combinations(values, m)) if m <= len(values) else False
    assert (got is not None) == brute
    if got is not None:
        assert len(set(got)) == m and sum(values[i] for i in got) % n == target


def test_inverse_pair_examples():
    assert egz_cyclic_inverse_pair(8, [1] * 7 + [3] * 7, 2) is None
    assert egz_cyclic_inverse_pair(8, [0] * 7 + [1] * 7, 2) == (0, 1, 7, 7)
    with pytest.raises(ValueError):
        egz_cyclic_inverse_pair(8, [0] * 7 + [1] * 7, 1)
    with pytest.raises(ValueError):
        egz_cyclic_inverse_pair(8, [0] * 7 + [1] * 7, 7)
    with pytest.raises(ValueError):
        egz_cyclic_inverse_pair(8, [0] * 7, 2)
    with pytest.raises(NoDominantPair):
        egz_cyclic_inverse_pair(6, [0] * 5 + [2, 2, 3], 4)


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_inverse_pair_bounds_exhaustive(n):
    for k in range(2, n // 2 + 3):
        for combo in itertools.combinations_with_replacement(range(n), 2 * n - k):
            free = not any(sum(c) % n == 0 for c in itertools.combinations(combo, n))
            try:
                got = egz_cyclic_inverse_pair(n, combo, k)
            except NoDominantPair:
                assert free and n % 2 == 0 and k >= n // 2 + 1
                continue
            assert (got is not None) == free
            if got:
                a, b, va, vb = got
                assert combo.count(a) == va and combo.count(b) == vb
                assert min(va, vb) >= n - 2 * k + 3
                assert va + vb >= 2 * n - 2 * k + 2
                assert math.gcd(a - b, n) == 1


# -- commutation facts --------------------------------------------------------------------


@pytest.mark.parametrize("n,s", [(15, 4), (12, 5), (8, 3), (20, 9), (24, 5)])
def test_commutation_predicates(n, s):
    G = make_group(n, s)
    for a in range(n):
        for b in range(n):
            r, f = Element(0, a), Element(1, b)
            assert rotation_commutes_with_reflection(G, a) == commutes(G, r, f)
            assert reflections_commute(G, a, b) == commutes(G, Element(1, a), f)


def test_commutation_matches_n1_rule():
    """For n = n1 n2 odd: y^a commutes with reflections iff a = 0 mod n1."""
    G = make_group(15, 4)
    for a in range(15):
        assert rotation_commutes_with_reflection(G, a) == (a % 5 == 0)


# -- block decomposition --------------------------------------------------------------------


def test_block_decompose_example():
    G = make_group(15, 4)
    q = next(q for q in quotients(G) if q.case == "c")
    assert quotient_egz_constant(q) == 5
    S = parse_sequence("y^1^[45]", G)
    dec = block_decompose(G, q, S)
    assert len(dec.blocks) == 14 and len(dec.remainder) == 3
    greedy = block_decompose(G, q, S, stop_below=3)
    assert len(greedy.blocks) == 15


def _check_decomposition(G, q, S, dec):
    used = [p for b in dec.blocks for p in b.positions] + list(dec.remainder)
    assert sorted(used) == list(range(len(S)))
    for b in dec.blocks:
        assert len(b.positions) == dec.block_len
        assert b.h in q.elements and b.h in b.h_options
        assert all(h in q.elements for h in b.h_options)
        assert verify_witness(S, b.witness) and b.witness.product == b.h


@given(st.sampled_from([(15, 4), (12, 5), (8, 5), (24, 5), (20, 9)]), st.integers(0, 2**32), st.data())
def test_block_decompose_properties(ns, seed, data):
    G = make_group(*ns)
    q = data.draw(st.sampled_from(quotients(G)))
    S = random_sequence(G, data.draw(st.integers(0, 3 * G.n)), random.Random(seed))
    dec = block_decompose(G, q, S)
    _check_decomposition(G, q, S, dec)
    again = block_decompose(G, q, S)
    assert dec.to_json() == again.to_json()


def test_quotient_egz_constants():
    kinds = {}
    for ns in [(15, 4), (8, 5), (12, 5), (8, 3)]:
        for q in quotients(make_group(*ns)):
            kinds[q.quotient_kind] = quotient_egz_constant(q)
    assert kinds == {"C_3": 5, "D_10": 15, "Klein": 5, "D_12": 12, "C_4": 7, "D_8": 8}


# -- the finder -----------------------------------------------------------------------------


def test_plans():
    labels = {ns: plan_for(make_group(*ns)).label for ns in [(15, 4), (8, 3), (8, 5), (12, 5), (30, 11), (24, 13)]}
    assert labels == {
        (15, 4): "odd",
        (8, 3): "even-n1",
        (8, 5): "klein",
        (12, 5): "even-n2",
        (30, 11): "even-n1",
        (24, 13): "klein",
    }
    assert plan_for(make_group(10, 9)) is None


@pytest.mark.parametrize("n,s", [(8, 3), (8, 5), (12, 5), (12, 7), (15, 4), (30, 11), (24, 13), (21, 8)])
def test_random_at_threshold(n, s):
    G = make_group(n, s)
    length = 2 * n if n % 2 == 0 else 3 * n
    rep = fuzz(G, length, G.exponent(), 25, seed=n * 100 + s)
    assert rep.successes == 25, rep.failures


def test_family_has_no_witness(g83):
    S = parse_sequence("y^1^[7] . 1^[7] . x", g83)
    out = find_exp_product_one(g83, S, 8)
    assert not out.found and out.strategy == FALLBACK_DP
    assert has_product_one_of_length(S, 8, method="cosets") is None
    assert not find_exp_product_one(g83, S, 8, allow_fallback=False).found


@pytest.mark.parametrize("n,s,kind", [(8, 3, EGZ_EVEN), (8, 5, EGZ_EVEN), (12, 5, EGZ_EVEN), (15, 4, EGZ_ODD), (8, 3, GAO_EVEN)])
def test_family_plus_one_term(n, s, kind):
    """Every extension of an extremal family member by one element has a witness."""
    G = make_group(n, s)
    target = G.order if kind == GAO_EVEN else G.exponent()
    pair = generating_pairs(G)[-1]
    S0 = family_member(G, kind, pair, (1, 0, 3))
    assert not find_exp_product_one(G, S0, target).found
    for g in G.elements():
        S = S0.appended(g)
        out = find_exp_product_one(G, S, target)
        assert_product_one(G, S, out.witness, target)


def test_spec_odd_example():
    G = make_group(15, 4)
    S = family_member(G, EGZ_ODD, generating_pairs(G)[0], (1, 2, 0)).appended(IDENTITY)
    assert len(S) == 45
    out = find_exp_product_one(G, S, 30)
    assert_product_one(G, S, out.witness, 30)


def test_two_disjoint(g83, g85):
    S = parse_sequence("y^1^[16] . 1^[8]", g83)
    a, b = find_two_disjoint(g83, S)
    assert_product_one(g83, S, a.witness, 8)
    rest = S.remove(a.witness.as_sequence(g83))
    assert_product_one(g83, rest, b.witness, 8)
    both = Sequence.from_elements(g83, a.witness.elements + b.witness.elements)
    assert both.divides(S)
    assert g83.product(a.witness.elements + b.witness.elements) == IDENTITY
    rng = random.Random(5)
    for _ in range(20):
        S = random_sequence(g85, 24, rng)
        pair = find_two_disjoint(g85, S)
        assert pair is not None
        a, b = pair
        assert_product_one(g85, S, a.witness, 8)
        assert_product_one(g85, S.remove(a.witness.as_sequence(g85)), b.witness, 8)


def test_gao_target(g85):
    rng = random.Random(9)
    for _ in range(20):
        S = random_sequence(g85, 24, rng)
        out = find_exp_product_one(g85, S, 16)
        assert_product_one(g85, S, out.witness, 16)


def test_strategy_consistency_with_dp():
    """Whenever the quotient route succeeds, the exact DP agrees."""
    G = make_group(12, 5)
    rng = random.Random(2)
    for _ in range(30):
        S = random_sequence(G, rng.randint(16, 24), rng)
        out = find_exp_product_one(G, S, 12, allow_fallback=False)
        dp = has_product_one_of_length(S, 12, method="cosets")
        if out.found:
            assert out.strategy == QUOTIENT_COMBINE and dp is not None
        full = find_exp_product_one(G, S, 12)
        assert full.found == (dp is not None)


def test_finder_edge_cases(g83):
    S = parse_sequence("y^1^[3]", g83)
    assert not find_exp_product_one(g83, S, 8).found
    with pytest.raises(ValueError):
        find_exp_product_one(make_group(8, 5), S, 8)
    C = make_cyclic(5)
    out = find_exp_product_one(C, Sequence.from_counts(C, {Element(0, 2): 9}), 5)
    assert_product_one(C, Sequence.from_counts(C, {Element(0, 2): 9}), out.witness, 5)


def test_fuzz_determinism_and_empty(g83):
    a = fuzz(g83, 16, 8, 10, seed=3)
    b = fuzz(g83, 16, 8, 10, seed=3)
    assert a.to_json() == b.to_json()
    empty = fuzz(g83, 16, 8, 0)
    assert empty.successes == 0 and empty.failures == []
