from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import BASE_GROUPS, monoids, random_monoid
from covprop.corpus import s3_skewed, symmetric_group
from covprop.errors import SizeLimitExceeded
from covprop.monoid import cyclic_group, right_translation_dilation, trivial_group
from covprop.rational import SQRT2_OVER_2, Surd, below_cap
from covprop.upsilon import (
    find_isometric_isomorphism,
    gh_compact,
    gh_pointed,
    upsilon,
    upsilon_star,
    verify_result,
)
from oracles import feasible_brute, gh_compact_brute, isometric_isomorphism_brute, pair_ok

F = Fraction
Z2 = cyclic_group(2, [0, 1])
Z2w = cyclic_group(2, [0, F(3, 2)])
E = trivial_group()


def oracle_grid(value):
    pts = {F(k, 48) for k in range(1, 34)}
    if not isinstance(value, Surd):
        pts |= {value, value + F(1, 997), value - F(1, 997)}
    return sorted(p for p in pts if p > 0 and below_cap(p))


def assert_matches_brute(G1, G2, res):
    """Brute feasibility at a fixed grid must be exactly ``x > value`` (or ``>=`` when attained)."""
    for x in oracle_grid(res.value):
        expected = x > res.value or (x == res.value and res.attained)
        assert feasible_brute(G1, G2, x) == expected, (x, res.value)


def test_z2_vs_trivial_is_capped():
    res = upsilon(Z2, E)
    assert res.value == SQRT2_OVER_2 and res.witness is None
    assert_matches_brute(Z2, E, res)


def test_z2_vs_wide_z2():
    res = upsilon(Z2, Z2w)
    assert res.value == F(1, 2) and res.attained
    assert res.witness.forward == (0, 1) and res.witness.backward == (0, 1)
    assert verify_result(Z2, Z2w, res)
    assert_matches_brute(Z2, Z2w, res)


def test_identical_monoids_are_at_zero(corpus):
    for _, G in corpus:
        res = upsilon(G, G)
        assert res.value == 0 and not res.attained
        assert res.isomorphism is not None
        assert verify_result(G, G, res)


def test_unattained_infimum():
    # Z2 with d = 2 against the trivial monoid: feasible exactly for eps > 1/2
    W = cyclic_group(2, [0, 2])
    res = upsilon(W, E)
    assert res.value == F(1, 2) and not res.attained
    assert not feasible_brute(W, E, F(1, 2))
    assert feasible_brute(W, E, F(1, 2) + F(1, 1000))
    assert verify_result(W, E, res)


def test_far_apart_elements_drop_out():
    W = cyclic_group(2, [0, 100])
    assert upsilon(W, E).value == F(1, 100)


SMALL = ["trivial", "Z2", "Z2_3/2", "Z2_1/2", "Z2_5", "Z2_relabel", "Z3"]


def test_small_corpus_matches_brute(corpus):
    named = dict(corpus)
    for a, b in itertools.combinations_with_replacement(SMALL, 2):
        G1, G2 = named[a], named[b]
        res = upsilon(G1, G2)
        assert_matches_brute(G1, G2, res)
        if res.witness is not None:
            eps = res.witness_epsilon
            assert pair_ok(G1, G2, res.witness.forward, res.witness.backward, eps, 1 / eps)


def test_random_small_pairs_match_brute():
    rng = random.Random(11)
    for _ in range(25):
        G1, G2 = (
            random_monoid(nm, [F(rng.randint(1, 6), rng.randint(1, 3)) for _ in BASE_GROUPS[nm]])
            for nm in (rng.choice(["Z1", "Z2", "Z3"]), rng.choice(["Z1", "Z2", "Z3"]))
        )
        assert_matches_brute(G1, G2, upsilon(G1, G2))


def test_four_element_spot_checks(corpus):
    named = dict(corpus)
    for a, b in [("Z4", "V4_111"), ("Z4_skew", "Z4"), ("V4_112", "Z3"), ("Z4", "Z2")]:
        G1, G2 = named[a], named[b]
        res = upsilon(G1, G2)
        pts = {F(1, 5), F(1, 2), F(2, 3)}
        if not isinstance(res.value, Surd):
            pts |= {res.value, res.value + F(1, 997)}
            if res.value > F(1, 997):
                pts.add(res.value - F(1, 997))
        for x in sorted(p for p in pts if below_cap(p)):
            expected = x > res.value or (x == res.value and res.attained)
            assert feasible_brute(G1, G2, x) == expected, (a, b, x)


def test_isomorphism_search_matches_permutation_brute(corpus):
    for (a, G1), (b, G2) in itertools.combinations_with_replacement(corpus, 2):
        if G1.n != G2.n:
            continue
        fast = find_isometric_isomorphism(G1, G2)
        brute = isometric_isomorphism_brute(G1, G2)
        assert (fast is None) == (brute is None), (a, b)
        if fast is not None:
            assert fast == tuple(brute)


def test_strategies_and_jobs_agree(corpus):
    named = dict(corpus)
    for a, b in [("Z4", "Z4_skew"), ("Z2", "Z3"), ("V4_123", "Z4"), ("Z5", "Z5_skew")]:
        scan = upsilon(named[a], named[b])
        assert upsilon(named[a], named[b], strategy="bisect").value == scan.value
        par = upsilon(named[a], named[b], jobs=2)
        assert par.value == scan.value and par.witness == scan.witness


def test_budget():
    with pytest.raises(SizeLimitExceeded):
        upsilon(cyclic_group(13), E)
    assert upsilon(cyclic_group(13), E, budget=13).value == SQRT2_OVER_2


@settings(max_examples=25)
@given(monoids(), monoids())
def test_symmetry_and_cap(G1, G2):
    a, b = upsilon(G1, G2), upsilon(G2, G1)
    assert a.value == b.value
    assert a.value <= SQRT2_OVER_2
    assert verify_result(G1, G2, a)


def test_gh_pointed_examples(corpus):
    for _, G in corpus:
        assert gh_pointed(G, G).value == 0
    assert gh_pointed(Z2, Z2w).value == F(1, 4)
    assert gh_pointed(Z2, E).value == F(1, 2)


def test_gh_compact_matches_relation_brute(corpus):
    named = dict(corpus)
    names = ["trivial", "Z2", "Z2_3/2", "Z3", "Z4", "V4_123", "Z4_skew"]
    for a, b in itertools.combinations_with_replacement(names, 2):
        if named[a].n * named[b].n > 12:
            continue
        assert gh_compact(named[a], named[b]).value == gh_compact_brute(named[a], named[b]), (a, b)


def test_upsilon_star_bi_invariant_equals_plain(corpus):
    named = dict(corpus)
    for a, b in [("Z2", "Z2_3/2"), ("Z4", "V4_112"), ("S3_word", "S3_half"), ("Z3", "Z3")]:
        assert upsilon_star(named[a], named[b]).value == upsilon(named[a], named[b]).value


def test_upsilon_star_dilation_gap_forces_cap():
    skew = s3_skewed()
    word = symmetric_group(1, 2)
    gap = max(right_translation_dilation(skew, g) for g in range(skew.n)) - 1
    assert gap >= 1
    assert upsilon_star(skew, word).value == SQRT2_OVER_2
    assert upsilon_star(skew, skew).value == 0
