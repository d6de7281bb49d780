from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import monoids, random_verified_pairs
from covprop.almost_iso import (
    AlmostIsoPair,
    check_almost_iso,
    compose,
    constant_pair,
    derived_properties,
    identity_pair,
    inverse_estimate,
)
from covprop.corpus import s3_skewed
from covprop.errors import PreconditionFailed
from covprop.monoid import cyclic_group, trivial_group
from covprop.upsilon import feasible_pairs
from oracles import pair_ok

F = Fraction
Z2 = cyclic_group(2, [0, 1])
E = trivial_group()


@pytest.mark.parametrize("eps,r", [(F(0), F(5)), (F(1, 3), F(100)), (F(2), F(0))])
def test_identity_pair_passes(corpus, eps, r):
    for _, G in corpus:
        assert check_almost_iso(G, G, identity_pair(G, eps, r))


def test_z2_to_trivial_examples():
    assert check_almost_iso(Z2, E, constant_pair(Z2, E, 1, 1))
    res = check_almost_iso(Z2, E, constant_pair(Z2, E, F(1, 2), 2))
    assert not res
    assert res.witness == (1, 1, 0, 0)


def test_identity_must_map_to_identity():
    Z3 = cyclic_group(3)
    res = check_almost_iso(Z3, Z3, AlmostIsoPair((1, 1, 2), (0, 1, 2), 5, 0))
    assert not res and res.witness == (1, 0)


@given(monoids(), monoids(), st.data())
def test_check_matches_direct_loop(G1, G2, data):
    fwd = data.draw(st.lists(st.integers(0, G2.n - 1), min_size=G1.n, max_size=G1.n))
    bwd = data.draw(st.lists(st.integers(0, G1.n - 1), min_size=G2.n, max_size=G2.n))
    fwd[G1.identity] = G2.identity
    bwd[G2.identity] = G1.identity
    eps = F(data.draw(st.integers(0, 12)), 4)
    r = F(data.draw(st.integers(0, 16)), 4)
    assert bool(check_almost_iso(G1, G2, AlmostIsoPair(fwd, bwd, eps, r))) == pair_ok(G1, G2, fwd, bwd, eps, r)


@given(monoids(), monoids(), st.data())
def test_check_is_monotone(G1, G2, data):
    fwd = data.draw(st.lists(st.integers(0, G2.n - 1), min_size=G1.n, max_size=G1.n))
    bwd = data.draw(st.lists(st.integers(0, G1.n - 1), min_size=G2.n, max_size=G2.n))
    fwd[G1.identity] = G2.identity
    bwd[G2.identity] = G1.identity
    eps, r = F(data.draw(st.integers(0, 12)), 4), F(data.draw(st.integers(0, 16)), 4)
    de, dr = F(data.draw(st.integers(0, 4)), 4), F(data.draw(st.integers(0, 4)), 4)
    if check_almost_iso(G1, G2, AlmostIsoPair(fwd, bwd, eps, r)):
        assert check_almost_iso(G1, G2, AlmostIsoPair(fwd, bwd, eps + de, max(F(0), r - dr)))


def test_compose_examples():
    p = identity_pair(Z2, F(1, 10), 10)
    out = compose(Z2, Z2, Z2, p, p)
    assert out.epsilon == F(1, 5) and out.radius == 5
    assert out.forward == (0, 1) and out.backward == (0, 1)
    with pytest.raises(PreconditionFailed):
        # Z2(d=1) -> {e} fails at radius 10/7, where the non-identity element is in the ball
        compose(Z2, E, Z2, constant_pair(Z2, E, F(7, 10), F(10, 7)), constant_pair(E, Z2, F(7, 10), F(10, 7)))
    with pytest.raises(PreconditionFailed):
        compose(Z2, Z2, Z2, identity_pair(Z2, F(3, 4), F(4, 3)), p)


def test_compose_through_trivial_for_wide_z2():
    # with d = 10 the non-identity element sits outside every relevant ball
    W = cyclic_group(2, [0, 10])
    p = constant_pair(W, E, F(7, 10), F(10, 7))
    q = constant_pair(E, W, F(7, 10), F(10, 7))
    out = compose(W, E, W, p, q)
    assert out.epsilon == F(7, 5)
    assert check_almost_iso(W, W, out)


def test_derived_examples():
    for G in (Z2, cyclic_group(4), s3_skewed()):
        assert derived_properties(G, G, identity_pair(G, F(1, 2), 2)).all_pass
    rep = derived_properties(Z2, E, constant_pair(Z2, E, 1, 1))
    assert rep.all_pass and all(rep[i].ok for i in range(1, 6))


def test_derived_detects_bad_pairs():
    # constant maps from a wide Z2 at a small epsilon break assertion (1)
    rep = derived_properties(Z2, E, constant_pair(Z2, E, F(1, 4), 4))
    assert not rep.all_pass
    assert not rep[1].ok


def test_random_verified_pairs_satisfy_all_lemmas():
    rng = random.Random(20261016)
    for G1, G2, pair in random_verified_pairs(rng, 60):
        assert check_almost_iso(G1, G2, pair)
        assert derived_properties(G1, G2, pair).all_pass
        assert inverse_estimate(G1, G2, pair).ok
        assert inverse_estimate(G2, G1, pair.reversed()).ok


def test_compose_random_chains():
    rng = random.Random(7)
    done = 0
    for G1, G2, p in random_verified_pairs(rng, 80):
        if p.epsilon * p.epsilon > F(1, 2):
            continue
        # second leg: a verified self-pair of G2
        for eps in (F(1, 10), F(1, 5), F(1, 3)):
            q, _ = feasible_pairs(G2, G2, eps, limit=3)
            if q:
                out = compose(G1, G2, G2, p, q[-1])
                assert check_almost_iso(G1, G2, out)
                assert out.epsilon == p.epsilon + eps
                done += 1
    assert done > 20
