from __future__ import annotations

import itertools
import pickle
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import monoids
from covprop.corpus import s3_skewed, symmetric_group
from covprop.errors import (
    IdentityNotUnit,
    InverseInvalid,
    LeftInvarianceViolated,
    MalformedTable,
    NotAGroup,
    NotAMetric,
    NotAssociative,
)
from covprop.monoid import (
    FiniteMetricMonoid,
    ball,
    cyclic_group,
    group_inverse,
    inverse_modulus,
    relabel,
    right_translation_dilation,
    trivial_group,
    validate_monoid,
)
from oracles import axioms_hold

F = Fraction


def z2(d=1):
    return FiniteMetricMonoid(["0", "1"], 0, [[0, 1], [1, 0]], [[0, d], [d, 0]])


def test_z2_is_valid():
    G = z2()
    assert validate_monoid(G) is G


def test_left_invariance_witness():
    G = FiniteMetricMonoid(["0", "1"], 0, [[0, 1], [1, 0]], [[0, 1], [2, 0]])
    with pytest.raises(LeftInvarianceViolated) as info:
        validate_monoid(G)
    assert info.value.witness == (1, 0, 1)


def test_non_associative_table():
    # a*a = b, a*b = a, b*a = b, b*b = a (identity e = 0, a = 1, b = 2)
    mult = [[0, 1, 2], [1, 2, 1], [2, 2, 1]]
    G = FiniteMetricMonoid(["e", "a", "b"], 0, mult, [[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    with pytest.raises(NotAssociative):
        validate_monoid(G)


def test_other_axiom_failures():
    with pytest.raises(MalformedTable):
        validate_monoid(FiniteMetricMonoid(["0", "1"], 0, [[0, 2], [1, 0]], [[0, 1], [1, 0]]))
    with pytest.raises(IdentityNotUnit):
        validate_monoid(FiniteMetricMonoid(["0", "1"], 0, [[1, 1], [1, 1]], [[0, 1], [1, 0]]))
    with pytest.raises(NotAMetric) as info:
        validate_monoid(z2(0))
    assert info.value.axiom == "definiteness"
    with pytest.raises(InverseInvalid):
        validate_monoid(FiniteMetricMonoid(["0", "1"], 0, [[0, 1], [1, 0]], [[0, 1], [1, 0]], inverse=[0, 0]))


def test_triangle_failure_reported():
    # Z3 with lengths 1, 1 would be fine; a non-group table cannot be left invariant,
    # so break the triangle on a 3-element group with d(0,1)=d(0,2)=1, d(1,2)=3
    G = FiniteMetricMonoid(
        ["0", "1", "2"],
        0,
        [[(a + b) % 3 for b in range(3)] for a in range(3)],
        [[0, 1, 1], [1, 0, 3], [1, 3, 0]],
    )
    with pytest.raises((NotAMetric, LeftInvarianceViolated)):
        validate_monoid(G)


def test_ball_examples():
    Z3 = cyclic_group(3)
    assert ball(Z3, 0, 1).members == (0, 1, 2)
    assert ball(Z3, 0, 0).members == (0,)
    assert ball(cyclic_group(2, [0, F(3, 2)]), 0, 1).members == (0,)


def test_dilation_examples():
    for G in (cyclic_group(4), symmetric_group(1, 2)):
        validate_monoid(G)
        assert all(right_translation_dilation(G, g) == 1 for g in range(G.n))
    skew = validate_monoid(s3_skewed())
    assert right_translation_dilation(skew, skew.identity) == 1
    assert max(right_translation_dilation(skew, g) for g in range(skew.n)) > 1


def test_absorbing_element_has_zero_dilation():
    # {e, a, z} with z absorbing; the metric cannot be left invariant, so this
    # structure is rejected by validation, but the dilation itself is defined.
    mult = [[0, 1, 2], [1, 1, 2], [2, 2, 2]]
    G = FiniteMetricMonoid(["e", "a", "z"], 0, mult, [[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    assert right_translation_dilation(G, 2) == 0
    with pytest.raises(LeftInvarianceViolated):
        validate_monoid(G)


def test_inverse_modulus_examples():
    assert inverse_modulus(z2(), F(1, 2)) == 1
    Z4 = cyclic_group(4)
    for eps in (F(1, 3), F(1), F(3, 2)):
        w = inverse_modulus(Z4, eps)
        assert w >= eps
    assert inverse_modulus(Z4, F(10)) == Z4.diameter() + 1


def test_inverse_modulus_is_largest_valid_on_skewed_group():
    G = s3_skewed()
    inv = group_inverse(G)
    for eps in (F(1, 2), F(1), F(3, 2), F(2), F(5, 2)):
        w = inverse_modulus(G, eps)
        ok = all(G.d(inv[g], inv[h]) < eps for g in range(G.n) for h in range(G.n) if G.d(g, h) < w)
        assert ok
        # any larger realized distance value breaks the implication
        for v in sorted(set(G.distance_values()) | {G.diameter() + 1}):
            if v > w:
                assert not all(
                    G.d(inv[g], inv[h]) < eps for g in range(G.n) for h in range(G.n) if G.d(g, h) < v
                )


def test_not_a_group():
    G = FiniteMetricMonoid(["e", "z"], 0, [[0, 1], [1, 1]], [[0, 1], [1, 0]])
    with pytest.raises(NotAGroup):
        group_inverse(G)


def test_equality_hash_and_pickle():
    a, b = cyclic_group(3), cyclic_group(3)
    assert a == b and hash(a) == hash(b)
    assert a != cyclic_group(3, [0, 2, 2])
    assert pickle.loads(pickle.dumps(a)) == a
    with pytest.raises(AttributeError):
        a.identity = 1


def test_relabel_keeps_validity():
    G = cyclic_group(4)
    H = relabel(G, [0, 3, 1, 2])
    validate_monoid(H)
    assert sorted(H.distance_values()) == sorted(G.distance_values())


@given(monoids(), st.integers(0, 15), st.integers(0, 15))
def test_ball_monotone(G, a, b):
    r1, r2 = sorted((F(a, 4), F(b, 4)))
    for c in range(G.n):
        assert set(ball(G, c, r1).members) <= set(ball(G, c, r2).members)


@given(monoids())
def test_random_length_monoids_validate(G):
    validate_monoid(G)
    assert axioms_hold(G.n, G.identity, G.mult.tolist(), G.dist)


def _perturbations(G):
    n = G.n
    mult = G.mult.tolist()
    dist = [list(r) for r in G.dist]
    vals = sorted(set(G.distance_values()) | {F(1, 2), F(7, 3)})
    for a, b in itertools.product(range(n), repeat=2):
        for v in range(n):
            if v != mult[a][b]:
                m2 = [r[:] for r in mult]
                m2[a][b] = v
                yield m2, dist
        for v in vals:
            if v != dist[a][b]:
                d2 = [r[:] for r in dist]
                d2[a][b] = v
                yield mult, d2


@pytest.mark.parametrize("name", ["Z2", "Z3", "Z4_skew", "V4_112"])
def test_single_entry_perturbations(corpus, name):
    G = dict(corpus)[name]
    seen_bad = 0
    for mult, dist in _perturbations(G):
        cand = FiniteMetricMonoid(G.elements, G.identity, mult, dist)
        valid = axioms_hold(G.n, G.identity, mult, dist)
        try:
            validate_monoid(cand)
            accepted = True
        except (MalformedTable, NotAssociative, IdentityNotUnit, NotAMetric, LeftInvarianceViolated):
            accepted = False
        assert accepted == valid
        seen_bad += not valid
    assert seen_bad > 0


def test_trivial_group():
    G = validate_monoid(trivial_group())
    assert G.n == 1 and right_translation_dilation(G, 0) == 0
