from __future__ import annotations

import itertools
import os
import sys
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from covprop.corpus import monoid_corpus, system_corpus  # noqa: E402
from covprop.monoid import FiniteMetricMonoid, group_from_length  # noqa: E402

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", max_examples=15, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def _cyclic_table(n):
    return [[(i + j) % n for j in range(n)] for i in range(n)]


def _klein_table():
    return [[i ^ j for j in range(4)] for i in range(4)]


def _s3_table():
    perms = sorted(itertools.permutations(range(3)))
    index = {p: i for i, p in enumerate(perms)}
    return [[index[tuple(p[q[i]] for i in range(3))] for q in perms] for p in perms]


BASE_GROUPS = {
    "Z1": _cyclic_table(1),
    "Z2": _cyclic_table(2),
    "Z3": _cyclic_table(3),
    "Z4": _cyclic_table(4),
    "V4": _klein_table(),
    "Z5": _cyclic_table(5),
    "S3": _s3_table(),
}


def length_closure(table, weights):
    """Right-word length from positive generator weights (``w[g] = w[g^-1]``), i.e. a
    left-invariant metric ``d(x, y) = l(x^-1 y)``."""
    n = len(table)
    ident = next(i for i in range(n) if all(table[i][j] == j for j in range(n)))
    inv = [next(j for j in range(n) if table[i][j] == ident) for i in range(n)]
    w = {g: min(weights[g], weights[inv[g]]) for g in range(n) if g != ident}
    # Dijkstra on the right Cayley graph (tiny, so a plain scan suffices)
    best = {ident: Fraction(0)}
    done = set()
    while len(done) < n:
        x = min((v for v in best if v not in done), key=lambda v: best[v])
        done.add(x)
        for s, c in w.items():
            y = table[x][s]
            if y not in best or best[x] + c < best[y]:
                best[y] = best[x] + c
    length = [best[g] for g in range(n)]
    return ident, length, inv


def random_monoid(name: str, weights) -> FiniteMetricMonoid:
    table = BASE_GROUPS[name]
    ident, length, inv = length_closure(table, weights)
    names = [str(i) for i in range(len(table))]
    return group_from_length(names, table, ident, length, inv)


rationals = st.builds(Fraction, st.integers(1, 8), st.sampled_from([1, 2, 3, 4]))


@st.composite
def monoids(draw, names=("Z1", "Z2", "Z3", "Z4", "V4")):
    name = draw(st.sampled_from(list(names)))
    n = len(BASE_GROUPS[name])
    weights = draw(st.lists(rationals, min_size=n, max_size=n))
    return random_monoid(name, weights)


@pytest.fixture(scope="session")
def corpus():
    return monoid_corpus()


@pytest.fixture(scope="session")
def systems():
    return system_corpus()


def random_verified_pairs(rng, count, names=("Z1", "Z2", "Z3", "Z4", "V4")):
    """``count`` verified pairs ``(G1, G2, pair)`` at ``(eps, 1/eps)``, drawn with ``rng``.

    Monoids get random word lengths; ``eps`` is a random probe point of the
    pair; a random pair is chosen among the first few feasible ones.
    """
    from covprop.upsilon import critical_values, feasible_pairs, probe_points

    out = []
    while len(out) < count:
        G1, G2 = (random_monoid(nm, [Fraction(rng.randint(1, 8), rng.randint(1, 4)) for _ in BASE_GROUPS[nm]])
                  for nm in (rng.choice(names), rng.choice(names)))
        pts = [p for p, _, _ in probe_points(critical_values(G1, G2))]
        eps = rng.choice(pts)
        pairs, _ = feasible_pairs(G1, G2, eps, limit=6)
        if pairs:
            out.append((G1, G2, rng.choice(pairs)))
    return out


@st.composite
def spaces(draw, max_points=3):
    """Random finite metric spaces via shortest-path closure of random weights."""
    from covprop.qcms import FiniteQCMS

    n = draw(st.integers(1, max_points))
    w = [[None] * n for _ in range(n)]
    for i in range(n):
        w[i][i] = Fraction(0)
        for j in range(i + 1, n):
            w[i][j] = w[j][i] = draw(rationals)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if w[i][k] + w[k][j] < w[i][j]:
                    w[i][j] = w[i][k] + w[k][j]
    return FiniteQCMS(tuple(f"x{i}" for i in range(n)), tuple(tuple(r) for r in w))


def prob_vector(draw, n, q=6):
    counts = draw(st.lists(st.integers(0, q), min_size=n, max_size=n))
    if sum(counts) == 0:
        counts[draw(st.integers(0, n - 1))] = 1
    total = sum(counts)
    return tuple(Fraction(c, total) for c in counts)


@st.composite
def kernels(draw, rows, cols):
    from covprop.qcms import MarkovMap

    return MarkovMap(tuple(prob_vector(draw, cols) for _ in range(rows)))
