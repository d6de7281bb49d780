"""Random instance builders shared by the unit and acceptance tests."""

from __future__ import annotations

import random
from fractions import Fraction

from conftest import BASE_GROUPS, random_monoid
from covprop.almost_iso import AlmostIsoPair, identity_pair
from covprop.limits import MonoidChain
from covprop.monoid import cyclic_group, trivial_group
from covprop.qcms import (
    FiniteQCMS,
    LipschitzDynamicalSystem,
    identity_kernel,
    lipschitz_constant,
    permutation_kernel,
)
from covprop.tunnels import CovariantTunnel, bridge_space, extent, target_set
from covprop.upsilon import upsilon
from oracles import all_pairs

F = Fraction


def subspace(Z: FiniteQCMS, emb) -> FiniteQCMS:
    return FiniteQCMS(tuple(str(i) for i in range(len(emb))), tuple(tuple(Z.d(a, b) for b in emb) for a in emb))


def trivial_system(X: FiniteQCMS) -> LipschitzDynamicalSystem:
    return LipschitzDynamicalSystem(X, trivial_group(), (identity_kernel(X.n),))


def random_space(rng: random.Random, n: int, denominators=(1, 2, 3, 4)) -> FiniteQCMS:
    """Shortest-path closure of random positive rational weights."""
    w = [[F(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            w[i][j] = w[j][i] = F(rng.randint(1, 8), rng.choice(denominators))
    for k in range(n):
        for i in range(n):
            for j in range(n):
                w[i][j] = min(w[i][j], w[i][k] + w[k][j])
    return FiniteQCMS(tuple(f"x{i}" for i in range(n)), tuple(tuple(r) for r in w))


def random_line(rng: random.Random, n: int) -> FiniteQCMS:
    pts = sorted(rng.sample(range(0, 9), n))
    return FiniteQCMS(tuple(map(str, pts)), tuple(tuple(F(abs(p - q), 2) for q in pts) for p in pts))


def _random_dynamics(rng: random.Random, X: FiniteQCMS) -> LipschitzDynamicalSystem:
    kind = rng.choice(["trivial", "z2_id", "z2_swap"])
    if kind == "trivial":
        return trivial_system(X)
    G = cyclic_group(2, [0, rng.choice([F(1, 2), F(1), F(2)])])
    swap = kind == "z2_swap" and X.n == 2
    return LipschitzDynamicalSystem(X, G, (identity_kernel(X.n), permutation_kernel([1, 0]) if swap else identity_kernel(X.n)))


def random_tunnel(rng: random.Random, max_ambient: int = 4, max_space: int = 3):
    """Two embedded subspaces of a random ambient space, small dynamics, any identity-preserving pair."""
    Z = random_space(rng, rng.randint(1, max_ambient))
    e1 = tuple(rng.sample(range(Z.n), rng.randint(1, min(max_space, Z.n))))
    e2 = tuple(rng.sample(range(Z.n), rng.randint(1, min(max_space, Z.n))))
    s1, s2 = _random_dynamics(rng, subspace(Z, e1)), _random_dynamics(rng, subspace(Z, e2))
    fwd, bwd = rng.choice(list(all_pairs(s1.monoid, s2.monoid)))
    eps = rng.choice([F(1, 4), F(1, 2), F(1)])
    return s1, s2, CovariantTunnel(Z, e1, e2, AlmostIsoPair(fwd, bwd, eps, 1 / eps), eps)


def draw_in_box(rng: random.Random, box) -> list[Fraction]:
    return [lo + (hi - lo) * F(rng.randint(0, 12), 12) for lo, hi in zip(box.lo, box.hi)]


def tunnel_inequality_violations(trials: int, seed: int = 0) -> int:
    """Draw ``b, b'`` from the target-set boxes of ``a, a'`` on random bridge tunnels
    and count failures of ``|b - b'| <= |a - a'| + 2 l extent`` (max norms)."""
    rng = random.Random(seed)
    bad = 0
    for _ in range(trials):
        n1, n2 = rng.randint(1, 3), rng.randint(1, 3)
        X1, X2 = random_line(rng, n1), random_line(rng, n2)
        rel = [(x, rng.randrange(n2)) for x in range(n1)] + [(rng.randrange(n1), y) for y in range(n2)]
        eta = F(rng.randint(1, 8), 4)
        Z, e1, e2 = bridge_space(X1, X2, rel, eta)
        t = CovariantTunnel(Z, e1, e2, identity_pair(trivial_group()), 1)
        a = [F(rng.randint(-8, 8), 4) for _ in range(n1)]
        a2 = [F(rng.randint(-8, 8), 4) for _ in range(n1)]
        l = max(lipschitz_constant(X1, a), lipschitz_constant(X1, a2)) + F(rng.randint(0, 4), 4)
        b = draw_in_box(rng, target_set(t, a, l))
        b2 = draw_in_box(rng, target_set(t, a2, l))
        lhs = max(abs(u - v) for u, v in zip(b, b2))
        rhs = max(abs(u - v) for u, v in zip(a, a2)) + 2 * l * extent(t)
        bad += lhs > rhs
    return bad


def random_chain(rng: random.Random, length: int, names=("Z1", "Z2", "Z3")) -> MonoidChain:
    """Random small groups linked by solver witnesses (redrawn until every link is attained)."""
    while True:
        monoids = [
            random_monoid(nm, [F(rng.randint(1, 6), rng.randint(1, 3)) for _ in BASE_GROUPS[nm]])
            for nm in (rng.choice(names) for _ in range(length))
        ]
        links, eps = [], []
        for a, b in zip(monoids, monoids[1:]):
            res = upsilon(a, b)
            if res.witness is None:
                break
            links.append(res.witness)
            eps.append(res.witness_epsilon)
        else:
            return MonoidChain(tuple(monoids), tuple(links), tuple(eps))
