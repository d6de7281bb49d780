"""Classical covariant tunnels: target sets, extent, reach, magnitude, and a
search for upper bounds on the covariant propinquity.

A tunnel is an ambient finite metric space ``Z`` with isometric embeddings of
both spaces and an almost-iso pair between the monoids.  Functions on ``Z``
restrict onto each space, which is a quantum isometry by Lipschitz extension.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .almost_iso import AlmostIsoPair, check_almost_iso
from .errors import InvalidTunnel, SeminormExceeded, SizeLimitExceeded
from .lp import solve_lp
from .monoid import ball
from .qcms import (
    FiniteQCMS,
    LipschitzDynamicalSystem,
    lipschitz_constant,
    validate_system,
)
from .rational import SQRT2_OVER_2, Value, below_cap, to_fraction
from .upsilon import DEFAULT_BUDGET, SolverStats, critical_values, feasible_pairs, probe_points

__all__ = [
    "CovariantTunnel",
    "TargetSetBox",
    "CovpropResult",
    "validate_tunnel",
    "envelope",
    "target_set",
    "extent",
    "reach",
    "reach_at_state",
    "magnitude",
    "self_tunnel",
    "bridge_space",
    "bridge_tunnel",
    "relation_distortion",
    "minimal_correspondences",
    "covprop_upper_bound",
]


@dataclass(frozen=True)
class CovariantTunnel:
    ambient: FiniteQCMS
    embed1: tuple[int, ...]
    embed2: tuple[int, ...]
    pair: AlmostIsoPair
    epsilon: Fraction

    def __post_init__(self):
        object.__setattr__(self, "embed1", tuple(int(v) for v in self.embed1))
        object.__setattr__(self, "embed2", tuple(int(v) for v in self.embed2))
        object.__setattr__(self, "epsilon", to_fraction(self.epsilon))

    def embed(self, j: int) -> tuple[int, ...]:
        return self.embed1 if j == 1 else self.embed2


@dataclass(frozen=True)
class TargetSetBox:
    """Intervals ``[lo[i], hi[i]]`` at the ambient points ``points[i]``."""

    points: tuple[int, ...]
    lo: tuple[Fraction, ...]
    hi: tuple[Fraction, ...]

    def contains(self, b: Sequence) -> bool:
        return all(l <= to_fraction(v) <= h for l, v, h in zip(self.lo, b, self.hi))


def validate_tunnel(
    t: CovariantTunnel,
    space1: FiniteQCMS,
    space2: FiniteQCMS,
    sys1: LipschitzDynamicalSystem | None = None,
    sys2: LipschitzDynamicalSystem | None = None,
) -> CovariantTunnel:
    """Check injective isometric embeddings and, given systems, the pair at ``(eps, 1/eps)``."""
    Z = t.ambient
    for j, emb, X in ((1, t.embed1, space1), (2, t.embed2, space2)):
        if len(emb) != X.n or any(not 0 <= z < Z.n for z in emb):
            raise InvalidTunnel(f"embedding {j} has the wrong shape")
        if len(set(emb)) != len(emb):
            raise InvalidTunnel(f"embedding {j} is not injective")
        for x in range(X.n):
            for y in range(X.n):
                if Z.d(emb[x], emb[y]) != X.d(x, y):
                    raise InvalidTunnel(f"embedding {j} is not isometric", witness=(j, x, y))
    if t.epsilon <= 0:
        raise InvalidTunnel("tunnel epsilon must be positive")
    if sys1 is not None and sys2 is not None:
        res = check_almost_iso(sys1.monoid, sys2.monoid, t.pair.retag(t.epsilon, 1 / t.epsilon))
        if not res:
            raise InvalidTunnel("pair fails at the tunnel's epsilon", witness=res.witness)
    return t


def envelope(Z: FiniteQCMS, emb: Sequence[int], a: Sequence, l) -> TargetSetBox:
    """McShane-Whitney bounds at every ambient point for ``a`` given on ``emb``."""
    a = [to_fraction(v) for v in a]
    l = to_fraction(l)
    lo, hi = [], []
    for z in range(Z.n):
        lo.append(max(av - l * Z.d(z, y) for av, y in zip(a, emb)))
        hi.append(min(av + l * Z.d(z, y) for av, y in zip(a, emb)))
    return TargetSetBox(tuple(range(Z.n)), tuple(lo), tuple(hi))


def target_set(t: CovariantTunnel, a: Sequence, l, *, source: int = 1) -> TargetSetBox:
    """Values at the other copy of all ``l``-Lipschitz extensions of ``a``.

    ``a`` lives on space ``source`` (1 by default); the box is reported at the
    embedded points of the other space.
    """
    l = to_fraction(l)
    emb, other = (t.embed1, t.embed2) if source == 1 else (t.embed2, t.embed1)
    sub = FiniteQCMS(
        tuple(str(i) for i in range(len(emb))),
        tuple(tuple(t.ambient.d(x, y) for y in emb) for x in emb),
    )
    La = lipschitz_constant(sub, a)
    if l < La:
        raise SeminormExceeded(f"l = {l} is below the Lipschitz constant {La}", witness=(str(l), str(La)))
    full = envelope(t.ambient, emb, a, l)
    return TargetSetBox(other, tuple(full.lo[z] for z in other), tuple(full.hi[z] for z in other))


def extent(t: CovariantTunnel) -> Fraction:
    """Largest distance from an ambient point to either embedded copy."""
    Z = t.ambient
    return max(min(Z.d(z, y) for y in emb) for emb in (t.embed1, t.embed2) for z in range(Z.n))


@functools.lru_cache(maxsize=65536)
def _inner_inf(classes: tuple, cost: tuple) -> tuple[Fraction, int]:
    """``min over psi of max over classes of W1(mu_c, psi K_c)`` as one LP.

    ``classes`` holds ``(mu, K)`` with ``mu`` a measure on the source copy and
    ``K`` the target kernel (rows over target points); ``cost[a][y]`` is the
    ambient distance.  Returns ``(value, 1)`` (the LP count).
    """
    nj = len(cost)
    nk = len(cost[0])
    # variable layout: psi (nk) | t | per class: slack, then plan over supp(mu) x nk
    var = 0
    psi = list(range(nk))
    var = nk
    tvar = var
    var += 1
    layout = []
    for mu, K in classes:
        slack = var
        var += 1
        supp = [a for a in range(nj) if mu[a] != 0]
        plan = {}
        for a in supp:
            for y in range(nk):
                plan[(a, y)] = var
                var += 1
        layout.append((mu, K, slack, supp, plan))
    rows, rhs = [], []

    def row():
        return [Fraction(0)] * var

    r = row()
    for p in psi:
        r[p] = Fraction(1)
    rows.append(r)
    rhs.append(Fraction(1))
    for mu, K, slack, supp, plan in layout:
        for a in supp:
            r = row()
            for y in range(nk):
                r[plan[(a, y)]] = Fraction(1)
            rows.append(r)
            rhs.append(mu[a])
        for y in range(nk):
            r = row()
            for a in supp:
                r[plan[(a, y)]] = Fraction(1)
            for z in range(nk):
                if K[z][y]:
                    r[psi[z]] -= K[z][y]
            rows.append(r)
            rhs.append(Fraction(0))
        r = row()
        for (a, y), v in plan.items():
            r[v] = cost[a][y]
        r[slack] = Fraction(1)
        r[tvar] = Fraction(-1)
        rows.append(r)
        rhs.append(Fraction(0))
    c = [Fraction(0)] * var
    c[tvar] = Fraction(1)
    return solve_lp(c, rows, rhs).value, 1


def reach_at_state(
    sys_j: LipschitzDynamicalSystem,
    sys_k: LipschitzDynamicalSystem,
    t: CovariantTunnel,
    j: int,
    weights: Sequence[Fraction],
    eps: Fraction | None = None,
    stats: SolverStats | None = None,
) -> Fraction:
    """``inf_psi sup_g W1(phi alpha_j^g, psi alpha_k^{s(g)})`` for the state ``weights`` on space ``j``."""
    eps = t.epsilon if eps is None else to_fraction(eps)
    s = t.pair.forward if j == 1 else t.pair.backward
    emb_j, emb_k = t.embed(j), t.embed(3 - j)
    Z = t.ambient
    cost = tuple(tuple(Z.d(emb_j[a], emb_k[y]) for y in range(len(emb_k))) for a in range(len(emb_j)))
    Gj = sys_j.monoid
    classes = set()
    for g in ball(Gj, Gj.identity, 1 / eps).members:
        Kg = sys_j.action[g].kernel
        mu = tuple(
            sum((w * Kg[y][a] for y, w in enumerate(weights) if w), Fraction(0)) for a in range(len(emb_j))
        )
        classes.add((mu, sys_k.action[s[g]].kernel))
    value, lps = _inner_inf(tuple(sorted(classes)), cost)
    if stats is not None:
        stats.lps += lps
    return value


def reach(
    sys1: LipschitzDynamicalSystem,
    sys2: LipschitzDynamicalSystem,
    t: CovariantTunnel,
    eps: Fraction | None = None,
    stats: SolverStats | None = None,
) -> Fraction:
    """The tunnel's reach, with the outer supremum taken over Dirac states.

    For fixed ``g`` the transport cost is jointly convex in the two states, so
    the inner ``inf sup`` is convex in the outer state and its supremum over
    the simplex is attained at a vertex.
    """
    best = Fraction(0)
    for j, sj, sk in ((1, sys1, sys2), (2, sys2, sys1)):
        n = sj.space.n
        for x in range(n):
            weights = tuple(Fraction(int(i == x)) for i in range(n))
            best = max(best, reach_at_state(sj, sk, t, j, weights, eps, stats))
    return best


def magnitude(
    sys1: LipschitzDynamicalSystem,
    sys2: LipschitzDynamicalSystem,
    t: CovariantTunnel,
    eps: Fraction | None = None,
    stats: SolverStats | None = None,
) -> Fraction:
    return max(reach(sys1, sys2, t, eps, stats), extent(t))


def self_tunnel(sys: LipschitzDynamicalSystem, epsilon=1) -> CovariantTunnel:
    ids = tuple(range(sys.monoid.n))
    pts = tuple(range(sys.space.n))
    return CovariantTunnel(sys.space, pts, pts, AlmostIsoPair(ids, ids, epsilon, 1 / to_fraction(epsilon)), epsilon)


def relation_distortion(X1: FiniteQCMS, X2: FiniteQCMS, rel: Iterable[tuple[int, int]]) -> Fraction:
    rel = list(rel)
    best = Fraction(0)
    for (x, y), (x2, y2) in itertools.combinations(rel, 2):
        best = max(best, abs(X1.d(x, x2) - X2.d(y, y2)))
    return best


def bridge_space(X1: FiniteQCMS, X2: FiniteQCMS, rel, eta) -> tuple[FiniteQCMS, tuple[int, ...], tuple[int, ...]]:
    """Disjoint union with ``d(x1, x2) = min over (p, q) in rel of d1(x1, p) + eta + d2(q, x2)``.

    A metric whenever ``eta >= dis(rel)/2`` and ``eta > 0``.  With ``eta = 0``
    and a distortion-free bijection the copies are glued instead.
    """
    eta = to_fraction(eta)
    rel = sorted(set(rel))
    n1, n2 = X1.n, X2.n
    if eta == 0:
        if relation_distortion(X1, X2, rel) != 0 or len(rel) != n1 or len({y for _, y in rel}) != n2 or n1 != n2:
            raise InvalidTunnel("eta = 0 needs a distortion-free bijection")
        partner = dict(rel)
        return X1, tuple(range(n1)), tuple(sorted(range(n1), key=lambda x: partner[x]))
    n = n1 + n2
    D = [[Fraction(0)] * n for _ in range(n)]
    for a in range(n1):
        for b in range(n1):
            D[a][b] = X1.d(a, b)
    for a in range(n2):
        for b in range(n2):
            D[n1 + a][n1 + b] = X2.d(a, b)
    for x1 in range(n1):
        for x2 in range(n2):
            v = min(X1.d(x1, p) + eta + X2.d(q, x2) for p, q in rel)
            D[x1][n1 + x2] = D[n1 + x2][x1] = v
    names = tuple(f"1:{p}" for p in X1.points) + tuple(f"2:{p}" for p in X2.points)
    return FiniteQCMS(names, tuple(tuple(r) for r in D)), tuple(range(n1)), tuple(range(n1, n))


def bridge_tunnel(sys1, sys2, rel, eta, pair: AlmostIsoPair, epsilon) -> CovariantTunnel:
    Z, e1, e2 = bridge_space(sys1.space, sys2.space, rel, eta)
    return CovariantTunnel(Z, e1, e2, pair, epsilon)


def minimal_correspondences(X1: FiniteQCMS, X2: FiniteQCMS, limit: int = 200_000):
    """All relations ``graph(phi) | graph(psi)^T``, deduplicated, sorted by distortion.

    Every correspondence contains one of these, and shrinking a relation never
    raises its distortion.  Raises :class:`SizeLimitExceeded` past ``limit``.
    """
    n1, n2 = X1.n, X2.n
    total = n2**n1 * n1**n2
    if total > limit:
        raise SizeLimitExceeded(f"{total} candidate correspondences exceed the limit {limit}", witness=(n1, n2))
    seen = set()
    for phi in itertools.product(range(n2), repeat=n1):
        for psi in itertools.product(range(n1), repeat=n2):
            rel = frozenset([(x, phi[x]) for x in range(n1)] + [(psi[y], y) for y in range(n2)])
            seen.add(rel)
    out = [(relation_distortion(X1, X2, rel), tuple(sorted(rel))) for rel in seen]
    out.sort()
    return out


def _greedy_correspondence(X1: FiniteQCMS, X2: FiniteQCMS):
    """One cheap correspondence for large spaces: nearest points by distance profile."""
    def profile(X, x):
        return sorted(X.dist[x])

    rel = set()
    for x in range(X1.n):
        best = min(range(X2.n), key=lambda y: (sum(abs(a - b) for a, b in zip(profile(X1, x), profile(X2, y))), y))
        rel.add((x, best))
    for y in range(X2.n):
        best = min(range(X1.n), key=lambda x: (sum(abs(a - b) for a, b in zip(profile(X1, x), profile(X2, y))), x))
        rel.add((best, y))
    rel = tuple(sorted(rel))
    return [(relation_distortion(X1, X2, rel), rel)]


@dataclass(frozen=True)
class CovpropResult:
    """Upper bound on the covariant propinquity with the tunnel realizing it.

    When ``attained`` is false the bound is an infimum: ``tunnel`` has
    magnitude at most its own epsilon, which is slightly above ``value``.
    """

    value: Value
    tunnel: CovariantTunnel | None
    attained: bool
    magnitude: Fraction | None = None
    eta: Fraction | None = None
    correspondence: tuple[tuple[int, int], ...] | None = None
    stats: SolverStats = field(default_factory=SolverStats, compare=False)


def _tunnel_family(sys1, sys2, eta_grid, exhaustive_max: int):
    X1, X2 = sys1.space, sys2.space
    if X1.n <= exhaustive_max and X2.n <= exhaustive_max:
        rels = minimal_correspondences(X1, X2)
    else:
        rels = _greedy_correspondence(X1, X2)
    fam = []
    for dis, rel in rels:
        # zero distortion forces an isometric bijection, which glues the copies
        etas = {Fraction(0)} if dis == 0 else {dis / 2}
        etas.update(e for e in eta_grid if e > 0 and e >= dis / 2)
        fam.extend((eta, dis, rel) for eta in etas)
    fam.sort()
    return [(eta, rel) for eta, _, rel in fam]


def covprop_upper_bound(
    sys1: LipschitzDynamicalSystem,
    sys2: LipschitzDynamicalSystem,
    *,
    budget: int = DEFAULT_BUDGET,
    eta_grid: Sequence = (),
    pairs_per_probe: int = 4,
    exhaustive_max: int = 5,
) -> CovpropResult:
    """Least epsilon (capped at sqrt(2)/2) reached by the bridge tunnel family.

    Probes the same epsilon grid as the monoid solver.  For each probe it
    tries the first ``pairs_per_probe`` pairs from the feasibility search
    (plus the identity pair when both monoids coincide) against every bridge
    space, smallest toll first, and keeps the least magnitude.
    """
    for s in (sys1, sys2):
        validate_system(s)
        if s.monoid.n > budget:
            raise SizeLimitExceeded(f"monoid has {s.monoid.n} elements, budget is {budget}", witness=(s.monoid.n,))
    G1, G2 = sys1.monoid, sys2.monoid
    eta_grid = [to_fraction(e) for e in eta_grid]
    family = _tunnel_family(sys1, sys2, eta_grid, exhaustive_max)
    criticals = critical_values(G1, G2)
    stats = SolverStats()
    tunnels_cache = {}
    for point, kind, index in probe_points(criticals):
        pairs, nodes = feasible_pairs(G1, G2, point, pairs_per_probe)
        stats.nodes += nodes
        stats.probes += 1
        if G1 == G2:
            ident = AlmostIsoPair(tuple(range(G1.n)), tuple(range(G1.n)), point, 1 / point)
            if ident not in pairs:
                pairs.append(ident)
        if not pairs:
            continue
        lower = Fraction(0) if (kind == 0 and index < 0) else criticals[index]
        upper = criticals[index + 1] if (kind == 0 and index + 1 < len(criticals)) else None
        best = None
        for eta, rel in family:
            if best is not None and eta >= best[0]:
                break
            key = (eta, rel)
            if key not in tunnels_cache:
                tunnels_cache[key] = bridge_space(sys1.space, sys2.space, rel, eta)
            Z, e1, e2 = tunnels_cache[key]
            for pair in pairs:
                t = CovariantTunnel(Z, e1, e2, pair, point)
                m = magnitude(sys1, sys2, t, point, stats)
                if best is None or m < best[0]:
                    best = (m, t, eta, rel)
        if best is None:
            continue
        m, t, eta, rel = best
        if kind == 1:
            if m <= point:
                return CovpropResult(point, t, True, m, eta, rel, stats)
            continue
        # open gap (lower, upper): the tunnel works at every eps in the gap >= m
        target = max(lower, m)
        in_gap = below_cap(target) if upper is None else target < upper
        if not in_gap:
            continue
        if m > lower:
            t = CovariantTunnel(t.ambient, t.embed1, t.embed2, t.pair.retag(m, 1 / m), m)
            return CovpropResult(m, t, True, m, eta, rel, stats)
        return CovpropResult(lower, t, False, m, eta, rel, stats)
    return CovpropResult(SQRT2_OVER_2, None, False, None, None, None, stats)
