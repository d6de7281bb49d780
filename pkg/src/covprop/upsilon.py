"""Exact monoid Gromov-Hausdorff distance and its companions.

Every atomic condition in the feasibility problem ("is ``g`` in the
``1/eps`` ball", "is this difference ``<= eps``") flips only at finitely many
critical values of ``eps``.  Probing each critical value and one rational
point inside each gap between consecutive criticals therefore decides the
infimum exactly, including the case where it is not attained.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels
from .almost_iso import AlmostIsoPair, check_almost_iso, scaled_pair_data
from .errors import LemmaViolation, SizeLimitExceeded
from .monoid import FiniteMetricMonoid, ball, right_translation_dilation
from .rational import SQRT2_OVER_2, Value, below_cap, common_denominator, scale_to_int

__all__ = [
    "SolverStats",
    "UpsilonResult",
    "GHResult",
    "upsilon",
    "upsilon_star",
    "gh_pointed",
    "gh_compact",
    "feasible_pairs",
    "critical_values",
    "probe_points",
    "find_isometric_isomorphism",
    "rational_below_cap",
    "verify_result",
    "DEFAULT_BUDGET",
]

DEFAULT_BUDGET = 12
GH_BUDGET = 7


@dataclass
class SolverStats:
    nodes: int = 0
    probes: int = 0
    lps: int = 0

    def add(self, other: "SolverStats") -> None:
        self.nodes += other.nodes
        self.probes += other.probes
        self.lps += other.lps


@dataclass(frozen=True)
class UpsilonResult:
    """Solver output.

    ``value`` is a Fraction or ``SQRT2_OVER_2``.  ``attained`` tells whether
    ``value`` itself is feasible; when it is not, ``witness`` is certified at
    ``witness_epsilon``, a rational just above ``value``.  A zero value comes
    with ``isomorphism``, an isometric monoid isomorphism as an index map.
    """

    value: Value
    witness: AlmostIsoPair | None
    criticals_tested: tuple[Fraction, ...]
    attained: bool
    witness_epsilon: Fraction | None = None
    isomorphism: tuple[int, ...] | None = None
    probes: tuple[tuple[Fraction, bool], ...] = ()
    stats: SolverStats = field(default_factory=SolverStats, compare=False)


@dataclass(frozen=True)
class GHResult:
    value: Value
    correspondence: tuple[tuple[int, int], ...] | None
    witness_epsilon: Fraction | None
    attained: bool


def rational_below_cap(lo: Fraction) -> Fraction:
    """A rational strictly between ``lo`` and sqrt(2)/2 (requires ``lo < sqrt(2)/2``)."""
    k = 1
    while True:
        approx = Fraction(math.isqrt(2 * 10 ** (2 * k)), 2 * 10**k)  # <= sqrt(2)/2, never equal
        if approx > lo:
            return (lo + approx) / 2
        k += 1


def probe_points(criticals: list[Fraction]) -> list[tuple[Fraction, int, int]]:
    """Probe sequence ``(point, kind, index)`` in increasing order.

    kind 1 marks the critical ``criticals[index]``; kind 0 marks a point in
    the open gap just above ``criticals[index]`` (index -1 is the gap above 0).
    """
    pts: list[tuple[Fraction, int, int]] = []
    prev = Fraction(0)
    for i, c in enumerate(criticals):
        pts.append(((prev + c) / 2, 0, i - 1))
        pts.append((c, 1, i))
        prev = c
    pts.append((rational_below_cap(prev), 0, len(criticals) - 1))
    return pts


def critical_values(
    G1: FiniteMetricMonoid, G2: FiniteMetricMonoid, extra_gaps=(), *, halve: bool = False
) -> list[Fraction]:
    """Positive criticals below the cap: ``|d - d'|``, ``1/d``, ``d``, plus ``extra_gaps``.

    With ``halve`` the differences and reciprocals are halved (pointed GH scaling).
    """
    dists = sorted(set(G1.distance_values()) | set(G2.distance_values()))
    out: set[Fraction] = set()
    f = Fraction(1, 2) if halve else Fraction(1)
    for i, a in enumerate(dists):
        for b in dists[i + 1 :]:
            out.add((b - a) * f)
        if a > 0:
            out.add(f / a)
            if not halve:
                out.add(a)
    out.update(Fraction(x) for x in extra_gaps)
    return sorted(c for c in out if c > 0 and below_cap(c))


def _check_budget(G: FiniteMetricMonoid, budget: int) -> None:
    if G.n > budget:
        raise SizeLimitExceeded(f"monoid has {G.n} elements, budget is {budget}", witness=(G.n, budget))


def _csr(lists):
    ptr = np.zeros(len(lists) + 1, dtype=np.int64)
    for i, lst in enumerate(lists):
        ptr[i + 1] = ptr[i] + len(lst)
    vals = np.array([v for lst in lists for v in lst], dtype=np.int64)
    return ptr, vals


def _star_domains(G1, G2, eps, dil1, dil2):
    """Allowed images under the extra right-translation constraint (strict)."""
    fdom = [[v for v in range(G2.n) if abs(dil1[g] - dil2[v]) < eps] for g in range(G1.n)]
    bdom = [[v for v in range(G1.n) if abs(dil2[h] - dil1[v]) < eps] for h in range(G2.n)]
    return fdom, bdom


def feasible_pairs(
    G1: FiniteMetricMonoid,
    G2: FiniteMetricMonoid,
    eps: Fraction,
    limit: int = 1,
    *,
    dilations: tuple[list[Fraction], list[Fraction]] | None = None,
) -> tuple[list[AlmostIsoPair], int]:
    """Up to ``limit`` pairs in ``UIso(eps, 1/eps)``, lexicographically first.

    Images of elements outside the balls are set to the identity (or, with
    ``dilations``, to the first admissible element).  Returns the pairs and
    the number of search nodes expanded.
    """
    eps = Fraction(eps)
    radius = 1 / eps
    e1, e2 = G1.identity, G2.identity
    B1 = ball(G1, e1, radius).members
    B2 = ball(G2, e2, radius).members
    scale, D1, D2 = scaled_pair_data(G1, G2, eps)
    E = int(eps * scale)

    if dilations is not None:
        fdom_all, bdom_all = _star_domains(G1, G2, eps, *dilations)
    else:
        fdom_all = [list(range(G2.n))] * G1.n
        bdom_all = [list(range(G1.n))] * G2.n

    F = np.full(G1.n, e2, dtype=np.int64)
    Bk = np.full(G2.n, e1, dtype=np.int64)
    in1, in2 = set(B1), set(B2)
    for g in range(G1.n):
        if g not in in1:
            if not fdom_all[g]:
                return [], 0
            F[g] = e2 if e2 in fdom_all[g] else fdom_all[g][0]
    for h in range(G2.n):
        if h not in in2:
            if not bdom_all[h]:
                return [], 0
            Bk[h] = e1 if e1 in bdom_all[h] else bdom_all[h][0]

    # variable order: the two identities, then forward images, then backward
    order = [(0, e1), (1, e2)]
    order += [(0, g) for g in B1 if g != e1]
    order += [(1, h) for h in B2 if h != e2]
    doms = []
    for kind, x in order:
        if kind == 0:
            if x == e1:
                cand = [e2] if e2 in fdom_all[x] else []
            else:
                # unary filter: the inequality with g' = e1 and h = e2
                cand = [v for v in fdom_all[x] if abs(D2[v, e2] - D1[x, e1]) <= E]
        else:
            if x == e2:
                cand = [e1] if e1 in bdom_all[x] else []
            else:
                cand = [v for v in bdom_all[x] if abs(D1[v, e1] - D2[x, e2]) <= E]
        if not cand:
            return [], 0
        doms.append(cand)
    dom_ptr, dom_val = _csr(doms)

    nv = len(order)
    posF = np.full(G1.n, -1, dtype=np.int64)
    posB = np.full(G2.n, -1, dtype=np.int64)
    for i, (kind, x) in enumerate(order):
        (posF if kind == 0 else posB)[x] = i
    b1 = np.array(B1, dtype=np.int64)
    b2 = np.array(B2, dtype=np.int64)
    # kind 0: (g, g', h) in B1 x B1 x B2; kind 1: (h, h', g) in B2 x B2 x B1
    ga, gb, hc = (a.ravel() for a in np.meshgrid(b1, b1, b2, indexing="ij"))
    ha, hb, gc = (a.ravel() for a in np.meshgrid(b2, b2, b1, indexing="ij"))
    depth0 = np.maximum(np.maximum(posF[ga], posF[gb]), posB[hc])
    depth1 = np.maximum(np.maximum(posB[ha], posB[hb]), posF[gc])
    cons = np.concatenate(
        [
            np.stack([np.zeros_like(ga), ga, gb, hc], axis=1),
            np.stack([np.ones_like(ha), ha, hb, gc], axis=1),
        ]
    ).astype(np.int64)
    depth = np.concatenate([depth0, depth1])
    idx = np.argsort(depth, kind="stable")
    cons = np.ascontiguousarray(cons[idx])
    con_ptr = np.zeros(nv + 1, dtype=np.int64)
    np.add.at(con_ptr, depth + 1, 1)
    con_ptr = np.cumsum(con_ptr)

    var_kind = np.array([k for k, _ in order], dtype=np.int64)
    var_elem = np.array([x for _, x in order], dtype=np.int64)
    out = np.zeros((max(1, limit), G1.n + G2.n), dtype=np.int64)
    M1, M2 = np.asarray(G1.mult), np.asarray(G2.mult)
    kernel = _kernels.select(_kernels.pair_search, D1, D2, E)
    count, nodes = kernel(
        var_kind, var_elem, dom_ptr, dom_val, con_ptr, cons, D1, D2, M1, M2, E, F, Bk, out, max(1, limit)
    )
    pairs = [
        AlmostIsoPair(tuple(out[i, : G1.n]), tuple(out[i, G1.n :]), eps, radius) for i in range(int(count))
    ]
    return pairs, int(nodes)


def find_isometric_isomorphism(G1: FiniteMetricMonoid, G2: FiniteMetricMonoid) -> tuple[int, ...] | None:
    """Lexicographically first distance-preserving multiplicative bijection, if any."""
    n = G1.n
    if n != G2.n or G1.distance_values() != G2.distance_values():
        return None
    phi = [-1] * n
    used = [False] * n
    order = [G1.identity] + [g for g in range(n) if g != G1.identity]

    def consistent(k: int) -> bool:
        g = order[k]
        for i in range(k):
            a = order[i]
            if G1.d(a, g) != G2.d(phi[a], phi[g]):
                return False
        done = order[: k + 1]
        for a in done:
            for b in done:
                p = G1.mul(a, b)
                if phi[p] >= 0 and G2.mul(phi[a], phi[b]) != phi[p]:
                    return False
        return True

    def rec(k: int) -> bool:
        if k == n:
            return True
        g = order[k]
        cands = [G2.identity] if k == 0 else range(n)
        for v in cands:
            if used[v]:
                continue
            phi[g] = v
            used[v] = True
            if consistent(k) and rec(k + 1):
                return True
            phi[g] = -1
            used[v] = False
        return False

    if not rec(0):
        return None
    return tuple(phi)


def _probe_task(args):
    G1, G2, eps, dilations = args
    pairs, nodes = feasible_pairs(G1, G2, eps, 1, dilations=dilations)
    return (pairs[0] if pairs else None), nodes


def _solve(
    G1: FiniteMetricMonoid,
    G2: FiniteMetricMonoid,
    criticals: list[Fraction],
    dilations,
    strategy: str,
    jobs: int,
) -> UpsilonResult:
    pts = probe_points(criticals)
    stats = SolverStats()
    results: dict[int, AlmostIsoPair | None] = {}

    def run(indices):
        tasks = [(G1, G2, pts[i][0], dilations) for i in indices]
        if jobs > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                outs = list(pool.map(_probe_task, tasks))
        else:
            outs = [_probe_task(t) for t in tasks]
        for i, (pair, nodes) in zip(indices, outs):
            results[i] = pair
            stats.nodes += nodes
            stats.probes += 1

    if strategy == "scan":
        run(list(range(len(pts))))
        flags = [results[i] is not None for i in range(len(pts))]
        for a, b in zip(flags, flags[1:]):
            if a and not b:
                raise LemmaViolation("feasibility is not upward closed across the probes")
        first = next((i for i, f in enumerate(flags) if f), None)
    elif strategy == "bisect":
        lo, hi = 0, len(pts)  # answer in [lo, hi]; hi means none feasible
        while lo < hi:
            mid = (lo + hi) // 2
            run([mid])
            if results[mid] is not None:
                hi = mid
            else:
                lo = mid + 1
        first = lo if lo < len(pts) else None
    else:
        raise ValueError(f"unknown strategy {strategy!r}")

    probes = tuple((pts[i][0], results[i] is not None) for i in sorted(results))
    crit = tuple(criticals)
    if first is None:
        return UpsilonResult(SQRT2_OVER_2, None, crit, False, None, None, probes, stats)
    point, kind, index = pts[first]
    witness = results[first]
    if kind == 1:
        return UpsilonResult(point, witness, crit, True, point, None, probes, stats)
    if index < 0:
        iso = find_isometric_isomorphism(G1, G2)
        if iso is None:
            raise LemmaViolation("feasible below every critical but no isometric isomorphism exists")
        return UpsilonResult(Fraction(0), witness, crit, False, point, iso, probes, stats)
    return UpsilonResult(criticals[index], witness, crit, False, point, None, probes, stats)


def upsilon(
    G1: FiniteMetricMonoid,
    G2: FiniteMetricMonoid,
    *,
    budget: int = DEFAULT_BUDGET,
    strategy: str = "scan",
    jobs: int = 1,
) -> UpsilonResult:
    """Exact ``min(sqrt(2)/2, inf{eps : UIso(eps, 1/eps) nonempty})``."""
    _check_budget(G1, budget)
    _check_budget(G2, budget)
    return _solve(G1, G2, critical_values(G1, G2), None, strategy, jobs)


def upsilon_star(
    G1: FiniteMetricMonoid,
    G2: FiniteMetricMonoid,
    *,
    budget: int = DEFAULT_BUDGET,
    strategy: str = "scan",
    jobs: int = 1,
) -> UpsilonResult:
    """Variant that also asks right translations to have matching dilations.

    Besides the almost-iso inequality, every ``g`` in ``G1`` (not just the
    ball) needs ``|dil(h -> h g) - dil(h -> h s(g))| < eps``, and symmetrically
    for the backward map.  Capped at sqrt(2)/2 like the plain distance.
    """
    _check_budget(G1, budget)
    _check_budget(G2, budget)
    dil1 = [right_translation_dilation(G1, g) for g in range(G1.n)]
    dil2 = [right_translation_dilation(G2, h) for h in range(G2.n)]
    gaps = {abs(a - b) for a in set(dil1) for b in set(dil2)}
    return _solve(G1, G2, critical_values(G1, G2, gaps), (dil1, dil2), strategy, jobs)


# --------------------------------------------------------------------------
# pointed Gromov-Hausdorff bound


def _gh_feasible(G1: FiniteMetricMonoid, G2: FiniteMetricMonoid, eps: Fraction, radius):
    """Correspondence through ``(e1, e2)`` covering both balls with distortion ``<= 2 eps``.

    ``radius=None`` asks for full coverage.  Returns the relation or ``None``.
    """
    e1, e2 = G1.identity, G2.identity
    B1 = range(G1.n) if radius is None else ball(G1, e1, radius).members
    B2 = range(G2.n) if radius is None else ball(G2, e2, radius).members
    values = [v for row in G1.dist for v in row] + [v for row in G2.dist for v in row] + [2 * eps]
    scale = common_denominator(values)
    D1, D2 = scale_to_int(G1.dist, scale), scale_to_int(G2.dist, scale)
    E = int(2 * eps * scale)
    side = [0] + [0 for g in B1 if g != e1] + [1 for h in B2 if h != e2]
    elem = [e1] + [g for g in B1 if g != e1] + [h for h in B2 if h != e2]
    doms = [[e2]] + [list(range(G2.n)) for g in B1 if g != e1] + [list(range(G1.n)) for h in B2 if h != e2]
    dom_ptr, dom_val = _csr(doms)
    out = np.zeros((1, len(side)), dtype=np.int64)
    kernel = _kernels.select(_kernels.correspondence_search, D1, D2, E)
    count, _ = kernel(
        np.array(side, dtype=np.int64), np.array(elem, dtype=np.int64), dom_ptr, dom_val, D1, D2, E, out, 1
    )
    if not count:
        return None
    rel = set()
    for s, x, v in zip(side, elem, out[0]):
        rel.add((x, int(v)) if s == 0 else (int(v), x))
    return tuple(sorted(rel))


def gh_pointed(G1: FiniteMetricMonoid, G2: FiniteMetricMonoid, *, budget: int = GH_BUDGET) -> GHResult:
    """Local pointed GH distance, capped at sqrt(2)/2.

    ``inf{eps : some correspondence containing (e1, e2) covers G1[1/(2 eps)]
    and G2[1/(2 eps)] with distortion <= 2 eps}``; partners of ball elements
    may lie anywhere.  This is the proper-space version of the pointed
    distance, which compares balls of radius about ``1/eps``.
    """
    _check_budget(G1, budget)
    _check_budget(G2, budget)
    criticals = critical_values(G1, G2, halve=True)
    for point, kind, index in probe_points(criticals):
        rel = _gh_feasible(G1, G2, point, 1 / (2 * point))
        if rel is not None:
            if kind == 1:
                return GHResult(point, rel, point, True)
            value = Fraction(0) if index < 0 else criticals[index]
            return GHResult(value, rel, point, False)
    return GHResult(SQRT2_OVER_2, None, None, False)


def gh_compact(G1: FiniteMetricMonoid, G2: FiniteMetricMonoid, *, budget: int = GH_BUDGET) -> GHResult:
    """Half the least distortion of a full correspondence containing ``(e1, e2)`` (uncapped)."""
    _check_budget(G1, budget)
    _check_budget(G2, budget)
    dists = sorted(set(G1.distance_values()) | set(G2.distance_values()))
    thresholds = sorted({abs(a - b) for a in dists for b in dists})
    for t in thresholds:
        rel = _gh_feasible(G1, G2, t / 2, None)
        if rel is not None:
            return GHResult(t / 2, rel, t / 2, True)
    raise LemmaViolation("no correspondence found at the largest distortion")


def verify_result(G1: FiniteMetricMonoid, G2: FiniteMetricMonoid, res: UpsilonResult) -> bool:
    """Re-check the witness of an :class:`UpsilonResult` at its certified epsilon."""
    if res.witness is None:
        return res.value == SQRT2_OVER_2
    eps = res.witness_epsilon
    return bool(check_almost_iso(G1, G2, res.witness.retag(eps, 1 / eps)))

