"""Finite commutative quantum metric spaces and Lipschitz dynamics on them.

A space is a finite metric space standing for its algebra of functions with
the Lipschitz seminorm; states are probability vectors.  A unital positive map
``C(X) -> C(Y)`` is a row-stochastic kernel: row ``y`` is the state
``a -> alpha(a)(y)``, a probability vector over ``X``.  So a kernel has shape
``|Y| x |X|`` and ``alpha(a) = K @ a``; composition of maps is the matrix
product, ``K[g h] = K[g] @ K[h]``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import (
    ActionNotMorphism,
    DimensionMismatch,
    IdentityNotFixed,
    InvalidKernel,
    InvalidState,
    NotAMetric,
    NotFullIsometry,
)
from .monoid import FiniteMetricMonoid, group_inverse, validate_monoid
from .rational import to_fraction
from .transport import transport

__all__ = [
    "FiniteQCMS",
    "State",
    "MarkovMap",
    "LipschitzDynamicalSystem",
    "SystemReport",
    "validate_space",
    "validate_state",
    "validate_kernel",
    "lipschitz_constant",
    "w1",
    "w1_measures",
    "mk_dist_maps",
    "dil_markov",
    "validate_system",
    "action_modulus",
    "induced_length_metric",
    "identity_kernel",
    "permutation_kernel",
    "dirac",
    "apply_kernel",
    "push_state",
]


@dataclass(frozen=True)
class FiniteQCMS:
    points: tuple[str, ...]
    dist: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(str(p) for p in self.points))
        object.__setattr__(self, "dist", tuple(tuple(to_fraction(v) for v in row) for row in self.dist))

    @property
    def n(self) -> int:
        return len(self.points)

    def d(self, x: int, y: int) -> Fraction:
        return self.dist[x][y]

    def diameter(self) -> Fraction:
        return max((v for row in self.dist for v in row), default=Fraction(0))


@dataclass(frozen=True)
class State:
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(to_fraction(v) for v in self.weights))


@dataclass(frozen=True)
class MarkovMap:
    """Row-stochastic kernel; ``kernel[y][x]`` is the weight of ``x`` in row ``y``."""

    kernel: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "kernel", tuple(tuple(to_fraction(v) for v in row) for row in self.kernel))

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.kernel), len(self.kernel[0]) if self.kernel else 0)

    def __matmul__(self, other: "MarkovMap") -> "MarkovMap":
        rows, inner = self.shape
        if other.shape[0] != inner:
            raise DimensionMismatch("kernel shapes do not compose")
        cols = other.shape[1]
        out = []
        for y in range(rows):
            r = self.kernel[y]
            out.append(
                tuple(sum((r[k] * other.kernel[k][x] for k in range(inner)), Fraction(0)) for x in range(cols))
            )
        return MarkovMap(tuple(out))


@dataclass(frozen=True)
class LipschitzDynamicalSystem:
    space: FiniteQCMS
    monoid: FiniteMetricMonoid
    action: tuple[MarkovMap, ...]

    def kernel(self, g: int) -> MarkovMap:
        return self.action[g]


@dataclass(frozen=True)
class SystemReport:
    system: LipschitzDynamicalSystem
    dilations: tuple[Fraction, ...]

    @property
    def max_dilation(self) -> Fraction:
        return max(self.dilations)


def identity_kernel(n: int) -> MarkovMap:
    return MarkovMap(tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)))


def permutation_kernel(perm: Sequence[int]) -> MarkovMap:
    """Kernel of ``a -> a o perm`` (row ``y`` is the Dirac at ``perm[y]``)."""
    n = len(perm)
    return MarkovMap(tuple(tuple(Fraction(int(perm[y] == x)) for x in range(n)) for y in range(n)))


def dirac(n: int, x: int) -> State:
    return State(tuple(Fraction(int(i == x)) for i in range(n)))


def validate_space(space: FiniteQCMS) -> FiniteQCMS:
    n = space.n
    if n == 0:
        raise NotAMetric("space has no points", axiom="non-empty")
    if len(space.dist) != n or any(len(r) != n for r in space.dist):
        raise DimensionMismatch(f"dist must be {n}x{n}")
    D = space.dist
    for x in range(n):
        for y in range(n):
            if (D[x][y] == 0) != (x == y) or D[x][y] < 0:
                raise NotAMetric("distance is zero exactly on the diagonal", witness=(x, y), axiom="definiteness")
            if D[x][y] != D[y][x]:
                raise NotAMetric("distance is not symmetric", witness=(x, y), axiom="symmetry")
    for x, y, z in itertools.product(range(n), repeat=3):
        if D[x][z] > D[x][y] + D[y][z]:
            raise NotAMetric("triangle inequality fails", witness=(x, y, z), axiom="triangle")
    return space


def validate_state(space: FiniteQCMS, mu: State) -> State:
    if len(mu.weights) != space.n:
        raise DimensionMismatch(f"state has {len(mu.weights)} weights, space has {space.n} points")
    if any(w < 0 for w in mu.weights) or sum(mu.weights) != 1:
        raise InvalidState("weights must be non-negative and sum to 1")
    return mu


def validate_kernel(K: MarkovMap, rows: int, cols: int) -> MarkovMap:
    if K.shape != (rows, cols) or any(len(r) != cols for r in K.kernel):
        raise DimensionMismatch(f"kernel must be {rows}x{cols}, got {K.shape}")
    for y, row in enumerate(K.kernel):
        if any(v < 0 for v in row) or sum(row) != 1:
            raise InvalidKernel(f"row {y} is not a probability vector", witness=(y,))
    return K


def lipschitz_constant(space: FiniteQCMS, a: Sequence) -> Fraction:
    a = [to_fraction(v) for v in a]
    best = Fraction(0)
    for x in range(space.n):
        for y in range(x + 1, space.n):
            best = max(best, abs(a[x] - a[y]) / space.dist[x][y])
    return best


def w1_measures(space: FiniteQCMS, mu: Sequence[Fraction], nu: Sequence[Fraction]) -> Fraction:
    if tuple(mu) == tuple(nu):
        return Fraction(0)
    return transport(mu, nu, space.dist).cost


def w1(space: FiniteQCMS, mu: State, nu: State) -> Fraction:
    """Exact Monge-Kantorovich distance between two states."""
    validate_state(space, mu)
    validate_state(space, nu)
    return w1_measures(space, mu.weights, nu.weights)


def apply_kernel(K: MarkovMap, a: Sequence) -> tuple[Fraction, ...]:
    """``alpha(a)`` for the map with kernel ``K``."""
    return tuple(sum((k * to_fraction(v) for k, v in zip(row, a)), Fraction(0)) for row in K.kernel)


def push_state(weights: Sequence[Fraction], K: MarkovMap) -> tuple[Fraction, ...]:
    """``phi o alpha`` as a vector: ``weights^T K``."""
    cols = K.shape[1]
    return tuple(
        sum((w * K.kernel[y][x] for y, w in enumerate(weights) if w), Fraction(0)) for x in range(cols)
    )


def mk_dist_maps(space_src: FiniteQCMS, space_dst: FiniteQCMS, alpha: MarkovMap, beta: MarkovMap) -> Fraction:
    """``sup{ ||alpha(a) - beta(a)||_inf : L(a) <= 1 }`` as a max of per-row W1."""
    for K in (alpha, beta):
        validate_kernel(K, space_dst.n, space_src.n)
    return max(
        (w1_measures(space_src, ra, rb) for ra, rb in zip(alpha.kernel, beta.kernel)),
        default=Fraction(0),
    )


def dil_markov(space: FiniteQCMS, alpha: MarkovMap, space_dst: FiniteQCMS | None = None) -> Fraction:
    """Least ``k`` with ``L(alpha(a)) <= k L(a)``; ``space_dst`` defaults to ``space``."""
    dst = space if space_dst is None else space_dst
    validate_kernel(alpha, dst.n, space.n)
    best = Fraction(0)
    K = alpha.kernel
    for x in range(dst.n):
        for y in range(x + 1, dst.n):
            best = max(best, w1_measures(space, K[x], K[y]) / dst.dist[x][y])
    return best


def validate_system(sys: LipschitzDynamicalSystem) -> SystemReport:
    """Check the space, the monoid and the action identities exactly."""
    validate_space(sys.space)
    validate_monoid(sys.monoid)
    G, n = sys.monoid, sys.space.n
    if len(sys.action) != G.n:
        raise DimensionMismatch(f"need one kernel per monoid element ({G.n}), got {len(sys.action)}")
    for K in sys.action:
        validate_kernel(K, n, n)
    if sys.action[G.identity] != identity_kernel(n):
        raise IdentityNotFixed("the identity element does not act as the identity", witness=(G.identity,))
    for g in range(G.n):
        for h in range(G.n):
            if sys.action[G.mul(g, h)] != sys.action[g] @ sys.action[h]:
                raise ActionNotMorphism(
                    f"action({G.elements[g]}*{G.elements[h]}) != action({G.elements[g]}) o action({G.elements[h]})",
                    witness=(g, h),
                )
    dils = tuple(dil_markov(sys.space, K) for K in sys.action)
    return SystemReport(sys, dils)


def action_modulus(sys: LipschitzDynamicalSystem, eps) -> Fraction:
    """Largest realized ``omega`` with ``d(g, h) < omega => mkD(alpha^g, alpha^h) < eps``.

    Equals the least monoid distance of a violating pair, or ``diameter + 1``
    when no pair violates.
    """
    eps = to_fraction(eps)
    G, X = sys.monoid, sys.space
    worst = None
    for g in range(G.n):
        for h in range(g + 1, G.n):
            if mk_dist_maps(X, X, sys.action[g], sys.action[h]) >= eps:
                d = G.d(g, h)
                if worst is None or d < worst:
                    worst = d
    return G.diameter() + 1 if worst is None else worst


def _as_isometry(space: FiniteQCMS, K: MarkovMap) -> tuple[int, ...] | None:
    perm = []
    for row in K.kernel:
        ones = [x for x, v in enumerate(row) if v == 1]
        if len(ones) != 1:
            return None
        perm.append(ones[0])
    if sorted(perm) != list(range(space.n)):
        return None
    for x in range(space.n):
        for y in range(space.n):
            if space.dist[perm[x]][perm[y]] != space.dist[x][y]:
                return None
    return tuple(perm)


def induced_length_metric(sys: LipschitzDynamicalSystem) -> FiniteMetricMonoid:
    """Quotient of the acting group by the kernel of the action, with ``l(g) = mkD(alpha^g, id)``."""
    G, X = sys.monoid, sys.space
    inv = group_inverse(G)
    for g in range(G.n):
        if _as_isometry(X, sys.action[g]) is None:
            raise NotFullIsometry(f"{G.elements[g]} does not act by a metric-preserving permutation", witness=(g,))
    ident = identity_kernel(X.n)
    length = [mk_dist_maps(X, X, sys.action[g], ident) for g in range(G.n)]
    K = [g for g in range(G.n) if length[g] == 0]
    kset = set(K)
    for g in range(G.n):
        for k in K:
            if G.mul(G.mul(g, k), inv[g]) not in kset:
                raise NotFullIsometry("elements acting trivially do not form a normal subgroup", witness=(g, k))
    reps: list[int] = []
    coset_of = [-1] * G.n
    for g in range(G.n):
        if coset_of[g] < 0:
            idx = len(reps)
            reps.append(g)
            for k in K:
                coset_of[G.mul(g, k)] = idx
    m = len(reps)
    mult = [[coset_of[G.mul(reps[a], reps[b])] for b in range(m)] for a in range(m)]
    dist = [[length[G.mul(inv[reps[a]], reps[b])] for b in range(m)] for a in range(m)]
    inverse = [coset_of[inv[reps[a]]] for a in range(m)]
    out = FiniteMetricMonoid(
        [G.elements[r] for r in reps], coset_of[G.identity], mult, dist, inverse
    )
    return validate_monoid(out)
