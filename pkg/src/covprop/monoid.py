"""Finite metric monoids: validation, balls, right-translation dilations.

A finite monoid whose metric is left invariant is automatically a group (left
multiplication is an isometry, hence injective, hence bijective), so every
validated instance admits inverses; :func:`group_inverse` derives them when the
input did not list them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import (
    IdentityNotUnit,
    InverseInvalid,
    LeftInvarianceViolated,
    MalformedTable,
    NotAGroup,
    NotAMetric,
    NotAssociative,
)
from .rational import to_fraction

__all__ = [
    "FiniteMetricMonoid",
    "Ball",
    "validate_monoid",
    "ball",
    "right_translation_dilation",
    "group_inverse",
    "inverse_modulus",
    "group_from_length",
    "cyclic_group",
    "trivial_group",
    "relabel",
]


class FiniteMetricMonoid:
    """Multiplication table, rational metric and identity on named elements.

    Instances are immutable.  Construction only normalizes types; call
    :func:`validate_monoid` to check the axioms.
    """

    __slots__ = ("elements", "identity", "mult", "dist", "inverse", "_index")

    def __init__(
        self,
        elements: Sequence[str],
        identity: int,
        mult,
        dist,
        inverse: Sequence[int] | None = None,
    ):
        elements = tuple(str(e) for e in elements)
        mult = np.array(mult, dtype=np.int64)
        if mult.ndim != 2:
            mult = mult.reshape(len(elements), -1) if mult.size else np.zeros((len(elements), 0), np.int64)
        mult.flags.writeable = False
        dist = tuple(tuple(to_fraction(v) for v in row) for row in dist)
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "identity", int(identity))
        object.__setattr__(self, "mult", mult)
        object.__setattr__(self, "dist", dist)
        object.__setattr__(
            self, "inverse", None if inverse is None else tuple(int(i) for i in inverse)
        )
        object.__setattr__(self, "_index", {name: i for i, name in enumerate(elements)})

    def __setattr__(self, key, value):
        raise AttributeError("FiniteMetricMonoid is immutable")

    def __reduce__(self):
        return (
            FiniteMetricMonoid,
            (self.elements, self.identity, self.mult.tolist(), self.dist, self.inverse),
        )

    @property
    def n(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def index(self, name: str | int) -> int:
        if isinstance(name, (int, np.integer)):
            return int(name)
        return self._index[name]

    def d(self, g: int, h: int) -> Fraction:
        return self.dist[g][h]

    def mul(self, g: int, h: int) -> int:
        return int(self.mult[g, h])

    def norm(self, g: int) -> Fraction:
        """Distance from the identity."""
        return self.dist[self.identity][g]

    def distance_values(self) -> list[Fraction]:
        return sorted({v for row in self.dist for v in row})

    def diameter(self) -> Fraction:
        return max((v for row in self.dist for v in row), default=Fraction(0))

    def key(self):
        return (self.elements, self.identity, self.mult.tobytes(), self.mult.shape, self.dist, self.inverse)

    def __eq__(self, other):
        if not isinstance(other, FiniteMetricMonoid):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"FiniteMetricMonoid(n={self.n}, elements={list(self.elements)!r})"


@dataclass(frozen=True)
class Ball:
    center: int
    radius: Fraction
    members: tuple[int, ...]

    def __contains__(self, g: int) -> bool:
        return g in self.members


def _check_table(G: FiniteMetricMonoid) -> None:
    n = G.n
    if n == 0:
        raise MalformedTable("a monoid needs at least one element")
    if G.mult.shape != (n, n):
        raise MalformedTable(f"mult must be {n}x{n}, got {G.mult.shape}")
    if len(G.dist) != n or any(len(row) != n for row in G.dist):
        raise MalformedTable(f"dist must be {n}x{n}")
    if not 0 <= G.identity < n:
        raise MalformedTable("identity index out of range")
    bad = np.argwhere((G.mult < 0) | (G.mult >= n))
    if len(bad):
        g, h = (int(v) for v in bad[0])
        raise MalformedTable(f"mult[{g}][{h}] is not an element index", witness=(g, h))
    if G.inverse is not None:
        if len(G.inverse) != n or any(not 0 <= i < n for i in G.inverse):
            raise MalformedTable("inverse must list one element index per element")


def validate_monoid(G: FiniteMetricMonoid) -> FiniteMetricMonoid:
    """Return ``G`` unchanged if every axiom holds, else raise the first failure.

    Order of checks: table closure, associativity, two-sided identity, metric
    positivity/zero diagonal, left invariance, symmetry, triangle inequality,
    listed inverses.
    """
    _check_table(G)
    n, M, D, e = G.n, G.mult, G.dist, G.identity

    # associativity, vectorized: (gh)k vs g(hk)
    left = M[M, :]  # left[g, h, k] = M[M[g, h], k]
    right = M[:, M]  # right[g, h, k] = M[g, M[h, k]]
    bad = np.argwhere(left != right)
    if len(bad):
        g, h, k = (int(v) for v in bad[0])
        raise NotAssociative(
            f"({G.elements[g]}*{G.elements[h]})*{G.elements[k]} != "
            f"{G.elements[g]}*({G.elements[h]}*{G.elements[k]})",
            witness=(g, h, k),
        )
    for g in range(n):
        if M[e, g] != g or M[g, e] != g:
            raise IdentityNotUnit(f"identity does not fix {G.elements[g]}", witness=(g,))

    for g in range(n):
        for h in range(n):
            v = D[g][h]
            if v < 0:
                raise NotAMetric("negative distance", witness=(g, h), axiom="non-negativity")
            if (v == 0) != (g == h):
                raise NotAMetric(
                    "distance is zero exactly on the diagonal", witness=(g, h), axiom="definiteness"
                )
    for g, h, k in itertools.product(range(n), repeat=3):
        if D[M[g, h]][M[g, k]] != D[h][k]:
            raise LeftInvarianceViolated(
                f"d({G.elements[g]}*{G.elements[h]}, {G.elements[g]}*{G.elements[k]}) != "
                f"d({G.elements[h]}, {G.elements[k]})",
                witness=(g, h, k),
            )
    for g in range(n):
        for h in range(g + 1, n):
            if D[g][h] != D[h][g]:
                raise NotAMetric("distance is not symmetric", witness=(g, h), axiom="symmetry")
    for x, y, z in itertools.product(range(n), repeat=3):
        if D[x][z] > D[x][y] + D[y][z]:
            raise NotAMetric("triangle inequality fails", witness=(x, y, z), axiom="triangle")
    if G.inverse is not None:
        for g in range(n):
            if M[g, G.inverse[g]] != e:
                raise InverseInvalid(
                    f"{G.elements[g]}*inverse({G.elements[g]}) is not the identity", witness=(g,)
                )
    return G


def ball(G: FiniteMetricMonoid, center: int, radius) -> Ball:
    radius = to_fraction(radius)
    if radius < 0:
        raise ValueError("radius must be non-negative")
    members = tuple(h for h in range(G.n) if G.dist[center][h] <= radius)
    return Ball(center, radius, members)


def right_translation_dilation(G: FiniteMetricMonoid, g: int) -> Fraction:
    """Best Lipschitz constant of ``h -> h*g`` (0 for a one-element monoid)."""
    best = Fraction(0)
    for h in range(G.n):
        for k in range(h + 1, G.n):
            ratio = G.dist[G.mul(h, g)][G.mul(k, g)] / G.dist[h][k]
            if ratio > best:
                best = ratio
    return best


def group_inverse(G: FiniteMetricMonoid) -> tuple[int, ...]:
    """Listed inverses, or inverses read off the table; NotAGroup if absent."""
    if G.inverse is not None:
        return G.inverse
    inv = []
    for g in range(G.n):
        row = [h for h in range(G.n) if G.mul(g, h) == G.identity and G.mul(h, g) == G.identity]
        if not row:
            raise NotAGroup(f"{G.elements[g]} has no two-sided inverse", witness=(g,))
        inv.append(row[0])
    return tuple(inv)


def inverse_modulus(G: FiniteMetricMonoid, eps) -> Fraction | None:
    """Largest realized ``omega`` with ``d(g,h) < omega => d(g^-1, h^-1) < eps``.

    The admissible ``omega`` form an interval ``(0, w]`` where ``w`` is the
    smallest distance of a violating pair; when no pair violates, every omega
    works and ``diameter + 1`` is returned.  ``None`` is unreachable on finite
    metrics (kept for the type contract).
    """
    eps = to_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    inv = group_inverse(G)
    worst = None
    for g in range(G.n):
        for h in range(g + 1, G.n):
            if G.dist[inv[g]][inv[h]] >= eps:
                d = G.dist[g][h]
                if worst is None or d < worst:
                    worst = d
    return G.diameter() + 1 if worst is None else worst


def group_from_length(elements, mult, identity: int, length, inverse=None) -> FiniteMetricMonoid:
    """Left-invariant metric ``d(g, h) = length(g^-1 h)`` on a finite group."""
    probe = FiniteMetricMonoid(elements, identity, mult, [[0] * len(elements)] * len(elements), inverse)
    inv = group_inverse(probe)
    n = len(elements)
    length = [to_fraction(v) for v in length]
    dist = [[length[int(probe.mult[inv[g], h])] for h in range(n)] for g in range(n)]
    return FiniteMetricMonoid(elements, identity, mult, dist, inv)


def cyclic_group(n: int, length=None, names=None) -> FiniteMetricMonoid:
    """Z_n with ``d(j, k) = length[(k - j) mod n]``; default the cyclic gap."""
    if length is None:
        length = [min(k, n - k) for k in range(n)]
    mult = [[(a + b) % n for b in range(n)] for a in range(n)]
    names = names or [str(i) for i in range(n)]
    inverse = [(-a) % n for a in range(n)]
    return group_from_length(names, mult, 0, length, inverse)


def trivial_group(name: str = "e") -> FiniteMetricMonoid:
    return FiniteMetricMonoid([name], 0, [[0]], [[0]], [0])


def relabel(G: FiniteMetricMonoid, perm: Sequence[int], names=None) -> FiniteMetricMonoid:
    """Isomorphic copy in which old element ``g`` gets index ``perm[g]``."""
    n = G.n
    inv_perm = [0] * n
    for old, new in enumerate(perm):
        inv_perm[new] = old
    mult = [[perm[G.mul(inv_perm[a], inv_perm[b])] for b in range(n)] for a in range(n)]
    dist = [[G.d(inv_perm[a], inv_perm[b]) for b in range(n)] for a in range(n)]
    inverse = None if G.inverse is None else [perm[G.inverse[inv_perm[a]]] for a in range(n)]
    names = names or [G.elements[inv_perm[a]] for a in range(n)]
    return FiniteMetricMonoid(names, perm[G.identity], mult, dist, inverse)
