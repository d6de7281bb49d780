"""Local almost isometric isomorphisms between finite metric monoids."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels
from ._jit import JIT_ENABLED
from .errors import LemmaViolation, PreconditionFailed
from .monoid import FiniteMetricMonoid, ball, group_inverse
from .rational import common_denominator, scale_to_int, to_fraction

__all__ = [
    "AlmostIsoPair",
    "CheckResult",
    "PropertyCheck",
    "DerivedReport",
    "identity_pair",
    "constant_pair",
    "check_almost_iso",
    "compose",
    "derived_properties",
    "inverse_estimate",
    "scaled_pair_data",
]

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class AlmostIsoPair:
    """Total maps ``forward: G1 -> G2`` and ``backward: G2 -> G1`` tagged with (epsilon, radius)."""

    forward: tuple[int, ...]
    backward: tuple[int, ...]
    epsilon: Fraction
    radius: Fraction

    def __post_init__(self):
        object.__setattr__(self, "forward", tuple(int(v) for v in self.forward))
        object.__setattr__(self, "backward", tuple(int(v) for v in self.backward))
        object.__setattr__(self, "epsilon", to_fraction(self.epsilon))
        object.__setattr__(self, "radius", to_fraction(self.radius))

    def retag(self, epsilon, radius) -> "AlmostIsoPair":
        return AlmostIsoPair(self.forward, self.backward, epsilon, radius)

    def reversed(self) -> "AlmostIsoPair":
        return AlmostIsoPair(self.backward, self.forward, self.epsilon, self.radius)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of :func:`check_almost_iso`.

    ``witness`` is ``(j, g, g', h)`` for a broken inequality, or ``(j, e_j)``
    when ``j``'s map does not send the identity to the identity.
    """

    ok: bool
    witness: tuple | None = None

    def __bool__(self) -> bool:
        return self.ok


def identity_pair(G: FiniteMetricMonoid, epsilon=1, radius=1) -> AlmostIsoPair:
    ids = tuple(range(G.n))
    return AlmostIsoPair(ids, ids, epsilon, radius)


def constant_pair(G1: FiniteMetricMonoid, G2: FiniteMetricMonoid, epsilon=1, radius=1) -> AlmostIsoPair:
    """Both maps constant at the identity."""
    return AlmostIsoPair((G2.identity,) * G1.n, (G1.identity,) * G2.n, epsilon, radius)


def scaled_pair_data(G1: FiniteMetricMonoid, G2: FiniteMetricMonoid, *extra: Fraction):
    """Integer distance matrices of both monoids under one common scale.

    ``extra`` rationals (tolerances) are included in the denominator so they
    scale to integers too.  Returns ``(scale, D1, D2)``.
    """
    values = [v for row in G1.dist for v in row] + [v for row in G2.dist for v in row]
    scale = common_denominator(values + [to_fraction(x) for x in extra])
    D1, D2 = scale_to_int(G1.dist, scale), scale_to_int(G2.dist, scale)
    # mixed int64/object arithmetic overflows, so one wide matrix widens both
    if D1.dtype == object or D2.dtype == object:
        D1, D2 = D1.astype(object), D2.astype(object)
    return scale, D1, D2


def _scan(Dj, Dk, Mj, Mk, fwd, bwd, ball_j, ball_k, E):
    if _kernels.select(_kernels.violation_scan, Dj, Dk, E) is _kernels.violation_scan and JIT_ENABLED:
        return _kernels.violation_scan(Dj, Dk, Mj, Mk, fwd, bwd, ball_j, ball_k, E)
    return _kernels.violation_scan_numpy(Dj, Dk, Mj, Mk, fwd, bwd, ball_j, ball_k, E)


def check_almost_iso(G1: FiniteMetricMonoid, G2: FiniteMetricMonoid, pair: AlmostIsoPair) -> CheckResult:
    """Exhaustively test the defining inequality on both orientations.

    Orientation 1 ranges over ``g, g'`` in ``G1[r]`` and ``h`` in ``G2[r]``;
    orientation 2 swaps the roles.  Witnesses are reported with the
    orientation index first.
    """
    if len(pair.forward) != G1.n or len(pair.backward) != G2.n:
        raise ValueError("map lengths do not match the monoids")
    if any(not 0 <= v < G2.n for v in pair.forward) or any(not 0 <= v < G1.n for v in pair.backward):
        raise ValueError("map values out of range")
    if pair.forward[G1.identity] != G2.identity:
        return CheckResult(False, (1, G1.identity))
    if pair.backward[G2.identity] != G1.identity:
        return CheckResult(False, (2, G2.identity))
    scale, D1, D2 = scaled_pair_data(G1, G2, pair.epsilon)
    E = pair.epsilon * scale
    E = int(E.numerator)
    if D1.dtype == object or D2.dtype == object:
        D1 = D1.astype(object)
        D2 = D2.astype(object)
    b1 = np.array(ball(G1, G1.identity, pair.radius).members, dtype=np.int64)
    b2 = np.array(ball(G2, G2.identity, pair.radius).members, dtype=np.int64)
    fwd = np.array(pair.forward, dtype=np.int64)
    bwd = np.array(pair.backward, dtype=np.int64)
    M1, M2 = np.asarray(G1.mult), np.asarray(G2.mult)
    g, g2, h = _scan(D1, D2, M1, M2, fwd, bwd, b1, b2, E)
    if g >= 0:
        return CheckResult(False, (1, int(g), int(g2), int(h)))
    g, g2, h = _scan(D2, D1, M2, M1, bwd, fwd, b2, b1, E)
    if g >= 0:
        return CheckResult(False, (2, int(g), int(g2), int(h)))
    return CheckResult(True)


def _sq_ok(eps: Fraction) -> bool:
    return 0 < eps and eps * eps <= HALF


def compose(
    G1: FiniteMetricMonoid,
    G2: FiniteMetricMonoid,
    G3: FiniteMetricMonoid,
    p12: AlmostIsoPair,
    p23: AlmostIsoPair,
) -> AlmostIsoPair:
    """Compose ``p12`` (at ``(e1, 1/e1)``) with ``p23`` (at ``(e2, 1/e2)``).

    Returns ``(fwd23 o fwd12, bwd12 o bwd23)`` at ``(e1 + e2, 1/(e1 + e2))``.
    Inputs are re-verified at their own radii; the composite is verified too
    and a failure there raises :class:`LemmaViolation`.
    """
    for name, p, A, B in (("first", p12, G1, G2), ("second", p23, G2, G3)):
        if not _sq_ok(p.epsilon):
            raise PreconditionFailed(
                f"{name} pair has epsilon {p.epsilon}, need 0 < eps and eps^2 <= 1/2",
                witness=(name, str(p.epsilon)),
            )
        res = check_almost_iso(A, B, p.retag(p.epsilon, 1 / p.epsilon))
        if not res:
            raise PreconditionFailed(
                f"{name} pair fails at radius 1/{p.epsilon}", witness=(name, res.witness)
            )
    eps = p12.epsilon + p23.epsilon
    fwd = tuple(p23.forward[v] for v in p12.forward)
    bwd = tuple(p12.backward[v] for v in p23.backward)
    out = AlmostIsoPair(fwd, bwd, eps, 1 / eps)
    res = check_almost_iso(G1, G3, out)
    if not res:
        raise LemmaViolation(f"composite fails verification: {res.witness}")
    return out


@dataclass(frozen=True)
class PropertyCheck:
    ok: bool
    witness: tuple | None = None


@dataclass(frozen=True)
class DerivedReport:
    checks: tuple[PropertyCheck, ...] = field(default_factory=tuple)

    @property
    def all_pass(self) -> bool:
        return all(c.ok for c in self.checks)

    def __getitem__(self, i: int) -> PropertyCheck:
        """1-based, matching the numbering of the five assertions."""
        return self.checks[i - 1]


def derived_properties(G1: FiniteMetricMonoid, G2: FiniteMetricMonoid, pair: AlmostIsoPair) -> DerivedReport:
    """Check the five consequences of the almost-iso inequality, both orientations.

    With ``r' = max(0, r - eps)``:

    1. ``|d_k(s_j g, h) - d_j(g, s_k h)| <= eps`` on ``G_j[r] x G_k[r]``
    2. ``d_k(e, s_j g) <= d_j(e, g) + eps`` on ``G_j[r]``
    3. ``d_j(s_k s_j g, g) <= eps`` on ``G_j[r']``
    4. ``d_k(s_j g s_j g', s_j(g g')) <= 2 eps`` on ``G_j[r'/2]``
    5. ``|d_k(s_j g, s_j g') - d_j(g, g')| <= 2 eps`` on ``G_j[r']``

    Witnesses carry the orientation ``j`` first.
    """
    eps, r = pair.epsilon, pair.radius
    r_prime = max(Fraction(0), r - eps)
    sides = ((1, G1, G2, pair.forward, pair.backward), (2, G2, G1, pair.backward, pair.forward))
    found: list[tuple | None] = [None] * 5

    def note(i, w):
        if found[i] is None:
            found[i] = w

    for j, Gj, Gk, sj, sk in sides:
        ej, ek = Gj.identity, Gk.identity
        Bj = ball(Gj, ej, r).members
        Bk = ball(Gk, ek, r).members
        Bj1 = ball(Gj, ej, r_prime).members
        Bj2 = ball(Gj, ej, r_prime / 2).members
        for g in Bj:
            for h in Bk:
                if abs(Gk.d(sj[g], h) - Gj.d(g, sk[h])) > eps:
                    note(0, (j, g, h))
            if Gk.d(ek, sj[g]) > Gj.d(ej, g) + eps:
                note(1, (j, g))
        for g in Bj1:
            if Gj.d(sk[sj[g]], g) > eps:
                note(2, (j, g))
            for g2 in Bj1:
                if abs(Gk.d(sj[g], sj[g2]) - Gj.d(g, g2)) > 2 * eps:
                    note(4, (j, g, g2))
        for g in Bj2:
            for g2 in Bj2:
                if Gk.d(Gk.mul(sj[g], sj[g2]), sj[Gj.mul(g, g2)]) > 2 * eps:
                    note(3, (j, g, g2))
    return DerivedReport(tuple(PropertyCheck(w is None, w) for w in found))


def inverse_estimate(G: FiniteMetricMonoid, H: FiniteMetricMonoid, pair: AlmostIsoPair) -> PropertyCheck:
    """``d_H(s(g)^-1, s(g^-1)) <= eps`` for ``g, g^-1`` in ``G[1/eps]``.

    Both monoids must be groups; the pair is used at its own epsilon.
    """
    eps = pair.epsilon
    inv_g, inv_h = group_inverse(G), group_inverse(H)
    members = set(ball(G, G.identity, 1 / eps).members)
    s = pair.forward
    for g in sorted(members):
        if inv_g[g] in members and H.d(inv_h[s[g]], s[inv_g[g]]) > eps:
            return PropertyCheck(False, (g,))
    return PropertyCheck(True)

