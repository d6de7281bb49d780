"""Fixed instances: a 20-monoid corpus, small dynamical systems, and the dyadic chains."""

from __future__ import annotations

import itertools
from fractions import Fraction

from .monoid import FiniteMetricMonoid, cyclic_group, group_from_length, relabel, trivial_group
from .qcms import FiniteQCMS, LipschitzDynamicalSystem, identity_kernel, permutation_kernel

__all__ = [
    "klein_four",
    "symmetric_group",
    "s3_skewed",
    "monoid_corpus",
    "two_point_space",
    "system_corpus",
    "dyadic_monoid",
    "dyadic_chain_systems",
    "broken_chain_systems",
]


def klein_four(lengths) -> FiniteMetricMonoid:
    """Z2 x Z2 with elements ``e, a, b, c`` (``c = ab``) and the given lengths."""
    mult = [[i ^ j for j in range(4)] for i in range(4)]
    return group_from_length(["e", "a", "b", "c"], mult, 0, lengths, [0, 1, 2, 3])


def _s3():
    perms = sorted(itertools.permutations(range(3)))
    index = {p: i for i, p in enumerate(perms)}
    mult = [[index[tuple(p[q[i]] for i in range(3))] for q in perms] for p in perms]
    names = ["".join(map(str, p)) for p in perms]
    return perms, names, mult


def symmetric_group(transposition=1, three_cycle=2) -> FiniteMetricMonoid:
    """S3 with a conjugation-invariant length (bi-invariant metric)."""
    perms, names, mult = _s3()
    length = []
    for p in perms:
        moved = sum(1 for i in range(3) if p[i] != i)
        length.append(0 if moved == 0 else (transposition if moved == 2 else three_cycle))
    return group_from_length(names, mult, 0, length)


def s3_skewed() -> FiniteMetricMonoid:
    """S3 where one transposition has length 1 and every other element length 2.

    Left invariant but not right invariant, so some right translations are
    not isometries.
    """
    perms, names, mult = _s3()
    length = [0 if p == (0, 1, 2) else (1 if p == (1, 0, 2) else 2) for p in perms]
    return group_from_length(names, mult, 0, length)


def monoid_corpus() -> list[tuple[str, FiniteMetricMonoid]]:
    F = Fraction
    z2 = cyclic_group(2, [0, 1])
    z4 = cyclic_group(4)
    return [
        ("trivial", trivial_group()),
        ("Z2", z2),
        ("Z2_3/2", cyclic_group(2, [0, F(3, 2)])),
        ("Z2_1/2", cyclic_group(2, [0, F(1, 2)])),
        ("Z2_5", cyclic_group(2, [0, 5])),
        ("Z2_relabel", relabel(z2, [1, 0], ["x", "y"])),
        ("Z3", cyclic_group(3)),
        ("Z4", z4),
        ("Z4_skew", cyclic_group(4, [0, 2, 3, 2])),
        ("Z4_relabel", relabel(z4, [0, 3, 1, 2])),
        ("V4_111", klein_four([0, 1, 1, 1])),
        ("V4_112", klein_four([0, 1, 1, 2])),
        ("V4_123", klein_four([0, 1, 2, 3])),
        ("Z5", cyclic_group(5)),
        ("Z5_skew", cyclic_group(5, [0, 2, 3, 3, 2])),
        ("Z6", cyclic_group(6)),
        ("Z6_flat", cyclic_group(6, [0, 1, 2, 2, 2, 1])),
        ("S3_word", symmetric_group(1, 2)),
        ("S3_discrete", symmetric_group(1, 1)),
        ("S3_half", symmetric_group(1, F(1, 2))),
    ]


def two_point_space(d=1) -> FiniteQCMS:
    d = Fraction(d)
    return FiniteQCMS(("p", "q"), ((Fraction(0), d), (d, Fraction(0))))


def _trivial_action(G: FiniteMetricMonoid, n: int):
    return tuple(identity_kernel(n) for _ in range(G.n))


def system_corpus() -> list[tuple[str, LipschitzDynamicalSystem]]:
    F = Fraction
    X2 = two_point_space()
    X3 = FiniteQCMS(("a", "b", "c"), ((0, 1, 1), (1, 0, 1), (1, 1, 0)))
    X3line = FiniteQCMS(("a", "b", "c"), ((0, 1, 2), (1, 0, 1), (2, 1, 0)))
    z2 = cyclic_group(2, [0, 1])
    z3 = cyclic_group(3)
    z4 = cyclic_group(4)
    swap = permutation_kernel([1, 0])
    rot = [permutation_kernel([(x + k) % 3 for x in range(3)]) for k in range(3)]
    reflect = permutation_kernel([2, 1, 0])
    half = cyclic_group(2, [0, F(1, 2)])
    return [
        ("trivial_on_point", LipschitzDynamicalSystem(FiniteQCMS(("p",), ((0,),)), trivial_group(), (identity_kernel(1),))),
        ("Z2_trivial", LipschitzDynamicalSystem(X2, z2, _trivial_action(z2, 2))),
        ("Z2_swap", LipschitzDynamicalSystem(X2, z2, (identity_kernel(2), swap))),
        ("Z2half_swap", LipschitzDynamicalSystem(X2, half, (identity_kernel(2), swap))),
        ("Z3_rotate", LipschitzDynamicalSystem(X3, z3, tuple(rot))),
        ("Z4_parity_swap", LipschitzDynamicalSystem(X2, z4, (identity_kernel(2), swap, identity_kernel(2), swap))),
        ("Z2_reflect_line", LipschitzDynamicalSystem(X3line, z2, (identity_kernel(3), reflect))),
    ]


def dyadic_monoid(k: int) -> FiniteMetricMonoid:
    """``Z_{2^k}`` with ``d(i, j) = (4 / 2^k) * cyclic gap``."""
    n = 2**k
    step = Fraction(4, n)
    return cyclic_group(n, [step * min(i, n - i) for i in range(n)])


def dyadic_chain_systems(kmax: int = 4, space: FiniteQCMS | None = None) -> list[LipschitzDynamicalSystem]:
    """Trivial actions of ``Z_{2^k}``, ``k = 1..kmax``, on a fixed two-point space."""
    X = space or two_point_space()
    out = []
    for k in range(1, kmax + 1):
        G = dyadic_monoid(k)
        out.append(LipschitzDynamicalSystem(X, G, _trivial_action(G, X.n)))
    return out


def broken_chain_systems(kmax: int = 4) -> list[LipschitzDynamicalSystem]:
    """``Z_{2^k}`` acting on two points by the swap raised to the parity of ``g``.

    Adjacent elements keep a swap between them while their distance shrinks,
    so no single modulus works along the chain.
    """
    X = two_point_space()
    swap = permutation_kernel([1, 0])
    ident = identity_kernel(2)
    out = []
    for k in range(1, kmax + 1):
        G = dyadic_monoid(k)
        out.append(LipschitzDynamicalSystem(X, G, tuple(swap if g % 2 else ident for g in range(G.n))))
    return out
