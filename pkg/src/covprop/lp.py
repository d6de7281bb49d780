"""Small exact linear programs: dense two-phase tableau simplex with Bland's rule."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

__all__ = ["LPResult", "Infeasible", "Unbounded", "solve_lp"]


class Infeasible(Exception):
    pass


class Unbounded(Exception):
    pass


@dataclass(frozen=True)
class LPResult:
    value: Fraction
    x: tuple[Fraction, ...]
    pivots: int


def _pivot(T: list[list[Fraction]], basis: list[int], r: int, c: int) -> None:
    row = T[r]
    p = row[c]
    if p != 1:
        T[r] = row = [v / p for v in row]
    for i, other in enumerate(T):
        if i != r:
            f = other[c]
            if f:
                T[i] = [a - f * b if b else a for a, b in zip(other, row)]
    basis[r] = c


def _run(T, basis, obj_row: int, allowed: int) -> int:
    """Bland-rule simplex on rows ``[0, obj_row)``; objective in ``T[obj_row]`` (minimize)."""
    pivots = 0
    m = obj_row
    while True:
        obj = T[obj_row]
        col = next((j for j in range(allowed) if obj[j] < 0), None)
        if col is None:
            return pivots
        best = None
        for i in range(m):
            a = T[i][col]
            if a > 0:
                ratio = T[i][-1] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            raise Unbounded("objective unbounded below")
        _pivot(T, basis, best[1], col)
        pivots += 1


def solve_lp(c: Sequence, A_eq: Sequence[Sequence], b_eq: Sequence) -> LPResult:
    """Minimize ``c . x`` subject to ``A_eq x = b_eq`` and ``x >= 0``, exactly."""
    c = [Fraction(v) for v in c]
    n = len(c)
    A = [[Fraction(v) for v in row] for row in A_eq]
    b = [Fraction(v) for v in b_eq]
    m = len(A)
    for i in range(m):
        if len(A[i]) != n:
            raise ValueError("row length mismatch")
        if b[i] < 0:
            A[i] = [-v for v in A[i]]
            b[i] = -b[i]
    # phase 1 tableau: x (n) | artificials (m) | rhs
    T = []
    for i in range(m):
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        T.append(A[i] + art + [b[i]])
    phase1 = [Fraction(0)] * (n + m + 1)
    for i in range(m):
        for j in range(n):
            phase1[j] -= A[i][j]
        phase1[-1] -= b[i]
    T.append(phase1)
    basis = [n + i for i in range(m)]
    pivots = _run(T, basis, m, n + m)
    if T[m][-1] != 0:
        raise Infeasible("no feasible point")
    # drive artificials out of the basis; drop redundant rows
    r = 0
    while r < len(basis):
        if basis[r] >= n:
            col = next((j for j in range(n) if T[r][j] != 0), None)
            if col is None:
                del T[r]
                del basis[r]
                continue
            _pivot(T, basis, r, col)
            pivots += 1
        r += 1
    m = len(basis)
    T = [row[:n] + [row[-1]] for row in T[:m]]
    obj = c + [Fraction(0)]
    for i in range(m):
        f = obj[basis[i]]
        if f:
            obj = [a - f * bb for a, bb in zip(obj, T[i])]
    T.append(obj)
    pivots += _run(T, basis, m, n)
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        x[j] = T[i][-1]
    value = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    return LPResult(value, tuple(x), pivots)
