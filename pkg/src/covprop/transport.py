"""Exact transportation simplex (MODI potentials, Bland's rule) over Fractions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

__all__ = ["TransportResult", "transport", "northwest_corner"]


@dataclass(frozen=True)
class TransportResult:
    cost: Fraction
    plan: dict[tuple[int, int], Fraction]
    pivots: int


def northwest_corner(supply: Sequence[Fraction], demand: Sequence[Fraction]) -> dict[tuple[int, int], Fraction]:
    """Initial basic solution with exactly ``m + n - 1`` cells (zeros kept as basic)."""
    s, d = list(supply), list(demand)
    m, n = len(s), len(d)
    basis: dict[tuple[int, int], Fraction] = {}
    i = j = 0
    while True:
        x = min(s[i], d[j])
        basis[(i, j)] = x
        s[i] -= x
        d[j] -= x
        if i == m - 1 and j == n - 1:
            return basis
        if (s[i] == 0 and i < m - 1) or j == n - 1:
            i += 1
        else:
            j += 1


def _potentials(basis, cost, m, n):
    u: list[Fraction | None] = [None] * m
    v: list[Fraction | None] = [None] * n
    u[0] = Fraction(0)
    rows: dict[int, list[int]] = {}
    cols: dict[int, list[int]] = {}
    for i, j in basis:
        rows.setdefault(i, []).append(j)
        cols.setdefault(j, []).append(i)
    stack = [("r", 0)]
    while stack:
        kind, k = stack.pop()
        if kind == "r":
            for j in rows.get(k, ()):
                if v[j] is None:
                    v[j] = cost[k][j] - u[k]
                    stack.append(("c", j))
        else:
            for i in cols.get(k, ()):
                if u[i] is None:
                    u[i] = cost[i][k] - v[k]
                    stack.append(("r", i))
    return u, v


def _cycle(basis, start: tuple[int, int]):
    """Cells of the unique cycle through ``start`` in basis + {start}, alternating rows/cols."""
    i0, j0 = start
    rows: dict[int, list[int]] = {}
    cols: dict[int, list[int]] = {}
    for i, j in basis:
        rows.setdefault(i, []).append(j)
        cols.setdefault(j, []).append(i)
    # path in the basis tree from column j0 to row i0
    parent: dict[tuple[str, int], tuple[str, int] | None] = {("c", j0): None}
    stack = [("c", j0)]
    while stack:
        node = stack.pop()
        kind, k = node
        if node == ("r", i0):
            break
        nbrs = [("r", i) for i in cols.get(k, ())] if kind == "c" else [("c", j) for j in rows.get(k, ())]
        for nb in nbrs:
            if nb not in parent:
                parent[nb] = node
                stack.append(nb)
    path = []
    node = ("r", i0)
    while node is not None:
        path.append(node)
        node = parent[node]
    # path runs r(i0) -> ... -> c(j0); consecutive nodes give cells
    cells = [start]
    for a, b in zip(path, path[1:]):
        cells.append((a[1], b[1]) if a[0] == "r" else (b[1], a[1]))
    return cells


def transport(supply, demand, cost) -> TransportResult:
    """Minimum of ``sum plan * cost`` over couplings of ``supply`` and ``demand``.

    Rows/columns with zero mass are dropped before solving.  Masses must be
    non-negative with equal totals.
    """
    supply = [Fraction(x) for x in supply]
    demand = [Fraction(x) for x in demand]
    if any(x < 0 for x in supply) or any(x < 0 for x in demand):
        raise ValueError("masses must be non-negative")
    if sum(supply) != sum(demand):
        raise ValueError("supply and demand totals differ")
    rows = [i for i, x in enumerate(supply) if x > 0]
    cols = [j for j, x in enumerate(demand) if x > 0]
    if not rows:
        return TransportResult(Fraction(0), {}, 0)
    s = [supply[i] for i in rows]
    d = [demand[j] for j in cols]
    c = [[Fraction(cost[i][j]) for j in cols] for i in rows]
    m, n = len(s), len(d)
    basis = northwest_corner(s, d)
    pivots = 0
    while True:
        u, v = _potentials(basis, c, m, n)
        entering = None
        for i in range(m):
            for j in range(n):
                if (i, j) not in basis and c[i][j] - u[i] - v[j] < 0:
                    entering = (i, j)
                    break
            if entering:
                break
        if entering is None:
            break
        cells = _cycle(basis, entering)
        minus = cells[1::2]
        theta = min(basis[cell] for cell in minus)
        leaving = min(cell for cell in minus if basis[cell] == theta)
        for k, cell in enumerate(cells):
            if k == 0:
                basis[cell] = theta
            elif k % 2:
                basis[cell] -= theta
            else:
                basis[cell] += theta
        del basis[leaving]
        pivots += 1
    plan = {(rows[i], cols[j]): x for (i, j), x in basis.items() if x != 0}
    total = sum((x * c[i][j] for (i, j), x in basis.items()), Fraction(0))
    return TransportResult(total, plan, pivots)
