from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog

from covprop.lp import Infeasible, Unbounded, solve_lp
from covprop.transport import northwest_corner, transport

F = Fraction


@st.composite
def transport_instances(draw):
    m = draw(st.integers(1, 4))
    n = draw(st.integers(1, 4))
    q = draw(st.sampled_from([1, 2, 3, 6]))
    sup = draw(st.lists(st.integers(0, 6), min_size=m, max_size=m))
    dem = draw(st.lists(st.integers(0, 6), min_size=n, max_size=n))
    if sum(sup) == 0:
        sup[0] = 1
    # rebalance demand to the same total
    total = sum(sup)
    if sum(dem) == 0:
        dem[0] = 1
    scale = F(total, sum(dem))
    supply = [F(s, q) for s in sup]
    demand = [F(d) * scale / q for d in dem]
    cost = [[F(draw(st.integers(0, 9)), draw(st.sampled_from([1, 2, 4]))) for _ in range(n)] for _ in range(m)]
    return supply, demand, cost


def _linprog_transport(supply, demand, cost):
    m, n = len(supply), len(demand)
    c = np.array([[float(v) for v in r] for r in cost]).ravel()
    A, b = [], []
    for i in range(m):
        row = np.zeros(m * n)
        row[i * n : (i + 1) * n] = 1
        A.append(row)
        b.append(float(supply[i]))
    for j in range(n):
        row = np.zeros(m * n)
        row[j::n] = 1
        A.append(row)
        b.append(float(demand[j]))
    return linprog(c, A_eq=np.array(A), b_eq=np.array(b), bounds=(0, None), method="highs").fun


@given(transport_instances())
def test_transport_optimal_and_feasible(inst):
    supply, demand, cost = inst
    res = transport(supply, demand, cost)
    for i, s in enumerate(supply):
        assert sum((x for (a, _), x in res.plan.items() if a == i), F(0)) == s
    for j, d in enumerate(demand):
        assert sum((x for (_, b), x in res.plan.items() if b == j), F(0)) == d
    assert all(x > 0 for x in res.plan.values())
    assert res.cost == sum(x * cost[i][j] for (i, j), x in res.plan.items())
    assert abs(float(res.cost) - _linprog_transport(supply, demand, cost)) < 1e-7


@given(transport_instances())
def test_transport_agrees_with_dense_lp(inst):
    supply, demand, cost = inst
    m, n = len(supply), len(demand)
    A, b = [], []
    for i in range(m):
        A.append([F(int(k // n == i)) for k in range(m * n)])
        b.append(supply[i])
    for j in range(n):
        A.append([F(int(k % n == j)) for k in range(m * n)])
        b.append(demand[j])
    c = [cost[k // n][k % n] for k in range(m * n)]
    assert solve_lp(c, A, b).value == transport(supply, demand, cost).cost


def test_degenerate_ties_terminate():
    supply = [F(1, 3)] * 3
    demand = [F(1, 3)] * 3
    cost = [[F(1)] * 3 for _ in range(3)]
    assert transport(supply, demand, cost).cost == 1
    cost = [[F(int(i != j)) for j in range(3)] for i in range(3)]
    assert transport(supply, demand, cost).cost == 0


def test_northwest_corner_is_feasible():
    basis = northwest_corner([F(1, 2), F(1, 2)], [F(1, 4), F(3, 4)])
    assert sum(basis.values()) == 1


def test_transport_rejects_bad_masses():
    with pytest.raises(ValueError):
        transport([F(1)], [F(1, 2)], [[F(0)]])
    with pytest.raises(ValueError):
        transport([F(-1), F(2)], [F(1)], [[F(0)], [F(0)]])


def test_lp_examples():
    # min -x - y, x + y + s = 1, x - y + t = 1/2
    res = solve_lp([-1, -1, 0, 0], [[1, 1, 1, 0], [1, -1, 0, 1]], [1, F(1, 2)])
    assert res.value == -1
    # redundant equality row
    res = solve_lp([1, 2], [[1, 1], [2, 2]], [1, 2])
    assert res.value == 1 and res.x == (F(1), F(0))
    with pytest.raises(Infeasible):
        solve_lp([1], [[1], [1]], [1, 2])
    with pytest.raises(Unbounded):
        solve_lp([-1, 0], [[1, -1]], [0])


@given(
    st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=1, max_size=3),
    st.lists(st.integers(0, 4), min_size=4, max_size=4),
    st.lists(st.integers(-3, 3), min_size=4, max_size=4),
)
def test_lp_matches_highs(A, x0, c):
    # b = A x0 guarantees feasibility; add a box row to keep it bounded
    A = [row + [0] for row in A] + [[1, 1, 1, 1, 1]]
    x0 = x0 + [0]
    b = [sum(a * x for a, x in zip(row[:4], x0)) for row in A[:-1]] + [sum(x0) + 5]
    x0[-1] = 5
    c = c + [0]
    res = solve_lp(c, A, b)
    ref = linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    assert ref.status == 0
    assert abs(float(res.value) - ref.fun) < 1e-7
    assert all(sum(F(a) * v for a, v in zip(row, res.x)) == bb for row, bb in zip(A, b))
