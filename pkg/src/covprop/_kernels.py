"""Integer hot loops behind the monoid searches.

Every kernel works on distance matrices that were multiplied by a common
denominator, so ``|x - y| <= eps`` becomes an integer comparison.  Each
kernel exists twice: the ``@njit`` version and a plain Python/numpy version.
:func:`select` picks the fallback when the JIT is disabled or when the scaled
integers did not fit in int64 (``object`` arrays).
"""

from __future__ import annotations

import numpy as np

from ._jit import JIT_ENABLED, njit

__all__ = [
    "select",
    "violation_scan",
    "violation_scan_numpy",
    "pair_search",
    "correspondence_search",
]

INT64_MAX = 2**63 - 1

# var kinds for pair_search
FWD = 0
BWD = 1


def select(kernel, *arrays):
    """The compiled kernel if usable on ``arrays`` (matrices or scalars), else its Python body."""
    py = getattr(kernel, "py_func", kernel)
    if not JIT_ENABLED:
        return py
    for a in arrays:
        if isinstance(a, np.ndarray) and a.dtype == object:
            return py
        if isinstance(a, int) and not -INT64_MAX <= a <= INT64_MAX:
            return py
    return kernel


@njit(cache=True)
def violation_scan(Dj, Dk, Mj, Mk, fwd, bwd, ball_j, ball_k, E):
    """First ``(g, g', h)`` breaking one orientation of the almost-iso bound.

    Scans ``h`` outermost, then ``g'``, then ``g``.  Returns ``(-1, -1, -1)``
    when the orientation holds.
    """
    for ih in range(ball_k.shape[0]):
        h = ball_k[ih]
        bh = bwd[h]
        for ig2 in range(ball_j.shape[0]):
            g2 = ball_j[ig2]
            f2 = fwd[g2]
            for ig in range(ball_j.shape[0]):
                g = ball_j[ig]
                lhs = Dk[Mk[fwd[g], f2], h]
                rhs = Dj[Mj[g, g2], bh]
                diff = lhs - rhs
                if diff > E or -diff > E:
                    return g, g2, h
    return -1, -1, -1


def violation_scan_numpy(Dj, Dk, Mj, Mk, fwd, bwd, ball_j, ball_k, E):
    """Broadcast version of :func:`violation_scan` with the same scan order."""
    fb = fwd[ball_j]
    # lhs[g, g2, h] = Dk[Mk[f(g), f(g2)], h]
    prod_k = Mk[fb[:, None], fb[None, :]]
    lhs = Dk[prod_k[:, :, None], ball_k[None, None, :]]
    prod_j = Mj[ball_j[:, None], ball_j[None, :]]
    rhs = Dj[prod_j[:, :, None], bwd[ball_k][None, None, :]]
    bad = np.abs(lhs - rhs) > E
    if not bad.any():
        return -1, -1, -1
    # reorder to (h, g2, g) so argwhere's first hit matches the loop kernel
    h, g2, g = np.argwhere(bad.transpose(2, 1, 0))[0]
    return int(ball_j[g]), int(ball_j[g2]), int(ball_k[h])


@njit(cache=True)
def pair_search(
    var_kind, var_elem, dom_ptr, dom_val, con_ptr, con_data, D1, D2, M1, M2, E, F, B, out, limit
):
    """Backtracking search for almost-iso map pairs.

    Variables are assigned in the given order with candidate values taken in
    ascending order, so solutions come out lexicographically sorted.
    ``con_data[c] = (kind, a, b, c)`` lists the ternary constraints that become
    fully assigned at each depth (CSR layout via ``con_ptr``):

    * kind 0: ``|D2[F[a] F[b], c] - D1[a b, B[c]]| <= E``
    * kind 1: ``|D1[B[a] B[b], c] - D2[a b, F[c]]| <= E``

    Up to ``limit`` solutions are written into ``out`` (forward values then
    backward values per row).  Returns ``(count, nodes_expanded)``.
    """
    nv = var_kind.shape[0]
    n1 = F.shape[0]
    pos = np.full(nv, -1, dtype=np.int64)
    depth = 0
    nodes = 0
    count = 0
    while depth >= 0:
        if depth == nv:
            for i in range(n1):
                out[count, i] = F[i]
            for i in range(B.shape[0]):
                out[count, n1 + i] = B[i]
            count += 1
            if count >= limit:
                return count, nodes
            depth -= 1
            continue
        pos[depth] += 1
        p = dom_ptr[depth] + pos[depth]
        if p >= dom_ptr[depth + 1]:
            pos[depth] = -1
            depth -= 1
            continue
        val = dom_val[p]
        if var_kind[depth] == 0:
            F[var_elem[depth]] = val
        else:
            B[var_elem[depth]] = val
        nodes += 1
        ok = True
        for ci in range(con_ptr[depth], con_ptr[depth + 1]):
            kind = con_data[ci, 0]
            a = con_data[ci, 1]
            b = con_data[ci, 2]
            c = con_data[ci, 3]
            if kind == 0:
                diff = D2[M2[F[a], F[b]], c] - D1[M1[a, b], B[c]]
            else:
                diff = D1[M1[B[a], B[b]], c] - D2[M2[a, b], F[c]]
            if diff > E or -diff > E:
                ok = False
                break
        if ok:
            depth += 1
    return count, nodes


@njit(cache=True)
def correspondence_search(side, elem, dom_ptr, dom_val, D1, D2, E, out, limit):
    """Backtracking over partner choices with pairwise distortion ``<= E``.

    Variable ``i`` pins a pair of the relation: ``(elem[i], value)`` when
    ``side[i] == 0`` and ``(value, elem[i])`` otherwise.  Every two chosen
    pairs ``(x, y), (x', y')`` must satisfy ``|D1[x, x'] - D2[y, y']| <= E``.
    Writes up to ``limit`` value rows into ``out``; returns ``(count, nodes)``.
    """
    nv = side.shape[0]
    pos = np.full(nv, -1, dtype=np.int64)
    xs = np.zeros(nv, dtype=np.int64)
    ys = np.zeros(nv, dtype=np.int64)
    vals = np.zeros(nv, dtype=np.int64)
    depth = 0
    nodes = 0
    count = 0
    while depth >= 0:
        if depth == nv:
            for i in range(nv):
                out[count, i] = vals[i]
            count += 1
            if count >= limit:
                return count, nodes
            depth -= 1
            continue
        pos[depth] += 1
        p = dom_ptr[depth] + pos[depth]
        if p >= dom_ptr[depth + 1]:
            pos[depth] = -1
            depth -= 1
            continue
        v = dom_val[p]
        vals[depth] = v
        if side[depth] == 0:
            x = elem[depth]
            y = v
        else:
            x = v
            y = elem[depth]
        xs[depth] = x
        ys[depth] = y
        nodes += 1
        ok = True
        for i in range(depth):
            diff = D1[xs[i], x] - D2[ys[i], y]
            if diff > E or -diff > E:
                ok = False
                break
        if ok:
            depth += 1
    return count, nodes
