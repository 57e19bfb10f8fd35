"""Compiled inner loops.

Everything here works on plain integer arrays: a graph is a ``(3, 2n)``
partner table (row ``c`` holds the color ``c + 1`` involution) and a matching
is a length ``2m`` partner vector.  The public modules wrap these with the
domain types and validation.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def count_cycles(a, b):
    """Number of components of the union of two fixed-point-free involutions."""
    size = a.shape[0]
    seen = np.zeros(size, np.bool_)
    cycles = 0
    for s in range(size):
        if seen[s]:
            continue
        cycles += 1
        v = s
        while True:
            seen[v] = True
            w = a[v]
            seen[w] = True
            v = b[w]
            if v == s:
                break
    return cycles


@njit(cache=True)
def unrank_matching(index, m, out):
    """Write the ``index``-th matching of the backtracking order into ``out``.

    The order pairs the smallest unmatched vertex with each remaining vertex in
    increasing order, so ranks are mixed-radix numbers with digits of radix
    2m-1, 2m-3, ..., 1 (most significant first).
    """
    size = 2 * m
    free = np.arange(size)
    count = size
    weight = 1
    for k in range(1, m):
        weight *= 2 * m - 2 * k - 1
    for k in range(m):
        radix = 2 * m - 2 * k - 1
        digit = (index // weight) % radix
        if k < m - 1:
            weight //= 2 * m - 2 * k - 3
        u = free[0]
        v = free[1 + digit]
        out[u] = v
        out[v] = u
        # drop positions 0 and 1 + digit
        j = 0
        for i in range(1, count):
            if i != 1 + digit:
                free[j] = free[i]
                j += 1
        count -= 2


@njit(cache=True)
def rank_matching(partner):
    size = partner.shape[0]
    m = size // 2
    free = np.arange(size)
    count = size
    index = 0
    for k in range(m):
        radix = 2 * m - 2 * k - 1
        u = free[0]
        v = partner[u]
        digit = -1
        for i in range(1, count):
            if free[i] == v:
                digit = i - 1
                break
        index = index * radix + digit
        j = 0
        for i in range(1, count):
            if i != 1 + digit:
                free[j] = free[i]
                j += 1
        count -= 2
    return index


@njit(cache=True)
def all_matchings(m, total):
    out = np.empty((total, 2 * m), np.int8)
    row = np.empty(2 * m, np.int64)
    for idx in range(total):
        unrank_matching(idx, m, row)
        for j in range(2 * m):
            out[idx, j] = row[j]
    return out


@njit(cache=True)
def _pair_cycles_on_free(end, c1, c2, part, stamp, mark):
    size = part.shape[0]
    cycles = 0
    for s in range(size):
        if part[s] != -1 or stamp[s] == mark:
            continue
        cycles += 1
        v = s
        while True:
            stamp[v] = mark
            w = end[c1, v]
            stamp[w] = mark
            v = end[c2, w]
            if v == s:
                break
    return cycles


@njit(cache=True)
def search_faces(P, seed_best, stop_above, prune, tight, strict, node_budget, hist):
    """Depth-first search over color-0 matchings of the graph ``P``.

    Face closures are tracked incrementally: ``end[c, v]`` is the other
    endpoint of the open (0, c) path ending at the unmatched vertex ``v``.
    Placing a color-0 edge (u, w) closes a (0, c) face iff ``end[c, u] == w``.

    prune      -- enable branch and bound at all
    tight      -- remaining-face bound from the matching-distance triangle
                  inequality instead of 3 per remaining edge
    strict     -- prune only when the bound is below the incumbent, so every
                  maximizer is reached and counted
    node_budget-- stop after this many placements (0 = unlimited)
    stop_above -- stop as soon as a matching with more faces is found (-1 = off)
    hist       -- per-leaf histogram of face counts, filled when not pruning

    Returns (best, witness, maximizer_count, leaves, pruned, complete).
    """
    size = P.shape[1]
    m = size // 2
    end = P.copy()
    part = -np.ones(size, np.int64)
    us = np.zeros(m, np.int64)
    vs = np.zeros(m, np.int64)
    closed_at = np.zeros((m, 3), np.bool_)
    sa = np.zeros((m, 3), np.int64)
    sb = np.zeros((m, 3), np.int64)
    gain = np.zeros(m, np.int64)
    witness = -np.ones(size, np.int64)
    stamp = np.zeros(size, np.int64)
    mark = 0

    best = seed_best
    count = 0
    leaves = 0
    pruned = 0
    nodes = 0
    closed = 0
    complete = True

    depth = 0
    us[0] = 0
    vs[0] = 0
    while depth >= 0:
        u = us[depth]
        if part[u] != -1:
            w = part[u]
            for c in range(3):
                if not closed_at[depth, c]:
                    end[c, sa[depth, c]] = u
                    end[c, sb[depth, c]] = w
            part[u] = -1
            part[w] = -1
            closed -= gain[depth]
        w = vs[depth] + 1
        while w < size and part[w] != -1:
            w += 1
        if w >= size:
            depth -= 1
            continue
        vs[depth] = w

        g = 0
        for c in range(3):
            a = end[c, u]
            if a == w:
                closed_at[depth, c] = True
                g += 1
            else:
                b = end[c, w]
                closed_at[depth, c] = False
                sa[depth, c] = a
                sb[depth, c] = b
                end[c, a] = b
                end[c, b] = a
        part[u] = w
        part[w] = u
        gain[depth] = g
        closed += g
        nodes += 1

        remaining = m - depth - 1
        if remaining == 0:
            leaves += 1
            if not prune:
                hist[closed] += 1
            if closed > best:
                best = closed
                count = 1
                for j in range(size):
                    witness[j] = part[j]
                if stop_above >= 0 and best > stop_above:
                    complete = False
                    break
            elif closed == best:
                count += 1
            if node_budget > 0 and nodes >= node_budget:
                complete = False
                break
            continue
        if node_budget > 0 and nodes >= node_budget:
            complete = False
            break

        if prune:
            if tight:
                mark += 1
                c01 = _pair_cycles_on_free(end, 0, 1, part, stamp, mark)
                mark += 1
                c02 = _pair_cycles_on_free(end, 0, 2, part, stamp, mark)
                mark += 1
                c12 = _pair_cycles_on_free(end, 1, 2, part, stamp, mark)
                bound = (3 * remaining + c01 + c02 + c12) // 2
                if bound > 3 * remaining:
                    bound = 3 * remaining
            else:
                bound = 3 * remaining
            total = closed + bound
            if total < best or (total == best and not strict):
                pruned += 1
                continue

        depth += 1
        nu = u + 1
        while part[nu] != -1:
            nu += 1
        us[depth] = nu
        vs[depth] = nu
    return best, witness, count, leaves, pruned, complete


@njit(cache=True)
def partial_face_table(matchings, e1, e2):
    total = matchings.shape[0]
    f01 = np.empty(total, np.int8)
    f02 = np.empty(total, np.int8)
    for idx in range(total):
        row = matchings[idx]
        f01[idx] = count_cycles(row, e1)
        f02[idx] = count_cycles(row, e2)
    return f01, f02


@njit(cache=True)
def table_scan(matchings, f01, f02, e3, hist):
    """Exhaustive max of F01 + F02 + F03 over the precomputed matching table."""
    total = matchings.shape[0]
    best = -1
    first = -1
    count = 0
    for idx in range(total):
        f = f01[idx] + f02[idx] + count_cycles(matchings[idx], e3)
        hist[f] += 1
        if f > best:
            best = f
            first = idx
            count = 1
        elif f == best:
            count += 1
    return best, first, count


@njit(cache=True)
def is_connected(P):
    size = P.shape[1]
    seen = np.zeros(size, np.bool_)
    stack = np.empty(size, np.int64)
    top = 0
    stack[0] = 0
    top = 1
    seen[0] = True
    reached = 1
    while top > 0:
        top -= 1
        v = stack[top]
        for c in range(3):
            w = P[c, v]
            if not seen[w]:
                seen[w] = True
                stack[top] = w
                top += 1
                reached += 1
    return reached == size


@njit(cache=True)
def canonical_code(P, out):
    """Lexicographically least BFS-relabelled partner table over all roots.

    ``P`` must be connected.  From a root, vertices are labelled in the order
    they are discovered while scanning colors 1, 2, 3 of each dequeued vertex;
    a color-preserving isomorphism is fixed by the image of one vertex, so the
    minimum over roots is a complete invariant.  Writes ``3 * 2n`` labels into
    ``out``.
    """
    size = P.shape[1]
    label = np.empty(size, np.int64)
    order = np.empty(size, np.int64)
    cur = np.empty(3 * size, np.int64)
    have = False
    for root in range(size):
        for j in range(size):
            label[j] = -1
        label[root] = 0
        order[0] = root
        nxt = 1
        head = 0
        cmp = -1
        if have:
            cmp = 0
        pos = 0
        while head < nxt:
            v = order[head]
            head += 1
            for c in range(3):
                w = P[c, v]
                if label[w] < 0:
                    label[w] = nxt
                    order[nxt] = w
                    nxt += 1
                val = label[w]
                if cmp == 0:
                    if val < out[pos]:
                        cmp = -1
                    elif val > out[pos]:
                        cmp = 1
                        break
                cur[pos] = val
                pos += 1
            if cmp == 1:
                break
        if cmp == -1:
            for j in range(3 * size):
                out[j] = cur[j]
            have = True


@njit(cache=True)
def survey_batch(m, lo, hi, e1, e2, mst_only):
    """Canonical codes for the E3 candidates with ranks in [lo, hi).

    Returns (ranks, f13, f23, codes) for the kept candidates.  With
    ``mst_only`` candidates with F13 > 1 or F23 > 1 are dropped before
    canonicalization.
    """
    size = 2 * m
    count = hi - lo
    ranks = np.empty(count, np.int64)
    f13 = np.empty(count, np.int64)
    f23 = np.empty(count, np.int64)
    codes = np.empty((count, 3 * size), np.int64)
    P = np.empty((3, size), np.int64)
    for j in range(size):
        P[0, j] = e1[j]
        P[1, j] = e2[j]
    e3 = np.empty(size, np.int64)
    kept = 0
    for idx in range(lo, hi):
        unrank_matching(idx, m, e3)
        a = count_cycles(e1, e3)
        b = count_cycles(e2, e3)
        if mst_only and (a != 1 or b != 1):
            continue
        for j in range(size):
            P[2, j] = e3[j]
        canonical_code(P, codes[kept])
        ranks[kept] = idx
        f13[kept] = a
        f23[kept] = b
        kept += 1
    return ranks[:kept], f13[:kept], f23[:kept], codes[:kept]


@njit(cache=True)
def colored_sweep_batch(m, e2_rank, total, e1):
    """Connected graphs with E1 fixed, E2 of the given rank, every E3.

    Returns (e3 ranks, codes) of the connected candidates.
    """
    size = 2 * m
    ranks = np.empty(total, np.int64)
    codes = np.empty((total, 3 * size), np.int64)
    P = np.empty((3, size), np.int64)
    e2 = np.empty(size, np.int64)
    e3 = np.empty(size, np.int64)
    unrank_matching(e2_rank, m, e2)
    for j in range(size):
        P[0, j] = e1[j]
        P[1, j] = e2[j]
    kept = 0
    for idx in range(total):
        unrank_matching(idx, m, e3)
        for j in range(size):
            P[2, j] = e3[j]
        if not is_connected(P):
            continue
        canonical_code(P, codes[kept])
        ranks[kept] = idx
        kept += 1
    return ranks[:kept], codes[:kept]
