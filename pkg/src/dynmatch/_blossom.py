"""Compiled Edmonds blossom search on a CSR graph.

One search grows an alternating forest from a single free root with
breadth-first order, contracting odd cycles by relabelling their base. All
scratch arrays are reset only on the vertices a search touched, so the cost
of a search is proportional to the part of the graph it explores.

``mate[v] == -1`` marks a free vertex. Every function returns the number of
elementary steps taken (edge scans plus relabels) for the caller's counter.

Within one static computation, a search that fails leaves a Hungarian tree
whose vertices lie on no augmenting path for any later matching; they are
flagged in ``dead`` and skipped from then on, so failed searches cost
``O(m)`` in total.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def greedy(indptr, indices, mate):
    n = mate.shape[0]
    ops = 0
    for v in range(n):
        if mate[v] != -1:
            continue
        for k in range(indptr[v], indptr[v + 1]):
            ops += 1
            u = indices[k]
            if mate[u] == -1 and u != v:
                mate[v] = u
                mate[u] = v
                break
    return ops


@njit(cache=True)
def _lca(a, b, base, parent, mate, mark, stamp):
    # walk from a to the root marking bases, then from b until a marked one
    while True:
        a = base[a]
        mark[a] = stamp
        if mate[a] == -1:
            break
        a = parent[mate[a]]
    while True:
        b = base[b]
        if mark[b] == stamp:
            return b
        b = parent[mate[b]]


@njit(cache=True)
def _mark_path(v, b, child, base, parent, mate, inblossom):
    while base[v] != b:
        inblossom[base[v]] = True
        inblossom[base[mate[v]]] = True
        parent[v] = child
        child = mate[v]
        v = parent[mate[v]]


@njit(cache=True)
def search(root, indptr, indices, mate, base, parent, used, inblossom, mark, queue, touched, dead, stamp):
    """Augment along a shortest-found path from ``root`` if one exists.

    Scratch arrays must arrive in their reset state (``base[i] == i``,
    ``parent == -1``, ``used``/``inblossom`` False) and are left that way.
    Returns ``(augmented, ops, stamp)``.
    """
    ops = 0
    n_touched = 0
    head = 0
    tail = 0
    used[root] = True
    touched[n_touched] = root
    n_touched += 1
    queue[tail] = root
    tail += 1
    found = -1
    while head < tail and found < 0:
        v = queue[head]
        head += 1
        for k in range(indptr[v], indptr[v + 1]):
            ops += 1
            to = indices[k]
            if dead[to] or base[v] == base[to] or mate[v] == to:
                continue
            if to == root or (mate[to] != -1 and parent[mate[to]] != -1):
                stamp += 1
                cur = _lca(v, to, base, parent, mate, mark, stamp)
                _mark_path(v, cur, to, base, parent, mate, inblossom)
                _mark_path(to, cur, v, base, parent, mate, inblossom)
                for j in range(n_touched):
                    i = touched[j]
                    ops += 1
                    if inblossom[base[i]]:
                        base[i] = cur
                        if not used[i]:
                            used[i] = True
                            queue[tail] = i
                            tail += 1
                for j in range(n_touched):
                    inblossom[touched[j]] = False
            elif parent[to] == -1:
                parent[to] = v
                touched[n_touched] = to
                n_touched += 1
                if mate[to] == -1:
                    found = to
                    break
                w = mate[to]
                used[w] = True
                touched[n_touched] = w
                n_touched += 1
                queue[tail] = w
                tail += 1
    if found >= 0:
        v = found
        while v != -1:
            pv = parent[v]
            ppv = mate[pv]
            mate[v] = pv
            mate[pv] = v
            v = ppv
            ops += 1
    for j in range(n_touched):
        i = touched[j]
        if found < 0:
            dead[i] = True
        base[i] = i
        parent[i] = -1
        used[i] = False
        inblossom[i] = False
    return found >= 0, ops, stamp


class Scratch:
    """Reusable scratch arrays for :func:`search`."""

    def __init__(self, n: int) -> None:
        self.base = np.arange(n, dtype=np.int64)
        self.parent = np.full(n, -1, dtype=np.int64)
        self.used = np.zeros(n, dtype=np.bool_)
        self.inblossom = np.zeros(n, dtype=np.bool_)
        self.mark = np.zeros(n, dtype=np.int64)
        self.queue = np.empty(n, dtype=np.int64)
        self.touched = np.empty(2 * n + 2, dtype=np.int64)
        self.stamp = 0

    def fresh_dead(self) -> np.ndarray:
        return np.zeros(self.base.shape[0], dtype=np.bool_)


@njit(cache=True)
def solve(indptr, indices, mate, base, parent, used, inblossom, mark, queue, touched, dead, stamp):
    """Greedy extension of ``mate`` then one search per free root, in index order.

    A root with no augmenting path never regains one after augmentations
    elsewhere, so a single pass yields a maximum matching.
    Returns ``(ops, stamp)``.
    """
    ops = greedy(indptr, indices, mate)
    n = mate.shape[0]
    for r in range(n):
        if mate[r] != -1 or indptr[r] == indptr[r + 1]:
            ops += 1
            continue
        _, o, stamp = search(r, indptr, indices, mate, base, parent, used, inblossom, mark, queue, touched, dead, stamp)
        ops += o
    return ops, stamp


@njit(cache=True)
def search_range(r0, r1, indptr, indices, mate, base, parent, used, inblossom, mark, queue, touched, dead, stamp):
    """Roots ``r0..r1-1`` of :func:`solve`'s pass. Returns ``(ops, stamp)``."""
    ops = 0
    for r in range(r0, r1):
        if mate[r] != -1 or indptr[r] == indptr[r + 1]:
            ops += 1
            continue
        _, o, stamp = search(r, indptr, indices, mate, base, parent, used, inblossom, mark, queue, touched, dead, stamp)
        ops += o
    return ops, stamp
