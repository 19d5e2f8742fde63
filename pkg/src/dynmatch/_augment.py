"""Compiled bounded-length augmentation for the approximate matcher.

Depth-first search over simple alternating paths from each free root, in
index order, flipping the first augmenting path found. Passes repeat until
one finds nothing, so the result has no augmenting path of at most
``max_len`` edges. Op counts cover edge scans, roots tried and flips.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def bounded_pass(indptr, indices, mate, max_len, on_path, stack_v, stack_k):
    """One pass over the free roots. Returns ``(improved, ops)``."""
    n = mate.shape[0]
    ops = 0
    improved = False
    for r in range(n):
        if mate[r] != -1 or indptr[r] == indptr[r + 1]:
            continue
        ops += 1
        # stack_v[j]: even vertex at path length 2j; its odd predecessor is mate[stack_v[j]]
        top = 0
        stack_v[0] = r
        stack_k[0] = indptr[r]
        on_path[r] = True
        found = -1
        while top >= 0:
            v = stack_v[top]
            k = stack_k[top]
            if k == indptr[v + 1]:
                on_path[v] = False
                if top > 0:
                    on_path[mate[v]] = False
                top -= 1
                continue
            stack_k[top] = k + 1
            ops += 1
            u = indices[k]
            if on_path[u] or mate[v] == u:
                continue
            if mate[u] == -1:
                found = u
                break
            w = mate[u]
            if 2 * top + 2 >= max_len or on_path[w]:
                continue
            on_path[u] = True
            on_path[w] = True
            top += 1
            stack_v[top] = w
            stack_k[top] = indptr[w]
        if found < 0:
            continue
        for j in range(top + 1):
            on_path[stack_v[j]] = False
            if j > 0:
                on_path[mate[stack_v[j]]] = False
        prev = found
        for j in range(top, -1, -1):
            x = stack_v[j]
            old = mate[x]
            mate[x] = prev
            mate[prev] = x
            prev = old
            ops += 1
        improved = True
    return improved, ops


def bounded_augment(indptr: np.ndarray, indices: np.ndarray, mate: np.ndarray, max_len: int) -> int:
    """Repeat :func:`bounded_pass` until a pass finds nothing; returns total ops."""
    n = mate.shape[0]
    on_path = np.zeros(n, dtype=np.bool_)
    depth = max_len // 2 + 2
    stack_v = np.empty(depth, dtype=np.int64)
    stack_k = np.empty(depth, dtype=np.int64)
    total = 0
    while True:
        improved, ops = bounded_pass(indptr, indices, mate, max_len, on_path, stack_v, stack_k)
        total += int(ops)
        if not improved:
            return total
