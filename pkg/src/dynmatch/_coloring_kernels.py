"""Compiled kernels behind :class:`dynmatch.coloring.ColoredMultigraph`.

State layout (all int32 unless noted):

``tree[slot, node]``
    Per-vertex color-usage counters as a complete binary tree over the
    palette padded to ``P2`` (a power of two). Node 1 is the root, leaf for
    color ``c`` is ``P2 + c``.
``inst[iid, col]``
    Edge instances; columns are ``U, V, SU, SV, COLOR, NEXT, PREV``.
    ``COLOR == -1`` marks a free row, ``NEXT`` doubles as the free-list link.
``head[c]`` / ``csize[c]``
    Doubly linked member list and size of each color class.
``hist[s]``
    Number of colors whose class has exactly ``s`` instances.
``meta`` (int64)
    ``MAX_SIZE, WITNESS, FREE_HEAD, LIVE, HIGH_WATER``.
"""

from __future__ import annotations

import numpy as np
from numba import njit

U, V, SU, SV, COLOR, NEXT, PREV = range(7)
INST_COLS = 7
MAX_SIZE, WITNESS, FREE_HEAD, LIVE, HIGH_WATER = range(5)
META_LEN = 5

ERR_DEGREE_CAP = -1
ERR_NO_FREE_COLOR = -2
ERR_FULL = -3


@njit(cache=True)
def find_free_color(tree, su, sv, P, P2):
    """Binary search for a color free at both slots.

    Returns ``(color, probes)``; ``color == -1`` if the combined usage at
    the root leaves no free color.
    """
    probes = 1
    comb = tree[su, 1] + tree[sv, 1]
    if comb >= P:
        return -1, probes
    node = 1
    lo = 0
    width = P2
    while width > 1:
        half = width // 2
        left = 2 * node
        cap_left = min(lo + half, P) - lo
        if cap_left < 0:
            cap_left = 0
        probes += 1
        if tree[su, left] + tree[sv, left] < cap_left:
            node = left
        else:
            node = left + 1
            lo += half
        width = half
    return lo, probes


@njit(cache=True)
def _alloc(inst, meta):
    iid = meta[FREE_HEAD]
    if iid >= 0:
        meta[FREE_HEAD] = inst[iid, NEXT]
        return iid
    iid = meta[HIGH_WATER]
    if iid >= inst.shape[0]:
        return ERR_FULL
    meta[HIGH_WATER] = iid + 1
    return iid


@njit(cache=True)
def commit(tree, inst, head, csize, hist, meta, u, v, su, sv, color, P2):
    """Record a new instance (u, v) with the given color. Returns its id."""
    iid = _alloc(inst, meta)
    if iid < 0:
        return iid
    inst[iid, U] = u
    inst[iid, V] = v
    inst[iid, SU] = su
    inst[iid, SV] = sv
    inst[iid, COLOR] = color
    h = head[color]
    inst[iid, NEXT] = h
    inst[iid, PREV] = -1
    if h >= 0:
        inst[h, PREV] = iid
    head[color] = iid
    node = P2 + color
    while node >= 1:
        tree[su, node] += 1
        tree[sv, node] += 1
        node //= 2
    s = csize[color]
    hist[s] -= 1
    hist[s + 1] += 1
    csize[color] = s + 1
    if s + 1 > meta[MAX_SIZE]:
        meta[MAX_SIZE] = s + 1
        meta[WITNESS] = color
    meta[LIVE] += 1
    return iid


@njit(cache=True)
def insert_det(tree, inst, head, csize, hist, meta, u, v, su, sv, P, P2, cap):
    """Deterministic insertion. Returns ``(iid, color, probes)``; negative
    ``iid`` is one of the ``ERR_*`` codes."""
    if tree[su, 1] >= cap or tree[sv, 1] >= cap:
        return ERR_DEGREE_CAP, -1, 0
    if meta[FREE_HEAD] < 0 and meta[HIGH_WATER] >= inst.shape[0]:
        return ERR_FULL, -1, 0
    color, probes = find_free_color(tree, su, sv, P, P2)
    if color < 0:
        return ERR_NO_FREE_COLOR, -1, probes
    iid = commit(tree, inst, head, csize, hist, meta, u, v, su, sv, color, P2)
    return iid, color, probes


@njit(cache=True)
def delete(tree, inst, head, csize, hist, meta, iid, P2):
    color = inst[iid, COLOR]
    su = inst[iid, SU]
    sv = inst[iid, SV]
    node = P2 + color
    while node >= 1:
        tree[su, node] -= 1
        tree[sv, node] -= 1
        node //= 2
    nx = inst[iid, NEXT]
    pv = inst[iid, PREV]
    if pv >= 0:
        inst[pv, NEXT] = nx
    else:
        head[color] = nx
    if nx >= 0:
        inst[nx, PREV] = pv
    s = csize[color]
    hist[s] -= 1
    hist[s - 1] += 1
    csize[color] = s - 1
    if s == meta[MAX_SIZE] and hist[s] == 0:
        meta[MAX_SIZE] = s - 1
    if meta[WITNESS] == color:
        meta[WITNESS] = -1
    inst[iid, COLOR] = -1
    inst[iid, NEXT] = meta[FREE_HEAD]
    meta[FREE_HEAD] = iid
    meta[LIVE] -= 1


@njit(cache=True)
def largest_color(csize, meta):
    w = meta[WITNESS]
    if w >= 0 and csize[w] == meta[MAX_SIZE]:
        return w
    best = 0
    for c in range(csize.shape[0]):
        if csize[c] > csize[best]:
            best = c
    meta[WITNESS] = best
    return best


@njit(cache=True)
def class_members(inst, head, color, out):
    """Write instance ids of a color class into ``out``; returns the count."""
    k = 0
    i = head[color]
    while i >= 0:
        out[k] = i
        k += 1
        i = inst[i, NEXT]
    return k


@njit(cache=True)
def audit(tree, inst, head, csize, hist, meta, P, P2):
    """Full recount. Returns 0 when every counter and list is consistent,
    otherwise a positive code naming the first failed check."""
    n_slots = tree.shape[0]
    fresh = np.zeros_like(tree)
    live = 0
    for iid in range(meta[HIGH_WATER]):
        c = inst[iid, COLOR]
        if c < 0:
            continue
        if c >= P:
            return 1
        live += 1
        fresh[inst[iid, SU], P2 + c] += 1
        fresh[inst[iid, SV], P2 + c] += 1
    if live != meta[LIVE]:
        return 2
    for s in range(n_slots):
        for c in range(P2):
            if fresh[s, P2 + c] > 1:
                return 3  # two instances share a color at one vertex
        for node in range(P2 - 1, 0, -1):
            fresh[s, node] = fresh[s, 2 * node] + fresh[s, 2 * node + 1]
        for node in range(1, 2 * P2):
            if fresh[s, node] != tree[s, node]:
                return 4
    counts = np.zeros(hist.shape[0], np.int64)
    best = 0
    for c in range(P):
        k = 0
        prev = -1
        i = head[c]
        while i >= 0:
            if inst[i, COLOR] != c or inst[i, PREV] != prev:
                return 5
            k += 1
            prev = i
            i = inst[i, NEXT]
        if k != csize[c]:
            return 6
        counts[k] += 1
        if k > best:
            best = k
    for s in range(hist.shape[0]):
        if counts[s] != hist[s]:
            return 7
    if best != meta[MAX_SIZE]:
        return 8
    return 0


@njit(cache=True)
def stress_run(n, cap, P, n_ops, seed, p_insert, p_parallel, audit_every):
    """Random dynamic multigraph sequence driven entirely in compiled code.

    Uses the same kernels as the Python wrapper. Returns
    ``(violations, audit_failures, max_color, max_probes, inserts, deletes)``.
    A violation is a chosen color already in use at an endpoint.
    """
    np.random.seed(seed)
    P2 = 1
    while P2 < P:
        P2 *= 2
    tree = np.zeros((n, 2 * P2), np.int32)
    max_inst = n * cap // 2 + 1
    inst = np.full((max_inst, INST_COLS), -1, np.int32)
    head = np.full(P, -1, np.int32)
    csize = np.zeros(P, np.int32)
    hist = np.zeros(n // 2 + 2, np.int32)
    hist[0] = P
    meta = np.zeros(META_LEN, np.int64)
    meta[WITNESS] = -1
    meta[FREE_HEAD] = -1
    live_ids = np.empty(max_inst, np.int64)
    pos = np.full(max_inst, -1, np.int64)
    n_live = 0
    violations = 0
    audit_failures = 0
    max_color = -1
    max_probes = 0
    inserts = 0
    deletes = 0
    for step in range(n_ops):
        if n_live > 0 and np.random.random() < p_parallel:
            j = live_ids[np.random.randint(n_live)]
            u = inst[j, U]
            v = inst[j, V]
        else:
            u = np.random.randint(n)
            v = np.random.randint(n - 1)
            if v >= u:
                v += 1
        can_insert = tree[u, 1] < cap and tree[v, 1] < cap
        if can_insert and (n_live == 0 or np.random.random() < p_insert):
            color, probes = find_free_color(tree, u, v, P, P2)
            if color < 0 or tree[u, P2 + color] != 0 or tree[v, P2 + color] != 0:
                violations += 1
                continue
            iid = commit(tree, inst, head, csize, hist, meta, u, v, u, v, color, P2)
            live_ids[n_live] = iid
            pos[iid] = n_live
            n_live += 1
            inserts += 1
            if color > max_color:
                max_color = color
            if probes > max_probes:
                max_probes = probes
        elif n_live > 0:
            k = np.random.randint(n_live)
            iid = live_ids[k]
            delete(tree, inst, head, csize, hist, meta, iid, P2)
            last = live_ids[n_live - 1]
            live_ids[k] = last
            pos[last] = k
            pos[iid] = -1
            n_live -= 1
            deletes += 1
        if audit_every > 0 and (step + 1) % audit_every == 0:
            if audit(tree, inst, head, csize, hist, meta, P, P2) != 0:
                audit_failures += 1
    if audit(tree, inst, head, csize, hist, meta, P, P2) != 0:
        audit_failures += 1
    return violations, audit_failures, max_color, max_probes, inserts, deletes


@njit(cache=True)
def gather_classes(inst, head, csize, colors, P):
    """Concatenated ``(u, v)`` rows of the given color classes, in order.

    Colors outside ``[0, P)`` contribute nothing.
    """
    total = 0
    for j in range(colors.shape[0]):
        c = colors[j]
        if 0 <= c < P:
            total += csize[c]
    out = np.empty((total, 2), np.int64)
    k = 0
    for j in range(colors.shape[0]):
        c = colors[j]
        if c < 0 or c >= P:
            continue
        i = head[c]
        while i >= 0:
            out[k, 0] = inst[i, U]
            out[k, 1] = inst[i, V]
            k += 1
            i = inst[i, NEXT]
    return out
