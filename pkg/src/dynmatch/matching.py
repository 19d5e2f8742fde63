"""Static matching engines: exact maximum matching and a bounded-path approximation."""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator

import numpy as np

from . import _augment, _blossom
from .graph import DynamicGraph, EdgeKey, edge_key


class Matching:
    """Vertex-disjoint edge set with a mate map."""

    __slots__ = ("_mate", "version")

    def __init__(self, edges: Iterable[EdgeKey] = ()) -> None:
        self._mate: dict[int, int] = {}
        # bumped on every mutation, so observers can tell when to rescan
        self.version = 0
        for u, v in edges:
            self.add((u, v))

    def add(self, e: EdgeKey) -> None:
        u, v = edge_key(*e)
        if u in self._mate or v in self._mate:
            raise ValueError(f"edge {e} shares a vertex with the matching")
        self._mate[u] = v
        self._mate[v] = u
        self.version += 1

    def discard(self, e: EdgeKey) -> bool:
        u, v = e
        if self._mate.get(u) == v:
            del self._mate[u]
            del self._mate[v]
            self.version += 1
            return True
        return False

    def mate(self, v: int) -> int | None:
        return self._mate.get(v)

    def __contains__(self, e: object) -> bool:
        u, v = e  # type: ignore[misc]
        return self._mate.get(u) == v

    def edges(self) -> list[EdgeKey]:
        return sorted((u, v) for u, v in self._mate.items() if u < v)

    def is_valid_in(self, g: DynamicGraph) -> bool:
        """True iff the mate map is symmetric and every matched pair is an edge of ``g``."""
        mate = self._mate
        adj = g._adj
        n = g.n
        return all(0 <= u < n and mate.get(v) == u and v in adj[u] for u, v in mate.items())

    def pairs(self) -> Iterator[EdgeKey]:
        """Matched edges in arbitrary order (no sort)."""
        return ((u, v) for u, v in self._mate.items() if u < v)

    def __iter__(self) -> Iterator[EdgeKey]:
        return iter(self.edges())

    def __len__(self) -> int:
        return len(self._mate) // 2

    def copy(self) -> Matching:
        m = Matching()
        m._mate = dict(self._mate)
        return m

    @classmethod
    def from_mate(cls, mate: np.ndarray) -> Matching:
        m = cls()
        for u in np.flatnonzero(mate >= 0):
            m._mate[int(u)] = int(mate[u])
        return m

    def __repr__(self) -> str:
        return f"Matching({self.edges()})"


def _edge_array(g: DynamicGraph | np.ndarray | Iterable[EdgeKey]) -> np.ndarray:
    if isinstance(g, DynamicGraph):
        return np.asarray(list(g.edges()), dtype=np.int64).reshape(-1, 2)
    return np.asarray(list(g) if not isinstance(g, np.ndarray) else g, dtype=np.int64).reshape(-1, 2)


def to_csr(n: int, edges: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric CSR arrays; neighbors keep the order edges were given in."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    src = np.concatenate([edges[:, 0], edges[:, 1]])
    dst = np.concatenate([edges[:, 1], edges[:, 0]])
    order = np.argsort(src, kind="stable")
    indices = dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return indptr, indices


class ExactMatcher:
    """Edmonds' blossom algorithm with reusable scratch space.

    ``last_ops`` holds the step count of the previous call.
    """

    def __init__(self, n: int) -> None:
        self.n = n
        self._scratch = _blossom.Scratch(n)
        self.last_ops = 0

    def mate_array(self, edges: np.ndarray, warm: Iterable[EdgeKey] = ()) -> np.ndarray:
        s = self._scratch
        indptr, indices = to_csr(self.n, edges)
        mate = np.full(self.n, -1, dtype=np.int64)
        for u, v in warm:
            mate[u] = v
            mate[v] = u
        ops, s.stamp = _blossom.solve(
            indptr, indices, mate, s.base, s.parent, s.used, s.inblossom, s.mark, s.queue, s.touched,
            s.fresh_dead(), s.stamp,
        )
        self.last_ops = int(ops) + len(edges)
        return mate

    def solve(self, edges: np.ndarray, warm: Iterable[EdgeKey] = ()) -> Matching:
        return Matching.from_mate(self.mate_array(edges, warm))

    def start(self, edges: np.ndarray, warm: Iterable[EdgeKey] = ()) -> ExactRun:
        """Resumable form of :meth:`solve` (same result for any step schedule)."""
        return ExactRun(self, edges, warm)


class ExactRun:
    """One blossom computation split into ``n + 1`` steps.

    Step 0 builds the graph and runs the greedy pass; step ``r + 1`` handles
    candidate root ``r``.
    """

    def __init__(self, matcher: ExactMatcher, edges: np.ndarray, warm: Iterable[EdgeKey]) -> None:
        self.matcher = matcher
        self.edges = edges
        self.warm = list(warm)
        self.total_steps = matcher.n + 1
        self.steps_done = 0
        self.ops = 0
        self.result: Matching | None = None

    @property
    def done(self) -> bool:
        return self.steps_done >= self.total_steps

    def advance(self, budget: int) -> int:
        """Run up to ``budget`` steps; returns the number taken."""
        taken = 0
        m = self.matcher
        s = m._scratch
        if budget > 0 and self.steps_done == 0:
            self._indptr, self._indices = to_csr(m.n, self.edges)
            self._mate = np.full(m.n, -1, dtype=np.int64)
            self._dead = s.fresh_dead()
            for u, v in self.warm:
                self._mate[u] = v
                self._mate[v] = u
            self.ops += int(_blossom.greedy(self._indptr, self._indices, self._mate)) + len(self.edges)
            self.steps_done = 1
            taken = 1
        if taken < budget and not self.done:
            r0 = self.steps_done - 1
            r1 = min(m.n, r0 + budget - taken)
            ops, s.stamp = _blossom.search_range(
                r0, r1, self._indptr, self._indices, self._mate,
                s.base, s.parent, s.used, s.inblossom, s.mark, s.queue, s.touched, self._dead, s.stamp,
            )
            self.ops += int(ops)
            taken += r1 - r0
            self.steps_done += r1 - r0
        if self.done and self.result is None:
            self.result = Matching.from_mate(self._mate)
            m.last_ops = self.ops
        return taken


def max_matching_exact(g: DynamicGraph | np.ndarray | Iterable[EdgeKey], n: int | None = None) -> Matching:
    """Maximum-cardinality matching of a general graph."""
    edges = _edge_array(g)
    if n is None:
        n = g.n if isinstance(g, DynamicGraph) else (int(edges.max()) + 1 if len(edges) else 0)
    return ExactMatcher(n).solve(edges)


def matching_number(g: DynamicGraph | np.ndarray | Iterable[EdgeKey], n: int | None = None) -> int:
    return len(max_matching_exact(g, n))


def _adjacency(n: int, edges: np.ndarray) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[int(u)].append(int(v))
        adj[int(v)].append(int(u))
    return adj


def _short_augmenting_path(
    root: int, adj: list[list[int]], mate: list[int], max_len: int
) -> list[int] | None:
    """Depth-first search over simple alternating paths of at most ``max_len`` edges."""
    path = [root]
    on_path = {root}

    def extend(v: int, length: int) -> bool:
        # v is reached by a matched edge (or is the root); next edge is unmatched
        for u in adj[v]:
            if u in on_path or mate[v] == u:
                continue
            if mate[u] == -1:
                path.append(u)
                return True
            w = mate[u]
            if length + 2 >= max_len or w in on_path:
                continue
            path.extend((u, w))
            on_path.update((u, w))
            if extend(w, length + 2):
                return True
            path.pop()
            path.pop()
            on_path.difference_update((u, w))
        return False

    return path if extend(root, 0) else None


def approx_matching_with_ops(
    g: DynamicGraph | np.ndarray | Iterable[EdgeKey], eps: float, n: int | None = None
) -> tuple[Matching, int]:
    """Matching with no augmenting path of length below ``2*ceil(1/eps) + 1``, and the work spent.

    Greedy maximal matching, then repeated passes of bounded-length
    depth-first augmentation until a full pass finds nothing. Any such
    matching has size at least ``mu * k / (k + 1) >= mu / (1 + eps)`` with
    ``k = ceil(1/eps)``. The search is exponential in ``1/eps``; the work
    counts every edge scan.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    edges = _edge_array(g)
    if n is None:
        n = g.n if isinstance(g, DynamicGraph) else (int(edges.max()) + 1 if len(edges) else 0)
    k = math.ceil(1.0 / eps)
    indptr, indices = to_csr(n, edges)
    mate = np.full(n, -1, dtype=np.int64)
    ops = len(edges) + int(_blossom.greedy(indptr, indices, mate))
    ops += _augment.bounded_augment(indptr, indices, mate, 2 * k - 1)
    return Matching.from_mate(mate), ops


def approx_matching(
    g: DynamicGraph | np.ndarray | Iterable[EdgeKey], eps: float, n: int | None = None
) -> Matching:
    """(1+eps)-approximate maximum matching; see :func:`approx_matching_with_ops`."""
    return approx_matching_with_ops(g, eps, n)[0]


def verify_matching(g: DynamicGraph, m: Matching | Iterable[EdgeKey]) -> bool:
    """True iff every edge is present in ``g`` and no two share a vertex."""
    seen: set[int] = set()
    for u, v in m:
        if not g.contains((u, v)) or u in seen or v in seen or u == v:
            return False
        seen.add(u)
        seen.add(v)
    return True


def has_short_augmenting_path(n: int, edges: np.ndarray, m: Matching, max_len: int) -> bool:
    adj = _adjacency(n, _edge_array(edges))
    mate = [-1] * n
    for u, v in m:
        mate[u] = v
        mate[v] = u
    return any(
        mate[r] == -1 and _short_augmenting_path(r, adj, mate, max_len) is not None for r in range(n)
    )
