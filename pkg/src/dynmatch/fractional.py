"""Fractional matching maintained by a hierarchical partition.

Every vertex carries a level ``l_v >= 0`` and every edge the value
``x_e = beta ** -(max(l_u, l_v) + 1)`` with ``beta = 1 + eps``. Only the
integer exponent ("edge level") is stored, so bucket boundaries downstream
are decided without floating point.

Repair policy after each edge update, run until no vertex violates:

* promote ``v`` by one level while its fractional degree exceeds 1;
* demote ``v`` by one level while ``l_v > 0`` and its degree is below
  ``1/beta``.

A promotion multiplies the changed incident values by ``1/beta``, so the
degree afterwards stays above ``1/beta``; a demotion multiplies them by
``beta`` and leaves the degree below 1. Neither move can trigger its
opposite at the same vertex.
"""

from __future__ import annotations

import heapq
import math
from collections.abc import Iterable
from typing import NamedTuple, Protocol

from .errors import MissingEdge, NonTermination
from .graph import DynamicGraph, EdgeKey, edge_key

_TOL = 1e-12


class Change(NamedTuple):
    """Net change of one edge value over an update.

    Levels are edge exponents (``x = beta ** -level``); ``None`` means the
    edge is absent on that side.
    """

    edge: EdgeKey
    old_level: int | None
    new_level: int | None
    old_x: float | None
    new_x: float | None


ChangeBatch = list[Change]


class FractionalMatcher(Protocol):
    """Interface consumed by the sparsifier and the deterministic tradeoff."""

    eps: float

    def on_insert(self, e: EdgeKey) -> ChangeBatch: ...

    def on_delete(self, e: EdgeKey) -> ChangeBatch: ...

    def value_sum(self) -> float: ...


class HierarchicalFractionalMatching:
    """Dynamic fractional matching over a :class:`DynamicGraph`.

    The graph is updated by the caller; ``on_insert(e)`` must follow the
    insertion of ``e`` into ``graph`` and ``on_delete(e)`` must follow its
    removal.
    """

    def __init__(self, graph: DynamicGraph, eps: float, iteration_cap: int | None = None) -> None:
        if not 0 < eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        self.graph = graph
        self.eps = eps
        self.beta = 1.0 + eps
        self.demote_below = 1.0 / self.beta
        n = graph.n
        self.level = [0] * n
        self.load = [0.0] * n
        self._value_sum = 0.0
        self._edge_levels: dict[int, int] = {}
        self._pow_cache: list[float] = [1.0]
        self.iteration_cap = iteration_cap if iteration_cap is not None else 64 * max(n, 1)
        self.ops = 0
        self.level_moves = 0
        self._touched: dict[EdgeKey, int | None] = {}

    # -- values -------------------------------------------------------------

    def _x(self, level: int) -> float:
        cache = self._pow_cache
        while len(cache) <= level:
            cache.append(self.beta ** -len(cache))
        return cache[level]

    def x_of_level(self, level: int) -> float:
        return self._x(level)

    def edge_level(self, e: EdgeKey) -> int:
        u, v = e
        return max(self.level[u], self.level[v]) + 1

    def x(self, e: EdgeKey) -> float:
        e = edge_key(*e)
        if e not in self.graph:
            raise MissingEdge(f"edge {e} not present")
        return self._x(self.edge_level(e))

    def value_sum(self) -> float:
        return self._value_sum

    def fractional_degree(self, v: int) -> float:
        return self.load[v]

    def values(self) -> dict[EdgeKey, float]:
        return {e: self._x(self.edge_level(e)) for e in self.graph.edges()}

    def edge_levels(self) -> dict[EdgeKey, int]:
        return {e: self.edge_level(e) for e in self.graph.edges()}

    def distinct_values(self) -> list[float]:
        return sorted(self._x(L) for L, cnt in self._edge_levels.items() if cnt > 0)

    def positive_level_vertices(self) -> int:
        return sum(1 for lv in self.level if lv > 0)

    # -- bookkeeping helpers ------------------------------------------------

    def _count_level(self, level: int, delta: int) -> None:
        c = self._edge_levels.get(level, 0) + delta
        if c:
            self._edge_levels[level] = c
        else:
            self._edge_levels.pop(level, None)

    def _touch(self, e: EdgeKey, old_level: int | None) -> None:
        if e not in self._touched:
            self._touched[e] = old_level

    def _move(self, v: int, delta: int) -> list[int]:
        """Shift ``v`` by one level and rescale the affected edges.

        Returns the neighbors whose load changed.
        """
        lv = self.level[v]
        new_lv = lv + delta
        # Only edges whose other endpoint sits below max(lv, new_lv) change.
        bound = min(lv, new_lv)
        old_x = self._x(lv + 1)
        new_x = self._x(new_lv + 1)
        diff = new_x - old_x
        changed = []
        load = self.load
        level = self.level
        for u in self.graph.neighbors(v):
            self.ops += 1
            if level[u] <= bound:
                e = (u, v) if u < v else (v, u)
                self._touch(e, lv + 1)
                load[u] += diff
                load[v] += diff
                self._value_sum += diff
                self._count_level(lv + 1, -1)
                self._count_level(new_lv + 1, 1)
                changed.append(u)
        level[v] = new_lv
        self.level_moves += 1
        return changed

    def _violation(self, v: int) -> float:
        w = self.load[v]
        if w > 1.0 + _TOL:
            return w - 1.0
        if self.level[v] > 0 and w < self.demote_below - _TOL:
            return self.demote_below - w
        return 0.0

    def _repair(self, seeds: Iterable[int]) -> None:
        heap: list[tuple[float, int]] = []
        for v in seeds:
            mag = self._violation(v)
            if mag > 0:
                heapq.heappush(heap, (-mag, v))
        steps = 0
        while heap:
            neg, v = heapq.heappop(heap)
            mag = self._violation(v)
            if mag <= 0:
                continue
            if abs(mag + neg) > 1e-15:
                heapq.heappush(heap, (-mag, v))
                continue
            steps += 1
            if steps > self.iteration_cap:
                raise NonTermination(f"repair exceeded {self.iteration_cap} level moves")
            delta = 1 if self.load[v] > 1.0 else -1
            for u in self._move(v, delta):
                m2 = self._violation(u)
                if m2 > 0:
                    heapq.heappush(heap, (-m2, u))
            m2 = self._violation(v)
            if m2 > 0:
                heapq.heappush(heap, (-m2, v))

    def _finish(self) -> ChangeBatch:
        batch: ChangeBatch = []
        for e, old in self._touched.items():
            present = e in self.graph
            new = self.edge_level(e) if present else None
            if old == new:
                continue
            batch.append(
                Change(
                    e,
                    old,
                    new,
                    None if old is None else self._x(old),
                    None if new is None else self._x(new),
                )
            )
        self._touched = {}
        return batch

    # -- update entry points ------------------------------------------------

    def on_insert(self, e: EdgeKey) -> ChangeBatch:
        u, v = e = edge_key(*e)
        L = self.edge_level(e)
        x = self._x(L)
        self._touch(e, None)
        self.load[u] += x
        self.load[v] += x
        self._value_sum += x
        self._count_level(L, 1)
        self.ops += 1
        self._repair((u, v))
        return self._finish()

    def on_delete(self, e: EdgeKey) -> ChangeBatch:
        u, v = e = edge_key(*e)
        L = max(self.level[u], self.level[v]) + 1
        x = self._x(L)
        self._touch(e, L)
        self.load[u] -= x
        self.load[v] -= x
        self._value_sum -= x
        self._count_level(L, -1)
        self.ops += 1
        self._repair((u, v))
        for w in (u, v):
            if self.graph.degree(w) == 0:
                self.load[w] = 0.0
        return self._finish()

    # -- checks -------------------------------------------------------------

    def recompute_loads(self) -> list[float]:
        loads = [0.0] * self.graph.n
        for u, v in self.graph.edges():
            x = self._x(self.edge_level((u, v)))
            loads[u] += x
            loads[v] += x
        return loads

    def check_feasible(self, tol: float = 1e-9) -> bool:
        return all(w <= 1.0 + tol for w in self.recompute_loads())

    def check_approx_maximal(self, c: float, d: float) -> bool:
        return check_approx_maximal(self.graph, self.values(), c, d)


def vertex_loads(n: int, x: dict[EdgeKey, float]) -> list[float]:
    loads = [0.0] * n
    for (u, v), val in x.items():
        loads[u] += val
        loads[v] += val
    return loads


def check_feasible(n: int, x: dict[EdgeKey, float], tol: float = 1e-9) -> bool:
    return all(val >= 0 for val in x.values()) and all(w <= 1.0 + tol for w in vertex_loads(n, x))


def check_approx_maximal(
    graph: DynamicGraph, x: dict[EdgeKey, float], c: float, d: float, tol: float = 1e-12
) -> bool:
    """Full-scan test of (c, d)-approximate maximality.

    Every edge needs ``x_e > 1/d``, or an endpoint whose load is at least
    ``1/c`` and all of whose incident values are at most ``1/d``.
    """
    loads = vertex_loads(graph.n, x)
    # max incident value per vertex
    top = [0.0] * graph.n
    for (u, v), val in x.items():
        if val > top[u]:
            top[u] = val
        if val > top[v]:
            top[v] = val
    inv_c, inv_d = 1.0 / c, 1.0 / d
    for e in graph.edges():
        if x.get(e, 0.0) > inv_d:
            continue
        if not any(loads[w] >= inv_c - tol and top[w] <= inv_d + tol for w in e):
            return False
    return True


def level_cap_bound(eps: float, n: int) -> int:
    """Largest edge level any vertex can force on ``n`` vertices."""
    beta = 1.0 + eps
    return int(math.floor(math.log(max(n, 2)) / math.log(beta))) + 2
