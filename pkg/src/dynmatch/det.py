"""Deterministic O(K)-approximate matching via value-weighted multigraphs.

With ``R = n**(1/K)``, bucket ``i`` (``1 <= i <= ceil(2 log_R(2n))``) holds
every edge with ``R**-i <= x_e < R**-(i-1)`` (and ``x_e = 1`` in bucket 1),
represented by ``ceil(x_e * R**i)`` parallel copies. Each bucket keeps a
proper coloring from the binary-search scheme; the served matching is the
largest color class over all buckets.
"""

from __future__ import annotations

import math

import numpy as np

from .coloring import ColoredMultigraph
from .errors import InvalidValue
from .fractional import ChangeBatch, HierarchicalFractionalMatching
from .graph import DynamicGraph, EdgeKey, EventKind, UpdateEvent, edge_key
from .matching import Matching


class MultiBucketFamily:
    """Multigraph buckets driven by edge-value changes."""

    def __init__(self, n: int, K: int) -> None:
        if K < 1:
            raise InvalidValue("K must be positive")
        self.n = n
        self.K = K
        self.R = float(max(n, 2)) ** (1.0 / K)
        self.R_ceil = math.ceil(self.R)
        self.num_buckets = math.ceil(2.0 * math.log(2 * max(n, 1)) / math.log(self.R))
        self.buckets: dict[int, ColoredMultigraph] = {}
        # edge -> (bucket, copies)
        self._placement: dict[EdgeKey, tuple[int, int]] = {}
        self.ops = 0

    # -- geometry -----------------------------------------------------------

    def bucket_of(self, x: float) -> int | None:
        """Bucket index for value ``x``, or None if ``x < R**-num_buckets``."""
        if not 0 < x <= 1:
            raise InvalidValue(f"value {x} outside (0, 1]")
        R = self.R
        i = max(1, math.ceil(-math.log(x) / math.log(R)))
        while i > 1 and x >= R ** -(i - 1):
            i -= 1
        while x < R**-i:
            i += 1
        return i if i <= self.num_buckets else None

    def copies(self, x: float, i: int) -> int:
        # guard the ceiling against x * R**i landing a hair above an integer
        return max(1, math.ceil(x * self.R**i - 1e-9))

    def degree_cap(self, i: int) -> int:
        return min(2 * math.ceil(self.R**i), max(self.n - 1, 1) * self.R_ceil)

    def _bucket(self, i: int) -> ColoredMultigraph:
        cg = self.buckets.get(i)
        if cg is None:
            cap = self.degree_cap(i)
            cg = self.buckets[i] = ColoredMultigraph(self.n, cap, palette_size=2 * cap - 1)
        return cg

    # -- updates ------------------------------------------------------------

    def _remove_copies(self, e: EdgeKey, i: int, k: int) -> None:
        cg = self.buckets[i]
        for _ in range(k):
            cg.delete_colored(e)
            self.ops += 1

    def _add_copies(self, e: EdgeKey, i: int, k: int) -> None:
        cg = self._bucket(i)
        for _ in range(k):
            cg.insert_colored(e)
            self.ops += cg.last_probes

    def on_x_change(self, e: EdgeKey, old_x: float | None, new_x: float | None) -> None:
        self.apply_changes([(e, old_x, new_x)])

    def apply_changes(self, changes: list[tuple[EdgeKey, float | None, float | None]]) -> None:
        """Apply a batch of value changes; all copy removals run first."""
        targets = []
        for e, _, new_x in changes:
            tgt = None
            if new_x is not None:
                i = self.bucket_of(new_x)
                if i is not None:
                    tgt = (i, self.copies(new_x, i))
            cur = self._placement.get(e)
            if cur is not None:
                if tgt is not None and tgt[0] == cur[0]:
                    if tgt[1] < cur[1]:
                        self._remove_copies(e, cur[0], cur[1] - tgt[1])
                else:
                    self._remove_copies(e, cur[0], cur[1])
            targets.append((e, cur, tgt))
        for e, cur, tgt in targets:
            if tgt is None:
                self._placement.pop(e, None)
                continue
            have = cur[1] if cur is not None and cur[0] == tgt[0] else 0
            if tgt[1] > have:
                self._add_copies(e, tgt[0], tgt[1] - have)
            self._placement[e] = tgt

    def apply_change_batch(self, batch: ChangeBatch) -> None:
        self.apply_changes([(ch.edge, ch.old_x, ch.new_x) for ch in batch])

    # -- queries ------------------------------------------------------------

    def placement(self, e: EdgeKey) -> tuple[int, int] | None:
        return self._placement.get(e)

    def instances(self, i: int) -> int:
        cg = self.buckets.get(i)
        return cg.num_instances if cg is not None else 0

    def palette(self, i: int) -> int:
        return 2 * self.degree_cap(i) - 1

    def largest_class(self) -> tuple[int, int, int]:
        """``(bucket, color, size)`` of the largest class; ties go to the lower bucket."""
        best = (0, 0, 0)
        for i in sorted(self.buckets):
            c, size = self.buckets[i].largest_color_class()
            if size > best[2]:
                best = (i, c, size)
        return best

    def largest_class_matching(self) -> Matching:
        i, c, size = self.largest_class()
        if size == 0:
            return Matching()
        return Matching(self.buckets[i].color_class(c))

    def pigeonhole_bound(self) -> int:
        return max(
            (math.ceil(self.instances(i) / self.palette(i)) for i in self.buckets),
            default=0,
        )

    def audit(self) -> bool:
        return all(cg.audit() for cg in self.buckets.values())


class DeterministicMatcher:
    """Fractional matcher (``eps = 0.5``) feeding a :class:`MultiBucketFamily`."""

    def __init__(self, n: int, K: int, eps: float = 0.5) -> None:
        self.n = n
        self.graph = DynamicGraph(n)
        self.fm = HierarchicalFractionalMatching(self.graph, eps)
        self.family = MultiBucketFamily(n, K)
        self.update_index = 0
        self.ops_total = 0
        self.last_update_ops = 0

    def process_update(self, event: UpdateEvent) -> None:
        if event.kind is EventKind.QUERY:
            self.last_update_ops = 0
            return
        e = edge_key(*event.edge)
        before = self.fm.ops + self.family.ops
        if event.kind is EventKind.INSERT:
            self.graph.insert_edge(e)
            batch = self.fm.on_insert(e)
        else:
            self.graph.delete_edge(e)
            batch = self.fm.on_delete(e)
        self.family.apply_change_batch(batch)
        self.update_index += 1
        self.last_update_ops = self.fm.ops + self.family.ops - before + 1
        self.ops_total += self.last_update_ops

    def current_matching(self) -> Matching:
        return self.family.largest_class_matching()

    def dropped_mass(self) -> float:
        """Total value of edges below the last bucket."""
        fam = self.family
        floor = fam.R**-fam.num_buckets
        return sum(x for x in self.fm.values().values() if x < floor)

    def expose_state(self) -> DetView:
        return DetView(self)


class DetView:
    """Read-only window on a :class:`DeterministicMatcher`.

    Mirrors the framework view where the notions coincide; there is no
    sparsifier, so the sampled-color accessors are empty.
    """

    __slots__ = ("_dm",)

    def __init__(self, dm: DeterministicMatcher) -> None:
        self._dm = dm

    @property
    def n(self) -> int:
        return self._dm.n

    @property
    def update_index(self) -> int:
        return self._dm.update_index

    def value_sum(self) -> float:
        return self._dm.fm.value_sum()

    def served_matching(self) -> tuple[EdgeKey, ...]:
        return tuple(self._dm.current_matching().edges())

    def served_size(self) -> int:
        return self._dm.family.largest_class()[2]

    def num_edges(self) -> int:
        return self._dm.graph.m

    def has_edge(self, e: EdgeKey) -> bool:
        return self._dm.graph.contains(e)

    def sampled_colors(self) -> dict[int, tuple[int, ...]]:
        return {}

    def sparsifier_edges(self) -> tuple[EdgeKey, ...]:
        return ()

    def sparsifier_edge_array(self) -> np.ndarray:
        return np.empty((0, 2), dtype=np.int64)

    def epoch(self) -> dict[str, float]:
        return {"index": self._dm.update_index, "start_value": 0.0, "length": 1, "elapsed": 0}
