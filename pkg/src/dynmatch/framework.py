"""Dynamic integral matching by periodic sparsify-and-match over epochs.

Epoch ``t`` starts with the value ``S_t = |x|_1`` of the fractional matching
and lasts ``L_t`` updates: one update if ``S_t <= 1/eps``, else
``ceil(eps * S_t)``. A short epoch samples ``H`` and matches it on the spot.
A long epoch samples ``H`` from the colorings *as they were when the epoch
began* and matches it while updates keep arriving; the result, minus edges
deleted in the meantime, is served during the next epoch. Edges deleted from
the served matching are dropped immediately and never replaced mid-epoch.

The epoch-start colorings are never copied. Each long epoch keeps a log of
the edges added to or removed from every ``(bucket, color)`` class, and a
class as of the epoch start is the current class with the log undone.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from . import _coloring_kernels as K
from .errors import IncompleteComputation, InvalidValue, InvariantViolation
from .fractional import ChangeBatch, FractionalMatcher, HierarchicalFractionalMatching
from .graph import DynamicGraph, EdgeKey, EventKind, UpdateEvent, edge_key
from .matching import ExactMatcher, Matching, approx_matching_with_ops
from .sparsifier import (
    BucketedColoring,
    SampleCountPolicy,
    SparsifierSample,
    SparsifyParams,
    draw_colors,
)


class WorkMode(enum.Enum):
    BATCH = "batch"
    STEPPED = "stepped"


class StaticMatcherKind(enum.Enum):
    EXACT = "exact"
    BOUNDED_PATH = "bounded"


@dataclass(frozen=True)
class FrameworkConfig:
    eps: float = 0.1
    d: float = 1199.0
    gamma: int = 2
    policy: SampleCountPolicy = SampleCountPolicy.PROOF_VARIANT
    work_mode: WorkMode = WorkMode.BATCH
    static_matcher: StaticMatcherKind = StaticMatcherKind.EXACT
    seed: int = 0
    # keep full epoch-start copies of every class and compare on each read
    shadow_snapshots: bool = False

    def __post_init__(self) -> None:
        if not 0 < self.eps < 0.5:
            raise InvalidValue("eps must lie in (0, 1/2)")

    @property
    def params(self) -> SparsifyParams:
        return SparsifyParams(self.eps, self.d, self.gamma, self.policy)


def epoch_length(start_value: float, eps: float) -> int:
    if start_value <= 1.0 / eps:
        return 1
    return math.ceil(eps * start_value)


class EpochComputation:
    """Sampling ``H`` from the epoch-start snapshot and matching it.

    Split into unit steps: one per sampled color (materializing its class),
    then the matcher's steps. The result does not depend on how the steps are
    scheduled.
    """

    def __init__(self, fw: RoundingFramework, epoch: EpochState) -> None:
        self.fw = fw
        self.epoch = epoch
        rng = np.random.default_rng([fw.config.seed, 1, epoch.index])
        params = fw.params
        # colors are drawn up front; they only depend on the epoch's rng
        self.plan: list[tuple[int, np.ndarray]] = [(i, draw_colors(params, i, rng)) for i in epoch.buckets]
        self.sample_steps = sum(len(c) for _, c in self.plan)
        if fw.config.static_matcher is StaticMatcherKind.EXACT:
            match_steps = fw.n + 1
        else:
            match_steps = 1
        self.total_steps = self.sample_steps + match_steps
        self.steps_done = 0
        self.work = 0
        self._bucket_pos = 0
        self._color_pos = 0
        self._parts: list[np.ndarray] = []
        self._run = None
        self.sample: SparsifierSample | None = None
        self.result: Matching | None = None

    @property
    def done(self) -> bool:
        return self.result is not None

    def _materialize(self, i: int, cols: np.ndarray) -> None:
        fw = self.fw
        b = fw.bc.buckets.get(i)
        if b is None:
            return
        cg = b.coloring
        touched = self.epoch.touched_colors.get(i)
        if touched:
            hit = np.zeros(max(int(cols.max()), max(touched)) + 1, dtype=bool)
            hit[np.fromiter(touched, dtype=np.int64, count=len(touched))] = True
            mask = hit[cols]
            plain, logged = cols[~mask], cols[mask]
        else:
            plain, logged = cols, cols[:0]
        if len(plain):
            arr = K.gather_classes(cg._inst, cg._head, cg._csize, plain, cg.palette_size)
            if len(arr):
                self._parts.append(arr)
                self.work += len(arr)
        if len(logged):
            arr = self._snapshot_union(i, logged)
            if len(arr):
                self._parts.append(arr)
                self.work += len(arr)
        if fw.config.shadow_snapshots:
            for c in cols:
                fw.check_shadow(i, int(c))
            if len(logged) and fw._shadow is not None:
                want = set().union(*(fw._shadow.get((i, int(c)), set()) for c in logged))
                if set(map(tuple, arr.tolist())) != want:
                    raise InvariantViolation(f"snapshot union of bucket {i} disagrees with shadow copies")

    def _snapshot_union(self, i: int, cols: np.ndarray) -> np.ndarray:
        """Union of the epoch-start classes ``cols`` of bucket ``i``.

        An edge sits in one class at a time, so the start-time union is the
        current union minus edges whose first logged change was an addition,
        plus those whose first logged change was a removal.
        """
        fw = self.fw
        n = fw.n
        cg = fw.bc.buckets[i].coloring
        cur = K.gather_classes(cg._inst, cg._head, cg._csize, cols, cg.palette_size)
        added, removed = [], []
        log = self.epoch.delta_log
        for c in cols.tolist():
            first: dict[EdgeKey, bool] = {}
            for e, a in log.get((i, c), ()):
                first.setdefault(e, a)
            for (u, v), a in first.items():
                (added if a else removed).append(u * n + v)
        start = set((cur[:, 0] * n + cur[:, 1]).tolist())
        start.difference_update(added)
        start.update(removed)
        codes = np.fromiter(sorted(start), dtype=np.int64, count=len(start))
        out = np.empty((len(codes), 2), dtype=np.int64)
        out[:, 0], out[:, 1] = np.divmod(codes, n)
        return out

    def advance(self, budget: int) -> int:
        taken = 0
        while taken < budget and self._bucket_pos < len(self.plan):
            i, cols = self.plan[self._bucket_pos]
            chunk = cols[self._color_pos : self._color_pos + (budget - taken)]
            self._materialize(i, chunk)
            self.work += len(chunk)
            taken += len(chunk)
            self._color_pos += len(chunk)
            if self._color_pos >= len(cols):
                self._bucket_pos += 1
                self._color_pos = 0
        if taken < budget and self.sample is None and self._bucket_pos >= len(self.plan):
            self._finish_sample()
        if taken < budget and self.sample is not None and self.result is None:
            taken += self._advance_matcher(budget - taken)
        self.steps_done += taken
        return taken

    def _finish_sample(self) -> None:
        edges = np.concatenate(self._parts) if self._parts else np.empty((0, 2), dtype=np.int64)
        # canonical order, so the matcher sees the same input whenever classes were read
        edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]
        self.sample = SparsifierSample(dict(self.plan), edges, self.work, self.epoch.index)
        n = self.fw.n
        start = self.epoch.served_at_start
        if start and len(edges):
            codes = np.asarray(start, dtype=np.int64) @ np.array([n, 1], dtype=np.int64)
            keep = np.isin(codes, edges[:, 0] * n + edges[:, 1])
            self.warm = [e for e, k in zip(start, keep) if k]
        else:
            self.warm = []
        if self.fw.config.static_matcher is StaticMatcherKind.EXACT:
            self._run = self.fw.matcher.start(edges, self.warm)

    def _advance_matcher(self, budget: int) -> int:
        if self._run is not None:
            n = self._run.advance(budget)
            if self._run.done:
                self.result = self._run.result
                self.work += self._run.ops
            return n
        m, ops = approx_matching_with_ops(self.sample.edges, self.fw.config.eps, self.fw.n)
        self.work += ops
        self.result = m
        return 1

    def run_to_completion(self) -> None:
        while not self.done:
            self.advance(self.total_steps + 1)


@dataclass
class EpochState:
    index: int
    start_value: float
    length: int
    elapsed: int = 0
    buckets: list[int] = field(default_factory=list)
    served_at_start: list[EdgeKey] = field(default_factory=list)
    # (bucket, color) -> [(edge, added)] in update order
    delta_log: dict[tuple[int, int], list[tuple[EdgeKey, bool]]] = field(default_factory=dict)
    touched_colors: dict[int, set[int]] = field(default_factory=dict)
    computation: EpochComputation | None = None
    budget: int = 0


class RoundingFramework:
    """Dynamic matching against adaptive adversaries.

    ``fractional_factory(graph, eps)`` may supply any object with the
    :class:`FractionalMatcher` interface whose change batches carry exact
    edge levels.
    """

    def __init__(
        self,
        n: int,
        config: FrameworkConfig | None = None,
        fractional_factory: Callable[[DynamicGraph, float], FractionalMatcher] | None = None,
    ) -> None:
        self.n = n
        self.config = config or FrameworkConfig()
        self.params = self.config.params
        self.graph = DynamicGraph(n)
        factory = fractional_factory or HierarchicalFractionalMatching
        self.fm = factory(self.graph, self.config.eps)
        self.bc = BucketedColoring(
            n, self.config.eps, self.config.gamma, rng=np.random.default_rng([self.config.seed, 0])
        )
        self.matcher = ExactMatcher(n)
        self.served = Matching()
        self.served_origin_size = 0
        self.last_sample = SparsifierSample()
        self.update_index = 0
        self.ops_total = 0
        self.last_update_ops = 0
        self.rolls = 0
        self._shadow: dict[tuple[int, int], set[EdgeKey]] | None = None
        self.shadow_checks = 0
        self._start_epoch(0)

    # -- epochs -------------------------------------------------------------

    def _fresh_computation(self, state: EpochState) -> EpochComputation:
        return EpochComputation(self, state)

    def _start_epoch(self, t: int) -> int:
        """Open epoch ``t``; returns the work done immediately (short epochs)."""
        S = self.fm.value_sum()
        L = epoch_length(S, self.config.eps)
        state = EpochState(t, S, L, buckets=self.bc.nonempty_buckets(), served_at_start=self.served.edges())
        self.epoch = state
        comp = self._fresh_computation(state)
        if L == 1:
            comp.run_to_completion()
            self._serve(comp)
            return comp.work
        state.computation = comp
        state.budget = math.ceil(comp.total_steps / L)
        if self.config.shadow_snapshots:
            self._take_shadow()
        return 0

    def _serve(self, comp: EpochComputation) -> None:
        result = comp.result
        kept = Matching(e for e in result.edges() if e in self.graph)
        self.served = kept
        self.served_origin_size = len(result)
        self.last_sample = comp.sample

    def epoch_roll(self) -> int:
        """Close the current epoch and open the next; returns the work done."""
        state = self.epoch
        comp = state.computation
        work = 0
        if comp is not None:
            if self.config.work_mode is WorkMode.BATCH:
                before = comp.work
                comp.run_to_completion()
                work = comp.work - before
            elif not comp.done:
                raise IncompleteComputation(
                    f"epoch {state.index}: {comp.steps_done}/{comp.total_steps} steps after {state.elapsed} updates"
                )
            self._serve(comp)
        # the finished epoch's log is released here, not spread over the next epoch
        state.delta_log = {}
        state.touched_colors = {}
        self._shadow = None
        self.rolls += 1
        return work + self._start_epoch(state.index + 1)

    # -- snapshot -----------------------------------------------------------

    def snapshot_class(self, i: int, c: int) -> np.ndarray:
        """Class ``c`` of bucket ``i`` as it stood at the epoch start, sorted."""
        members = set(map(tuple, self.bc.class_array(i, c).tolist()))
        # the first record of an edge tells whether it was there at the start
        first: dict[EdgeKey, bool] = {}
        for e, added in self.epoch.delta_log.get((i, c), ()):
            first.setdefault(e, added)
        for e, added in first.items():
            if added:
                members.discard(e)
            else:
                members.add(e)
        if not members:
            return np.empty((0, 2), dtype=np.int64)
        return np.asarray(sorted(members), dtype=np.int64)

    def _take_shadow(self) -> None:
        shadow: dict[tuple[int, int], set[EdgeKey]] = {}
        for i in self.epoch.buckets:
            for c in self.bc.occupied_colors(i):
                shadow[(i, int(c))] = set(self.bc.color_class(i, int(c)))
        self._shadow = shadow

    def check_shadow(self, i: int, c: int) -> None:
        if self._shadow is None:
            return
        got = {(int(u), int(v)) for u, v in self.snapshot_class(i, c)}
        want = self._shadow.get((i, c), set())
        if got != want:
            raise InvariantViolation(f"snapshot of bucket {i} color {c} disagrees with shadow copy")
        self.shadow_checks += 1

    # -- updates ------------------------------------------------------------

    def _log(self, records: Sequence) -> None:
        log = self.epoch.delta_log
        touched = self.epoch.touched_colors
        for r in records:
            log.setdefault((r.bucket, r.color), []).append((r.edge, r.added))
            touched.setdefault(r.bucket, set()).add(r.color)

    def process_update(self, event: UpdateEvent) -> None:
        if event.kind is EventKind.QUERY:
            self.last_update_ops = 0
            return
        e = edge_key(*event.edge)
        fm_ops = self.fm.ops
        bc_ops = self.bc.ops
        if event.kind is EventKind.INSERT:
            self.graph.insert_edge(e)
            batch: ChangeBatch = self.fm.on_insert(e)
        else:
            self.graph.delete_edge(e)
            self.served.discard(e)
            batch = self.fm.on_delete(e)
        state = self.epoch
        records = self.bc.apply_change_batch(batch)
        if state.computation is not None:
            self._log(records)
        ops = (self.fm.ops - fm_ops) + (self.bc.ops - bc_ops) + 1
        state.elapsed += 1
        comp = state.computation
        if comp is not None and self.config.work_mode is WorkMode.STEPPED and not comp.done:
            before = comp.work
            comp.advance(state.budget)
            ops += comp.work - before
        if state.elapsed >= state.length:
            ops += self.epoch_roll()
        self.update_index += 1
        self.last_update_ops = ops
        self.ops_total += ops

    def insert(self, u: int, v: int) -> None:
        self.process_update(UpdateEvent.insert(u, v))

    def delete(self, u: int, v: int) -> None:
        self.process_update(UpdateEvent.delete(u, v))

    # -- queries ------------------------------------------------------------

    def current_matching(self) -> Matching:
        return self.served.copy()

    def expose_state(self) -> FrameworkView:
        return FrameworkView(self)


class FrameworkView:
    """Read-only window on a framework's state between two updates.

    Every accessor returns copies or immutable values, computed on demand.
    """

    __slots__ = ("_fw",)

    def __init__(self, fw: RoundingFramework) -> None:
        self._fw = fw

    @property
    def n(self) -> int:
        return self._fw.n

    @property
    def update_index(self) -> int:
        return self._fw.update_index

    def levels(self) -> tuple[int, ...]:
        return tuple(getattr(self._fw.fm, "level", ()))

    def value_sum(self) -> float:
        return self._fw.fm.value_sum()

    def edge_value(self, e: EdgeKey) -> float:
        return self._fw.fm.x(e)

    def served_matching(self) -> tuple[EdgeKey, ...]:
        return tuple(self._fw.served.edges())

    def served_size(self) -> int:
        return len(self._fw.served)

    def graph_edges(self) -> tuple[EdgeKey, ...]:
        return tuple(self._fw.graph.edges())

    def num_edges(self) -> int:
        return self._fw.graph.m

    def has_edge(self, e: EdgeKey) -> bool:
        return self._fw.graph.contains(e)

    def degree(self, v: int) -> int:
        return self._fw.graph.degree(v)

    def buckets(self) -> tuple[int, ...]:
        return tuple(self._fw.bc.nonempty_buckets())

    def edge_location(self, e: EdgeKey) -> tuple[int, int] | None:
        return self._fw.bc.location(e)

    def color_class(self, bucket: int, color: int) -> tuple[EdgeKey, ...]:
        return tuple(self._fw.bc.color_class(bucket, color))

    def sampled_colors(self) -> dict[int, tuple[int, ...]]:
        """Colors kept by the most recent completed sample, per bucket."""
        return {i: tuple(int(c) for c in cols) for i, cols in self._fw.last_sample.colors.items()}

    def sparsifier_edges(self) -> tuple[EdgeKey, ...]:
        return tuple(map(tuple, self._fw.last_sample.edges.tolist()))

    def sparsifier_edge_array(self) -> np.ndarray:
        """Copy of the served sample ``H`` as an ``(h, 2)`` array."""
        return self._fw.last_sample.edges.copy()

    def pending_sampled_colors(self) -> dict[int, tuple[int, ...]]:
        comp = self._fw.epoch.computation
        if comp is None:
            return {}
        return {i: tuple(int(c) for c in cols) for i, cols in comp.plan}

    def epoch(self) -> dict[str, float]:
        st = self._fw.epoch
        return {
            "index": st.index,
            "start_value": st.start_value,
            "length": st.length,
            "elapsed": st.elapsed,
        }
