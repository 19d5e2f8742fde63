"""Experiment runner: drives an algorithm with an adversary and writes metrics CSV.

One row per update. ``mu`` and ``ratio`` are filled only at oracle points,
where the exact matcher computes the matching number of the current graph.
"""

from __future__ import annotations

import csv
import io
import math
import time
from collections.abc import Iterable
from dataclasses import dataclass, field
from pathlib import Path
from typing import TextIO

import numpy as np

from .adversaries import Adversary, AdversaryKind, RandomOblivious, is_adaptive
from .det import DeterministicMatcher
from .errors import InvariantViolation
from .framework import FrameworkConfig, RoundingFramework
from .graph import DynamicGraph, EventKind, UpdateEvent
from .matching import ExactMatcher, Matching

COLUMNS = (
    "update",
    "matching_size",
    "mu",
    "ratio",
    "value_sum",
    "sparsifier_edges",
    "epoch",
    "ops",
    "wall_ns",
)


def default_oracle_period(update_count: int) -> int:
    return max(1, math.ceil(update_count / 500))


@dataclass
class ExperimentConfig:
    n: int
    update_count: int
    seed: int = 0
    framework: FrameworkConfig = field(default_factory=FrameworkConfig)
    adversary: AdversaryKind = field(default_factory=RandomOblivious)
    algo: str = "framework"
    K: int = 2
    oracle_period: int | None = None
    out: Path | str | None = None
    record_wall_time: bool = False
    # exact check |E(H)| <= (sum of k_i) * mu(G) for every served sample
    check_sparsifier_bound: bool = False
    # replay: a fixed stream instead of an adversary; "q" events become oracle points
    stream: list[UpdateEvent] | None = None

    def __post_init__(self) -> None:
        if self.algo not in ("framework", "det"):
            raise ValueError(f"unknown algorithm {self.algo!r}")
        if self.n < 2:
            raise ValueError("n must be at least 2")

    @property
    def period(self) -> int:
        return self.oracle_period or default_oracle_period(self.update_count)


@dataclass
class MetricsRow:
    update: int
    matching_size: int
    mu: int | None
    ratio: float | None
    value_sum: float
    sparsifier_edges: int | None
    epoch: int | None
    ops: int
    wall_ns: int | None

    def cells(self) -> list[str]:
        def fmt(v: object) -> str:
            if v is None:
                return ""
            if isinstance(v, float):
                return "inf" if math.isinf(v) else repr(round(v, 10))
            return str(v)

        return [fmt(getattr(self, c)) for c in COLUMNS]


@dataclass
class ExperimentResult:
    updates: int = 0
    oracle_points: int = 0
    max_ratio: float = 0.0
    ops_total: int = 0
    samples_checked: int = 0
    sample_bound_violations: int = 0
    pigeonhole_violations: int = 0
    error: str | None = None
    ratios: list[float] = field(default_factory=list)

    @property
    def mean_ops(self) -> float:
        return self.ops_total / self.updates if self.updates else 0.0

    @property
    def ok(self) -> bool:
        return self.error is None and self.sample_bound_violations == 0 and self.pigeonhole_violations == 0


def assert_valid(graph: DynamicGraph, matching: Iterable[tuple[int, int]]) -> None:
    seen: set[int] = set()
    for u, v in matching:
        if not graph.contains((u, v)):
            raise InvariantViolation(f"served edge {(u, v)} is not in the graph")
        if u in seen or v in seen:
            raise InvariantViolation(f"served edge {(u, v)} shares a vertex")
        seen.add(u)
        seen.add(v)


def mu_exact(graph: DynamicGraph, matcher: ExactMatcher) -> int:
    edges = np.fromiter((x for e in graph.edges() for x in e), dtype=np.int64, count=2 * graph.m)
    return int(np.count_nonzero(matcher.mate_array(edges.reshape(-1, 2)) >= 0) // 2)


class ValidityMonitor:
    """Asserts after every update that the served matching is valid in the graph.

    A full scan runs whenever the served matching changed (new object or a
    bumped version). Otherwise the matching is the one already verified and
    the graph differs by the single updated edge, so only that edge needs to
    be checked: a deletion of a served edge is the one way to break validity.
    """

    def __init__(self) -> None:
        # the object itself is kept so its identity cannot be recycled
        self._seen: Matching | None = None
        self._version = -1
        self.full_scans = 0

    def check(self, graph: DynamicGraph, served: Matching, event: UpdateEvent) -> None:
        if served is not self._seen or served.version != self._version:
            if not served.is_valid_in(graph):
                assert_valid(graph, served.pairs())
                raise InvariantViolation("served matching is not symmetric")
            self.full_scans += 1
            self._seen = served
            self._version = served.version
        elif event.kind is EventKind.DELETE and event.edge in served:
            raise InvariantViolation(f"deleted edge {event.edge} is still served")


class _Runner:
    def __init__(self, cfg: ExperimentConfig) -> None:
        self.cfg = cfg
        if cfg.algo == "framework":
            fc = cfg.framework
            if fc.seed != cfg.seed:
                fc = FrameworkConfig(**{**fc.__dict__, "seed": cfg.seed})
            self.algo = RoundingFramework(cfg.n, fc)
        else:
            self.algo = DeterministicMatcher(cfg.n, cfg.K)
        self.graph = self.algo.graph
        self.oracle = ExactMatcher(cfg.n)
        self.view = self.algo.expose_state()
        self.adversary = None
        if cfg.stream is None:
            self.adversary = Adversary(cfg.adversary, cfg.n, np.random.default_rng([cfg.seed, 2]))
            if not is_adaptive(cfg.adversary):
                self.events = self.adversary.generate(cfg.update_count)
        else:
            self.events = list(cfg.stream)
        self.replay_queries = cfg.stream is not None and any(ev.kind is EventKind.QUERY for ev in self.events)
        self.result = ExperimentResult()
        self.monitor = ValidityMonitor()
        self._epoch_mu: dict[int, int] = {}
        self._last_sample = self.algo.last_sample if cfg.algo == "framework" else None

    def _oracle_due(self, t: int, event: UpdateEvent, last: bool) -> bool:
        if self.replay_queries:
            return event.kind is EventKind.QUERY
        return (t + 1) % self.cfg.period == 0 or last

    def _check_sample(self) -> None:
        fw = self.algo
        ep = fw.epoch.index
        if ep not in self._epoch_mu:
            # the graph right after the update that opened an epoch is its snapshot
            self._epoch_mu = {k: v for k, v in self._epoch_mu.items() if k >= ep - 1}
            self._epoch_mu[ep] = mu_exact(self.graph, self.oracle)
        s = fw.last_sample
        if s is not self._last_sample:
            self._last_sample = s
            if s.epoch >= 0:
                self.result.samples_checked += 1
                if len(s) > s.sample_total * self._epoch_mu[s.epoch]:
                    self.result.sample_bound_violations += 1

    def step(self, t: int, event: UpdateEvent, last: bool) -> MetricsRow:
        cfg = self.cfg
        t0 = time.perf_counter_ns() if cfg.record_wall_time else 0
        self.algo.process_update(event)
        wall = time.perf_counter_ns() - t0 if cfg.record_wall_time else None
        served = self.algo.served if cfg.algo == "framework" else self.algo.current_matching()
        self.monitor.check(self.graph, served, event)
        size = len(served)
        mu = ratio = None
        if self._oracle_due(t, event, last):
            mu = mu_exact(self.graph, self.oracle)
            if mu > 0:
                ratio = mu / size if size else math.inf
                self.result.ratios.append(ratio)
                self.result.max_ratio = max(self.result.max_ratio, ratio)
            self.result.oracle_points += 1
        if cfg.algo == "framework":
            fw = self.algo
            h = len(fw.last_sample)
            epoch = fw.epoch.index
            if cfg.check_sparsifier_bound:
                self._check_sample()
        else:
            h = epoch = None
            fam = self.algo.family
            i, _, best = fam.largest_class()
            if best < fam.pigeonhole_bound():
                self.result.pigeonhole_violations += 1
        ops = self.algo.last_update_ops
        self.result.ops_total += ops
        self.result.updates += 1
        return MetricsRow(t, size, mu, ratio, self.algo.fm.value_sum(), h, epoch, ops, wall)

    def run(self, out: TextIO) -> ExperimentResult:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(COLUMNS)
        total = len(self.events) if self.adversary is None or not self.adversary.adaptive else self.cfg.update_count
        t = 0
        try:
            for t in range(total):
                if self.adversary is not None and self.adversary.adaptive:
                    event = self.adversary.next_event(self.view)
                else:
                    event = self.events[t]
                writer.writerow(self.step(t, event, t == total - 1).cells())
        except Exception as exc:
            self.result.error = f"{type(exc).__name__}: {exc}"
            out.write(f"# error at update {t}: {self.result.error}\n")
            raise
        return self.result


def run_experiment(cfg: ExperimentConfig, out: TextIO | None = None) -> ExperimentResult:
    """Run one experiment, writing CSV to ``out`` or to ``cfg.out``.

    Invariant violations are recorded as a trailing comment line and re-raised.
    """
    runner = _Runner(cfg)
    if out is not None:
        return runner.run(out)
    if cfg.out is None:
        return runner.run(io.StringIO())
    with open(cfg.out, "w", newline="") as fh:
        return runner.run(fh)


def run_to_string(cfg: ExperimentConfig) -> tuple[str, ExperimentResult]:
    buf = io.StringIO()
    res = run_experiment(cfg, buf)
    return buf.getvalue(), res
