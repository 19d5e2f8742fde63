"""Update-stream generators, oblivious and adaptive.

Oblivious adversaries produce their whole stream from the seed before the
run. Adaptive ones pick each update after reading the algorithm's
read-only state view; besides the view they only know their own past
updates.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Protocol, Union

import numpy as np

from .errors import NoLegalMove
from .graph import EdgeKey, UpdateEvent


class StateView(Protocol):
    @property
    def n(self) -> int: ...

    def served_matching(self) -> tuple[EdgeKey, ...]: ...

    def has_edge(self, e: EdgeKey) -> bool: ...

    def sparsifier_edge_array(self) -> np.ndarray: ...

    def sampled_colors(self) -> dict[int, tuple[int, ...]]: ...

    def epoch(self) -> dict[str, float]: ...


class PairPool:
    """All vertex pairs split into present and absent, with O(1) uniform draws.

    Pair ``(u, v)``, ``u < v``, is encoded by its rank in row-major order of
    the upper triangle. ``perm[:m]`` holds the present pairs.
    """

    def __init__(self, n: int) -> None:
        self.n = n
        self.size = n * (n - 1) // 2
        dtype = np.int32 if self.size < 2**31 else np.int64
        self.perm = np.arange(self.size, dtype=dtype)
        self.pos = np.arange(self.size, dtype=dtype)
        u = np.arange(n, dtype=np.int64)
        self.row_start = u * (2 * n - u - 1) // 2
        self.m = 0

    def encode(self, e: EdgeKey) -> int:
        u, v = e
        return int(self.row_start[u]) + v - u - 1

    def decode(self, p: int) -> EdgeKey:
        u = int(np.searchsorted(self.row_start, p, side="right")) - 1
        return (u, int(p - self.row_start[u]) + u + 1)

    def _swap(self, a: int, b: int) -> None:
        pa, pb = self.perm[a], self.perm[b]
        self.perm[a], self.perm[b] = pb, pa
        self.pos[pb], self.pos[pa] = a, b

    def contains(self, e: EdgeKey) -> bool:
        return int(self.pos[self.encode(e)]) < self.m

    def add(self, e: EdgeKey) -> None:
        i = int(self.pos[self.encode(e)])
        if i < self.m:
            raise ValueError(f"pair {e} already present")
        self._swap(i, self.m)
        self.m += 1

    def remove(self, e: EdgeKey) -> None:
        i = int(self.pos[self.encode(e)])
        if i >= self.m:
            raise ValueError(f"pair {e} not present")
        self.m -= 1
        self._swap(i, self.m)

    def random_present(self, rng: np.random.Generator) -> EdgeKey:
        if self.m == 0:
            raise NoLegalMove("no edge to delete")
        return self.decode(int(self.perm[rng.integers(self.m)]))

    def random_absent(self, rng: np.random.Generator) -> EdgeKey:
        if self.m == self.size:
            raise NoLegalMove("graph is complete")
        return self.decode(int(self.perm[self.m + rng.integers(self.size - self.m)]))


# -- adversary kinds -------------------------------------------------------------


@dataclass(frozen=True)
class RandomOblivious:
    """Insert with probability ``p_insert``, else delete a uniform edge.

    ``vertex_sampler`` is ``"uniform"`` or ``"planted"``; the latter aims
    half the insertions at a hidden perfect matching.
    """

    p_insert: float = 0.5
    vertex_sampler: str = "uniform"
    planted_bias: float = 0.5


@dataclass(frozen=True)
class SlidingWindow:
    """Insert uniform absent edges; once ``window`` are live, delete the oldest first."""

    window: int = 1000


@dataclass(frozen=True)
class AdaptiveMatchedDeleter:
    """Delete a uniform edge of the served matching; refill with probability ``refill_rate``."""

    refill_rate: float = 0.6


@dataclass(frozen=True)
class AdaptiveSparsifierEraser:
    """Delete a uniform live edge of the served sparsifier; refill as above."""

    refill_rate: float = 0.6


AdversaryKind = Union[RandomOblivious, SlidingWindow, AdaptiveMatchedDeleter, AdaptiveSparsifierEraser]


def is_adaptive(kind: AdversaryKind) -> bool:
    return isinstance(kind, (AdaptiveMatchedDeleter, AdaptiveSparsifierEraser))


# -- generators ------------------------------------------------------------------


class Adversary:
    """Stateful generator for one run. Call :meth:`next_event` once per update."""

    def __init__(self, kind: AdversaryKind, n: int, rng: np.random.Generator) -> None:
        if n < 2:
            raise ValueError("adversaries need at least two vertices")
        self.kind = kind
        self.n = n
        self.rng = rng
        self.pool = PairPool(n)
        self.adaptive = is_adaptive(kind)
        self._window: deque[EdgeKey] = deque()
        if isinstance(kind, RandomOblivious) and kind.vertex_sampler == "planted":
            perm = rng.permutation(n)
            self.planted = [tuple(sorted((int(perm[2 * j]), int(perm[2 * j + 1])))) for j in range(n // 2)]
        elif isinstance(kind, RandomOblivious) and kind.vertex_sampler != "uniform":
            raise ValueError(f"unknown vertex sampler {kind.vertex_sampler!r}")
        else:
            self.planted = []
        self._h_epoch: float | None = None
        self._h_edges = np.empty((0, 2), dtype=np.int64)
        self._h_live = 0

    # -- moves --------------------------------------------------------------

    def _insert(self, e: EdgeKey) -> UpdateEvent:
        self.pool.add(e)
        if isinstance(self.kind, SlidingWindow):
            self._window.append(e)
        return UpdateEvent.insert(*e)

    def _delete(self, e: EdgeKey) -> UpdateEvent:
        self.pool.remove(e)
        return UpdateEvent.delete(*e)

    def _refill(self) -> UpdateEvent:
        return self._insert(self.pool.random_absent(self.rng))

    def _planted_or_uniform(self) -> EdgeKey:
        if self.planted and self.rng.random() < self.kind.planted_bias:
            e = self.planted[self.rng.integers(len(self.planted))]
            if not self.pool.contains(e):
                return e
        return self.pool.random_absent(self.rng)

    def _random(self) -> UpdateEvent:
        pool = self.pool
        if pool.m == 0:
            want_insert = True
        elif pool.m == pool.size:
            want_insert = False
        else:
            want_insert = self.rng.random() < self.kind.p_insert
        if want_insert:
            return self._insert(self._planted_or_uniform())
        return self._delete(pool.random_present(self.rng))

    def _sliding(self) -> UpdateEvent:
        if len(self._window) >= self.kind.window or self.pool.m == self.pool.size:
            return self._delete(self._window.popleft())
        return self._refill()

    def _attack(self, view: StateView) -> UpdateEvent | None:
        rng = self.rng
        if isinstance(self.kind, AdaptiveMatchedDeleter):
            targets = view.served_matching()
            if not targets:
                return None
            return self._delete(targets[int(rng.integers(len(targets)))])
        # H only changes when an epoch starts; reread it then and prune lazily
        idx = view.epoch()["index"]
        if idx != self._h_epoch:
            self._h_epoch = idx
            self._h_edges = view.sparsifier_edge_array()
            self._h_live = len(self._h_edges)
        h = self._h_edges
        while self._h_live:
            j = int(rng.integers(self._h_live))
            e = (int(h[j, 0]), int(h[j, 1]))
            if view.has_edge(e):
                return self._delete(e)
            self._h_live -= 1
            h[[j, self._h_live]] = h[[self._h_live, j]]
        return None

    def next_event(self, view: StateView | None = None) -> UpdateEvent:
        kind = self.kind
        if isinstance(kind, RandomOblivious):
            return self._random()
        if isinstance(kind, SlidingWindow):
            return self._sliding()
        if view is None:
            raise ValueError("adaptive adversaries need the state view")
        full = self.pool.m == self.pool.size
        if not full and (self.pool.m == 0 or self.rng.random() < kind.refill_rate):
            return self._refill()
        ev = self._attack(view)
        if ev is not None:
            return ev
        if full:
            raise NoLegalMove("nothing to attack and the graph is complete")
        return self._refill()

    def generate(self, count: int) -> list[UpdateEvent]:
        """Whole stream of an oblivious adversary."""
        if self.adaptive:
            raise ValueError("adaptive adversaries cannot pre-generate their stream")
        return [self.next_event() for _ in range(count)]


def generate_next(adv: Adversary, state_view: StateView | None) -> UpdateEvent:
    """Next update; ``state_view`` must be given exactly for adaptive adversaries."""
    if adv.adaptive != (state_view is not None):
        raise ValueError("state view is supplied iff the adversary is adaptive")
    return adv.next_event(state_view)
