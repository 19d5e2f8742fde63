"""Edge-color-and-sparsify.

Edges are grouped into buckets of similar value. Bucket ``i`` holds the
edges with ``x_e`` in ``(beta**-i, beta**-(i-1)]`` (``beta = 1 + eps``) and
carries a proper coloring with ``gamma * ceil(beta**i)`` logical colors. A
sample keeps ``k_i`` of those colors, drawn without replacement, and the
sparsifier ``H`` is the union of the kept color classes.

Values produced by the hierarchical fractional matcher are exact powers
``beta**-L``; such a value is the right end of bucket ``L + 1``, and every
bucket decision is made on the integer ``L``.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _coloring_kernels as K
from .coloring import ColoredMultigraph
from .errors import InvalidValue
from .fractional import ChangeBatch
from .graph import EdgeKey


class SampleCountPolicy(enum.Enum):
    ALGORITHM_ONE = "alg1"
    PROOF_VARIANT = "proof"


@dataclass(frozen=True)
class SparsifyParams:
    eps: float
    d: float
    gamma: int = 2
    policy: SampleCountPolicy = SampleCountPolicy.PROOF_VARIANT

    def __post_init__(self) -> None:
        if not 0 < self.eps < 1:
            raise InvalidValue("eps must lie in (0, 1)")
        if self.d < 1:
            raise InvalidValue("d must be at least 1")
        if self.gamma not in (2, 3):
            raise InvalidValue("gamma must be 2 or 3")

    @property
    def beta(self) -> float:
        return 1.0 + self.eps

    def palette(self, i: int) -> int:
        return self.gamma * ceil_pow(self.beta, i)

    def sample_count(self, i: int) -> int:
        """Colors ``k_i`` kept in bucket ``i``.

        ``ALGORITHM_ONE``: ``min(gamma ceil(d beta), palette)``.
        ``PROOF_VARIANT``: the whole palette while ``beta**(i-1) < d``, so
        every edge with ``x_e > 1/d`` is kept; ``min(gamma ceil(d), palette)``
        from there on.
        """
        P = self.palette(i)
        if self.policy is SampleCountPolicy.ALGORITHM_ONE:
            return min(self.gamma * math.ceil(self.d * self.beta), P)
        if self.beta ** (i - 1) < self.d:
            return P
        return min(self.gamma * math.ceil(self.d), P)


def ceil_pow(beta: float, i: int) -> int:
    return math.ceil(beta**i)


def max_bucket(eps: float, n: int) -> int:
    """Highest bucket index; values below its range are dropped."""
    return math.ceil(2.0 * math.log(max(n, 1) / eps) / math.log1p(eps))


def bucket_of(x: float, eps: float, n: int) -> int | None:
    """Index ``i`` with ``beta**-i < x <= beta**-(i-1)``, or None past the last bucket."""
    if not 0 < x <= 1:
        raise InvalidValue(f"value {x} outside (0, 1]")
    beta = 1.0 + eps
    i = int(math.floor(-math.log(x) / math.log(beta))) + 1
    # float log can land one off near a boundary; settle on the exact powers
    while i > 1 and x > beta ** -(i - 1):
        i -= 1
    while beta**-i >= x:
        i += 1
    return i if i <= max_bucket(eps, n) else None


def bucket_of_level(level: int) -> int:
    """Bucket of the exact value ``beta**-level``."""
    return level + 1


class DeltaRecord(NamedTuple):
    bucket: int
    color: int
    edge: EdgeKey
    added: bool


class _Bucket:
    __slots__ = ("index", "coloring", "logical_palette")

    def __init__(self, index: int, coloring: ColoredMultigraph, logical_palette: int) -> None:
        self.index = index
        self.coloring = coloring
        self.logical_palette = logical_palette


class BucketedColoring:
    """Per-bucket proper colorings of the current edge set.

    Only the colors a bucket can actually reach are stored: a simple graph on
    ``n`` vertices has degree below ``n``, so bucket ``i`` keeps a physical
    palette of ``gamma * min(ceil(beta**i), n)`` colors (one fewer for the
    deterministic scheme when that is all it needs). The remaining logical
    colors always have empty classes.
    """

    def __init__(
        self,
        n: int,
        eps: float,
        gamma: int = 2,
        rng: np.random.Generator | None = None,
    ) -> None:
        if gamma not in (2, 3):
            raise InvalidValue("gamma must be 2 or 3")
        self.n = n
        self.eps = eps
        self.beta = 1.0 + eps
        self.gamma = gamma
        self.randomized = gamma == 3
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.i_max = max_bucket(eps, n)
        self.buckets: dict[int, _Bucket] = {}
        self._where: dict[EdgeKey, tuple[int, int]] = {}
        self.ops = 0

    # -- structure ----------------------------------------------------------

    def logical_palette(self, i: int) -> int:
        return self.gamma * ceil_pow(self.beta, i)

    def _bucket(self, i: int) -> _Bucket:
        b = self.buckets.get(i)
        if b is None:
            cap = min(ceil_pow(self.beta, i), max(self.n, 1))
            logical = self.logical_palette(i)
            if self.randomized:
                phys = min(logical, 3 * cap)
            else:
                phys = min(logical, 2 * cap)
            cg = ColoredMultigraph(self.n, cap, palette_size=phys, randomized=self.randomized)
            b = self.buckets[i] = _Bucket(i, cg, logical)
        return b

    def nonempty_buckets(self) -> list[int]:
        return sorted(i for i, b in self.buckets.items() if b.coloring.num_instances > 0)

    def location(self, e: EdgeKey) -> tuple[int, int] | None:
        """``(bucket, color)`` of the edge, or None if it is dropped/absent."""
        return self._where.get(e)

    def bucket_edges(self, i: int) -> list[EdgeKey]:
        b = self.buckets.get(i)
        return b.coloring.edges() if b is not None else []

    def color_class(self, i: int, c: int) -> list[EdgeKey]:
        b = self.buckets.get(i)
        if b is None or c >= b.coloring.palette_size:
            return []
        return b.coloring.color_class(c)

    def class_array(self, i: int, c: int) -> np.ndarray:
        """Members of a color class as an ``(k, 2)`` int array."""
        b = self.buckets.get(i)
        if b is None or c >= b.coloring.palette_size:
            return np.empty((0, 2), dtype=np.int64)
        cg = b.coloring
        size = int(cg._csize[c])
        if size == 0:
            return np.empty((0, 2), dtype=np.int64)
        ids = np.empty(size, dtype=np.int64)
        K.class_members(cg._inst, cg._head, c, ids)
        return cg._inst[ids, :2].astype(np.int64)

    def occupied_colors(self, i: int) -> np.ndarray:
        b = self.buckets.get(i)
        if b is None:
            return np.empty(0, dtype=np.int64)
        return np.flatnonzero(b.coloring._csize).astype(np.int64)

    def max_degree(self, i: int) -> int:
        b = self.buckets.get(i)
        if b is None:
            return 0
        return max((b.coloring.degree(v) for v in range(self.n)), default=0)

    def __len__(self) -> int:
        return len(self._where)

    # -- updates ------------------------------------------------------------

    def _remove(self, e: EdgeKey, log: list[DeltaRecord] | None) -> None:
        loc = self._where.pop(e, None)
        if loc is None:
            return
        i, c = loc
        self.buckets[i].coloring.delete_colored(e, c)
        self.ops += 1
        if log is not None:
            log.append(DeltaRecord(i, c, e, False))

    def _add(self, e: EdgeKey, i: int, log: list[DeltaRecord] | None) -> None:
        if i > self.i_max:
            return
        cg = self._bucket(i).coloring
        if self.randomized:
            c = cg.insert_colored_randomized(e, self.rng)
        else:
            c = cg.insert_colored(e)
        self.ops += cg.last_probes
        self._where[e] = (i, c)
        if log is not None:
            log.append(DeltaRecord(i, c, e, True))

    def apply_change_batch(self, batch: ChangeBatch, log: list[DeltaRecord] | None = None) -> list[DeltaRecord]:
        """Move every changed edge to the bucket of its new level.

        All removals run before any insertion, so a vertex never holds old
        and new copies at once. Returns the records appended to ``log``.
        """
        out = log if log is not None else []
        start = len(out)
        for ch in batch:
            if ch.old_level is not None:
                self._remove(ch.edge, out)
        for ch in batch:
            if ch.new_level is not None:
                self._add(ch.edge, bucket_of_level(ch.new_level), out)
        return out[start:]

    def load_levels(self, levels: dict[EdgeKey, int]) -> None:
        """Bulk insertion for static assignments (edge -> exact level)."""
        for e, L in levels.items():
            self._add(e, bucket_of_level(L), None)

    def audit(self) -> bool:
        return all(b.coloring.audit() for b in self.buckets.values())

    def is_proper(self) -> bool:
        return all(b.coloring.is_proper() for b in self.buckets.values())


@dataclass
class SparsifierSample:
    """Sampled colors per bucket and the resulting edge set ``H``."""

    colors: dict[int, np.ndarray] = field(default_factory=dict)
    edges: np.ndarray = field(default_factory=lambda: np.empty((0, 2), dtype=np.int64))
    work: int = 0
    # index of the epoch whose snapshot was sampled (-1 outside the framework)
    epoch: int = -1

    def edge_set(self) -> set[EdgeKey]:
        return {(int(u), int(v)) for u, v in self.edges}

    def contains(self, e: EdgeKey) -> bool:
        return e in self.edge_set()

    @property
    def sample_total(self) -> int:
        return int(sum(len(c) for c in self.colors.values()))

    def __len__(self) -> int:
        return len(self.edges)


def draw_colors(params: SparsifyParams, i: int, rng: np.random.Generator) -> np.ndarray:
    """``k_i`` distinct logical colors of bucket ``i``, uniformly at random."""
    P = params.palette(i)
    k = params.sample_count(i)
    if k >= P:
        return np.arange(P, dtype=np.int64)
    # Generator.choice without replacement is a partial Fisher-Yates shuffle
    # (or Floyd's method for very large populations): O(k) draws either way.
    return rng.choice(P, size=k, replace=False).astype(np.int64)


def sample_sparsifier(
    bc: BucketedColoring,
    params: SparsifyParams,
    rng: np.random.Generator,
    buckets: Iterable[int] | None = None,
    class_source: Callable[[int, int], np.ndarray] | None = None,
) -> SparsifierSample:
    """Run one draw of the sampler over the nonempty buckets.

    ``class_source(i, c)`` overrides where color classes are read from; the
    framework passes its epoch-start snapshot here.
    """
    source = class_source if class_source is not None else bc.class_array
    idx = bc.nonempty_buckets() if buckets is None else list(buckets)
    sample = SparsifierSample()
    parts = []
    work = 0
    for i in idx:
        cols = draw_colors(params, i, rng)
        sample.colors[i] = cols
        work += len(cols)
        for c in cols:
            arr = source(i, int(c))
            if len(arr):
                parts.append(arr)
    if parts:
        sample.edges = np.concatenate(parts)
    sample.work = work + len(sample.edges)
    return sample


def trim_high_degree(edges: np.ndarray, n: int, threshold: float) -> np.ndarray:
    """Drop every edge with an endpoint whose degree exceeds ``threshold``."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if len(edges) == 0:
        return edges
    deg = np.bincount(edges.ravel(), minlength=n)
    keep = (deg[edges[:, 0]] <= threshold) & (deg[edges[:, 1]] <= threshold)
    return edges[keep]


def trim_threshold(d: float, eps: float) -> float:
    return d * (1.0 + 4.0 * eps)


class MembershipSampler:
    """Vectorized draws of the membership vector ``X`` over a frozen coloring.

    Within a bucket the selected subset of occupied colors follows selection
    sampling (Knuth's Algorithm S) on the first ``u`` positions of a
    population of ``P`` logical colors, which has exactly the law of a
    uniform ``k``-subset restricted to those positions. Buckets are
    independent. Column order follows ``self.edges``.
    """

    def __init__(self, bc: BucketedColoring, params: SparsifyParams) -> None:
        self.params = params
        self.n = bc.n
        edges: list[EdgeKey] = []
        groups: list[tuple[int, int, np.ndarray]] = []
        for i in bc.nonempty_buckets():
            occ = bc.occupied_colors(i)
            col_of_edge = []
            for j, c in enumerate(occ):
                for e in bc.color_class(i, int(c)):
                    edges.append(e)
                    col_of_edge.append(j)
            groups.append((params.palette(i), params.sample_count(i), np.asarray(col_of_edge, dtype=np.int64)))
        self.edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        self.index = {e: j for j, e in enumerate(edges)}
        self._groups = groups

    @property
    def m(self) -> int:
        return len(self.edges)

    def __call__(self, trials: int, rng: np.random.Generator) -> np.ndarray:
        out = np.empty((trials, self.m), dtype=bool)
        col = 0
        for P, k, col_of_edge in self._groups:
            width = len(col_of_edge)
            if k >= P:
                out[:, col : col + width] = True
                col += width
                continue
            u = int(col_of_edge.max()) + 1
            chosen = np.empty((trials, u), dtype=bool)
            left = np.full(trials, k, dtype=np.int64)
            for j in range(u):
                pick = rng.random(trials) * (P - j) < left
                chosen[:, j] = pick
                left -= pick
            out[:, col : col + width] = chosen[:, col_of_edge]
            col += width
        return out


def estimate_membership_probability(
    bc: BucketedColoring,
    params: SparsifyParams,
    e: EdgeKey,
    trials: int,
    rng: np.random.Generator,
) -> float:
    """Empirical ``Pr[e in H]`` from independent calls of :func:`sample_sparsifier`."""
    if trials < 1:
        raise InvalidValue("trials must be positive")
    loc = bc.location(e)
    if loc is None:
        return 0.0
    i, c = loc
    hits = 0
    for _ in range(trials):
        # only the bucket holding e affects its membership
        cols = draw_colors(params, i, rng)
        hits += bool(np.any(cols == c))
    return hits / trials


def membership_probability(bc: BucketedColoring, params: SparsifyParams, e: EdgeKey) -> float:
    """Exact ``Pr[e in H]``: ``k_i / P_i`` for the bucket holding ``e``."""
    loc = bc.location(e)
    if loc is None:
        return 0.0
    i = loc[0]
    return params.sample_count(i) / params.palette(i)


def probability_sandwich(x: float, d: float, eps: float) -> tuple[float, float]:
    base = min(1.0, x * d)
    return base / (1.0 + eps) ** 2, base * (1.0 + eps)
