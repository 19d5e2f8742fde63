"""Dynamic proper edge coloring of bounded-degree multigraphs.

Two insertion routes share one structure:

* :meth:`ColoredMultigraph.insert_colored` descends a binary tree of
  per-vertex usage counters over the palette. With a palette of at least
  ``2*cap - 1`` colors the two endpoints use at most ``2*cap - 2`` colors
  between them, so some half of every range still has room and the descent
  always reaches a color free at both endpoints.
* :meth:`ColoredMultigraph.insert_colored_randomized` draws uniform colors
  until one is free at both endpoints; with ``3*cap`` colors at least a third
  of the palette is always free.

Parallel copies of one edge are supported. Copies share both endpoints, so
properness gives them distinct colors, and ``(edge, color)`` names a copy.
"""

from __future__ import annotations

import math

import numpy as np

from . import _coloring_kernels as K
from .errors import ColorOutOfRange, DegreeCapExceeded, InvalidValue, MissingEdge, VertexOutOfRange
from .graph import EdgeKey, edge_key

ColorId = int


def _pow2_at_least(p: int) -> int:
    return 1 << max(0, (p - 1).bit_length())


class ColoredMultigraph:
    """Proper edge coloring with a palette fixed at construction.

    Parameters
    ----------
    n:
        Number of vertices.
    degree_cap:
        Maximum multigraph degree any vertex may reach.
    palette_size:
        Defaults to ``2*degree_cap - 1``, or ``3*degree_cap`` when
        ``randomized`` is set.
    """

    def __init__(
        self,
        n: int,
        degree_cap: int,
        palette_size: int | None = None,
        randomized: bool = False,
    ) -> None:
        if degree_cap < 1:
            raise InvalidValue("degree_cap must be positive")
        if palette_size is None:
            palette_size = 3 * degree_cap if randomized else 2 * degree_cap - 1
        if palette_size < 2 * degree_cap - 1:
            raise InvalidValue(
                f"palette {palette_size} too small for degree cap {degree_cap}"
            )
        self.n = n
        self.degree_cap = degree_cap
        self.palette_size = palette_size
        self.randomized = randomized
        self._P2 = _pow2_at_least(palette_size)
        self.max_probes = math.ceil(math.log2(palette_size)) + 1 if palette_size > 1 else 1

        self._slot = np.full(n, -1, dtype=np.int64)
        self._free_slots: list[int] = []
        self._n_slots = 0
        self._tree = np.zeros((4, 2 * self._P2), dtype=np.int32)
        self._inst = np.full((16, K.INST_COLS), -1, dtype=np.int32)
        self._head = np.full(palette_size, -1, dtype=np.int32)
        self._csize = np.zeros(palette_size, dtype=np.int32)
        self._hist = np.zeros(n // 2 + 2, dtype=np.int32)
        self._hist[0] = palette_size
        self._meta = np.zeros(K.META_LEN, dtype=np.int64)
        self._meta[K.WITNESS] = -1
        self._meta[K.FREE_HEAD] = -1

        self._copies: dict[EdgeKey, list[int]] = {}
        self.last_probes = 0
        self.total_probes = 0
        self.total_draws = 0

    # -- internal storage management --------------------------------------

    def _slot_for(self, v: int) -> int:
        s = self._slot[v]
        if s >= 0:
            return int(s)
        if self._free_slots:
            s = self._free_slots.pop()
        else:
            s = self._n_slots
            self._n_slots += 1
            if s >= self._tree.shape[0]:
                grown = np.zeros((2 * self._tree.shape[0], self._tree.shape[1]), dtype=np.int32)
                grown[: self._tree.shape[0]] = self._tree
                self._tree = grown
        self._slot[v] = s
        return s

    def _release_if_idle(self, v: int) -> None:
        s = self._slot[v]
        if s >= 0 and self._tree[s, 1] == 0:
            self._slot[v] = -1
            self._free_slots.append(int(s))

    def _reserve_instance(self) -> None:
        if self._meta[K.FREE_HEAD] < 0 and self._meta[K.HIGH_WATER] >= self._inst.shape[0]:
            grown = np.full((2 * self._inst.shape[0], K.INST_COLS), -1, dtype=np.int32)
            grown[: self._inst.shape[0]] = self._inst
            self._inst = grown

    def _endpoints(self, e: EdgeKey) -> tuple[int, int]:
        u, v = edge_key(*e)
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise VertexOutOfRange(f"edge {e} outside [0, {self.n})")
        return u, v

    def _check_caps(self, u: int, v: int) -> None:
        if self.degree(u) >= self.degree_cap or self.degree(v) >= self.degree_cap:
            raise DegreeCapExceeded(
                f"edge ({u}, {v}) would exceed degree cap {self.degree_cap}"
            )

    # -- public operations -------------------------------------------------

    def insert_colored(self, e: EdgeKey) -> ColorId:
        """Insert one copy of ``e`` with the binary-search color choice."""
        u, v = self._endpoints(e)
        self._check_caps(u, v)
        su, sv = self._slot_for(u), self._slot_for(v)
        self._reserve_instance()
        iid, color, probes = K.insert_det(
            self._tree, self._inst, self._head, self._csize, self._hist, self._meta,
            u, v, su, sv, self.palette_size, self._P2, self.degree_cap,
        )
        if iid == K.ERR_DEGREE_CAP:
            raise DegreeCapExceeded(f"edge ({u}, {v}) exceeds degree cap {self.degree_cap}")
        if iid < 0:
            raise RuntimeError(f"coloring kernel failed with code {iid}")
        self.last_probes = probes
        self.total_probes += probes
        self._copies.setdefault((u, v), []).append(iid)
        return color

    def insert_colored_randomized(self, e: EdgeKey, rng: np.random.Generator) -> ColorId:
        """Insert one copy of ``e`` with a uniformly drawn free color."""
        u, v = self._endpoints(e)
        self._check_caps(u, v)
        su, sv = self._slot_for(u), self._slot_for(v)
        self._reserve_instance()
        leaf_u = self._tree[su, self._P2:]
        leaf_v = self._tree[sv, self._P2:]
        draws = 0
        while True:
            c = int(rng.integers(self.palette_size))
            draws += 1
            if leaf_u[c] == 0 and leaf_v[c] == 0:
                break
        iid = K.commit(
            self._tree, self._inst, self._head, self._csize, self._hist, self._meta,
            u, v, su, sv, c, self._P2,
        )
        self.last_probes = draws
        self.total_draws += draws
        self._copies.setdefault((u, v), []).append(iid)
        return c

    def delete_colored(self, e: EdgeKey, color: ColorId | None = None) -> ColorId:
        """Remove one copy of ``e``: the one with ``color``, else the newest.

        Returns the freed color.
        """
        u, v = self._endpoints(e)
        ids = self._copies.get((u, v))
        if not ids:
            raise MissingEdge(f"no colored copy of {e}")
        if color is None:
            iid = ids.pop()
        else:
            for pos, iid in enumerate(ids):
                if self._inst[iid, K.COLOR] == color:
                    ids.pop(pos)
                    break
            else:
                raise MissingEdge(f"edge {e} has no copy colored {color}")
        if not ids:
            del self._copies[(u, v)]
        freed = int(self._inst[iid, K.COLOR])
        K.delete(self._tree, self._inst, self._head, self._csize, self._hist, self._meta, iid, self._P2)
        self._release_if_idle(u)
        self._release_if_idle(v)
        return freed

    def color_class(self, c: ColorId) -> list[EdgeKey]:
        """Edges colored ``c``, newest first. Always a matching."""
        if not 0 <= c < self.palette_size:
            raise ColorOutOfRange(f"color {c} outside palette of {self.palette_size}")
        inst = self._inst
        out = []
        i = int(self._head[c])
        while i >= 0:
            out.append((int(inst[i, K.U]), int(inst[i, K.V])))
            i = int(inst[i, K.NEXT])
        return out

    def class_size(self, c: ColorId) -> int:
        if not 0 <= c < self.palette_size:
            raise ColorOutOfRange(f"color {c} outside palette of {self.palette_size}")
        return int(self._csize[c])

    def largest_color_class(self) -> tuple[ColorId, int]:
        c = int(K.largest_color(self._csize, self._meta))
        return c, int(self._csize[c])

    def colors_of(self, e: EdgeKey) -> list[ColorId]:
        ids = self._copies.get(edge_key(*e), ())
        return [int(self._inst[i, K.COLOR]) for i in ids]

    def multiplicity(self, e: EdgeKey) -> int:
        return len(self._copies.get(edge_key(*e), ()))

    def degree(self, v: int) -> int:
        s = self._slot[v]
        return int(self._tree[s, 1]) if s >= 0 else 0

    def vertex_colors(self, v: int) -> set[ColorId]:
        s = self._slot[v]
        if s < 0:
            return set()
        return {int(c) for c in np.flatnonzero(self._tree[s, self._P2 : self._P2 + self.palette_size])}

    def edges(self) -> list[EdgeKey]:
        return list(self._copies)

    @property
    def num_instances(self) -> int:
        return int(self._meta[K.LIVE])

    def __len__(self) -> int:
        return self.num_instances

    def audit(self) -> bool:
        """Recount every counter from the instance table."""
        code = K.audit(
            self._tree, self._inst, self._head, self._csize, self._hist, self._meta,
            self.palette_size, self._P2,
        )
        if code != 0:
            return False
        for v in range(self.n):
            s = self._slot[v]
            colors = self._tree[s, self._P2:] if s >= 0 else None
            if colors is not None and colors.max(initial=0) > 1:
                return False
        return True

    def is_proper(self) -> bool:
        """Direct check: every color class is a matching of the simple graph."""
        for c in range(self.palette_size):
            if self._csize[c] == 0:
                continue
            seen: set[int] = set()
            for u, v in self.color_class(c):
                if u in seen or v in seen:
                    return False
                seen.add(u)
                seen.add(v)
        return True


def stress_sequence(
    n: int,
    degree_cap: int,
    n_ops: int,
    seed: int,
    *,
    palette_size: int | None = None,
    p_insert: float = 0.6,
    p_parallel: float = 0.2,
    audit_every: int = 1000,
) -> dict[str, int]:
    """Run a random dynamic multigraph sequence through the deterministic kernels.

    The driver lives in compiled code so that long sequences are cheap; it
    calls the same search and commit kernels as :class:`ColoredMultigraph`.
    """
    if palette_size is None:
        palette_size = 2 * degree_cap - 1
    out = K.stress_run(n, degree_cap, palette_size, n_ops, seed, p_insert, p_parallel, audit_every)
    keys = ("violations", "audit_failures", "max_color", "max_probes", "inserts", "deletes")
    return {k: int(x) for k, x in zip(keys, out)}
