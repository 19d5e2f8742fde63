"""Dynamic simple graph on a fixed vertex set, plus the update-event stream format."""

from __future__ import annotations

import enum
from collections.abc import Iterable, Iterator
from typing import NamedTuple, TextIO

from .errors import DuplicateEdge, GraphError, MissingEdge, SelfLoop, VertexOutOfRange

EdgeKey = tuple[int, int]


def edge_key(u: int, v: int) -> EdgeKey:
    """Canonical (min, max) key for the undirected edge {u, v}."""
    if u == v:
        raise SelfLoop(f"self-loop at vertex {u}")
    return (u, v) if u < v else (v, u)


class EventKind(enum.Enum):
    INSERT = "a"
    DELETE = "d"
    QUERY = "q"


class UpdateEvent(NamedTuple):
    kind: EventKind
    edge: EdgeKey | None = None

    @classmethod
    def insert(cls, u: int, v: int) -> UpdateEvent:
        return cls(EventKind.INSERT, edge_key(u, v))

    @classmethod
    def delete(cls, u: int, v: int) -> UpdateEvent:
        return cls(EventKind.DELETE, edge_key(u, v))

    @classmethod
    def query(cls) -> UpdateEvent:
        return cls(EventKind.QUERY, None)


class DynamicGraph:
    """Undirected simple graph on vertices ``0..n-1`` under edge updates.

    Neighbor sets are insertion-ordered, so iteration order is a function
    of the update history alone.
    """

    def __init__(self, n: int) -> None:
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        self.n = n
        self._adj: list[dict[int, None]] = [{} for _ in range(n)]
        self.m = 0

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise VertexOutOfRange(f"vertex {v} not in [0, {self.n})")

    def insert_edge(self, e: EdgeKey) -> None:
        u, v = e
        self._check_vertex(u)
        self._check_vertex(v)
        if u == v:
            raise SelfLoop(f"self-loop at vertex {u}")
        if v in self._adj[u]:
            raise DuplicateEdge(f"edge {e} already present")
        self._adj[u][v] = None
        self._adj[v][u] = None
        self.m += 1

    def delete_edge(self, e: EdgeKey) -> None:
        u, v = e
        self._check_vertex(u)
        self._check_vertex(v)
        if u == v or v not in self._adj[u]:
            raise MissingEdge(f"edge {e} not present")
        del self._adj[u][v]
        del self._adj[v][u]
        self.m -= 1

    def apply(self, event: UpdateEvent) -> None:
        if event.kind is EventKind.INSERT:
            self.insert_edge(event.edge)
        elif event.kind is EventKind.DELETE:
            self.delete_edge(event.edge)

    def degree(self, v: int) -> int:
        self._check_vertex(v)
        return len(self._adj[v])

    def neighbors(self, v: int) -> Iterator[int]:
        self._check_vertex(v)
        return iter(self._adj[v])

    def contains(self, e: EdgeKey) -> bool:
        u, v = e
        if not (0 <= u < self.n and 0 <= v < self.n) or u == v:
            return False
        return v in self._adj[u]

    __contains__ = contains

    def edges(self) -> Iterator[EdgeKey]:
        """All edges in canonical form, ordered by lower endpoint."""
        for u in range(self.n):
            for v in self._adj[u]:
                if u < v:
                    yield (u, v)

    def adjacency(self) -> list[frozenset[int]]:
        return [frozenset(a) for a in self._adj]

    def copy(self) -> DynamicGraph:
        g = DynamicGraph(self.n)
        g._adj = [dict(a) for a in self._adj]
        g.m = self.m
        return g

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> DynamicGraph:
        g = cls(n)
        for u, v in edges:
            g.insert_edge(edge_key(u, v))
        return g

    def __repr__(self) -> str:
        return f"DynamicGraph(n={self.n}, m={self.m})"


def parse_event(line: str) -> UpdateEvent | None:
    """Parse one stream line; blank lines and ``#`` comments give None."""
    parts = line.split()
    if not parts or parts[0].startswith("#"):
        return None
    tag = parts[0]
    if tag == "q":
        if len(parts) != 1:
            raise GraphError(f"malformed query line: {line!r}")
        return UpdateEvent.query()
    if tag not in ("a", "d") or len(parts) != 3:
        raise GraphError(f"malformed stream line: {line!r}")
    u, v = int(parts[1]), int(parts[2])
    if u < 0 or v < 0:
        raise GraphError(f"negative vertex index in {line!r}")
    return UpdateEvent.insert(u, v) if tag == "a" else UpdateEvent.delete(u, v)


def read_stream(fh: TextIO | Iterable[str]) -> Iterator[UpdateEvent]:
    for line in fh:
        ev = parse_event(line)
        if ev is not None:
            yield ev


def format_event(event: UpdateEvent) -> str:
    if event.kind is EventKind.QUERY:
        return "q"
    u, v = event.edge
    return f"{event.kind.value} {u} {v}"


def write_stream(events: Iterable[UpdateEvent], fh: TextIO) -> None:
    for ev in events:
        fh.write(format_event(ev))
        fh.write("\n")
