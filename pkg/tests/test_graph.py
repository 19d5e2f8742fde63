import io

import pytest

from dynmatch.errors import DuplicateEdge, GraphError, MissingEdge, SelfLoop, VertexOutOfRange
from dynmatch.graph import DynamicGraph, EventKind, UpdateEvent, edge_key, parse_event, read_stream, write_stream


def test_edge_key_is_canonical():
    assert edge_key(5, 2) == (2, 5)
    with pytest.raises(SelfLoop):
        edge_key(3, 3)


def test_insert_delete_and_queries():
    g = DynamicGraph(4)
    g.insert_edge((2, 0))
    g.insert_edge((0, 1))
    assert g.m == 2
    assert g.contains((0, 2)) and g.contains((2, 0))
    assert g.degree(0) == 2
    assert sorted(g.neighbors(0)) == [1, 2]
    assert sorted(g.edges()) == [(0, 1), (0, 2)]
    g.delete_edge((0, 2))
    assert not g.contains((0, 2))
    assert g.m == 1


def test_errors():
    g = DynamicGraph(3)
    g.insert_edge((0, 1))
    with pytest.raises(DuplicateEdge):
        g.insert_edge((1, 0))
    with pytest.raises(MissingEdge):
        g.delete_edge((1, 2))
    with pytest.raises(VertexOutOfRange):
        g.insert_edge((0, 3))
    with pytest.raises(SelfLoop):
        g.insert_edge((2, 2))
    # a failed call leaves the graph untouched
    assert g.m == 1


def test_contains_out_of_range_is_false():
    g = DynamicGraph(2)
    assert not g.contains((0, 5))
    assert not g.contains((1, 1))


def test_stream_roundtrip():
    events = [UpdateEvent.insert(0, 1), UpdateEvent.insert(3, 2), UpdateEvent.query(), UpdateEvent.delete(1, 0)]
    buf = io.StringIO()
    write_stream(events, buf)
    assert list(read_stream(io.StringIO(buf.getvalue()))) == events


def test_parse_event_skips_comments_and_rejects_garbage():
    assert parse_event("# hello") is None
    assert parse_event("   ") is None
    assert parse_event("q").kind is EventKind.QUERY
    for bad in ("x 1 2", "a 1", "a -1 2", "q 1"):
        with pytest.raises(GraphError):
            parse_event(bad)


def test_copy_is_independent():
    g = DynamicGraph.from_edges(3, [(0, 1), (1, 2)])
    h = g.copy()
    h.delete_edge((0, 1))
    assert g.contains((0, 1)) and not h.contains((0, 1))
