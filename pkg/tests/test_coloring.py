import math

import numpy as np
import pytest

from dynmatch.coloring import ColoredMultigraph, stress_sequence
from dynmatch.errors import DegreeCapExceeded, InvalidValue


def test_palette_defaults():
    assert ColoredMultigraph(5, 4).palette_size == 7
    assert ColoredMultigraph(5, 4, randomized=True).palette_size == 12
    with pytest.raises(InvalidValue):
        ColoredMultigraph(5, 4, palette_size=6)


def test_parallel_copies_get_distinct_colors():
    cg = ColoredMultigraph(3, 3)
    cols = [cg.insert_colored((0, 1)) for _ in range(3)]
    assert len(set(cols)) == 3
    assert cg.multiplicity((0, 1)) == 3
    assert cg.is_proper() and cg.audit()


def test_degree_cap_enforced():
    cg = ColoredMultigraph(4, 2)
    cg.insert_colored((0, 1))
    cg.insert_colored((0, 2))
    with pytest.raises(DegreeCapExceeded):
        cg.insert_colored((0, 3))
    assert cg.degree(0) == 2


def test_random_sequence_stays_proper(rng):
    n, cap = 12, 4
    cg = ColoredMultigraph(n, cap)
    live = []
    for _ in range(3000):
        if live and rng.random() < 0.4:
            e = live.pop(int(rng.integers(len(live))))
            cg.delete_colored(e)
        else:
            u, v = sorted(rng.choice(n, 2, replace=False).tolist())
            if cg.degree(u) < cap and cg.degree(v) < cap:
                c = cg.insert_colored((u, v))
                assert 0 <= c < cg.palette_size
                assert cg.last_probes <= cg.max_probes
                live.append((u, v))
        assert cg.is_proper()
    assert cg.audit()
    assert len(cg) == len(live)


def test_color_classes_are_matchings(rng):
    cg = ColoredMultigraph(20, 5, randomized=True)
    for _ in range(200):
        u, v = sorted(rng.choice(20, 2, replace=False).tolist())
        if cg.degree(u) < 5 and cg.degree(v) < 5:
            cg.insert_colored_randomized((u, v), rng)
    total = 0
    for c in range(cg.palette_size):
        cls = cg.color_class(c)
        verts = [x for e in cls for x in e]
        assert len(verts) == len(set(verts))
        total += cg.class_size(c)
    assert total == cg.num_instances
    c, size = cg.largest_color_class()
    assert size == max(cg.class_size(k) for k in range(cg.palette_size))


def test_delete_specific_color():
    cg = ColoredMultigraph(2, 3)
    a = cg.insert_colored((0, 1))
    b = cg.insert_colored((0, 1))
    assert cg.delete_colored((0, 1), color=b) == b
    assert cg.colors_of((0, 1)) == [a]


def test_compiled_stress_driver():
    r = stress_sequence(60, 8, 20_000, seed=3)
    assert r["violations"] == 0 and r["audit_failures"] == 0
    assert r["max_color"] < 15
    assert r["max_probes"] <= math.ceil(math.log2(15)) + 1
    assert r["inserts"] > 0 and r["deletes"] > 0
