import math

import numpy as np
import pytest

from dynmatch.fractional import (
    HierarchicalFractionalMatching,
    check_approx_maximal,
    check_feasible,
    level_cap_bound,
)
from dynmatch.graph import DynamicGraph


def drive(n, eps, steps, rng, p_insert=0.6):
    g = DynamicGraph(n)
    fm = HierarchicalFractionalMatching(g, eps)
    live = []
    for _ in range(steps):
        if live and rng.random() > p_insert:
            e = live.pop(int(rng.integers(len(live))))
            g.delete_edge(e)
            batch = fm.on_delete(e)
        else:
            u, v = sorted(rng.choice(n, 2, replace=False).tolist())
            if g.contains((u, v)):
                continue
            g.insert_edge((u, v))
            live.append((u, v))
            batch = fm.on_insert((u, v))
        yield g, fm, batch


def test_single_edge_value():
    g = DynamicGraph(2)
    fm = HierarchicalFractionalMatching(g, 0.25)
    g.insert_edge((0, 1))
    batch = fm.on_insert((0, 1))
    assert fm.x((0, 1)) == pytest.approx(1 / 1.25)
    assert len(batch) == 1 and batch[0].old_level is None and batch[0].new_level == 1


def test_star_raises_centre_level():
    g = DynamicGraph(30)
    fm = HierarchicalFractionalMatching(g, 0.25)
    for v in range(1, 30):
        g.insert_edge((0, v))
        fm.on_insert((0, v))
    assert fm.level[0] > 0
    assert fm.check_feasible()
    assert fm.fractional_degree(0) >= 1 / 1.25 - 1e-9


@pytest.mark.parametrize("eps", [0.1, 0.25, 0.4])
def test_invariants_under_random_updates(eps, rng):
    beta = 1 + eps
    cap = level_cap_bound(eps, 25)
    for g, fm, _ in drive(25, eps, 800, rng):
        x = fm.values()
        assert check_feasible(g.n, x)
        assert check_approx_maximal(g, x, beta, 2 * beta)
        assert fm.value_sum() == pytest.approx(sum(x.values()), abs=1e-9)
        assert max(fm.level) <= cap
        for v in range(g.n):
            assert fm.fractional_degree(v) == pytest.approx(fm.recompute_loads()[v], abs=1e-9)


def test_change_batches_replay_to_current_values(rng):
    shadow = {}
    for g, fm, batch in drive(20, 0.2, 600, rng):
        for ch in batch:
            assert shadow.get(ch.edge) == ch.old_x
            if ch.new_x is None:
                shadow.pop(ch.edge)
            else:
                assert ch.new_x == pytest.approx(fm.beta ** -ch.new_level)
                shadow[ch.edge] = ch.new_x
        assert shadow == pytest.approx(fm.values())


def test_value_is_constant_fraction_of_matching_number(rng):
    from dynmatch.matching import matching_number

    for t, (g, fm, _) in enumerate(drive(30, 0.25, 600, rng)):
        if t % 25 == 0 and g.m:
            assert fm.value_sum() >= matching_number(g) / (2 * 1.25) - 1e-9


def test_free_checks_reject_bad_input():
    g = DynamicGraph.from_edges(3, [(0, 1), (1, 2)])
    assert not check_feasible(3, {(0, 1): 0.7, (1, 2): 0.7})
    # both edges tiny and nobody saturated: not approximately maximal
    assert not check_approx_maximal(g, {(0, 1): 0.01, (1, 2): 0.01}, 1.25, 2.5)
    assert check_approx_maximal(g, {(0, 1): 0.5, (1, 2): 0.5}, 1.25, 2.5)
    assert level_cap_bound(0.25, 64) == math.floor(math.log(64) / math.log(1.25)) + 2
