import math

import numpy as np
import pytest

from dynmatch.det import DeterministicMatcher, MultiBucketFamily
from dynmatch.errors import InvalidValue
from dynmatch.graph import UpdateEvent
from dynmatch.matching import matching_number, verify_matching


def test_bucket_geometry():
    fam = MultiBucketFamily(64, 2)
    assert fam.R == pytest.approx(8.0)
    assert fam.bucket_of(1.0) == 1
    assert fam.bucket_of(1 / 8) == 1
    assert fam.bucket_of(1 / 8 - 1e-6) == 2
    assert fam.bucket_of(1 / 64) == 2
    assert fam.copies(1 / 8, 1) == 1
    assert fam.copies(0.3, 2) == math.ceil(0.3 * 64)
    with pytest.raises(InvalidValue):
        fam.bucket_of(1.5)
    with pytest.raises(InvalidValue):
        MultiBucketFamily(10, 0)


def test_changes_keep_copy_counts():
    fam = MultiBucketFamily(16, 2)
    fam.on_x_change((0, 1), None, 0.5)
    i, k = fam.placement((0, 1))
    assert fam.instances(i) == k
    fam.on_x_change((0, 1), 0.5, 0.05)
    j, k2 = fam.placement((0, 1))
    assert sum(fam.instances(b) for b in fam.buckets) == k2
    fam.on_x_change((0, 1), 0.05, None)
    assert fam.placement((0, 1)) is None
    assert sum(fam.instances(b) for b in fam.buckets) == 0
    assert fam.audit()


@pytest.mark.parametrize("K", [1, 2, 3])
def test_ratio_and_pigeonhole(K, rng):
    n = 60
    dm = DeterministicMatcher(n, K)
    live = []
    for t in range(1500):
        if live and rng.random() < 0.35:
            e = live.pop(int(rng.integers(len(live))))
            dm.process_update(UpdateEvent.delete(*e))
        else:
            u, v = sorted(rng.choice(n, 2, replace=False).tolist())
            if dm.graph.contains((u, v)):
                continue
            dm.process_update(UpdateEvent.insert(u, v))
            live.append((u, v))
        M = dm.current_matching()
        assert verify_matching(dm.graph, M)
        fam = dm.family
        assert fam.largest_class()[2] >= fam.pigeonhole_bound()
        if t % 100 == 0 and dm.graph.m:
            assert matching_number(dm.graph) <= 4 * K * max(len(M), 1)
            assert dm.dropped_mass() <= 0.25
    assert dm.family.audit()


def test_view():
    dm = DeterministicMatcher(10, 2)
    dm.process_update(UpdateEvent.insert(0, 1))
    v = dm.expose_state()
    assert v.served_matching() == ((0, 1),)
    assert v.served_size() == 1 and v.num_edges() == 1
    assert v.sparsifier_edge_array().shape == (0, 2)
    assert v.epoch()["index"] == 1
