import random

import numpy as np
import pytest

from dynmatch.errors import IncompleteComputation, InvalidValue
from dynmatch.framework import FrameworkConfig, RoundingFramework, StaticMatcherKind, WorkMode, epoch_length
from dynmatch.graph import UpdateEvent
from dynmatch.matching import matching_number, verify_matching


def drive(fw, steps, seed, record=None):
    rnd = random.Random(seed)
    n = fw.n
    for _ in range(steps):
        if fw.graph.m and rnd.random() < 0.4:
            fw.delete(*rnd.choice(sorted(fw.graph.edges())))
        else:
            u, v = rnd.sample(range(n), 2)
            if (min(u, v), max(u, v)) in fw.graph:
                continue
            fw.insert(u, v)
        assert verify_matching(fw.graph, fw.served)
        if record is not None:
            record.append(tuple(fw.served.edges()))


def test_config_validation():
    with pytest.raises(InvalidValue):
        FrameworkConfig(eps=0.5)
    assert epoch_length(5.0, 0.1) == 1
    assert epoch_length(100.0, 0.1) == 10


def test_batch_and_stepped_serve_identical_matchings():
    hist = {}
    for mode in WorkMode:
        fw = RoundingFramework(50, FrameworkConfig(eps=0.1, d=20, work_mode=mode, seed=3))
        hist[mode] = []
        drive(fw, 1500, 3, hist[mode])
        assert fw.rolls > 10
    assert hist[WorkMode.BATCH] == hist[WorkMode.STEPPED]


def test_snapshot_matches_shadow_copies():
    fw = RoundingFramework(40, FrameworkConfig(eps=0.1, d=20, work_mode=WorkMode.STEPPED, seed=5, shadow_snapshots=True))
    drive(fw, 1500, 5)
    assert fw.shadow_checks > 100


def test_served_matching_is_large():
    fw = RoundingFramework(40, FrameworkConfig(eps=0.25, d=134, seed=1))
    rnd = random.Random(1)
    worst = 1.0
    for t in range(800):
        u, v = rnd.sample(range(40), 2)
        if (min(u, v), max(u, v)) in fw.graph:
            fw.delete(u, v)
        else:
            fw.insert(u, v)
        if t % 20 == 0 and fw.graph.m:
            worst = max(worst, matching_number(fw.graph) / max(len(fw.served), 1e-9))
    assert worst <= 2.5


def test_stalled_computation_raises():
    fw = RoundingFramework(30, FrameworkConfig(eps=0.1, d=20, work_mode=WorkMode.STEPPED, seed=0))
    rnd = random.Random(0)
    with pytest.raises(IncompleteComputation):
        for _ in range(3000):
            if fw.epoch.computation is not None:
                fw.epoch.budget = 0
            u, v = rnd.sample(range(30), 2)
            if (min(u, v), max(u, v)) not in fw.graph:
                fw.insert(u, v)


def test_same_seed_same_run():
    def run(seed):
        fw = RoundingFramework(30, FrameworkConfig(eps=0.2, d=10, seed=seed))
        h = []
        drive(fw, 600, 9, h)
        return h

    assert run(4) == run(4)


def test_bounded_path_matcher():
    fw = RoundingFramework(30, FrameworkConfig(eps=0.25, d=10, seed=2, static_matcher=StaticMatcherKind.BOUNDED_PATH))
    drive(fw, 500, 2)


def test_view_is_read_only_copy():
    fw = RoundingFramework(20, FrameworkConfig(eps=0.2, d=10, seed=0))
    drive(fw, 200, 0)
    view = fw.expose_state()
    arr = view.sparsifier_edge_array()
    arr[:] = -1
    assert np.all(fw.last_sample.edges >= 0)
    assert set(view.served_matching()) == set(fw.served.edges())
    assert view.epoch()["index"] == fw.epoch.index
    assert view.num_edges() == fw.graph.m
    assert sum(len(c) for c in view.sampled_colors().values()) == fw.last_sample.sample_total


def test_query_event_is_free():
    fw = RoundingFramework(5, FrameworkConfig(eps=0.2, d=10))
    fw.process_update(UpdateEvent.query())
    assert fw.last_update_ops == 0 and fw.update_index == 0
