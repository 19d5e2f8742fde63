import numpy as np
import pytest

from dynmatch.adversaries import (
    AdaptiveMatchedDeleter,
    AdaptiveSparsifierEraser,
    Adversary,
    PairPool,
    RandomOblivious,
    SlidingWindow,
    generate_next,
)
from dynmatch.errors import NoLegalMove
from dynmatch.framework import FrameworkConfig, RoundingFramework
from dynmatch.graph import DynamicGraph, EventKind


def test_pair_pool_encoding_roundtrip():
    pool = PairPool(7)
    seen = set()
    for u in range(7):
        for v in range(u + 1, 7):
            p = pool.encode((u, v))
            assert pool.decode(p) == (u, v)
            seen.add(p)
    assert seen == set(range(21))


def test_pair_pool_draws(rng):
    pool = PairPool(4)
    with pytest.raises(NoLegalMove):
        pool.random_present(rng)
    for _ in range(6):
        pool.add(pool.random_absent(rng))
    with pytest.raises(NoLegalMove):
        pool.random_absent(rng)
    e = pool.random_present(rng)
    pool.remove(e)
    assert not pool.contains(e) and pool.m == 5
    with pytest.raises(ValueError):
        pool.remove(e)


def replay_valid(events, n):
    g = DynamicGraph(n)
    for ev in events:
        g.apply(ev)
    return g


def test_random_streams_are_legal_and_seeded():
    a = Adversary(RandomOblivious(0.6), 60, np.random.default_rng(1)).generate(2000)
    b = Adversary(RandomOblivious(0.6), 60, np.random.default_rng(1)).generate(2000)
    assert a == b
    replay_valid(a, 60)
    ins = sum(ev.kind is EventKind.INSERT for ev in a)
    assert 1100 < ins < 1300


def test_planted_sampler_hits_the_hidden_matching():
    adv = Adversary(RandomOblivious(1.0, "planted"), 40, np.random.default_rng(2))
    events = adv.generate(100)
    planted = set(adv.planted)
    assert len(planted) == 20
    # about half of the first insertions aim at the 20 planted pairs
    assert 5 <= sum(ev.edge in planted for ev in events[:20]) <= 17
    assert sum(ev.edge in planted for ev in events) >= 15
    with pytest.raises(ValueError):
        Adversary(RandomOblivious(0.5, "bogus"), 10, np.random.default_rng(0))


def test_sliding_window_deletes_oldest():
    events = Adversary(SlidingWindow(5), 10, np.random.default_rng(3)).generate(40)
    replay_valid(events, 10)
    inserted = [ev.edge for ev in events if ev.kind is EventKind.INSERT]
    deleted = [ev.edge for ev in events if ev.kind is EventKind.DELETE]
    assert deleted == inserted[: len(deleted)]
    live = len(inserted) - len(deleted)
    assert live in (4, 5)
    # once full, inserts and deletes alternate
    kinds = [ev.kind for ev in events[5:]]
    assert all(a is not b for a, b in zip(kinds, kinds[1:]))


def test_adaptive_needs_view():
    adv = Adversary(AdaptiveMatchedDeleter(), 10, np.random.default_rng(0))
    with pytest.raises(ValueError):
        adv.generate(3)
    with pytest.raises(ValueError):
        generate_next(adv, None)


def run_adaptive(kind, steps, seed=0):
    fw = RoundingFramework(30, FrameworkConfig(eps=0.25, d=134, seed=seed))
    view = fw.expose_state()
    adv = Adversary(kind, 30, np.random.default_rng(seed))
    for _ in range(steps):
        before = len(fw.served)
        served = set(fw.served.edges())
        h = {tuple(e) for e in view.sparsifier_edge_array().tolist()}
        rolls = fw.rolls
        ev = generate_next(adv, view)
        fw.process_update(ev)
        yield ev, before, served, h, rolls != fw.rolls, fw


def test_matched_deleter_targets_served_edges():
    attacks = 0
    for ev, before, served, _, rolled, fw in run_adaptive(AdaptiveMatchedDeleter(0.5), 1000):
        if ev.kind is EventKind.DELETE:
            attacks += 1
            assert ev.edge in served
            if not rolled:
                assert len(fw.served) == before - 1
    assert attacks > 100


def test_eraser_targets_sparsifier_edges():
    attacks = 0
    for ev, _, _, h, _, _ in run_adaptive(AdaptiveSparsifierEraser(0.5), 600):
        if ev.kind is EventKind.DELETE:
            attacks += 1
            assert ev.edge in h
    assert attacks > 100
