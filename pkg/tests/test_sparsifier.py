import math

import numpy as np
import pytest

from dynmatch.errors import InvalidValue
from dynmatch.fractional import HierarchicalFractionalMatching
from dynmatch.graph import DynamicGraph
from dynmatch.sparsifier import (
    BucketedColoring,
    MembershipSampler,
    SampleCountPolicy,
    SparsifyParams,
    bucket_of,
    bucket_of_level,
    draw_colors,
    max_bucket,
    membership_probability,
    probability_sandwich,
    sample_sparsifier,
    trim_high_degree,
)


def test_params_validation():
    for bad in (dict(eps=0.0, d=5), dict(eps=0.1, d=0.5), dict(eps=0.1, d=5, gamma=4)):
        with pytest.raises(InvalidValue):
            SparsifyParams(**bad)


def test_bucket_boundaries():
    eps, n = 0.25, 100
    beta = 1 + eps
    assert bucket_of(1.0, eps, n) == 1
    for L in range(0, 20):
        assert bucket_of(beta**-L, eps, n) == bucket_of_level(L) == L + 1
    assert bucket_of(beta**-3 * 0.999, eps, n) == 4
    assert bucket_of(beta**-3 * 1.001, eps, n) == 3
    assert bucket_of(1e-30, eps, n) is None
    with pytest.raises(InvalidValue):
        bucket_of(0.0, eps, n)
    assert max_bucket(eps, n) == math.ceil(2 * math.log(n / eps) / math.log(beta))


def test_sample_counts():
    p = SparsifyParams(0.25, 10.0, 2, SampleCountPolicy.PROOF_VARIANT)
    for i in range(1, 30):
        P = p.palette(i)
        assert P == 2 * math.ceil(1.25**i)
        k = p.sample_count(i)
        if 1.25 ** (i - 1) < 10:
            assert k == P
        else:
            assert k == min(2 * 10, P)
    a = SparsifyParams(0.25, 10.0, 2, SampleCountPolicy.ALGORITHM_ONE)
    assert a.sample_count(40) == 2 * math.ceil(12.5)


def test_draw_colors_distinct_and_in_range(rng):
    p = SparsifyParams(0.1, 5.0)
    for i in (1, 10, 40):
        cols = draw_colors(p, i, rng)
        assert len(cols) == p.sample_count(i) == len(set(cols.tolist()))
        assert cols.min() >= 0 and cols.max() < p.palette(i)


def build(n, eps, rng, m=150):
    g = DynamicGraph(n)
    fm = HierarchicalFractionalMatching(g, eps)
    bc = BucketedColoring(n, eps, rng=np.random.default_rng(0))
    while g.m < m:
        u, v = sorted(rng.choice(n, 2, replace=False).tolist())
        if g.contains((u, v)):
            continue
        g.insert_edge((u, v))
        bc.apply_change_batch(fm.on_insert((u, v)))
    return g, fm, bc


def test_bucketed_coloring_tracks_levels(rng):
    g, fm, bc = build(40, 0.25, rng)
    assert bc.is_proper() and bc.audit()
    for e, L in fm.edge_levels().items():
        loc = bc.location(e)
        assert loc is not None and loc[0] == bucket_of_level(L)
    assert len(bc) == g.m


def test_delta_log_records_moves(rng):
    g, fm, bc = build(30, 0.25, rng, m=60)
    e = next(iter(g.edges()))
    where = bc.location(e)
    g.delete_edge(e)
    log = bc.apply_change_batch(fm.on_delete(e))
    assert any(r.edge == e and not r.added and (r.bucket, r.color) == where for r in log)
    assert bc.location(e) is None


def test_sample_contains_exactly_the_sampled_classes(rng):
    g, fm, bc = build(40, 0.25, rng)
    params = SparsifyParams(0.25, 3.0)
    s = sample_sparsifier(bc, params, rng)
    want = set()
    for i, cols in s.colors.items():
        for c in cols:
            want |= set(bc.color_class(i, int(c)))
    assert s.edge_set() == want
    assert s.sample_total == sum(len(c) for c in s.colors.values())


def test_membership_probability_matches_draws(rng):
    g, fm, bc = build(40, 0.25, rng)
    params = SparsifyParams(0.25, 3.0)
    ms = MembershipSampler(bc, params)
    X = ms(40_000, rng)
    for j in range(0, ms.m, 7):
        e = tuple(ms.edges[j])
        p = membership_probability(bc, params, e)
        sig = math.sqrt(p * (1 - p) / 40_000)
        assert abs(X[:, j].mean() - p) <= 5 * sig + 1e-12


def test_batched_sampler_agrees_with_direct_sampler(rng):
    # same marginals as independent calls of sample_sparsifier
    g, fm, bc = build(30, 0.25, rng, m=80)
    params = SparsifyParams(0.25, 2.0)
    ms = MembershipSampler(bc, params)
    T = 4000
    X = ms(T, rng)
    direct = np.zeros(ms.m)
    for _ in range(T):
        s = sample_sparsifier(bc, params, rng).edge_set()
        direct += [tuple(e) in s for e in ms.edges.tolist()]
    diff = np.abs(X.mean(axis=0) - direct / T)
    assert diff.max() < 6 * math.sqrt(0.25 * 2 / T)


def test_sandwich_and_trim():
    lo, hi = probability_sandwich(0.05, 10.0, 0.25)
    assert lo == pytest.approx(0.5 / 1.5625) and hi == pytest.approx(0.625)
    assert probability_sandwich(0.5, 10.0, 0.25)[0] == pytest.approx(1 / 1.5625)
    edges = np.array([[0, 1], [0, 2], [0, 3], [4, 5]])
    assert trim_high_degree(edges, 6, 2).tolist() == [[4, 5]]
