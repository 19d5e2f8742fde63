import numpy as np
import pytest

from dynmatch.errors import DegreeBoundViolated
from dynmatch.verification import (
    BoundKind,
    build_fH_witness,
    build_zy_witness,
    check_kernel,
    degrees,
    deterministic,
    incidence,
    is_feasible,
    na_concentration_check,
    trimmed,
    zy_batch,
    zy_coefficients,
)


def bernoulli(m, p):
    def draw(trials, rng):
        return rng.random((trials, m)) < p

    return draw


def test_incidence_degrees():
    edges = np.array([[0, 1], [1, 2]])
    inc = incidence(3, edges)
    X = np.array([[True, True], [True, False]])
    assert degrees(X, inc).tolist() == [[1, 2, 1], [1, 1, 0]]


def test_trimmed_drops_high_degree_vertices(rng):
    edges = np.array([[0, 1], [0, 2], [0, 3], [4, 5]])
    X = trimmed(deterministic(4), edges, 6, 2)(3, rng)
    assert X.tolist() == [[False, False, False, True]] * 3


def test_full_graph_with_bounded_degree_passes(rng):
    star = np.array([[0, v] for v in range(1, 6)])
    rep = check_kernel(deterministic(5), 6, star, c=1.25, d=5, eps=0.25, trials=1000, rng=rng)
    assert rep.passed and rep.max_degree == 5 and not rep.eligible.any()


def test_sparse_sample_without_degree_fails_property_two(rng):
    path = np.array([[0, 1], [1, 2], [2, 3]])
    rep = check_kernel(bernoulli(3, 0.5), 4, path, c=1.25, d=4, eps=0.25, trials=2000, rng=rng)
    assert rep.property1
    assert not rep.property2 and rep.property2_violations == 3
    assert rep.reruns == 1


def test_degree_violation_detected(rng):
    star = np.array([[0, v] for v in range(1, 11)])
    rep = check_kernel(deterministic(10), 11, star, c=1.25, d=6, eps=0.25, trials=1000, rng=rng)
    assert not rep.property1 and rep.degree_violations == rep.trials


def test_parameter_warning(rng):
    rep = check_kernel(deterministic(1), 2, np.array([[0, 1]]), c=1.1, d=2, eps=0.25, trials=1000, rng=rng)
    assert rep.parameter_warnings


def test_zy_witness_small_values_are_zeroed_at_overloaded_vertices():
    n = 201
    edges = np.array([[0, v] for v in range(1, n)])
    x = np.full(len(edges), 0.005)
    in_h = np.ones(len(edges), dtype=bool)
    z, y = build_zy_witness(n, edges, x, in_h, eps=0.1, d=100)
    assert z[0] == pytest.approx(0.005 * 0.7 / 0.5)
    assert z.sum() > 1 and np.all(y == 0)


def test_zy_witness_keeps_light_loads():
    edges = np.array([[0, 1], [0, 2], [0, 3]])
    x = np.full(3, 0.2)
    z, y = build_zy_witness(4, edges, x, np.array([True, False, True]), eps=0.1, d=10)
    assert y.tolist() == pytest.approx([0.14, 0.0, 0.14])
    assert np.array_equal(z, y)


def test_zy_batch_matches_single_witness(rng):
    n = 30
    edges = np.array([[u, v] for u in range(n) for v in range(u + 1, n) if rng.random() < 0.3])
    x = rng.uniform(0.001, 0.2, len(edges))
    X = rng.random((50, len(edges))) < 0.5
    sums, loads = zy_batch(X, incidence(n, edges), edges, x, 0.1, 20)
    for t in range(0, 50, 7):
        _, y = build_zy_witness(n, edges, x, X[t], 0.1, 20)
        assert sums[t] == pytest.approx(y.sum())
        load = np.zeros(n)
        np.add.at(load, edges[:, 0], y)
        np.add.at(load, edges[:, 1], y)
        assert loads[t] == pytest.approx(load.max())
    assert zy_coefficients(np.array([0.5]), 0.1, 10)[0] == pytest.approx(0.35)


def test_fH_witness_on_a_path():
    f = build_fH_witness(4, [(0, 1), (1, 2), (2, 3)], [(0, 1), (2, 3)], d=4)
    assert f == pytest.approx({(0, 1): 0.75, (1, 2): 0.25, (2, 3): 0.75})
    assert is_feasible(4, f)
    assert sum(f.values()) >= 2 * (1 - 2 / 4)
    with pytest.raises(DegreeBoundViolated):
        build_fH_witness(4, [(0, 1), (1, 2), (2, 3)], [(0, 1)], d=1)


def test_is_feasible():
    assert not is_feasible(3, {(0, 1): 0.6, (1, 2): 0.6})
    assert not is_feasible(2, {(0, 1): -0.1})


def test_negatively_associated_counts_pass_tail_checks(rng):
    # number of sampled colors among the first u of P: a uniform k-subset, hence NA indicators
    P, k, u = 200, 60, 100
    s = rng.hypergeometric(u, P - u, k, size=50_000)
    mean = k * u / P
    checks = [
        na_concentration_check(s, BoundKind.CHERNOFF_UPPER, mean=mean, delta=0.2),
        na_concentration_check(s, BoundKind.CHERNOFF_UPPER, mean=mean, delta=0.3, kappa=35.0),
        na_concentration_check(s, BoundKind.CHERNOFF_LOWER, mean=mean, delta=0.25),
        na_concentration_check(
            s, BoundKind.BERNSTEIN, mean=mean, a=5.0, variance=u * (k / P) * (1 - k / P), M=1.0
        ),
    ]
    assert all(c.passed for c in checks), checks


def test_positively_correlated_sum_fails(rng):
    # all-or-nothing: the sum is 0 or u, far heavier tails than NA allows
    u = 40
    s = np.where(rng.random(20_000) < 0.5, u, 0)
    assert not na_concentration_check(s, BoundKind.CHERNOFF_UPPER, mean=u / 2, delta=0.5).passed


def test_tail_check_needs_many_samples():
    with pytest.raises(ValueError):
        na_concentration_check(np.zeros(100), BoundKind.CHERNOFF_LOWER, mean=1.0, delta=0.1)
