"""Property suites behind ``dynmatch verify`` and the acceptance tests.

Each suite returns :class:`CriterionResult` records. Sizes default to the
full acceptance settings; the CLI passes smaller ones unless ``--full``.
"""

from __future__ import annotations

import hashlib
import math
import time
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from .adversaries import AdaptiveMatchedDeleter, AdaptiveSparsifierEraser, Adversary, RandomOblivious
from .coloring import stress_sequence
from .framework import FrameworkConfig, StaticMatcherKind, WorkMode
from .fractional import HierarchicalFractionalMatching, level_cap_bound
from .graph import DynamicGraph, EdgeKey, EventKind
from .harness import ExperimentConfig, ExperimentResult, run_to_string
from .matching import ExactMatcher
from .sparsifier import (
    BucketedColoring,
    MembershipSampler,
    SampleCountPolicy,
    SparsifyParams,
    max_bucket,
    membership_probability,
    probability_sandwich,
    trim_threshold,
)
from .verification import (
    check_kernel,
    incidence,
    trimmed,
    zy_batch,
)


@dataclass
class CriterionResult:
    key: str
    title: str
    passed: bool
    summary: str
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.key}: {self.title} -- {self.summary}"


# -- instances ---------------------------------------------------------------------


def static_levels_instance(
    n: int, eps: float, rng: np.random.Generator, lo: int = 3, hi: int = 34, max_level: int | None = None
) -> dict[EdgeKey, int]:
    """Complete graph with exact hierarchical values ``beta**-L``.

    Levels are drawn uniformly in ``[lo, hi]`` over a random edge order and
    raised until both endpoint loads stay at most 1. Edges that would need
    a level above ``max_level`` are left out.
    """
    beta = 1.0 + eps
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    order = rng.permutation(len(pairs))
    load = np.zeros(n)
    levels: dict[EdgeKey, int] = {}
    for j in order:
        u, v = pairs[j]
        L = int(rng.integers(lo, hi + 1))
        room = 1.0 - max(load[u], load[v])
        while beta**-L > room + 1e-12:
            L += 1
            if max_level is not None and L > max_level:
                break
        if max_level is not None and L > max_level:
            continue
        levels[(u, v)] = L
        load[u] += beta**-L
        load[v] += beta**-L
    return levels


def fractional_instance(n: int, edges: list[EdgeKey], eps: float, rng: np.random.Generator):
    """Insert ``edges`` in random order into a fresh fractional matcher."""
    g = DynamicGraph(n)
    fm = HierarchicalFractionalMatching(g, eps)
    for j in rng.permutation(len(edges)):
        e = edges[j]
        g.insert_edge(e)
        fm.on_insert(e)
    return g, fm


def random_graph_edges(n: int, p: float, rng: np.random.Generator) -> list[EdgeKey]:
    return [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]


def hub_graph_edges(n: int, hubs: int) -> list[EdgeKey]:
    """``hubs`` vertices adjacent to every other vertex; no other edges."""
    return sorted({(min(h, v), max(h, v)) for h in range(hubs) for v in range(n) if v != h})


def _coloring_for(n: int, eps: float, levels: dict[EdgeKey, int], seed: int) -> BucketedColoring:
    bc = BucketedColoring(n, eps, 2, rng=np.random.default_rng([seed, 0]))
    bc.load_levels(levels)
    return bc


def _mu(n: int, edges: np.ndarray, matcher: ExactMatcher | None = None) -> int:
    matcher = matcher or ExactMatcher(n)
    return int(np.count_nonzero(matcher.mate_array(np.asarray(edges, dtype=np.int64).reshape(-1, 2)) >= 0) // 2)


# -- criterion 1 ---------------------------------------------------------------------


def coloring_suite(sequences: int = 100, n: int = 200, cap: int = 32, ops: int = 100_000, seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    palette = 2 * cap - 1
    probe_cap = math.ceil(math.log2(palette)) + 1
    worst = {"violations": 0, "audit_failures": 0, "max_color": -1, "max_probes": 0}
    for s in range(sequences):
        r = stress_sequence(n, cap, ops, seed * 100_003 + s, audit_every=1000)
        worst["violations"] += r["violations"]
        worst["audit_failures"] += r["audit_failures"]
        worst["max_color"] = max(worst["max_color"], r["max_color"])
        worst["max_probes"] = max(worst["max_probes"], r["max_probes"])
    elapsed = time.perf_counter() - t0
    ok = (
        worst["violations"] == 0
        and worst["audit_failures"] == 0
        and worst["max_color"] < palette
        and worst["max_probes"] <= probe_cap
        and elapsed < 30.0
    )
    return CriterionResult(
        "1",
        "coloring properness, palette and probes",
        ok,
        f"{sequences} sequences, violations={worst['violations']}, audit failures={worst['audit_failures']}, "
        f"colors used={worst['max_color'] + 1}/{palette}, max probes={worst['max_probes']}/{probe_cap}, {elapsed:.1f}s",
        {**worst, "elapsed": elapsed, "palette": palette, "probe_cap": probe_cap},
    )


# -- criteria 2-4: sampling on a fixed instance ------------------------------------


@dataclass
class SamplingSetup:
    n: int
    eps: float
    d: float
    levels: dict[EdgeKey, int]
    bc: BucketedColoring
    params: SparsifyParams
    sampler: MembershipSampler
    x: np.ndarray
    exact: np.ndarray

    @classmethod
    def build(cls, n: int = 50, eps: float = 0.25, d: float = 134.0, seed: int = 0) -> SamplingSetup:
        rng = np.random.default_rng([seed, 10])
        beta = 1.0 + eps
        levels = static_levels_instance(n, eps, rng, max_level=max_bucket(eps, n) - 1)
        bc = _coloring_for(n, eps, levels, seed)
        params = SparsifyParams(eps, d, 2, SampleCountPolicy.PROOF_VARIANT)
        sampler = MembershipSampler(bc, params)
        lv = np.array([levels[(int(u), int(v))] for u, v in sampler.edges])
        x = beta ** (-lv.astype(np.float64))
        exact = np.array([membership_probability(bc, params, (int(u), int(v))) for u, v in sampler.edges])
        return cls(n, eps, d, levels, bc, params, sampler, x, exact)


def independent_probability(level: int, eps: float, d: float, gamma: int = 2) -> float:
    """Membership probability of a ``beta**-level`` edge, from the palette arithmetic alone."""
    beta = 1.0 + eps
    i = level + 1
    palette = gamma * math.ceil(beta**i)
    k = palette if beta ** (i - 1) < d else min(gamma * math.ceil(d), palette)
    return k / palette


def _adjacent_pairs(setup: SamplingSetup, count: int, rng: np.random.Generator) -> np.ndarray:
    """Adjacent edge pairs with both probabilities below 1, same bucket first."""
    edges = setup.sampler.edges
    random_cols = np.flatnonzero(setup.exact < 1.0)
    by_vertex: dict[int, list[int]] = {}
    for j in random_cols:
        for v in edges[j]:
            by_vertex.setdefault(int(v), []).append(int(j))
    bucket = {int(j): setup.bc.location((int(edges[j, 0]), int(edges[j, 1])))[0] for j in random_cols}
    same, other = [], []
    for cols in by_vertex.values():
        for a in range(len(cols)):
            for b in range(a + 1, len(cols)):
                p = (cols[a], cols[b])
                (same if bucket[p[0]] == bucket[p[1]] else other).append(p)
    same.sort()
    other.sort()
    pick_same = min(len(same), (3 * count) // 4)
    out = [same[j] for j in rng.choice(len(same), size=pick_same, replace=False)] if pick_same else []
    rest = count - len(out)
    pool = other if len(other) >= rest else other + [p for p in same if p not in set(out)]
    out += [pool[j] for j in rng.choice(len(pool), size=min(rest, len(pool)), replace=False)]
    return np.asarray(out, dtype=np.int64).reshape(-1, 2)


def _sample_stats(sampler, trials: int, rng, pairs: np.ndarray, chunk: int = 5000):
    m = sampler.m
    hits = np.zeros(m)
    s_a = np.zeros(len(pairs))
    s_b = np.zeros(len(pairs))
    s_ab = np.zeros(len(pairs))
    left = trials
    while left > 0:
        t = min(chunk, left)
        X = sampler(t, rng)
        hits += X.sum(axis=0)
        if len(pairs):
            A = X[:, pairs[:, 0]]
            B = X[:, pairs[:, 1]]
            s_a += A.sum(axis=0)
            s_b += B.sum(axis=0)
            AB = A & B
            s_ab += AB.sum(axis=0)
        left -= t
    return hits, s_a, s_b, s_ab


def _covariance(s_a, s_b, s_ab, T):
    """Plug-in covariance of two indicators and its standard error.

    The error is that of the mean of ``(A - f_a)(B - f_b)``, evaluated from
    the four cell frequencies.
    """
    fa, fb, fab = s_a / T, s_b / T, s_ab / T
    cov = fab - fa * fb
    cells = (
        (fab, (1 - fa) * (1 - fb)),
        (fa - fab, -(1 - fa) * fb),
        (fb - fab, -fa * (1 - fb)),
        (1 - fa - fb + fab, fa * fb),
    )
    second = sum(p * w * w for p, w in cells)
    se = np.sqrt(np.maximum(second - cov**2, 0.0) / T)
    return cov, se


def sampling_suite(trials: int = 100_000, pairs: int = 200, seed: int = 0, setup: SamplingSetup | None = None):
    """Criteria 2 and 3 from one pass of draws."""
    t0 = time.perf_counter()
    setup = setup or SamplingSetup.build(seed=seed)
    rng = np.random.default_rng([seed, 11])
    pr = _adjacent_pairs(setup, pairs, rng)
    hits, s_a, s_b, s_ab = _sample_stats(setup.sampler, trials, rng, pr)
    T = trials
    freq = hits / T
    # independent oracle for the exact law, and the sandwich around it
    lv = -np.rint(np.log(setup.x) / math.log1p(setup.eps)).astype(int)
    indep = np.array([independent_probability(int(L), setup.eps, setup.d) for L in lv])
    oracle_ok = bool(np.allclose(indep, setup.exact, rtol=0, atol=1e-12))
    lo, hi = np.array([probability_sandwich(float(x), setup.d, setup.eps) for x in setup.x]).T
    sigma = np.sqrt(setup.exact * (1 - setup.exact) / T)
    in_sandwich = (freq >= lo - 3 * sigma) & (freq <= hi + 3 * sigma)
    heavy = setup.x > 1.0 / setup.d
    heavy_ok = bool(np.all(freq[heavy] == 1.0))
    elapsed = time.perf_counter() - t0
    ok2 = bool(in_sandwich.all()) and heavy_ok and oracle_ok and elapsed < 120.0
    r2 = CriterionResult(
        "2",
        "membership probabilities inside the sandwich",
        ok2,
        f"{setup.sampler.m} edges, {T} draws, outside sandwich={int((~in_sandwich).sum())}, "
        f"heavy edges={int(heavy.sum())} all at frequency 1: {heavy_ok}, oracle agrees: {oracle_ok}, {elapsed:.1f}s",
        {"freq": freq, "exact": setup.exact, "lo": lo, "hi": hi, "elapsed": elapsed},
    )
    cov, se = _covariance(s_a, s_b, s_ab, T)
    bad = np.flatnonzero(cov > 3 * se)
    reran = 0
    if len(bad):
        # one rerun at 4x trials for the flagged pairs only
        reran = len(bad)
        _, a2, b2, ab2 = _sample_stats(setup.sampler, 4 * T, rng, pr[bad])
        cov2, se2 = _covariance(a2, b2, ab2, 4 * T)
        still = bad[cov2 > 3 * se2]
    else:
        still = bad
    same_bucket = np.array(
        [
            setup.bc.location(tuple(map(int, setup.sampler.edges[a])))[0]
            == setup.bc.location(tuple(map(int, setup.sampler.edges[b])))[0]
            for a, b in pr
        ]
    )
    r3 = CriterionResult(
        "3",
        "negative correlation of adjacent edges",
        len(still) == 0 and len(pr) == pairs,
        f"{len(pr)} pairs ({int(same_bucket.sum())} same-bucket), flagged={len(bad)}, after rerun={len(still)}, "
        f"max cov/se={float(np.max(cov / se)):.2f}, mean same-bucket cov={float(cov[same_bucket].mean()) if same_bucket.any() else 0.0:.2e}",
        {"cov": cov, "se": se, "reran": reran},
    )
    return r2, r3


def fractional_sparsifier_suite(trials: int = 100_000, seed: int = 0, setup: SamplingSetup | None = None) -> CriterionResult:
    setup = setup or SamplingSetup.build(seed=seed)
    rng = np.random.default_rng([seed, 12])
    edges = setup.sampler.edges
    inc = incidence(setup.n, edges)
    sums = []
    max_load = 0.0
    left = trials
    while left > 0:
        t = min(2000, left)
        X = setup.sampler(t, rng)
        s, load = zy_batch(X, inc, edges, setup.x, setup.eps, setup.d)
        sums.append(s)
        max_load = max(max_load, float(load.max()))
        left -= t
    s = np.concatenate(sums)
    mean = float(s.mean())
    sigma = float(s.std(ddof=1) / math.sqrt(len(s)))
    total = float(setup.x.sum())
    bound = (1 - 6 * setup.eps) * total
    ok = mean >= bound - 3 * sigma and max_load <= 1.0 + 1e-9
    return CriterionResult(
        "4",
        "sampled fractional matching keeps its value",
        ok,
        f"E[sum y]={mean:.3f} (sigma {sigma:.4f}) vs (1-6eps)*sum x={bound:.3f} (sum x={total:.3f}), "
        f"max y-load={max_load:.3f}",
        {"mean": mean, "sigma": sigma, "bound": bound, "ratio": mean / total if total else 1.0},
    )


# -- criteria 5 and 6: kernels -----------------------------------------------------------


def whp_degree(c: float, eps: float, n: int) -> int:
    return math.ceil(9 * c * (1 + eps) ** 2 * math.log(n) / eps**2)


def _framework_levels(n: int, edges: list[EdgeKey], eps: float, seed: int):
    g, fm = fractional_instance(n, edges, eps, np.random.default_rng([seed, 20]))
    return g, fm, fm.edge_levels()


def kernel_suite_whp(n: int = 64, eps: float = 0.25, c: float = 1.25, trials: int = 10_000, seed: int = 0):
    d = whp_degree(c, eps, n)
    edges = random_graph_edges(n, 0.3, np.random.default_rng([seed, 21]))
    _, fm, levels = _framework_levels(n, edges, eps, seed)
    bc = _coloring_for(n, eps, levels, seed)
    params = SparsifyParams(eps, d, 2, SampleCountPolicy.PROOF_VARIANT)
    sampler = MembershipSampler(bc, params)
    rep = check_kernel(
        sampler, n, sampler.edges, c, d, eps, trials, np.random.default_rng([seed, 22]),
        degree_cap=d * (1 + eps), target=d / (c * (1 + eps)),
    )
    ok = rep.degree_violations == 0 and rep.property2_violations == 0
    res = CriterionResult(
        "5a",
        "high-probability kernel regime",
        ok,
        f"n={n}, d={d}, {rep.trials} draws, max degree={rep.max_degree}, degree violations={rep.degree_violations}, "
        f"eligible edges={int(rep.eligible.sum())}, property-2 violations={rep.property2_violations}",
        {"report": rep, "d": d},
    )
    return res, (n, sampler, d, rep)


def trimmed_kernel(
    n: int, edges: list[EdgeKey], eps: float, d: float, c: float, trials: int, seed: int, slack: float = 8.0
):
    _, fm, levels = _framework_levels(n, edges, eps, seed)
    bc = _coloring_for(n, eps, levels, seed)
    params = SparsifyParams(eps, d, 2, SampleCountPolicy.PROOF_VARIANT)
    base = MembershipSampler(bc, params)
    thr = trim_threshold(d, eps)
    sampler = trimmed(base, base.edges, n, thr)
    rep = check_kernel(
        sampler, n, base.edges, c, d, eps, trials, np.random.default_rng([seed, 23]),
        degree_cap=thr, target=thr / (c * (1 + slack * eps)),
    )
    return base, sampler, rep, thr


def kernel_suite_trimmed(
    n: int = 600, hubs: int = 4, eps: float = 0.2, d: float = 231.0, c: float = 1.25, trials: int = 10_000, seed: int = 0
) -> CriterionResult:
    edges = hub_graph_edges(n, hubs)
    base, _, rep, thr = trimmed_kernel(n, edges, eps, d, c, trials, seed)
    C = rep.fitted_slack(thr)
    ok = rep.passed and C <= 8.0 and bool(rep.eligible.any())
    return CriterionResult(
        "5b",
        "trimmed constant-degree kernel",
        ok,
        f"n={n}, d={d:g}, c={c}, trim at {thr:.1f}, {rep.trials} draws, eligible={int(rep.eligible.sum())}/{base.m}, "
        f"degree violations={rep.degree_violations}, fitted C={C:.2f} (<= 8), reruns={rep.reruns}",
        {"report": rep, "C": C},
    )


def _mu_draws(n: int, sampler, edges: np.ndarray, trials: int, rng) -> np.ndarray:
    matcher = ExactMatcher(n)
    out = np.empty(trials)
    X = sampler(trials, rng)
    for t in range(trials):
        out[t] = _mu(n, edges[X[t]], matcher)
    return out


def kernel_matching_suite(trials: int = 1000, seed: int = 0, whp: tuple | None = None) -> CriterionResult:
    """Mean matching number of kernel draws against ``mu(G) / (2c(1 + 1/d))``.

    Runs on the high-probability instance and on a trimmed kernel with small
    ``d``; for the latter the kernel constant is the one measured by
    :func:`check_kernel` on the same distribution.
    """
    lines = []
    ok = True
    if whp is None:
        _, whp = kernel_suite_whp(trials=10_000, seed=seed)
    n, sampler, d, rep = whp
    c = 1.25 * (1 + 0.25)
    mu_g = _mu(n, sampler.edges)
    draws = _mu_draws(n, sampler, sampler.edges, trials, np.random.default_rng([seed, 30]))
    sig = draws.std(ddof=1) / math.sqrt(trials) if trials > 1 else 0.0
    bound = mu_g / (2 * c * (1 + 1 / d))
    ok &= draws.mean() >= bound - 3 * sig
    lines.append(f"whp: E[mu(H)]={draws.mean():.2f} vs {bound:.2f} (mu(G)={mu_g})")
    # nontrivial instance: dense graph, small d, trimmed
    n2, eps2, d2, c2 = 64, 0.2, 16.0, 1.25
    edges = random_graph_edges(n2, 0.5, np.random.default_rng([seed, 31]))
    base, tsampler, rep2, thr = trimmed_kernel(n2, edges, eps2, d2, c2, 10_000, seed, slack=1e9)
    elig = rep2.eligible
    if elig.any():
        c_meas = float(np.max(thr / (rep2.cond_mean[elig] + 3 * rep2.cond_sigma[elig])))
    else:
        c_meas = 1.0
    c_meas = max(c_meas, 1.0 / (1.0 - eps2))
    mu_g2 = _mu(n2, base.edges)
    draws2 = _mu_draws(n2, tsampler, base.edges, trials, np.random.default_rng([seed, 32]))
    sig2 = draws2.std(ddof=1) / math.sqrt(trials) if trials > 1 else 0.0
    bound2 = mu_g2 / (2 * c_meas * (1 + 1 / thr))
    ok &= draws2.mean() >= bound2 - 3 * sig2 and rep2.property1
    lines.append(
        f"trimmed d={d2:g}: E[mu(H')]={draws2.mean():.2f} vs {bound2:.2f} (mu(G)={mu_g2}, measured c={c_meas:.3f}, "
        f"eligible={int(elig.sum())}/{base.m})"
    )
    return CriterionResult(
        "6", "kernel matching number", bool(ok), "; ".join(lines),
        {"whp_mean": float(draws.mean()), "trimmed_mean": float(draws2.mean()), "c_measured": c_meas},
    )


# -- criteria 7-10: harness scenarios -------------------------------------------------------


def csv_digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def adaptive_config(n: int, adversary: str, seed: int, updates: int = 50_000, refill: float = 0.6) -> ExperimentConfig:
    kind = AdaptiveMatchedDeleter(refill) if adversary == "matched" else AdaptiveSparsifierEraser(refill)
    fc = FrameworkConfig(
        eps=0.1, d=1199.0, gamma=2, policy=SampleCountPolicy.PROOF_VARIANT,
        work_mode=WorkMode.BATCH, static_matcher=StaticMatcherKind.EXACT, seed=seed,
    )
    return ExperimentConfig(n=n, update_count=updates, seed=seed, framework=fc, adversary=kind)


@dataclass
class ScenarioRun:
    config: ExperimentConfig
    result: ExperimentResult
    digest: str
    elapsed: float


def run_scenario(cfg: ExperimentConfig) -> ScenarioRun:
    t0 = time.perf_counter()
    text, res = run_to_string(cfg)
    return ScenarioRun(cfg, res, csv_digest(text), time.perf_counter() - t0)


def adaptive_suite(
    n: int, adversary: str, seeds: int = 20, updates: int = 50_000, threshold: float = 2.5,
    progress: Callable[[str], None] | None = None,
) -> tuple[CriterionResult, list[ScenarioRun]]:
    runs = []
    t0 = time.perf_counter()
    for s in range(seeds):
        run = run_scenario(adaptive_config(n, adversary, s, updates))
        runs.append(run)
        if progress:
            progress(f"{adversary} n={n} seed={s}: max ratio {run.result.max_ratio:.3f} in {run.elapsed:.1f}s")
    elapsed = time.perf_counter() - t0
    worst = max(r.result.max_ratio for r in runs)
    ok = all(r.result.ok for r in runs) and worst <= threshold and elapsed < 600.0
    res = CriterionResult(
        "7",
        f"adaptive robustness ({adversary}, n={n})",
        ok,
        f"{seeds} seeds x {updates} updates, worst mu/|M|={worst:.3f} (<= {threshold}), "
        f"oracle points={sum(r.result.oracle_points for r in runs)}, {elapsed:.0f}s",
        {"worst": worst, "elapsed": elapsed},
    )
    return res, runs


def det_config(seed: int, n: int = 256, K: int = 2, updates: int = 20_000) -> ExperimentConfig:
    return ExperimentConfig(
        n=n, update_count=updates, seed=seed, algo="det", K=K,
        adversary=RandomOblivious(p_insert=0.7, vertex_sampler="planted"),
    )


def det_suite(seeds: int = 3, n: int = 256, K: int = 2, updates: int = 20_000) -> tuple[CriterionResult, list[ScenarioRun]]:
    runs = [run_scenario(det_config(s, n, K, updates)) for s in range(seeds)]
    worst = max(r.result.max_ratio for r in runs)
    ok = all(r.result.ok for r in runs) and worst <= 4 * K
    return (
        CriterionResult(
            "8",
            "deterministic tradeoff",
            ok,
            f"K={K}, n={n}, {seeds} planted streams x {updates} updates, worst ratio={worst:.3f} (<= {4 * K}), "
            f"pigeonhole violations={sum(r.result.pigeonhole_violations for r in runs)}",
            {"worst": worst},
        ),
        runs,
    )


def scaling_config(n: int, seed: int = 0, per_vertex: int = 20) -> ExperimentConfig:
    # the exact engine's augmentations cost O(|H|) each, which would dominate the trend
    fc = FrameworkConfig(eps=0.25, d=134.0, seed=seed, static_matcher=StaticMatcherKind.BOUNDED_PATH)
    return ExperimentConfig(
        n=n, update_count=per_vertex * n, seed=seed, framework=fc,
        adversary=RandomOblivious(p_insert=0.75), check_sparsifier_bound=True,
    )


def scaling_suite(sizes: tuple[int, ...] = (128, 256, 512, 1024), seed: int = 0) -> tuple[CriterionResult, list[ScenarioRun]]:
    runs = [run_scenario(scaling_config(n, seed)) for n in sizes]
    ops = np.array([r.result.mean_ops for r in runs])
    ln = np.log(np.asarray(sizes, dtype=np.float64))
    A = np.vstack([np.ones_like(ln), ln]).T
    (a, b), *_ = np.linalg.lstsq(A, ops, rcond=None)
    fit = a + b * ln
    within = bool(np.all((ops <= 2 * fit) & (ops >= fit / 2)))
    ratios = ops[1:] / ops[:-1]
    fit_ratios = fit[1:] / fit[:-1]
    doubling_ok = bool(np.all(ratios <= 2 * fit_ratios))
    samples = sum(r.result.samples_checked for r in runs)
    size_viol = sum(r.result.sample_bound_violations for r in runs)
    ok = within and doubling_ok and size_viol == 0 and samples > 0 and all(r.result.error is None for r in runs)
    return (
        CriterionResult(
            "9",
            "ops scaling and sparsifier size",
            ok,
            "ops/update " + ", ".join(f"n={n}: {o:.0f}" for n, o in zip(sizes, ops))
            + f"; fit {a:.0f} + {b:.0f} ln n; doubling ratios {', '.join(f'{x:.2f}' for x in ratios)}; "
            f"|E(H)| bound checked on {samples} samples, violations={size_viol}",
            {"ops": ops, "fit": fit, "a": a, "b": b},
        ),
        runs,
    )


def determinism_suite(baseline: list[ScenarioRun]) -> CriterionResult:
    mismatched = []
    for run in baseline:
        again = run_scenario(run.config)
        if again.digest != run.digest:
            mismatched.append(run.config)
    return CriterionResult(
        "10",
        "byte-identical reruns",
        not mismatched and bool(baseline),
        f"{len(baseline)} scenarios rerun, mismatches={len(mismatched)}",
        {"mismatched": mismatched},
    )


def fractional_matcher_suite(
    n: int = 40, updates: int = 3000, eps_values: tuple[float, ...] = (0.1, 0.25), seed: int = 0
) -> CriterionResult:
    """Feasibility, ``(beta, 2 beta)``-approximate maximality and value after every update."""
    parts = []
    ok = True
    matcher = ExactMatcher(n)
    for eps in eps_values:
        beta = 1.0 + eps
        cap = level_cap_bound(eps, n)
        g = DynamicGraph(n)
        fm = HierarchicalFractionalMatching(g, eps)
        adv = Adversary(RandomOblivious(0.6), n, np.random.default_rng([seed, 40]))
        worst = math.inf
        bad = 0
        top_level = 0
        for _ in range(updates):
            ev = adv.next_event()
            g.apply(ev)
            if ev.kind is EventKind.INSERT:
                fm.on_insert(ev.edge)
            else:
                fm.on_delete(ev.edge)
            if not (fm.check_feasible() and fm.check_approx_maximal(beta, 2 * beta)):
                bad += 1
            top_level = max(top_level, max(fm.level))
            if g.m:
                mu = _mu(n, np.array(list(g.edges()), dtype=np.int64), matcher)
                worst = min(worst, fm.value_sum() / mu)
        floor = 1 / (2 * beta)
        ok &= bad == 0 and worst >= floor - 1e-9 and top_level <= cap
        parts.append(
            f"eps={eps}: violations={bad}, min value/mu={worst:.3f} (>= {floor:.3f}), max level={top_level} (<= {cap})"
        )
    return CriterionResult("F", "fractional matcher invariants", ok, "; ".join(parts))
