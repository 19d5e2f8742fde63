"""Monte Carlo checks of kernel, witness and concentration properties.

Samplers are callables ``sampler(trials, rng) -> bool array (trials, m)``
whose column ``j`` is the indicator of edge ``edges[j]`` being in ``H``.
Every threshold carries a three-standard-deviation allowance.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import DegreeBoundViolated
from .graph import EdgeKey

Sampler = Callable[[int, np.random.Generator], np.ndarray]

_CHUNK = 2000


def incidence(n: int, edges: np.ndarray) -> sp.csr_matrix:
    """``m x n`` edge-vertex incidence matrix."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    m = len(edges)
    rows = np.repeat(np.arange(m), 2)
    data = np.ones(2 * m, dtype=np.float64)
    return sp.csr_matrix((data, (rows, edges.ravel())), shape=(m, n))


def degrees(X: np.ndarray, inc: sp.csr_matrix) -> np.ndarray:
    """Per-trial vertex degrees of the sampled subgraphs, shape ``(trials, n)``."""
    return np.asarray((inc.T @ X.T.astype(np.float64)).T)


def trimmed(sampler: Sampler, edges: np.ndarray, n: int, threshold: float) -> Sampler:
    """Sampler of ``H'``: ``H`` minus every edge touching a vertex of degree above ``threshold``."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    inc = incidence(n, edges)

    def draw(trials: int, rng: np.random.Generator) -> np.ndarray:
        X = sampler(trials, rng)
        deg = degrees(X, inc)
        ok = deg <= threshold
        return X & ok[:, edges[:, 0]] & ok[:, edges[:, 1]]

    return draw


def deterministic(m: int) -> Sampler:
    """Sampler that always returns every edge."""

    def draw(trials: int, rng: np.random.Generator) -> np.ndarray:
        return np.ones((trials, m), dtype=bool)

    return draw


@dataclass
class KernelReport:
    c: float
    d: float
    eps: float
    degree_cap: float
    target: float
    trials: int
    max_degree: int
    degree_violations: int
    prob_absent: np.ndarray
    sigma_absent: np.ndarray
    eligible: np.ndarray
    cond_mean: np.ndarray
    cond_sigma: np.ndarray
    cond_count: np.ndarray
    property1: bool
    property2: bool
    reruns: int = 0
    parameter_warnings: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.property1 and self.property2

    @property
    def property2_violations(self) -> int:
        ok = self.cond_mean + 3 * self.cond_sigma >= self.target
        return int(np.sum(self.eligible & ~ok))

    def fitted_slack(self, numerator: float) -> float:
        """Smallest ``C`` with ``mean + 3 sigma >= numerator / (c (1 + C eps))`` on every eligible edge."""
        if not self.eligible.any():
            return 0.0
        upper = self.cond_mean[self.eligible] + 3 * self.cond_sigma[self.eligible]
        need = numerator / (self.c * upper) - 1.0
        return float(max(0.0, need.max()) / self.eps)


class _Accumulator:
    def __init__(self, m: int) -> None:
        self.trials = 0
        self.absent = np.zeros(m)
        self.s1 = np.zeros(m)
        self.s2 = np.zeros(m)
        self.max_degree = 0
        self.violations = 0

    def add(self, X: np.ndarray, inc: sp.csr_matrix, edges: np.ndarray, cap: float) -> None:
        deg = degrees(X, inc)
        top = deg.max(axis=1) if deg.size else np.zeros(len(X))
        self.max_degree = max(self.max_degree, int(top.max(initial=0)))
        self.violations += int(np.sum(top > cap + 1e-9))
        stat = np.maximum(deg[:, edges[:, 0]], deg[:, edges[:, 1]])
        gone = ~X
        self.absent += gone.sum(axis=0)
        self.s1 += np.where(gone, stat, 0.0).sum(axis=0)
        self.s2 += np.where(gone, stat * stat, 0.0).sum(axis=0)
        self.trials += len(X)


def _collect(sampler: Sampler, trials: int, rng, inc, edges, cap, acc: _Accumulator) -> None:
    left = trials
    while left > 0:
        t = min(_CHUNK, left)
        acc.add(sampler(t, rng), inc, edges, cap)
        left -= t


def check_kernel(
    sampler: Sampler,
    n: int,
    edges: np.ndarray,
    c: float,
    d: float,
    eps: float,
    trials: int,
    rng: np.random.Generator,
    *,
    degree_cap: float | None = None,
    target: float | None = None,
    min_conditioned: int = 500,
    max_trials: int = 200_000,
    rerun: bool = True,
) -> KernelReport:
    """Estimate both kernel properties of the sampled distribution.

    Property 1: every draw has maximum degree at most ``degree_cap``
    (default ``d``). Property 2: every edge absent with probability above
    ``eps`` (beyond three sigma) has conditional mean maximum endpoint degree,
    given its absence, at least ``target`` (default ``d / c``) minus three
    sigma. Trials grow until each such edge has ``min_conditioned``
    conditioned draws (up to ``max_trials``); a failing report is recomputed
    once with four times the trials.
    """
    if trials < 1000:
        raise ValueError("kernel checks need at least 1000 trials")
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    cap = d if degree_cap is None else degree_cap
    tgt = d / c if target is None else target
    warnings = []
    if c < 1.0 / (1.0 - eps):
        warnings.append(f"c = {c} is below 1/(1-eps) = {1 / (1 - eps):.4f}")
    inc = incidence(n, edges)
    acc = _Accumulator(len(edges))
    _collect(sampler, trials, rng, inc, edges, cap, acc)
    report = _report(acc, c, d, eps, cap, tgt, warnings)
    # top up trials for thinly conditioned eligible edges
    if report.eligible.any():
        thin = report.cond_count[report.eligible].min()
        if thin < min_conditioned and acc.trials < max_trials:
            p = max(report.prob_absent[report.eligible].min(), 1e-6)
            extra = min(max_trials, math.ceil(min_conditioned / p * 1.1)) - acc.trials
            if extra > 0:
                _collect(sampler, extra, rng, inc, edges, cap, acc)
                report = _report(acc, c, d, eps, cap, tgt, warnings)
    if rerun and not report.passed:
        again = check_kernel(
            sampler, n, edges, c, d, eps, 4 * acc.trials, rng,
            degree_cap=cap, target=tgt, min_conditioned=min_conditioned,
            max_trials=4 * max_trials, rerun=False,
        )
        again.reruns = 1
        return again
    return report


def _report(acc: _Accumulator, c, d, eps, cap, tgt, warnings) -> KernelReport:
    T = acc.trials
    p = acc.absent / T
    sig = np.sqrt(np.maximum(p * (1 - p), 0) / T)
    eligible = p > eps + 3 * sig
    with np.errstate(invalid="ignore", divide="ignore"):
        k = acc.absent
        mean = np.where(k > 0, acc.s1 / np.maximum(k, 1), np.nan)
        var = np.where(k > 1, (acc.s2 - k * mean**2) / np.maximum(k - 1, 1), 0.0)
        csig = np.sqrt(np.maximum(var, 0) / np.maximum(k, 1))
    prop2 = bool(np.all(~eligible | (mean + 3 * csig >= tgt)))
    return KernelReport(
        c=c, d=d, eps=eps, degree_cap=cap, target=tgt, trials=T,
        max_degree=acc.max_degree, degree_violations=acc.violations,
        prob_absent=p, sigma_absent=sig, eligible=eligible,
        cond_mean=mean, cond_sigma=csig, cond_count=k.astype(np.int64),
        property1=acc.violations == 0, property2=prop2,
        parameter_warnings=list(warnings),
    )


# -- fractional witnesses ------------------------------------------------------


def zy_coefficients(x: np.ndarray, eps: float, d: float) -> np.ndarray:
    """``x_e (1 - 3 eps) / min(1, x_e d)``: the value ``z_e`` takes when sampled."""
    x = np.asarray(x, dtype=np.float64)
    return x * (1 - 3 * eps) / np.minimum(1.0, x * d)


def build_zy_witness(
    n: int, edges: np.ndarray, x: np.ndarray, in_h: np.ndarray, eps: float, d: float
) -> tuple[np.ndarray, np.ndarray]:
    """Witness values ``(z, y)`` on the edges of ``G`` for one sample ``H``.

    ``y`` zeroes the small-value edges (``x_e < 1/d``) that touch a vertex
    whose ``z``-load exceeds 1.
    """
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    x = np.asarray(x, dtype=np.float64)
    z = zy_coefficients(x, eps, d) * np.asarray(in_h, dtype=bool)
    load = np.zeros(n)
    np.add.at(load, edges[:, 0], z)
    np.add.at(load, edges[:, 1], z)
    over = np.maximum(load[edges[:, 0]], load[edges[:, 1]]) > 1.0
    y = np.where((x < 1.0 / d) & over, 0.0, z)
    return z, y


def zy_batch(
    X: np.ndarray, inc: sp.csr_matrix, edges: np.ndarray, x: np.ndarray, eps: float, d: float
) -> tuple[np.ndarray, np.ndarray]:
    """Per-trial ``sum(y)`` and maximum ``y``-load, for a block of samples."""
    coef = zy_coefficients(x, eps, d)
    z = X * coef
    zload = degrees(z, inc)
    over = np.maximum(zload[:, edges[:, 0]], zload[:, edges[:, 1]]) > 1.0
    y = np.where((np.asarray(x) < 1.0 / d) & over, 0.0, z)
    yload = degrees(y, inc)
    return y.sum(axis=1), yload.max(axis=1, initial=0.0)


def build_fH_witness(
    n: int, h_edges: Iterable[EdgeKey], max_matching: Iterable[EdgeKey], d: float
) -> dict[EdgeKey, float]:
    """Fractional matching on ``H`` built from a maximum matching ``M*`` of ``G``.

    Edges of ``H`` outside ``M*`` get ``1/d``; an edge ``(u, v)`` of
    ``H`` in ``M*`` gets ``max(1 - (d_H(u) + d_H(v) - 2)/d, 0)``.
    """
    h = [tuple(map(int, e)) for e in h_edges]
    deg = np.zeros(n, dtype=np.int64)
    for u, v in h:
        deg[u] += 1
        deg[v] += 1
    if len(h) and deg.max() > d:
        raise DegreeBoundViolated(f"H has degree {int(deg.max())} > {d}")
    mstar = {tuple(sorted(map(int, e))) for e in max_matching}
    f = {}
    for u, v in h:
        e = (u, v) if u < v else (v, u)
        if e in mstar:
            f[e] = max(1.0 - (deg[u] + deg[v] - 2) / d, 0.0)
        else:
            f[e] = 1.0 / d
    return f


def is_feasible(n: int, values: dict[EdgeKey, float], tol: float = 1e-9) -> bool:
    load = np.zeros(n)
    for (u, v), val in values.items():
        if val < -tol:
            return False
        load[u] += val
        load[v] += val
    return bool(np.all(load <= 1.0 + tol))


# -- concentration -------------------------------------------------------------


class BoundKind(enum.Enum):
    CHERNOFF_UPPER = "chernoff_upper"
    CHERNOFF_LOWER = "chernoff_lower"
    BERNSTEIN = "bernstein"


@dataclass
class TailCheck:
    kind: BoundKind
    threshold: float
    frequency: float
    bound: float
    slack: float
    samples: int

    @property
    def passed(self) -> bool:
        return self.frequency <= self.bound + self.slack


def na_concentration_check(
    samples: np.ndarray,
    kind: BoundKind,
    *,
    mean: float,
    delta: float | None = None,
    kappa: float | None = None,
    variance: float | None = None,
    M: float | None = None,
    a: float | None = None,
) -> TailCheck:
    """Compare an empirical tail frequency against a NA tail bound.

    * ``CHERNOFF_UPPER``: ``Pr[X >= (1+delta) kappa] <= exp(-kappa delta^2 / 3)``
      for any ``kappa >= mean``.
    * ``CHERNOFF_LOWER``: ``Pr[X <= (1-delta) mean] <= exp(-mean delta^2 / 2)``.
    * ``BERNSTEIN``: ``Pr[X > mean + a] <= exp(-a^2 / (2 (variance + a M / 3)))``.
    """
    s = np.asarray(samples, dtype=np.float64)
    N = len(s)
    if N < 10_000:
        raise ValueError("tail checks need at least 10^4 samples")
    if kind is BoundKind.CHERNOFF_UPPER:
        k = mean if kappa is None else kappa
        if k < mean:
            raise ValueError("kappa must be at least the mean")
        thr = (1 + delta) * k
        freq = float(np.mean(s >= thr))
        bound = math.exp(-k * delta**2 / 3)
    elif kind is BoundKind.CHERNOFF_LOWER:
        thr = (1 - delta) * mean
        freq = float(np.mean(s <= thr))
        bound = math.exp(-mean * delta**2 / 2)
    else:
        thr = mean + a
        freq = float(np.mean(s > thr))
        bound = math.exp(-(a**2) / (2 * (variance + a * M / 3)))
    p = min(1.0, bound)
    slack = 3 * math.sqrt(p * (1 - p) / N)
    return TailCheck(kind, thr, freq, bound, slack, N)


def binomial_sigma(p: float, trials: int) -> float:
    return math.sqrt(max(p * (1 - p), 0.0) / trials)
