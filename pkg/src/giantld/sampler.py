"""Monte Carlo sampling of G(n, alpha/n) with union-find component census.

Edges are drawn by geometric skipping over the linearised edge slots, so a
sample costs O(n + alpha n) instead of O(n^2).  Every sample owns a
counter-based random stream derived from (seed, sample index); batches are
split into fixed chunks, which makes results independent of the number of
worker threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy.stats import beta as beta_dist

from .exact_oracle.types import EventSpec
from .rate_core import AlphaParam

__all__ = [
    "ComponentCensus",
    "Estimate",
    "BatchStats",
    "RateRow",
    "UnionFind",
    "census_from_edges",
    "sample_edges",
    "sample_census",
    "sample_statistics",
    "clopper_pearson",
    "estimate_event",
    "empirical_rate_table",
    "uniqueness_frequency",
    "macro_volume_histogram",
    "giant_fractions",
]

CHUNK = 1 << 14
_MASK64 = (1 << 64) - 1


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class ComponentCensus:
    """Component sizes of one graph, largest first."""

    n: int
    sizes: tuple
    n_edges: int = 0

    def __post_init__(self):
        sizes = tuple(sorted((int(s) for s in self.sizes), reverse=True))
        if any(s < 1 for s in sizes):
            raise ValueError("component sizes must be positive")
        if sum(sizes) != self.n:
            raise ValueError(f"sizes sum to {sum(sizes)}, expected n={self.n}")
        object.__setattr__(self, "sizes", sizes)

    @property
    def largest(self) -> int:
        return self.sizes[0] if self.sizes else 0

    @property
    def n_components(self) -> int:
        return len(self.sizes)

    def v_r(self, r: int) -> int:
        """Vertices in components of size > r."""
        return sum(s for s in self.sizes if s > r)

    def n_r(self, r: int) -> int:
        """Number of components of size > r."""
        return sum(1 for s in self.sizes if s > r)


@dataclass(frozen=True)
class Estimate:
    p_hat: float
    ci_low: float
    ci_high: float
    samples: int
    successes: int
    seed: int

    def __post_init__(self):
        if not self.ci_low <= self.p_hat <= self.ci_high:
            raise ValueError("interval must contain the point estimate")


@dataclass(frozen=True)
class BatchStats:
    """Per-sample summary arrays for a batch (all of length ``samples``)."""

    n: int
    r: int
    edges: np.ndarray
    ncomp: np.ndarray
    largest: np.ndarray
    v_r: np.ndarray
    n_r: np.ndarray


@dataclass(frozen=True)
class RateRow:
    alpha: float
    n: int
    rate: float
    rate_low: float
    rate_high: float
    estimate: Estimate = field(repr=False)
    resolved: bool = True


class UnionFind:
    """Disjoint sets over 0..n-1 with path compression and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True

    def component_sizes(self) -> list:
        return [self.size[v] for v in range(len(self.parent)) if self.parent[v] == v]


def census_from_edges(n: int, edges) -> ComponentCensus:
    uf = UnionFind(n)
    count = 0
    for u, v in edges:
        uf.union(int(u), int(v))
        count += 1
    return ComponentCensus(n, tuple(uf.component_sizes()), count)


# ---------------------------------------------------------------------------
# compiled kernels

_GOLDEN64 = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


@numba.njit(cache=True, nogil=True)
def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@numba.njit(cache=True, nogil=True)
def _stream_start(seed, index):
    # independent splitmix64 stream per (seed, index)
    return _mix(_mix(seed) ^ (np.uint64(index) * _GOLDEN64 + _GOLDEN64))


@numba.njit(cache=True, nogil=True)
def _uniform(state):
    state = state + _GOLDEN64
    x = _mix(state)
    return state, (x >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@numba.njit(cache=True, nogil=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@numba.njit(cache=True, nogil=True)
def _draw(n, p, log_q, state, parent, size, eu, ev, keep):
    """Sample one graph into the union-find arrays; returns (state, n_edges).

    When ``keep`` is set the edges are also written to eu/ev.
    """
    for i in range(n):
        parent[i] = i
        size[i] = 1
    n_edges = 0
    if p <= 0.0 or n < 2:
        return state, 0
    v = 1
    w = -1
    slots = n * (n - 1) // 2
    while v < n:
        if p >= 1.0:
            w += 1
        else:
            state, u = _uniform(state)
            gap = np.floor(math.log1p(-u) / log_q)  # float: math.floor would cast inf to int
            if not gap < slots:
                # past the last slot (or nan when log_q underflows); keeps the int cast safe
                break
            w += 1 + int(gap)
        while w >= v and v < n:
            w -= v
            v += 1
        if v < n:
            if keep:
                eu[n_edges] = w
                ev[n_edges] = v
            n_edges += 1
            a = _find(parent, v)
            b = _find(parent, w)
            if a != b:
                if size[a] < size[b]:
                    a, b = b, a
                parent[b] = a
                size[a] += size[b]
    return state, n_edges


@numba.njit(cache=True, nogil=True)
def _batch_kernel(n, p, seed, start, count, r, edges, ncomp, largest, v_r, n_r):
    parent = np.empty(n, np.int64)
    size = np.empty(n, np.int64)
    dummy = np.empty(0, np.int64)
    log_q = math.log1p(-p) if p < 1.0 else -math.inf
    for j in range(count):
        state = _stream_start(seed, start + np.uint64(j))
        state, m = _draw(n, p, log_q, state, parent, size, dummy, dummy, False)
        comps = 0
        big = 0
        vol = 0
        nbig = 0
        for i in range(n):
            if parent[i] == i:
                s = size[i]
                comps += 1
                if s > big:
                    big = s
                if s > r:
                    vol += s
                    nbig += 1
        edges[j] = m
        ncomp[j] = comps
        largest[j] = big
        v_r[j] = vol
        n_r[j] = nbig


@numba.njit(cache=True, nogil=True)
def _edges_kernel(n, p, seed, index, eu, ev):
    parent = np.empty(n, np.int64)
    size = np.empty(n, np.int64)
    log_q = math.log1p(-p) if p < 1.0 else -math.inf
    state = _stream_start(seed, index)
    _, m = _draw(n, p, log_q, state, parent, size, eu, ev, True)
    return m


# ---------------------------------------------------------------------------
# helpers


def _check_n_alpha(n, alpha) -> tuple[int, float]:
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    alpha = float(AlphaParam(float(alpha)))
    if alpha > n:
        raise ValueError(f"alpha={alpha} exceeds n={n}: edge probability above 1")
    return n, alpha


def _seed64(seed) -> np.uint64:
    if int(seed) != seed or seed < 0 or seed > _MASK64:
        raise ValueError(f"seed must be an integer in [0, 2^64), got {seed!r}")
    return np.uint64(int(seed))


def _workers(workers) -> int:
    if workers is None:
        return os.cpu_count() or 1
    if int(workers) < 1:
        raise ValueError("workers must be >= 1")
    return int(workers)


# ---------------------------------------------------------------------------
# public operations


def sample_edges(n: int, alpha, seed: int = 0, index: int = 0) -> np.ndarray:
    """Edge list (shape (m, 2), pairs u < v) of sample ``index`` of the stream."""
    n, alpha = _check_n_alpha(n, alpha)
    cap = n * (n - 1) // 2
    eu = np.empty(cap, np.int64)
    ev = np.empty(cap, np.int64)
    m = _edges_kernel(n, alpha / n, _seed64(seed), np.uint64(index), eu, ev)
    return np.stack([eu[:m], ev[:m]], axis=1)


def sample_census(n: int, alpha, seed: int = 0, index: int = 0) -> ComponentCensus:
    """Census of one G(n, alpha/n) sample; identical arguments give identical results."""
    return census_from_edges(n, sample_edges(n, alpha, seed, index))


def sample_statistics(
    n: int, alpha, samples: int, seed: int = 0, r: int = 0, workers: int | None = None
) -> BatchStats:
    """Per-sample edge count, component count, largest size, |V_r| and N_r."""
    n, alpha = _check_n_alpha(n, alpha)
    if int(samples) != samples or samples < 1:
        raise ValueError("samples must be a positive integer")
    samples = int(samples)
    if int(r) != r or r < 0:
        raise ValueError("r must be a nonnegative integer")
    seed = _seed64(seed)
    arrays = [np.empty(samples, np.int64) for _ in range(5)]
    p = alpha / n

    def run(start):
        count = min(CHUNK, samples - start)
        views = [a[start : start + count] for a in arrays]
        _batch_kernel(n, p, seed, np.uint64(start), count, int(r), *views)

    starts = range(0, samples, CHUNK)
    nw = min(_workers(workers), len(starts))
    if nw == 1:
        for s in starts:
            run(s)
    else:
        with ThreadPoolExecutor(nw) as pool:
            list(pool.map(run, starts))
    return BatchStats(n, int(r), *arrays)


def clopper_pearson(successes: int, samples: int, level: float = 0.95) -> tuple[float, float]:
    """Exact binomial confidence interval."""
    if not 0 <= successes <= samples or samples < 1:
        raise ValueError("need 0 <= successes <= samples and samples >= 1")
    tail = (1.0 - level) / 2.0
    lo = 0.0 if successes == 0 else float(beta_dist.ppf(tail, successes, samples - successes + 1))
    hi = 1.0 if successes == samples else float(beta_dist.ppf(1 - tail, successes + 1, samples - successes))
    return lo, hi


def _event_mask(stats: BatchStats, event: EventSpec) -> np.ndarray:
    return event.mask(stats.n, stats.edges, stats.ncomp, stats.largest, stats.v_r)


def estimate_event(
    n: int, alpha, event: EventSpec, samples: int, seed: int = 0, workers: int | None = None
) -> Estimate:
    """Monte Carlo estimate of P(event) with a 95% Clopper-Pearson interval."""
    event.validate(n)
    stats = sample_statistics(n, alpha, samples, seed, r=event.r or 0, workers=workers)
    k = int(np.count_nonzero(_event_mask(stats, event)))
    lo, hi = clopper_pearson(k, stats.edges.size)
    p_hat = k / stats.edges.size
    return Estimate(p_hat, min(lo, p_hat), max(hi, p_hat), stats.edges.size, k, int(seed))


def _row_seed(seed: int, i: int) -> int:
    return int(np.random.SeedSequence(int(seed), spawn_key=(i,)).generate_state(1, np.uint64)[0])


def empirical_rate_table(
    alphas, ns, event: EventSpec, samples: int, seed: int = 0, workers: int | None = None
) -> list:
    """Rows of -(1/n) log p_hat with the interval mapped through the same transform.

    Rows with fewer than 10 successes are flagged unresolved; with zero
    successes the rate is reported as nan rather than infinity.
    """
    rows = []
    i = 0
    for alpha in alphas:
        for n in ns:
            est = estimate_event(n, alpha, event, samples, _row_seed(seed, i), workers)
            i += 1

            def rate(x):
                return -math.log(x) / n if x > 0 else math.nan

            rows.append(
                RateRow(
                    alpha=float(alpha),
                    n=int(n),
                    rate=rate(est.p_hat),
                    rate_low=rate(est.ci_high),
                    rate_high=rate(est.ci_low),
                    estimate=est,
                    resolved=est.successes >= 10,
                )
            )
    return rows


def uniqueness_frequency(
    n: int, alpha, epsilon: float, samples: int, seed: int = 0, workers: int | None = None
) -> float:
    """Fraction of samples with at most one component larger than ceil(epsilon n)."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    r = math.ceil(epsilon * n)
    stats = sample_statistics(n, alpha, samples, seed, r=r, workers=workers)
    return float(np.mean(stats.n_r <= 1))


def macro_volume_histogram(
    n: int, alpha, r: int, samples: int, seed: int = 0, workers: int | None = None
) -> np.ndarray:
    """Counts of |V_r| = m for m = 0..n."""
    stats = sample_statistics(n, alpha, samples, seed, r=r, workers=workers)
    return np.bincount(stats.v_r, minlength=n + 1)


def giant_fractions(n: int, alpha, samples: int, seed: int = 0, workers: int | None = None) -> np.ndarray:
    """largest / n for each sample."""
    stats = sample_statistics(n, alpha, samples, seed, workers=workers)
    return stats.largest / n
