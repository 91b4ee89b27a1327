"""Brute-force enumerators used as independent oracles for the recursions.

Graphs are enumerated as bitmasks over the edge slots and classified in bulk
with numpy (min-label propagation).  A homogeneous G(n, p) weight depends
only on the edge count, so each n is classified once and reused for every p.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache, reduce

import gmpy2
import numpy as np

from ..saddle import tree_count
from .types import EventSpec, LogProb, LogValue, as_edge_prob

__all__ = [
    "BRUTE_MAX_N",
    "GROUNDED_MAX_N",
    "graph_census_table",
    "brute_force_enumerate",
    "brute_force_grounded",
    "brute_force_connectivity_inhomogeneous",
    "brute_force_Q",
]

BRUTE_MAX_N = 7
GROUNDED_MAX_N = 5


def _pairs(n: int):
    return [(u, v) for v in range(n) for u in range(v)]


def _bits(masks: np.ndarray, e: int) -> np.ndarray:
    return ((masks >> e) & 1).astype(bool)


def _component_labels(n: int, edges, masks: np.ndarray) -> list:
    """Per-vertex component label (the smallest vertex in the component)."""
    labels = [np.full(masks.shape, v, dtype=np.int8) for v in range(n)]
    present = [_bits(masks, e) for e in range(len(edges))]
    for _ in range(max(n - 1, 0)):
        for e, (u, v) in enumerate(edges):
            lo = np.minimum(labels[u], labels[v])
            labels[u] = np.where(present[e], lo, labels[u])
            labels[v] = np.where(present[e], lo, labels[v])
    return labels


@lru_cache(maxsize=None)
def graph_census_table(n: int) -> tuple:
    """All graphs on n labelled vertices grouped by (edge count, sorted sizes).

    Returns a tuple of (n_edges, sizes, count) triples.
    """
    if not 1 <= n <= BRUTE_MAX_N:
        raise ValueError(f"brute force is limited to 1 <= n <= {BRUTE_MAX_N}")
    edges = _pairs(n)
    masks = np.arange(1 << len(edges), dtype=np.int64)
    labels = _component_labels(n, edges, masks)
    sizes = np.zeros((masks.size, n), dtype=np.int64)
    for v in range(n):
        count = sum((labels[u] == v).astype(np.int64) for u in range(n))
        sizes[:, v] = count
    sizes.sort(axis=1)
    n_edges = sum(_bits(masks, e).astype(np.int64) for e in range(len(edges))) if edges else np.zeros_like(masks)
    key = n_edges.copy()
    for v in range(n):
        key = key * 8 + sizes[:, v]
    uniq, idx, counts = np.unique(key, return_index=True, return_counts=True)
    rows = []
    for i, c in zip(idx, counts):
        sz = tuple(int(s) for s in sizes[i] if s > 0)
        rows.append((int(n_edges[i]), sz, int(c)))
    return tuple(rows)


def brute_force_enumerate(n: int, p, event: EventSpec) -> LogProb:
    """Sum the probability of every graph on n <= 7 vertices lying in ``event``."""
    if not 1 <= n <= BRUTE_MAX_N:
        raise ValueError(f"brute force is limited to 1 <= n <= {BRUTE_MAX_N}, got {n}")
    event.validate(n)
    ep = as_edge_prob(p)
    slots = n * (n - 1) // 2
    pv = gmpy2.mpq(ep.p) if ep.is_exact else ep.p
    total = 0
    for n_edges, sizes, count in graph_census_table(n):
        if event.matches(n, sizes, n_edges):
            total += count * pv**n_edges * (1 - pv) ** (slots - n_edges)
    if ep.is_exact:
        return LogProb.from_exact(total)
    return LogProb(math.log(total) if total > 0 else -math.inf)


# ---------------------------------------------------------------------------
# inhomogeneous graphs


def _prob_matrix(probs) -> list:
    n = len(probs)
    out = [[Fraction(probs[i][j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        if out[i][i] != 0:
            raise ValueError("probability matrix must have a zero diagonal")
        for j in range(n):
            if out[i][j] != out[j][i]:
                raise ValueError("probability matrix must be symmetric")
            if not 0 <= out[i][j] <= 1:
                raise ValueError("probabilities must lie in [0, 1]")
    return out


def _weighted_sum(indicator: np.ndarray, edge_probs: list) -> Fraction:
    """Exact sum over masks of indicator[mask] * prod_e (p_e or 1 - p_e).

    Bit e of the mask index is edge e.  Contracts one edge at a time on
    integer weights over a common denominator.
    """
    denom = reduce(math.lcm, (p.denominator for p in edge_probs), 1)
    w1 = [int(p * denom) for p in edge_probs]
    w0 = [denom - w for w in w1]
    arr = indicator.astype(np.int64).astype(object)
    for e in reversed(range(len(edge_probs))):
        half = arr.size // 2
        arr = arr[:half] * w0[e] + arr[half:] * w1[e]
    return Fraction(int(arr[0]), denom ** len(edge_probs))


def brute_force_grounded(probs) -> LogProb:
    """P(every vertex has a directed path to vertex 0) in the directed graph.

    Each ordered pair (i, j) carries the arc i -> j independently with
    probability probs[i][j]; n <= 5.
    """
    P = _prob_matrix(probs)
    n = len(P)
    if not 1 <= n <= GROUNDED_MAX_N:
        raise ValueError(f"grounded enumeration is limited to n <= {GROUNDED_MAX_N}")
    arcs = [(i, j) for i in range(n) for j in range(n) if i != j]
    masks = np.arange(1 << len(arcs), dtype=np.int64)
    present = [_bits(masks, e) for e in range(len(arcs))]
    reach = [np.full(masks.shape, v == 0) for v in range(n)]
    for _ in range(max(n - 1, 0)):
        for e, (i, j) in enumerate(arcs):
            reach[i] = reach[i] | (present[e] & reach[j])
    grounded = np.logical_and.reduce(reach) if n > 1 else np.ones(masks.shape, bool)
    return LogProb.from_exact(_weighted_sum(grounded, [P[i][j] for i, j in arcs]))


def brute_force_connectivity_inhomogeneous(probs) -> LogProb:
    """P(undirected graph with independent edges {i,j} ~ probs[i][j] is connected)."""
    P = _prob_matrix(probs)
    n = len(P)
    if not 1 <= n <= BRUTE_MAX_N:
        raise ValueError(f"brute force is limited to n <= {BRUTE_MAX_N}")
    edges = _pairs(n)
    masks = np.arange(1 << len(edges), dtype=np.int64)
    labels = _component_labels(n, edges, masks)
    connected = np.logical_and.reduce([lab == 0 for lab in labels])
    return LogProb.from_exact(_weighted_sum(connected, [P[u][v] for u, v in edges]))


# ---------------------------------------------------------------------------
# partition sums


def _partitions(n: int, k: int, largest: int):
    """Partitions of n into exactly k parts, each <= largest, non-increasing."""
    if k == 0:
        if n == 0:
            yield ()
        return
    for first in range(min(n - (k - 1), largest), 0, -1):
        if first * k < n:
            break
        for rest in _partitions(n - first, k - 1, first):
            yield (first,) + rest


def brute_force_Q(n: int, k: int, r: int) -> LogValue:
    """Q_{n,k,r} summed directly over multiplicity vectors."""
    total = Fraction(0)
    for part in _partitions(n, k, r):
        term = Fraction(1)
        for size, mult in ((s, len(list(g))) for s, g in itertools.groupby(part)):
            term *= Fraction(tree_count(size), math.factorial(size)) ** mult / math.factorial(mult)
        total += term
    return LogValue.from_exact(total)
