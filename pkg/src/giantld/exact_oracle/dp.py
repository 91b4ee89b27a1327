"""Exact finite-n event probabilities for G(n, p).

Every recursion splits off the component of the lowest-labelled vertex.  Two
backends share that structure:

* rational: p = a/b exactly.  A probability on m vertices times b^C(m,2) is an
  integer, so the recursions run on (large) integers and divide once.
* float: log-space doubles.  The textbook connectivity recursion subtracts
  nearly equal numbers, so this backend uses a subtraction-free variant.
"""

from __future__ import annotations

import math
import gmpy2
import numpy as np
from gmpy2 import mpz
from scipy.special import gammaln, logsumexp

from ..saddle import tree_count
from .types import EventSpec, LogProb, LogValue, PrecisionLossError, as_edge_prob

__all__ = [
    "RATIONAL_MAX_N",
    "FLOAT_MAX_N",
    "exact_connectivity",
    "exact_forest",
    "exact_small_components",
    "exact_macro_volume",
    "macro_volume_distribution",
    "exact_Q",
    "exact_event",
    "connectivity_table",
]

RATIONAL_MAX_N = 200
FLOAT_MAX_N = 5000


# ---------------------------------------------------------------------------
# backend selection


def _resolve(n: int, p, arithmetic: str):
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    ep = as_edge_prob(p)
    if arithmetic == "auto":
        arithmetic = "rational" if ep.is_exact and n <= RATIONAL_MAX_N else "float"
    if arithmetic == "rational":
        q = gmpy2.mpq(ep.p) if ep.is_exact else gmpy2.mpq(*float(ep.p).as_integer_ratio())
        return arithmetic, q
    if arithmetic == "float":
        if n > FLOAT_MAX_N:
            raise ValueError(f"float backend is limited to n <= {FLOAT_MAX_N}")
        return arithmetic, float(ep.p)
    raise ValueError(f"unknown arithmetic {arithmetic!r}")


def _pair(m: int) -> int:
    return m * (m - 1) // 2


def _prob_from_weight(x, b, m: int) -> LogProb:
    return LogProb.from_exact(gmpy2.mpq(x, mpz(b) ** _pair(m)))


# ---------------------------------------------------------------------------
# rational backend: integer weights W(m) = P(m) * b^C(m,2)


def _conn_weights(nmax: int, a, b) -> list:
    """Integer weights N(k) = P(G(k, a/b) connected) * b^C(k,2), k = 0..nmax."""
    a, b = mpz(a), mpz(b)
    c = b - a
    ck = [c**k for k in range(nmax + 1)]
    bj = [b**j for j in range(nmax + 1)]
    # T[k] tracks N(k) c^(k(m-k)) b^C(m-k,2) as m grows; each step multiplies
    # by a small factor instead of forming big-by-big products.
    out = [mpz(0), mpz(1)]
    T = [None, mpz(1)]
    total = mpz(1)  # b^C(m,2)
    for m in range(2, nmax + 1):
        total *= bj[m - 1]
        acc = mpz(0)
        comb = mpz(1)
        for k in range(1, m):
            T[k] = T[k] * (ck[k] * bj[m - 1 - k])
            acc += comb * T[k]
            comb = comb * (m - k) // k
        nm = total - acc
        out.append(nm)
        T.append(nm)
    return out[: nmax + 1]


def _component_dp_exact(nmax: int, weights: dict, c) -> list:
    """X(0) = 1, X(m) = sum_k C(m-1,k-1) W_k c^(k(m-k)) X(m-k) over allowed k."""
    c = mpz(c)
    ks = sorted(weights)
    X = [mpz(1)]
    V = {}  # V[k] = W_k c^(k(m-k)) at the current m
    ck = {k: c**k for k in ks}
    for m in range(1, nmax + 1):
        for k in list(V):
            V[k] *= ck[k]
        if m in weights:
            V[m] = mpz(weights[m])
        acc = mpz(0)
        for k in ks:
            if k > m:
                break
            acc += gmpy2.comb(m - 1, k - 1) * V[k] * X[m - k]
        X.append(acc)
    return X


def _forest_weights_exact(r: int, a, b) -> dict:
    # a_k p^(k-1) q^(C(k,2)-(k-1)) scaled by b^C(k,2)
    a, c = mpz(a), mpz(b) - mpz(a)
    return {k: tree_count(k) * a ** (k - 1) * c ** (_pair(k) - k + 1) for k in range(1, r + 1)}


# ---------------------------------------------------------------------------
# float backend


def _log_binom_row(m: int) -> np.ndarray:
    # log C(m-1, k-1) for k = 1..m
    k = np.arange(1, m + 1, dtype=float)
    return gammaln(m) - gammaln(k) - gammaln(m - k + 1.0)


def _xlog(count, log_v):
    """count * log_v with the convention 0 * (-inf) = 0."""
    count = np.asarray(count, dtype=float)
    if log_v == -math.inf:
        return np.where(count == 0, 0.0, -math.inf)
    return count * log_v


def _component_dp_log(nmax: int, log_w: np.ndarray, log_q: float) -> np.ndarray:
    """Log-space version of the component recursion; log_w[k-1] for k = 1..nmax."""
    X = np.full(nmax + 1, -math.inf)
    X[0] = 0.0
    for m in range(1, nmax + 1):
        k = np.arange(1, m + 1)
        terms = _log_binom_row(m) + log_w[:m] + _xlog(k * (m - k), log_q) + X[m - k]
        X[m] = logsumexp(terms) if np.isfinite(terms).any() else -math.inf
    return X


def _log_pq(p: float) -> tuple[float, float]:
    log_p = -math.inf if p == 0.0 else math.log(p)
    log_q = -math.inf if p == 1.0 else math.log1p(-p)
    return log_p, log_q


def _log_forest_weights(nmax: int, r: int, p: float) -> np.ndarray:
    log_p, log_q = _log_pq(p)
    k = np.arange(1, nmax + 1)
    logs = np.array([math.log(tree_count(int(j))) if j <= 20 else (j - 2) * math.log(j) for j in k])
    w = logs + _xlog(k - 1, log_p) + _xlog(k * (k - 1) // 2 - k + 1, log_q)
    w[k > r] = -math.inf
    return w


def _log_conn_float(nmax: int, p: float) -> np.ndarray:
    """log P(G(k, p) connected) for k = 0..nmax (entry 0 unused).

    Deleting vertex m+1 from a connected graph on m+1 vertices leaves
    components S_1..S_j of [m], each joined to it by at least one edge.
    Since sum_{i<j} |S_i||S_j| = C(m,2) - sum_i C(|S_i|,2),

        P(m+1) = q^C(m,2) Z(m),  Z(m) = sum_k C(m-1,k-1) w(k) Z(m-k),
        w(k) = P(k) (1 - q^k) q^-C(k,2).

    Every term is positive, so log-space doubles lose nothing to cancellation.
    """
    out = np.full(nmax + 1, -math.inf)
    if nmax >= 1:
        out[1] = 0.0
    if nmax < 2 or p == 0.0:
        return out
    if p == 1.0:
        out[1:] = 0.0
        return out
    log_q = math.log1p(-p)
    log_w = np.full(nmax + 1, -math.inf)
    Z = np.full(nmax + 1, -math.inf)
    Z[0] = 0.0
    for m in range(1, nmax):
        log_w[m] = out[m] + math.log(-math.expm1(m * log_q)) - _pair(m) * log_q
        k = np.arange(1, m + 1)
        Z[m] = logsumexp(_log_binom_row(m) + log_w[1 : m + 1] + Z[m - k])
        out[m + 1] = _pair(m) * log_q + Z[m]
    _check_bracket(out, p)
    return out


def _check_bracket(log_conn: np.ndarray, p: float) -> None:
    # P(G(k,p) connected) must lie in [U/k, U], U = (1 - (1-p)^(k-1))^(k-1)
    for k in range(2, log_conn.size):
        t = (k - 1) * math.log1p(-p)
        log_u = (k - 1) * math.log(-math.expm1(t))
        slack = 1e-9 * (1 + abs(log_u))
        if not log_u - math.log(k) - slack <= log_conn[k] <= log_u + slack:
            raise PrecisionLossError(
                f"float connectivity left its a-priori bracket at k={k} (p={p})"
            )


# ---------------------------------------------------------------------------
# public operations


def connectivity_table(nmax: int, p, arithmetic: str = "auto") -> list:
    """P(G(k, p) connected) for k = 1..nmax as LogProb values (index 0 is None)."""
    mode, pv = _resolve(nmax, p, arithmetic)
    if mode == "rational":
        a, b = pv.numerator, pv.denominator
        N = _conn_weights(nmax, a, b)
        return [None] + [_prob_from_weight(N[k], b, k) for k in range(1, nmax + 1)]
    logs = _log_conn_float(nmax, pv)
    return [None] + [LogProb(float(logs[k])) for k in range(1, nmax + 1)]


def exact_connectivity(n: int, p, arithmetic: str = "auto") -> LogProb:
    """P(G(n, p) is connected).

    Rational mode uses P(1) = 1,
    P(n) = 1 - sum_{k<n} C(n-1, k-1) P(k) (1-p)^(k(n-k)).
    """
    mode, pv = _resolve(n, p, arithmetic)
    if mode == "rational":
        b = pv.denominator
        return _prob_from_weight(_conn_weights(n, pv.numerator, b)[n], b, n)
    return LogProb(float(_log_conn_float(n, pv)[n]))


def exact_forest(n: int, p, r: int | None = None, arithmetic: str = "auto") -> LogProb:
    """P(G(n, p) is a forest with no tree larger than r); r=None means r=n."""
    mode, pv = _resolve(n, p, arithmetic)
    r = n if r is None else int(r)
    if not 1 <= r <= n:
        raise ValueError(f"r={r} must satisfy 1 <= r <= n={n}")
    if mode == "rational":
        a, b = pv.numerator, pv.denominator
        X = _component_dp_exact(n, _forest_weights_exact(r, a, b), b - a)
        return _prob_from_weight(X[n], b, n)
    _, log_q = _log_pq(pv)
    X = _component_dp_log(n, _log_forest_weights(n, r, pv), log_q)
    return LogProb(float(X[n]))


def _small_tables_exact(n: int, pv, r: int):
    a, b = pv.numerator, pv.denominator
    N = _conn_weights(n, a, b)
    G = _component_dp_exact(n, {k: N[k] for k in range(1, r + 1)}, b - a)
    H = _component_dp_exact(n, {k: N[k] for k in range(r + 1, n + 1)}, b - a)
    return a, b, G, H


def _small_tables_log(n: int, p: float, r: int, need_h: bool):
    _, log_q = _log_pq(p)
    log_conn = _log_conn_float(n if need_h else r, p)
    w = np.full(n, -math.inf)
    w[:r] = log_conn[1 : r + 1]
    G = _component_dp_log(n, w, log_q)
    H = None
    if need_h:
        wh = np.full(n, -math.inf)
        wh[r:] = log_conn[r + 1 : n + 1]
        H = _component_dp_log(n, wh, log_q)
    return log_q, G, H


def exact_small_components(n: int, p, r: int, arithmetic: str = "auto") -> LogProb:
    """P(every component of G(n, p) has at most r vertices)."""
    mode, pv = _resolve(n, p, arithmetic)
    r = int(r)
    if not 1 <= r <= n:
        raise ValueError(f"r={r} must satisfy 1 <= r <= n={n}")
    if mode == "rational":
        a, b = pv.numerator, pv.denominator
        N = _conn_weights(r, a, b)
        G = _component_dp_exact(n, {k: N[k] for k in range(1, r + 1)}, b - a)
        return _prob_from_weight(G[n], b, n)
    _, G, _ = _small_tables_log(n, pv, r, need_h=False)
    return LogProb(float(G[n]))


def macro_volume_distribution(n: int, p, r: int, arithmetic: str = "auto") -> list:
    """Law of |V_r| (vertices in components larger than r) as LogProb per m = 0..n."""
    mode, pv = _resolve(n, p, arithmetic)
    r = int(r)
    if not 1 <= r < n:
        raise ValueError(f"r={r} must satisfy 1 <= r < n={n}")
    out = []
    if mode == "rational":
        a, b, G, H = _small_tables_exact(n, pv, r)
        c = mpz(b) - mpz(a)
        denom = mpz(b) ** _pair(n)
        for m in range(n + 1):
            if 0 < m <= r:
                out.append(LogProb(-math.inf, gmpy2.mpq(0)))
                continue
            x = gmpy2.comb(n, m) * H[m] * c ** (m * (n - m)) * G[n - m]
            out.append(LogProb.from_exact(gmpy2.mpq(x, denom)))
        return out
    log_q, G, H = _small_tables_log(n, pv, r, need_h=True)
    for m in range(n + 1):
        if 0 < m <= r:
            out.append(LogProb(-math.inf))
            continue
        log_c = gammaln(n + 1.0) - gammaln(m + 1.0) - gammaln(n - m + 1.0)
        val = log_c + H[m] + float(_xlog(m * (n - m), log_q)) + G[n - m]
        out.append(LogProb(min(float(val), 0.0) if np.isfinite(val) else -math.inf))
    return out


def exact_macro_volume(n: int, p, r: int, m: int, arithmetic: str = "auto") -> LogProb:
    """P(|V_r| = m); zero for infeasible 0 < m <= r."""
    if not 0 <= m <= n:
        raise ValueError(f"m={m} must satisfy 0 <= m <= n={n}")
    return macro_volume_distribution(n, p, r, arithmetic)[m]


def exact_Q(n: int, k: int, r: int, arithmetic: str = "rational") -> LogValue:
    """Weighted count of partitions of n into k tree sizes, each at most r.

    Sums prod_l (a_l / l!)^(m_l) / m_l! over multiplicities with
    sum l m_l = n and sum m_l = k.
    """
    n, k, r = int(n), int(k), int(r)
    if n < 1 or k < 1 or r < 1:
        raise ValueError("n, k, r must be positive")
    if k > n or r * k < n:
        return LogValue(-math.inf, gmpy2.mpq(0) if arithmetic == "rational" else None)
    lmax = min(r, n)
    if arithmetic == "rational":
        # R(m, j) * m! is an integer: sum_l C(m, l) a_l R(m - l, j - 1)
        a = [0] + [tree_count(l) for l in range(1, lmax + 1)]
        prev = [mpz(1)] + [mpz(0)] * n
        for j in range(1, k + 1):
            cur = [mpz(0)] * (n + 1)
            for m in range(j, n + 1):
                acc = mpz(0)
                for l in range(1, min(lmax, m) + 1):
                    if prev[m - l]:
                        acc += gmpy2.comb(m, l) * a[l] * prev[m - l]
                cur[m] = acc
            prev = cur
        q = gmpy2.mpq(prev[n], gmpy2.fac(n) * gmpy2.fac(k))
        return LogValue.from_exact(q)
    if arithmetic != "float":
        raise ValueError(f"unknown arithmetic {arithmetic!r}")
    ell = np.arange(1, lmax + 1, dtype=float)
    log_c = (ell - 2.0) * np.log(ell) - gammaln(ell + 1.0)
    prev = np.full(n + 1, -math.inf)
    prev[0] = 0.0
    for j in range(1, k + 1):
        cur = np.full(n + 1, -math.inf)
        for m in range(j, n + 1):
            top = min(lmax, m)
            terms = log_c[:top] + prev[m - np.arange(1, top + 1)]
            if np.isfinite(terms).any():
                cur[m] = logsumexp(terms)
        prev = cur
    return LogValue(float(prev[n] - gammaln(k + 1.0)))


def exact_event(n: int, p, event: EventSpec, arithmetic: str = "auto") -> LogProb:
    """Dispatch an EventSpec to the matching recursion."""
    event.validate(n)
    if event.kind == "connected":
        return exact_connectivity(n, p, arithmetic)
    if event.kind == "nocycles":
        return exact_forest(n, p, None, arithmetic)
    if event.kind == "allsmall":
        return exact_small_components(n, p, event.r, arithmetic)
    if event.kind == "nocycles-small":
        return exact_forest(n, p, event.r, arithmetic)
    if event.r >= n:
        # every component has at most n vertices
        mode, _ = _resolve(n, p, arithmetic)
        one = event.m == 0
        if mode == "rational":
            return LogProb.from_exact(1 if one else 0)
        return LogProb(0.0 if one else -math.inf)
    return exact_macro_volume(n, p, event.r, event.m, arithmetic)


def forest_from_Q(n: int, p, r: int | None = None) -> LogProb:
    """P(L and B_r) assembled from the Q_{n,k,r} partition sums (rational p only).

    P = n! p^n q^(C(n,2)-n) sum_k p^(-k) q^k Q_{n,k,r}.
    """
    ep = as_edge_prob(p)
    if not ep.is_exact:
        raise ValueError("forest_from_Q needs an exact edge probability")
    pv = gmpy2.mpq(ep.p)
    q = 1 - pv
    r = n if r is None else r
    total = gmpy2.mpq(0)
    for k in range(1, n + 1):
        Q = exact_Q(n, k, r).exact
        if Q:
            total += Q * q**k / pv**k
    return LogProb.from_exact(gmpy2.fac(n) * pv**n * q ** (_pair(n) - n) * total)

