"""Closed-form rate functions for the giant component of G(n, alpha/n).

All functions work in double precision and are pure.  Endpoint values
(rho in {0, 1}, alpha = 0) follow the continuous limits of each formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "AlphaParam",
    "Density",
    "RatePoint",
    "entropy",
    "pi1",
    "log_pi1",
    "psi",
    "phi",
    "rate_point",
    "mean_field_maximal",
    "minimize_phi",
    "xi",
    "g_function",
    "g_second_plus_one",
    "connectivity_bounds",
    "connectivity_limit_constant",
    "connectivity_bound_ratio",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class AlphaParam:
    """Mean degree of G(n, alpha/n)."""

    value: float

    def __post_init__(self):
        if not math.isfinite(self.value) or self.value < 0:
            raise ValueError(f"alpha must be finite and >= 0, got {self.value!r}")

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class Density:
    """Fraction of vertices, in [0, 1]."""

    value: float

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"density must lie in [0, 1], got {self.value!r}")

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class RatePoint:
    rho: float
    phi: float
    psi_active: bool


def _alpha(alpha) -> float:
    return float(AlphaParam(float(alpha)))


def _rho(rho) -> float:
    return float(Density(float(rho)))


def _xlogx(x: float) -> float:
    return 0.0 if x == 0.0 else x * math.log(x)


def _nonneg(x: float) -> float:
    # phi >= 0 exactly; rounding near the minimizer can leave -1e-16
    return x if x > 0.0 else 0.0


def entropy(rho) -> float:
    """Return rho log rho + (1 - rho) log(1 - rho), zero at both endpoints."""
    rho = _rho(rho)
    return _xlogx(rho) + _xlogx(1.0 - rho)


def pi1(alpha) -> float:
    """Return 1 - exp(-alpha)."""
    return -math.expm1(-_alpha(alpha))


def log_pi1(alpha) -> float:
    """Return log(1 - exp(-alpha)); -inf at alpha = 0."""
    alpha = _alpha(alpha)
    if alpha == 0.0:
        return -math.inf
    return math.log(-math.expm1(-alpha))


def psi(alpha) -> float:
    """Return min(log alpha - (alpha - 1/alpha)/2, 0).

    The bracketed expression blows up to +inf as alpha -> 0+, so psi(0) = 0.
    """
    alpha = _alpha(alpha)
    if alpha <= 1.0:
        return 0.0
    return min(math.log(alpha) - 0.5 * (alpha - 1.0 / alpha), 0.0)


def phi(rho, alpha) -> float:
    """Large-deviation rate for the fraction of vertices in macroscopic components.

    Returns ``math.inf`` for alpha = 0 and rho > 0.
    """
    rho = _rho(rho)
    alpha = _alpha(alpha)
    if rho == 0.0:
        return _nonneg(-psi(alpha))
    if alpha == 0.0:
        return math.inf
    x = alpha * rho
    # log(1 - pi1(x)) = -x exactly
    value = entropy(rho) - rho * log_pi1(x) + (1.0 - rho) * x
    if rho < 1.0:
        value -= (1.0 - rho) * psi(alpha * (1.0 - rho))
    return _nonneg(value)


def rate_point(rho, alpha) -> RatePoint:
    rho = _rho(rho)
    alpha = _alpha(alpha)
    active = psi(alpha * (1.0 - rho)) < 0.0
    return RatePoint(rho=rho, phi=phi(rho, alpha), psi_active=active)


def mean_field_maximal(alpha, tol: float = 1e-12, max_iter: int = 1_000_000) -> float:
    """Maximal solution of rho = 1 - exp(-alpha rho).

    Iterates the map from rho = 1; the iterates decrease monotonically onto
    the largest fixed point.  Returns 0 for alpha <= 1.
    """
    alpha = _alpha(alpha)
    if alpha <= 1.0:
        return 0.0
    rho = 1.0
    for _ in range(max_iter):
        nxt = -math.expm1(-alpha * rho)
        if rho - nxt <= tol:
            return nxt
        rho = nxt
    # Very close to alpha = 1 the map contracts slowly.  The residual is
    # convex in rho, so Newton started right of the root stays monotone.
    for _ in range(200):
        f = rho + math.expm1(-alpha * rho)
        step = f / (1.0 - alpha * math.exp(-alpha * rho))
        rho -= step
        if abs(step) <= tol * 1e-3:
            break
    return rho


def _golden_section(f, lo: float, hi: float, tol: float) -> float:
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = f(d)
    return 0.5 * (lo + hi)


def minimize_phi(alpha, step: float = 1e-3, tol: float = 1e-10) -> tuple[float, float]:
    """Return (argmin, min) of rho -> phi(rho, alpha) over [0, 1].

    A grid scan locates the basin; golden-section search refines it.
    """
    alpha = _alpha(alpha)
    npts = int(round(1.0 / step))
    grid = [i / npts for i in range(npts + 1)]
    values = [phi(r, alpha) for r in grid]
    i = min(range(len(values)), key=values.__getitem__)
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, npts)]
    f = lambda r: phi(r, alpha)  # noqa: E731
    best = _golden_section(f, lo, hi, tol)
    candidates = [(f(best), best), (values[i], grid[i])]
    if lo == 0.0:
        candidates.append((f(0.0), 0.0))
    if hi == 1.0:
        candidates.append((f(1.0), 1.0))
    fmin, argmin = min(candidates)
    return argmin, fmin


def xi(rho, alpha) -> float:
    """Exponent comparing a two-component split with a connected graph.

    Symmetric under rho -> 1 - rho and strictly convex on [0, 1].
    """
    rho = _rho(rho)
    alpha = _alpha(alpha)
    if alpha <= 0.0:
        raise ValueError("xi requires alpha > 0")

    def side(x: float) -> float:
        return 0.0 if x == 0.0 else x * log_pi1(alpha * x)

    return -entropy(rho) + side(rho) + side(1.0 - rho) - alpha * rho * (1.0 - rho)


def g_function(eta: float) -> float:
    """eta * log(pi1(eta) / eta)."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    return eta * (log_pi1(eta) - math.log(eta))


def g_second_plus_one(eta: float) -> float:
    """Closed form of G''(eta) + 1 with q(eta) = eta / (1 - exp(-eta)).

    Equals (q' - q)(q exp(-eta) - 1) / q, which is positive for eta > 0.
    """
    if not eta > 0:
        raise ValueError("eta must be positive")
    em1 = -math.expm1(-eta)  # 1 - e^{-eta}
    q = eta / em1
    dq = (em1 - eta * math.exp(-eta)) / (em1 * em1)
    # q e^{-eta} - 1 = (eta - (e^eta - 1)) / (e^eta - 1)
    ex = math.expm1(eta)
    second = (eta - ex) / ex if math.isfinite(ex) else -1.0
    return (dq - q) * second / q


def connectivity_bounds(n: int, alpha) -> tuple[float, float]:
    """Log of the two-sided bracket for P(G(n, alpha/n) is connected).

    upper = (1 - (1 - alpha/n)^(n-1))^(n-1), lower = upper / n.
    """
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    n = int(n)
    alpha = _alpha(alpha)
    if alpha > n:
        raise ValueError(f"alpha={alpha} exceeds n={n}: edge probability above 1")
    if n == 1:
        return 0.0, 0.0
    p = alpha / n
    if p == 1.0:
        log_upper = 0.0
    else:
        t = (n - 1) * math.log1p(-p)  # log (1-p)^(n-1)
        log_upper = -math.inf if t == 0.0 else (n - 1) * math.log(-math.expm1(t))
    return log_upper - math.log(n), log_upper


def connectivity_limit_constant(alpha) -> float:
    """Limit of (upper bound) / (1 - e^-alpha)^(n-1) as n -> inf.

    Expanding (1 - alpha/n)^(n-1) = e^-alpha (1 + (alpha - alpha^2/2)/n + ...)
    gives exp(-(1 - alpha/2) alpha e^-alpha / (1 - e^-alpha)).
    """
    alpha = _alpha(alpha)
    if alpha == 0.0:
        raise ValueError("the limit constant requires alpha > 0")
    return math.exp(-(1.0 - alpha / 2.0) * alpha * math.exp(-alpha) / pi1(alpha))


def connectivity_bound_ratio(n: int, alpha) -> float:
    """Finite-n value of (upper bound) / (1 - e^-alpha)^(n-1)."""
    _, log_upper = connectivity_bounds(n, alpha)
    return math.exp(log_upper - (n - 1) * log_pi1(alpha))
