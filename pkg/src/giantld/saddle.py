"""Tree generating polynomial F_r and the variational problem behind P(forest).

F_r(s) = sum_{l=1}^r a_l s^l / l!, with a_l = l^(l-2) labelled trees on l
vertices.  Everything is evaluated in log space so that r in the thousands
does not overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, logsumexp

from . import rate_core

__all__ = [
    "TreeCount",
    "SaddleSolution",
    "SaddleLimits",
    "cayley_log",
    "tree_count",
    "eval_F",
    "log_eval_F",
    "lambert_w_tree",
    "theta",
    "solve_saddle",
    "saddle_limits",
    "theta_limit",
    "trees_rate",
    "finite_r_rate",
    "profile_theta",
    "log_q_upper_bound",
]

_LOG_INV_E = -1.0


@dataclass(frozen=True)
class TreeCount:
    ell: int
    log_count: float

    @classmethod
    def of(cls, ell: int) -> "TreeCount":
        return cls(ell, cayley_log(ell))


@dataclass(frozen=True)
class SaddleSolution:
    """Unique stationary point (s_r, rho_r) of Theta_r for given (alpha, r)."""

    s_r: float
    rho_r: float
    theta: float
    r: int
    alpha: float
    residual_F: float
    residual_sdF: float


@dataclass(frozen=True)
class SaddleLimits:
    """r -> infinity limits of the saddle point."""

    s: float
    rho: float
    theta: float
    F: float


def _check_ell(ell) -> int:
    if int(ell) != ell or ell < 1:
        raise ValueError(f"ell must be a positive integer, got {ell!r}")
    return int(ell)


def cayley_log(ell: int) -> float:
    """log of the number of labelled trees on ell vertices, (ell - 2) log ell."""
    ell = _check_ell(ell)
    if ell <= 20:
        return math.log(tree_count(ell))
    return (ell - 2) * math.log(ell)


def tree_count(ell: int) -> int:
    """Exact ell^(ell-2), with a_1 = a_2 = 1."""
    ell = _check_ell(ell)
    return 1 if ell == 1 else ell ** (ell - 2)


@lru_cache(maxsize=64)
def _log_coefficients(r: int) -> np.ndarray:
    # log(a_l / l!) for l = 1..r; cached arrays are frozen.
    ell = np.arange(1, r + 1, dtype=float)
    out = (ell - 2.0) * np.log(ell) - gammaln(ell + 1.0)
    out.setflags(write=False)
    return out


def _check_r(r, minimum: int = 1) -> int:
    if int(r) != r or r < minimum:
        raise ValueError(f"r must be an integer >= {minimum}, got {r!r}")
    return int(r)


def log_eval_F(log_s: float, r: int) -> tuple[float, float]:
    """Return (log F_r(s), log s F_r'(s)) for s = exp(log_s)."""
    r = _check_r(r)
    c = _log_coefficients(r)
    ell = np.arange(1, r + 1, dtype=float)
    terms = c + ell * log_s
    return float(logsumexp(terms)), float(logsumexp(terms + np.log(ell)))


def eval_F(s: float, r: int) -> tuple[float, float]:
    """Return (F_r(s), s F_r'(s)); overflow is reported as math.inf."""
    if not s > 0:
        raise ValueError("s must be positive")
    lf, ld = log_eval_F(math.log(s), r)
    return _safe_exp(lf), _safe_exp(ld)


def _safe_exp(x: float) -> float:
    return math.inf if x > 709.78 else math.exp(x)


def lambert_w_tree(s: float, tol: float = 1e-14) -> float:
    """The root W in [0, 1] of W exp(-W) = s, for 0 <= s <= 1/e."""
    if not 0.0 <= s <= math.exp(-1.0) * (1 + 1e-15):
        raise ValueError(f"s must lie in [0, 1/e], got {s!r}")
    if s == 0.0:
        return 0.0
    if s >= math.exp(-1.0):
        # flat maximum of W e^-W; bisection would stall ~1e-8 short of 1
        return 1.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid * math.exp(-mid) < s:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def theta(s: float, rho: float, alpha: float, r: int) -> float:
    """Theta_r(s, rho) = -rho log alpha - rho log rho + rho + rho log F_r(s) - log s."""
    if not s > 0:
        raise ValueError("s must be positive")
    if not 0.0 < rho <= 1.0:
        raise ValueError("rho must lie in (0, 1]")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    log_s = math.log(s)
    log_f, _ = log_eval_F(log_s, r)
    return -rho * math.log(alpha) - rho * math.log(rho) + rho + rho * log_f - log_s


def _bisect_log_s(g, target: float, max_iter: int = 400) -> float:
    """Solve g(log s) = target for increasing g, bracketing out from s = 1/e."""
    lo = hi = _LOG_INV_E
    if g(lo) > target:
        step = 1.0
        while g(lo) > target:
            lo -= step
            step *= 2.0
            if lo < -1e4:
                raise ArithmeticError("could not bracket the saddle from below")
    else:
        step = 1.0
        while g(hi) < target:
            hi += step
            step *= 2.0
            if hi > 1e4:
                raise ArithmeticError("could not bracket the saddle from above")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if g(mid) < target:
            lo = mid
        else:
            hi = mid
    return lo if abs(g(lo) - target) <= abs(g(hi) - target) else hi


def solve_saddle(alpha: float, r: int) -> SaddleSolution:
    """Solve F_r(s) = alpha rho, s F_r'(s) = alpha.

    s F_r'(s) increases strictly from 0 to infinity, so the first equation
    has a unique root, found by bisection in log s.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    r = _check_r(r, minimum=2)
    log_alpha = math.log(alpha)
    log_s = _bisect_log_s(lambda t: log_eval_F(t, r)[1], log_alpha)
    log_f, log_d = log_eval_F(log_s, r)
    f = math.exp(log_f)
    rho = f / alpha
    s = math.exp(log_s)
    sol = SaddleSolution(
        s_r=s,
        rho_r=rho,
        theta=rho - log_s,
        r=r,
        alpha=float(alpha),
        residual_F=abs(f - alpha * rho),
        residual_sdF=abs(math.exp(log_d) - alpha),
    )
    if not 1.0 / r < rho < 1.0:
        raise ArithmeticError(f"saddle density {rho} outside (1/r, 1)")
    if sol.residual_sdF > 1e-10:
        raise ArithmeticError(f"saddle residual {sol.residual_sdF:.3e} too large")
    return sol


def saddle_limits(alpha: float) -> SaddleLimits:
    """r -> infinity limits of s_r, rho_r, Theta_r(s_r, rho_r) and F_r(s_r)."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if alpha <= 1.0:
        s = alpha * math.exp(-alpha)
        rho = 1.0 - alpha / 2.0
        th = 1.0 + alpha / 2.0 - math.log(alpha)
    else:
        s = math.exp(-1.0)
        rho = 1.0 / (2.0 * alpha)
        th = 1.0 + 1.0 / (2.0 * alpha)
    return SaddleLimits(s=s, rho=rho, theta=th, F=alpha * rho)


def theta_limit(alpha: float) -> float:
    return saddle_limits(alpha).theta


def trees_rate(alpha: float) -> float:
    """lim P(G(n, alpha/n) has no cycles)^(1/n)."""
    alpha = float(rate_core.AlphaParam(float(alpha)))
    if alpha > 1.0:
        return alpha * math.exp(-alpha / 2.0 + 1.0 / (2.0 * alpha))
    return 1.0


def finite_r_rate(sol: SaddleSolution) -> float:
    """lim_n P(no cycles, no component above r)^(1/n) at the given cutoff."""
    a = sol.alpha
    return a * math.exp(-1.0 - a / 2.0 + sol.theta)


def _log_s_for_mean(target: float, r: int) -> float:
    # s F'(s) / F(s) is the mean of a tilted law on {1..r}: increasing in s.
    def g(t):
        lf, ld = log_eval_F(t, r)
        return ld - lf

    return _bisect_log_s(g, math.log(target))


def profile_theta(rho: float, alpha: float, r: int) -> float:
    """inf over s > 0 of Theta_r(s, rho), for 1/r < rho < 1."""
    r = _check_r(r, minimum=2)
    if not 1.0 / r < rho < 1.0:
        raise ValueError("rho must lie strictly between 1/r and 1")
    log_s = _log_s_for_mean(1.0 / rho, r)
    log_f, _ = log_eval_F(log_s, r)
    return -rho * math.log(alpha) - rho * math.log(rho) + rho + rho * log_f - log_s


def log_q_upper_bound(n: int, k: int, r: int) -> float:
    """log of (1/k!) inf_{s>0} F_r(s)^k / s^n.

    The infimum sits where s F_r'(s) / F_r(s) = n / k; at the extremes
    k = n and r k = n it is attained as s -> 0 and s -> infinity.
    """
    n, k, r = int(n), int(k), int(r)
    if n < 1 or k < 1 or r < 1:
        raise ValueError("n, k, r must be positive")
    log_kfact = math.lgamma(k + 1)
    if k > n or r * k < n:
        return -math.inf
    if k == n:
        return -log_kfact
    if r * k == n:
        return k * float(_log_coefficients(r)[-1]) - log_kfact
    log_s = _log_s_for_mean(n / k, r)
    log_f, _ = log_eval_F(log_s, r)
    return k * log_f - n * log_s - log_kfact
