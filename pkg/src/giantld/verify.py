"""One-shot verification suite: every acceptance check at its stated scale.

Each check returns a CheckResult; ``run_checks`` prints one PASS/FAIL line
per check.  PASS/FAIL reflects the numerical check only.  Runtime budgets
refer to a desktop core, so they are reported next to the measured time and
flagged when exceeded, not folded into the verdict.  Library functions are
looked up through their modules at call time, so a patched implementation is
what gets verified.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import exact_oracle, rate_core, saddle, sampler
from .exact_oracle import EventSpec


@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    budget: float = math.inf

    @property
    def over_budget(self) -> bool:
        return self.seconds > self.budget

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        timing = f"{self.seconds:.1f}s, budget {self.budget:g}s"
        if self.over_budget:
            timing += " exceeded"
        return f"{status} [{self.number}] {self.name} ({timing}): {self.detail}"


def _fmt(x: float) -> str:
    return f"{x:.3g}"


# ---------------------------------------------------------------------------
# individual checks; each returns (passed, detail)


def check_minimizer(n_alpha: int = 100):
    worst_arg = worst_min = 0.0
    for a in np.linspace(0.0, 5.0, n_alpha):
        argmin, fmin = rate_core.minimize_phi(float(a))
        rho = rate_core.mean_field_maximal(float(a))
        worst_arg = max(worst_arg, abs(argmin - rho))
        worst_min = max(worst_min, fmin)
    ok = worst_arg <= 1e-6 and worst_min <= 1e-8
    return ok, f"max |argmin - rho*| = {_fmt(worst_arg)}, max min phi = {_fmt(worst_min)}"


def _exact_bracket(n: int, p: Fraction):
    t = 1 - (1 - p) ** (n - 1)
    upper = t ** (n - 1)
    return upper / n, upper


def check_connectivity_bracket(n_max: int = 200, alphas=(Fraction(1, 2), 1, 2, 4)):
    failures = []
    checked = skipped = 0
    for a in alphas:
        for n in range(2, n_max + 1):
            p = Fraction(a) / n
            if p > 1:
                skipped += 1
                continue
            prob = exact_oracle.exact_connectivity(n, p, arithmetic="rational").exact
            lo, hi = _exact_bracket(n, p)
            checked += 1
            if not lo <= prob <= hi:
                failures.append((n, str(a)))
    detail = f"{checked} pairs in bracket, {skipped} skipped (alpha > n)"
    if failures:
        detail = f"{len(failures)} pairs outside, first {failures[0]}"
    return not failures, detail


def check_connectivity_rate(n: int = 200, alphas=(2, 4)):
    parts = []
    ok = True
    tol = 5 * math.log(n) / n
    for a in alphas:
        lp = exact_oracle.exact_connectivity(n, Fraction(a, n), arithmetic="rational")
        err = abs(-lp.log_value / n + rate_core.log_pi1(a))
        ok &= err <= tol
        parts.append(f"alpha={a}: {_fmt(err)}")
    return ok, ", ".join(parts) + f" (tol {_fmt(tol)})"


def check_forest_rate(n: int = 2000):
    parts = []
    ok = True
    for a, target in ((2.0, 2.0 * math.exp(-0.75)), (0.5, 1.0)):
        lp = exact_oracle.exact_forest(n, a / n, arithmetic="float")
        value = math.exp(lp.log_value / n)
        ok &= abs(value - target) <= 0.02
        parts.append(f"alpha={a}: P^(1/n)={value:.5f} vs {target:.5f}")
    return ok, ", ".join(parts)


def _log_cap(log_forest: float, n: int, p: Fraction, r: int) -> float:
    return log_forest - (r * n / 2) * math.log1p(-float(p))


def check_no_big_sandwich(n: int = 200, alpha: int = 2, rs=(2, 5, 10, 20), trend_ns=(50, 100, 200)):
    """Exact sandwich at n, then the gap trends.

    The gap is (1/n) log(cap / P(L and B_r)).  It must shrink as n grows for
    every r, and at the largest n it must not grow with r.
    """
    problems = []
    gaps = {}
    for m in sorted(set(trend_ns) | {n}):
        p = Fraction(alpha, m)
        forest = exact_oracle.exact_forest(m, p, arithmetic="rational")
        for r in rs:
            low = exact_oracle.exact_forest(m, p, r, arithmetic="rational")
            mid = exact_oracle.exact_small_components(m, p, r, arithmetic="rational")
            log_cap = _log_cap(forest.log_value, m, p, r)
            gaps[(m, r)] = (log_cap - low.log_value) / m
            if m != n:
                continue
            if (r * m) % 2 == 0:
                cap = forest.exact / (1 - p) ** (r * m // 2)
                inside = low.exact <= mid.exact <= cap
            else:
                inside = low.log_value <= mid.log_value <= log_cap
            if not inside:
                problems.append(f"sandwich fails at r={r}")
    ns = sorted(trend_ns)
    for r in rs:
        seq = [gaps[(m, r)] for m in ns]
        if any(b >= a for a, b in zip(seq, seq[1:])):
            problems.append(f"gap not shrinking in n at r={r}")
    at_n = [gaps[(ns[-1], r)] for r in sorted(rs)]
    if any(b > a for a, b in zip(at_n, at_n[1:])):
        problems.append("gap grows with r")
    detail = "gaps at n={}: {}".format(ns[-1], ", ".join(f"r={r}:{_fmt(g)}" for r, g in zip(sorted(rs), at_n)))
    if problems:
        detail = "; ".join(problems) + "; " + detail
    return not problems, detail


def check_saddle_limits(r: int = 2000, alphas=(0.5, 2.0, 4.0)):
    worst_lim = worst_rate = 0.0
    for a in alphas:
        sol = saddle.solve_saddle(a, r)
        lim = saddle.saddle_limits(a)
        worst_lim = max(worst_lim, abs(sol.s_r - lim.s), abs(sol.rho_r - lim.rho), abs(sol.theta - lim.theta))
        worst_rate = max(worst_rate, abs(saddle.finite_r_rate(sol) - math.exp(rate_core.psi(a))))
    ok = worst_lim <= 0.01 and worst_rate <= 0.01
    return ok, f"max limit error {_fmt(worst_lim)}, max |proxy rate - exp(psi)| {_fmt(worst_rate)}"


def _events_for(n: int):
    yield EventSpec.connected()
    yield EventSpec.no_cycles()
    for r in range(1, n + 1):
        yield EventSpec.all_small(r)
        yield EventSpec.no_cycles_and_small(r)
        for m in range(n + 1):
            yield EventSpec.macro_volume(r, m)


def check_oracle_equivalence(n_max: int = exact_oracle.BRUTE_MAX_N, ps=("1/4", "1/2", "2/3")):
    mismatches = []
    count = 0
    for n in range(1, n_max + 1):
        for p in ps:
            for ev in _events_for(n):
                dp = exact_oracle.exact_event(n, Fraction(p), ev, arithmetic="rational").exact
                bf = exact_oracle.brute_force_enumerate(n, Fraction(p), ev).exact
                count += 1
                if dp != bf:
                    mismatches.append(f"n={n} p={p} {ev.label()}")
        for k in range(1, n + 1):
            for r in range(1, n + 1):
                count += 1
                if exact_oracle.exact_Q(n, k, r).exact != exact_oracle.brute_force_Q(n, k, r).exact:
                    mismatches.append(f"Q({n},{k},{r})")
    detail = f"{count} exact comparisons"
    if mismatches:
        detail = f"{len(mismatches)} mismatches, first {mismatches[0]}"
    return not mismatches, detail


def _random_matrix(rng, n: int):
    mat = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            mat[i][j] = mat[j][i] = Fraction(int(rng.integers(0, 13)), 12)
    return mat


def check_grounded_equivalence(trials: int = 20, seed: int = 0):
    rng = np.random.default_rng(seed)
    bad = []
    for t in range(trials):
        n = int(rng.integers(2, exact_oracle.GROUNDED_MAX_N + 1))
        mat = _random_matrix(rng, n)
        a = exact_oracle.brute_force_grounded(mat).exact
        b = exact_oracle.brute_force_connectivity_inhomogeneous(mat).exact
        if a != b:
            bad.append(t)
    return not bad, f"{trials - len(bad)}/{trials} matrices agree exactly"


def check_sampling(
    n: int = 50,
    alpha: int = 2,
    r: int = 5,
    samples: int = 10**6,
    giant_n: int = 10**5,
    giant_samples: int = 10**3,
    seed: int = 0,
    workers: int | None = None,
):
    """Histogram of |V_r| against the exact law, then the giant fraction."""
    exact = exact_oracle.macro_volume_distribution(n, Fraction(alpha, n), r)
    probs = np.array([lp.value for lp in exact])
    counts = sampler.macro_volume_histogram(n, alpha, r, samples, seed, workers)
    sigma = np.sqrt(samples * probs * (1 - probs))
    dev = np.abs(counts - samples * probs)
    zero_bins = probs == 0
    z = np.where(zero_bins, 0.0, dev / np.where(zero_bins, 1.0, sigma))
    worst = int(np.argmax(z))
    hist_ok = bool(np.all(z <= 3.0) and np.all(counts[zero_bins] == 0))
    frac = float(np.mean(sampler.giant_fractions(giant_n, alpha, giant_samples, seed, workers)))
    giant_ok = abs(frac - 0.7968) <= 0.005
    detail = (
        f"max |z| = {z[worst]:.2f} at m={worst} ({int(counts[worst])} vs {samples * probs[worst]:.1f}); "
        f"giant fraction {frac:.5f}"
    )
    return hist_ok and giant_ok, detail


def check_convexity(n_eta: int = 200, alphas=(0.5, 1.0, 2.0, 4.0)):
    etas = np.geomspace(1e-3, 50.0, n_eta)
    g_ok = all(rate_core.g_second_plus_one(float(e)) > 0 for e in etas)
    rhos = np.linspace(0.0, 1.0, 101)
    sym = conv = 0.0
    conv_ok = True
    for a in alphas:
        vals = np.array([rate_core.xi(float(x), a) for x in rhos])
        mirror = np.array([rate_core.xi(float(1.0 - x), a) for x in rhos])
        sym = max(sym, float(np.max(np.abs(vals - mirror))))
        d2 = vals[:-2] - 2 * vals[1:-1] + vals[2:]
        conv_ok &= bool(np.all(d2 > 0))
    ok = g_ok and conv_ok and sym <= 1e-12
    return ok, f"G''+1 > 0 on grid: {g_ok}; xi symmetry error {_fmt(sym)}; xi convex: {conv_ok}"


@dataclass(frozen=True)
class Check:
    number: int
    name: str
    func: Callable
    budget: float
    quick: bool


CHECKS = (
    Check(1, "mean-field minimizer agreement", check_minimizer, 5, True),
    Check(2, "connectivity bracket, exact rational", check_connectivity_bracket, 60, False),
    Check(3, "connectivity rate at n=200", check_connectivity_rate, 10, True),
    Check(4, "forest rate at n=2000", check_forest_rate, 30, True),
    Check(5, "no-big sandwich and gap trend", check_no_big_sandwich, 60, False),
    Check(6, "saddle limits at r=2000", check_saddle_limits, 5, True),
    Check(7, "DP versus brute force, n <= 7", check_oracle_equivalence, 120, True),
    Check(8, "grounded-directed equivalence", check_grounded_equivalence, 60, True),
    Check(9, "Monte Carlo macro volume and giant fraction", check_sampling, 600, False),
    Check(10, "convexity grid checks", check_convexity, 1, True),
)


def run_check(check: Check, **kwargs) -> CheckResult:
    t0 = time.perf_counter()
    try:
        passed, detail = check.func(**kwargs)
    except Exception as exc:  # a crash is a failure, reported not raised
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    return CheckResult(check.number, check.name, bool(passed), detail, time.perf_counter() - t0, check.budget)


def run_checks(quick: bool = False, only=None, out=print) -> list:
    results = []
    for check in CHECKS:
        if quick and not check.quick:
            continue
        if only is not None and check.number not in only:
            continue
        res = run_check(check)
        if out is not None:
            out(res.line())
        results.append(res)
    return results
