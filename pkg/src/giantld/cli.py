"""Command-line front end.  Emits CSV or JSON records; never plots."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import exact_oracle, rate_core, saddle, sampler, verify
from .exact_oracle import EventSpec, PrecisionLossError

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

RATE_CURVE_COLUMNS = ("alpha", "rho", "phi", "psi_active")
ESTIMATE_COLUMNS = ("n", "alpha", "event", "p_hat", "ci_low", "ci_high", "samples", "seed")
RATE_TABLE_COLUMNS = ("alpha", "n", "event", "rate", "rate_low", "rate_high", "p_hat", "successes", "samples", "seed", "resolved")
MEAN_FIELD_COLUMNS = ("alpha", "rho_star", "phi_at_rho_star", "theta_limit", "s_limit", "rho_limit")
SADDLE_COLUMNS = ("alpha", "r", "s_r", "rho_r", "theta", "theta_limit", "proxy_rate", "exp_psi", "residual_F", "residual_sdF")
EXACT_COLUMNS = ("n", "p", "event", "arithmetic", "log_prob", "prob", "exact", "brute_force", "agrees")
GIANT_COLUMNS = ("n", "alpha", "samples", "seed", "mean_fraction", "std_fraction", "rho_star")
UNIQUE_COLUMNS = ("n", "alpha", "epsilon", "samples", "seed", "frequency")


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# formatting


def _cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".12g")
    return str(x)


def _json_value(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def render(records: list, columns, fmt: str) -> str:
    if fmt == "json":
        rows = [{c: _json_value(rec.get(c)) for c in columns} for rec in records]
        return json.dumps(rows, indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for rec in records:
        w.writerow([_cell(rec.get(c)) for c in columns])
    return buf.getvalue()


def _emit(text: str, path) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# argument helpers


def _number_list(text: str) -> list:
    out = []
    for tok in text.replace(",", " ").split():
        try:
            out.append(Fraction(tok))
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {tok!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _int_list(text: str) -> list:
    vals = _number_list(text)
    if any(v.denominator != 1 for v in vals):
        raise argparse.ArgumentTypeError(f"expected integers: {text!r}")
    return [int(v) for v in vals]


def _r_value(text: str):
    if text == "n":
        return "n"
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"r must be an integer or 'n', got {text!r}") from None


def _resolve_r(r, n: int):
    return n if r == "n" else r


def _event(kind: str, r, m, n: int) -> EventSpec:
    r = _resolve_r(r, n)
    if kind == "connected":
        return EventSpec.connected()
    if kind == "nocycles":
        return EventSpec.no_cycles()
    if r is None:
        raise UsageError(f"event {kind} needs --r")
    if kind == "allsmall":
        return EventSpec.all_small(r)
    if kind == "nocycles-small":
        return EventSpec.no_cycles_and_small(r)
    if m is None:
        raise UsageError("event macro needs --m")
    return EventSpec.macro_volume(r, m)


# ---------------------------------------------------------------------------
# subcommands: each returns (records, columns)


def run_rate_curve(cfg):
    if cfg.steps < 2:
        raise UsageError("--steps must be >= 2")
    records = []
    for a in cfg.alpha:
        a = float(a)
        for i in range(cfg.steps + 1):
            pt = rate_core.rate_point(i / cfg.steps, a)
            records.append({"alpha": a, "rho": pt.rho, "phi": pt.phi, "psi_active": pt.psi_active})
    return records, RATE_CURVE_COLUMNS


def run_mean_field(cfg):
    records = []
    for a in cfg.alpha:
        a = float(a)
        rho = rate_core.mean_field_maximal(a)
        rec = {"alpha": a, "rho_star": rho, "phi_at_rho_star": rate_core.phi(rho, a)}
        if a > 0:
            lim = saddle.saddle_limits(a)
            rec.update(theta_limit=lim.theta, s_limit=lim.s, rho_limit=lim.rho)
        records.append(rec)
    return records, MEAN_FIELD_COLUMNS


def run_saddle(cfg):
    records = []
    for a in cfg.alpha:
        a = float(a)
        for r in cfg.r_list:
            sol = saddle.solve_saddle(a, r)
            records.append(
                {
                    "alpha": a,
                    "r": r,
                    "s_r": sol.s_r,
                    "rho_r": sol.rho_r,
                    "theta": sol.theta,
                    "theta_limit": saddle.theta_limit(a),
                    "proxy_rate": saddle.finite_r_rate(sol),
                    "exp_psi": math.exp(rate_core.psi(a)),
                    "residual_F": sol.residual_F,
                    "residual_sdF": sol.residual_sdF,
                }
            )
    return records, SADDLE_COLUMNS


def _edge_prob(cfg, n: int):
    if (cfg.p is None) == (cfg.alpha is None):
        raise UsageError("give exactly one of --p and --alpha")
    if cfg.p is not None:
        return Fraction(cfg.p)
    return Fraction(cfg.alpha) / n


def run_exact(cfg):
    records = []
    for n in cfg.n:
        p = _edge_prob(cfg, n)
        ev = _event(cfg.event, cfg.r, cfg.m, n)
        arith = cfg.arithmetic
        p_arg = float(p) if arith == "float" else p
        lp = exact_oracle.exact_event(n, p_arg, ev, arithmetic=arith)
        rec = {
            "n": n,
            "p": str(p),
            "event": ev.label(),
            "arithmetic": "rational" if lp.exact is not None else "float",
            "log_prob": lp.log_value,
            "prob": lp.value,
            "exact": None if lp.exact is None else str(lp.exact),
        }
        if n <= exact_oracle.BRUTE_MAX_N:
            bf = exact_oracle.brute_force_enumerate(n, p, ev)
            rec["brute_force"] = bf.value
            if lp.exact is not None:
                rec["agrees"] = lp.exact == bf.exact
            else:
                rec["agrees"] = math.isclose(lp.value, bf.value, rel_tol=1e-9, abs_tol=1e-300)
        records.append(rec)
    return records, EXACT_COLUMNS


def run_sample(cfg):
    records = []
    if cfg.mode == "giant":
        for a in cfg.alpha_list:
            for n in cfg.n:
                fr = sampler.giant_fractions(n, a, cfg.samples, cfg.seed, cfg.workers)
                records.append(
                    {
                        "n": n,
                        "alpha": float(a),
                        "samples": cfg.samples,
                        "seed": cfg.seed,
                        "mean_fraction": float(fr.mean()),
                        "std_fraction": float(fr.std()),
                        "rho_star": rate_core.mean_field_maximal(float(a)),
                    }
                )
        return records, GIANT_COLUMNS
    if cfg.mode == "uniqueness":
        if cfg.epsilon is None:
            raise UsageError("--mode uniqueness needs --epsilon")
        for a in cfg.alpha_list:
            for n in cfg.n:
                f = sampler.uniqueness_frequency(n, a, cfg.epsilon, cfg.samples, cfg.seed, cfg.workers)
                records.append(
                    {"n": n, "alpha": float(a), "epsilon": cfg.epsilon, "samples": cfg.samples, "seed": cfg.seed, "frequency": f}
                )
        return records, UNIQUE_COLUMNS
    if cfg.event is None:
        raise UsageError(f"--mode {cfg.mode} needs --event")
    if cfg.mode == "rate-table":
        if cfg.r == "n":
            raise UsageError("rate tables need a numeric --r")
        ev = _event(cfg.event, cfg.r, cfg.m, min(cfg.n))
        for row in sampler.empirical_rate_table(cfg.alpha_list, cfg.n, ev, cfg.samples, cfg.seed, cfg.workers):
            est = row.estimate
            records.append(
                {
                    "alpha": row.alpha,
                    "n": row.n,
                    "event": ev.label(),
                    "rate": row.rate,
                    "rate_low": row.rate_low,
                    "rate_high": row.rate_high,
                    "p_hat": est.p_hat,
                    "successes": est.successes,
                    "samples": est.samples,
                    "seed": est.seed,
                    "resolved": row.resolved,
                }
            )
        return records, RATE_TABLE_COLUMNS
    for a in cfg.alpha_list:
        for n in cfg.n:
            ev = _event(cfg.event, cfg.r, cfg.m, n)
            est = sampler.estimate_event(n, a, ev, cfg.samples, cfg.seed, cfg.workers)
            records.append(
                {
                    "n": n,
                    "alpha": float(a),
                    "event": ev.label(),
                    "p_hat": est.p_hat,
                    "ci_low": est.ci_low,
                    "ci_high": est.ci_high,
                    "samples": est.samples,
                    "seed": est.seed,
                }
            )
    return records, ESTIMATE_COLUMNS


def run_verify(cfg) -> int:
    lines = []

    def out(line):
        lines.append(line)
        print(line, flush=True)

    only = set(cfg.only) if cfg.only else None
    results = verify.run_checks(quick=cfg.quick, only=only, out=out)
    passed = sum(r.passed for r in results)
    summary = f"{passed}/{len(results)} checks passed"
    print(summary)
    if cfg.output not in (None, "-"):
        _emit("\n".join(lines + [summary]) + "\n", cfg.output)
    return EXIT_OK if passed == len(results) else EXIT_VERIFY


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", default=None, help="output path (default stdout)")

    ap = argparse.ArgumentParser(prog="giantld", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rate-curve", parents=[common], help="phi(rho, alpha) over a uniform rho grid")
    p.add_argument("--alpha", type=_number_list, default=_number_list("0.5 1.0 1.6 2.4"))
    p.add_argument("--steps", type=int, default=400)

    p = sub.add_parser("mean-field", parents=[common], help="rho*(alpha), phi there, and saddle limits")
    p.add_argument("--alpha", type=_number_list, required=True)

    p = sub.add_parser("saddle", parents=[common], help="solve the finite-r saddle system")
    p.add_argument("--alpha", type=_number_list, required=True)
    p.add_argument("--r", dest="r_list", type=_int_list, required=True)

    events = ("connected", "nocycles", "allsmall", "nocycles-small", "macro")
    p = sub.add_parser("exact", parents=[common], help="exact finite-n event probability")
    p.add_argument("--event", choices=events, required=True)
    p.add_argument("--n", type=_int_list, required=True)
    p.add_argument("--p", type=Fraction, default=None)
    p.add_argument("--alpha", type=Fraction, default=None)
    p.add_argument("--r", type=_r_value, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--arithmetic", choices=("auto", "rational", "float"), default="auto")

    p = sub.add_parser("sample", parents=[common], help="Monte Carlo estimates")
    p.add_argument("--mode", choices=("estimate", "rate-table", "giant", "uniqueness"), default="estimate")
    p.add_argument("--event", choices=events, default=None)
    p.add_argument("--n", type=_int_list, required=True)
    p.add_argument("--alpha", dest="alpha_list", type=_number_list, required=True)
    p.add_argument("--r", type=_r_value, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("verify", help="run the acceptance checks")
    p.add_argument("--quick", action="store_true", help="skip the slow checks")
    p.add_argument("--only", type=_int_list, default=None, help="check numbers to run")
    p.add_argument("--output", default=None, help="also write the report here")
    return ap


_RUNNERS = {
    "rate-curve": run_rate_curve,
    "mean-field": run_mean_field,
    "saddle": run_saddle,
    "exact": run_exact,
    "sample": run_sample,
}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        cfg = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        if cfg.command == "verify":
            return run_verify(cfg)
        records, columns = _RUNNERS[cfg.command](cfg)
        _emit(render(records, columns, cfg.format), cfg.output)
    except OSError as exc:
        print(f"giantld: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, PrecisionLossError, ArithmeticError) as exc:
        print(f"giantld: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
