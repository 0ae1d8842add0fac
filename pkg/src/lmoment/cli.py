"""Command-line driver.

Every capability is exposed as a subcommand with machine-readable outputs
(CSV and JSON written atomically into --out) and, on the report paths,
matplotlib figures next to the delimited files (suppress with --no-plots).

Exit codes: 0 success, 1 validation error (message names the violated
precondition), 2 capacity error.  Identical configs produce byte-identical
numeric output; the JSON timestamp field is suppressed by --no-timestamp.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import plotting
from .afe import WeightSpec, residue_constants, weight_tables
from .arith import is_prime
from .errors import CapacityError, UnsupportedCaseError, ValidationError
from .expsums import CharSumParams, charsum_o1_bruteforce, charsum_o1_closed
from .moment import MomentReport, TruncationPolicy, asymptotic_fit, moment_total, poisson_crosscheck
from .sieve import sieve_scan
from .specdata import load_bundled_sample, nonvanishing_report, parse_eigenfile
from .specfun import ContourSpec
from .verify import charsum_identity_sweep

# canonical parameter points for the Poisson identity suite
POISSON_SUITE = (
    (2, 3, 5, 50.0, 6),
    (1, 1, 13, 40.0, 8),
    (3, 5, 13, 30.0, 6),
    (2, 7, 11, 45.0, 10),
    (1, 6, 7, 55.0, 12),
)


@dataclass
class RunConfig:
    command: str
    parameters: dict = field(default_factory=dict)
    output_dir: str = "."
    fmt: str = "both"
    threads: int = 1
    plots: bool = True
    timestamp: bool = True
    seed_free: bool = True  # no randomness anywhere; kept for the record


def _write_atomic(path: str, data: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    tmp = os.path.join(directory, f".{os.path.basename(path)}.tmp")
    with open(tmp, "w", encoding="utf-8") as handle:
        handle.write(data)
    os.replace(tmp, path)


def _write_csv(path: str, columns, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    _write_atomic(path, buf.getvalue())


def _write_json(path: str, payload: dict, cfg: RunConfig) -> None:
    if cfg.timestamp:
        payload = dict(payload)
        payload["generated_at"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    _write_atomic(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _out(cfg: RunConfig, name: str) -> str:
    return os.path.join(cfg.output_dir, name)


def _contour_from_args(args) -> ContourSpec | None:
    if args.sigma is None and args.height is None:
        return None
    sigma = args.sigma if args.sigma is not None else 1.0
    height = args.height if args.height is not None else 48.0
    return ContourSpec(sigma, height, int(height), 32)


def _parse_grid(text: str) -> tuple[float, float]:
    try:
        lo, hi = text.split("..")
        lo_f, hi_f = float(lo), float(hi)
    except ValueError:
        raise ValidationError(f"--grid expects 'LO..HI', got {text!r}") from None
    if not (0 < lo_f < hi_f):
        raise ValidationError(f"--grid needs 0 < LO < HI, got {text!r}")
    return lo_f, hi_f


def _cmd_weights(cfg: RunConfig, args) -> int:
    spec = WeightSpec(args.k, args.q, _contour_from_args(args))
    lo, hi = _parse_grid(args.grid)
    y = np.exp(np.linspace(math.log(lo), math.log(hi), args.points))
    max_log = max(abs(math.log(lo)), abs(math.log(hi))) + 1.0
    tables = weight_tables(spec, max_abs_log_y=max_log)
    v = tables.v_at(y)
    w = tables.w_at(y)
    rows = [(repr(float(a)), repr(float(b)), repr(float(c))) for a, b, c in zip(y, v, w)]
    if cfg.fmt in ("csv", "both"):
        _write_csv(_out(cfg, "weights.csv"), ("y", "V", "W"), rows)
    if cfg.fmt in ("json", "both"):
        _write_json(
            _out(cfg, "weights.json"),
            {
                "k": args.k,
                "q": args.q,
                "grid": args.grid,
                "points": [
                    {"y": float(a), "V": float(b), "W": float(c)}
                    for a, b, c in zip(y, v, w)
                ],
            },
            cfg,
        )
    if cfg.plots:
        plotting.save_weights_figure(y, v, w, _out(cfg, "weights.png"))
    if args.k <= 1000:
        print(
            f"note: k={args.k} <= 1000; the asymptotic error bound of the "
            "underlying theorem is not guaranteed at this weight"
        )
    print(f"weights: wrote {args.points} grid points for k={args.k}, q={args.q}")
    return 0


def _cmd_charsum(cfg: RunConfig, args) -> int:
    if args.verify:
        result = charsum_identity_sweep(
            max_modulus=args.max_cq,
            m_max=args.max_m,
            n_max=args.max_n,
            threads=cfg.threads,
        )
        rows = [
            (m, n, c, q, repr(err)) for (m, n, c, q, err) in result.worst_cases
        ]
        if cfg.fmt in ("csv", "both"):
            _write_csv(
                _out(cfg, "charsum_verify.csv"),
                ("m", "n", "c", "q", "abs_error"),
                rows,
            )
        if cfg.fmt in ("json", "both"):
            _write_json(_out(cfg, "charsum_verify.json"), result.to_json_dict(), cfg)
        print(
            f"{result.tuples} tuples, {result.mismatches} mismatches "
            f"(max abs error {result.max_abs_error:.3e}, "
            f"{result.moduli} moduli, max cq {args.max_cq})"
        )
        return 0 if result.mismatches == 0 else 1
    if None in (args.m, args.n, args.c, args.q):
        raise ValidationError("charsum: need --m --n --c --q (or --verify)")
    params = CharSumParams(m=args.m, n=args.n, c=args.c, q=args.q)
    brute = charsum_o1_bruteforce(params)
    payload = {
        "m": args.m,
        "n": args.n,
        "c": args.c,
        "q": args.q,
        "delta": params.delta,
        "bruteforce": {"re": brute.re, "im": brute.im},
    }
    try:
        closed = charsum_o1_closed(params)
        payload["closed"] = {"re": closed.re, "im": closed.im}
        payload["abs_difference"] = abs(brute.value - closed.value)
    except UnsupportedCaseError as exc:
        payload["closed"] = None
        payload["closed_unavailable"] = str(exc)
    _write_json(_out(cfg, "charsum.json"), payload, cfg)
    print(f"charsum: value {brute.value:.6f} written to charsum.json")
    return 0


def _cmd_poisson(cfg: RunConfig, args) -> int:
    if args.suite:
        points = POISSON_SUITE
    else:
        if None in (args.m, args.c, args.q, args.N, args.k):
            raise ValidationError("poisson: need --m --c --q --N --k (or --suite)")
        points = ((args.m, args.c, args.q, args.N, args.k),)
    rows = []
    payload = []
    for m, c, q, big_n, k in points:
        chk = poisson_crosscheck(m, c, q, big_n, k)
        rows.append((m, c, q, big_n, k, repr(chk.lhs), repr(chk.rhs), repr(chk.rel_err)))
        payload.append(
            {
                "m": m,
                "c": c,
                "q": q,
                "N": big_n,
                "k": k,
                "lhs": chk.lhs,
                "rhs": chk.rhs,
                "rel_err": chk.rel_err,
                "dual_terms": chk.dual_terms,
            }
        )
        print(f"poisson m={m} c={c} q={q} N={big_n} k={k}: rel_err={chk.rel_err:.3e}")
    if cfg.fmt in ("csv", "both"):
        _write_csv(
            _out(cfg, "poisson.csv"),
            ("m", "c", "q", "N", "k", "lhs", "rhs", "rel_err"),
            rows,
        )
    if cfg.fmt in ("json", "both"):
        _write_json(_out(cfg, "poisson.json"), {"checks": payload}, cfg)
    return 0


def _policy_from_args(spec: WeightSpec, args) -> TruncationPolicy:
    base = TruncationPolicy.default_for(spec)
    return TruncationPolicy(
        n_cut=args.n_cut or base.n_cut,
        m_cut=args.m_cut or base.m_cut,
        c_cut=args.c_cut or base.c_cut,
        tail_tol=args.tail_tol or base.tail_tol,
    )


def _cmd_moment(cfg: RunConfig, args) -> int:
    spec = WeightSpec(args.k, args.q, _contour_from_args(args))
    pol = _policy_from_args(spec, args)
    report = moment_total(spec, pol, threads=cfg.threads)
    if cfg.fmt in ("json", "both"):
        _write_json(_out(cfg, "moment.json"), report.to_json_dict(), cfg)
    if cfg.fmt in ("csv", "both"):
        _write_csv(_out(cfg, "moment.csv"), MomentReport.CSV_COLUMNS, [report.csv_row()])
    if args.k <= 1000:
        print(
            f"note: k={args.k} <= 1000; the asymptotic error bound of the "
            "underlying theorem is not guaranteed at this weight"
        )
    print(
        f"moment k={args.k} q={args.q}: total={report.total:.8f} "
        f"(delta1={report.delta1:.8f}, tails certified: "
        f"o1={report.o1_certified}, o2={report.o2_certified})"
    )
    return 0


def _scan_primes(q_min: int, q_max: int, count: int) -> list[int]:
    """count primes, log-spaced targets in [q_min, q_max], deduplicated
    upward deterministically."""
    if q_min < 3 or q_max <= q_min or count < 3:
        raise ValidationError("scan: need 3 <= count primes and 3 <= q_min < q_max")
    targets = np.exp(np.linspace(math.log(q_min), math.log(q_max), count))
    primes: list[int] = []
    for t in targets:
        p = max(3, int(round(t)))
        while not is_prime(p):
            p += 1
        while p in primes:
            p += 1
            while not is_prime(p):
                p += 1
        primes.append(p)
    return sorted(primes)


def _cmd_scan(cfg: RunConfig, args) -> int:
    primes = _scan_primes(args.q_min, args.q_max, args.count)
    reports = []
    for q in primes:
        spec = WeightSpec(args.k, q)
        pol = _policy_from_args(spec, args)
        reports.append(moment_total(spec, pol, threads=cfg.threads))
        print(f"scan q={q}: total={reports[-1].total:.8f} ({reports[-1].wall_time:.1f}s)")
    points = [(r.q, r.total) for r in reports]
    alpha, beta, max_residual = asymptotic_fit(points)
    rc = residue_constants(WeightSpec(args.k, primes[-1]))
    summary = {
        "k": args.k,
        "primes": primes,
        "alpha": alpha,
        "beta": beta,
        "max_residual": max_residual,
        "A_k": rc.A_k,
        "B_k": rc.B_k,
        "main_term_slope": 2.0 * rc.A_k,  # assembly S = 2 S1 + 2 i^k S2
        "slope_over_main_term_slope": alpha / (2.0 * rc.A_k),
        "reports": [r.to_json_dict() for r in reports],
    }
    if cfg.fmt in ("csv", "both"):
        _write_csv(
            _out(cfg, "scan.csv"), MomentReport.CSV_COLUMNS, [r.csv_row() for r in reports]
        )
    if cfg.fmt in ("json", "both"):
        _write_json(_out(cfg, "scan.json"), summary, cfg)
    if cfg.plots:
        plotting.save_scan_figure(points, alpha, beta, _out(cfg, "scan.png"))
    print(
        f"scan fit: alpha={alpha:.4f} beta={beta:.4f} max_residual={max_residual:.4f} "
        f"(main-term slope {2 * rc.A_k:.4f}, ratio {alpha / (2 * rc.A_k):.3f})"
    )
    return 0


def _parse_int_list(text: str, name: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v]
    except ValueError:
        raise ValidationError(f"{name}: expected comma-separated integers") from None
    if not values:
        raise ValidationError(f"{name}: empty list")
    return values


def _cmd_sieve(cfg: RunConfig, args) -> int:
    grid = _parse_int_list(args.grid, "--grid")
    q_values = _parse_int_list(args.qs, "--qs")
    for q in q_values:
        if not is_prime(q) or q == 2:
            raise ValidationError(f"sieve: q={q} must be an odd prime")
    cells = sieve_scan(grid, grid, q_values, u=args.u, threads=cfg.threads)
    normalized = [
        c.ratio / math.log(2.0 + c.D * c.C1) ** 2 for c in cells
    ]
    worst = max(normalized)
    if cfg.fmt in ("csv", "both"):
        _write_csv(
            _out(cfg, "sieve.csv"),
            cells[0].CSV_COLUMNS,
            [c.csv_row() for c in cells],
        )
    if cfg.fmt in ("json", "both"):
        _write_json(
            _out(cfg, "sieve.json"),
            {
                "grid": grid,
                "qs": q_values,
                "u": args.u,
                "max_ratio_over_log2": worst,
                "cells": [
                    {
                        "D": c.D,
                        "C1": c.C1,
                        "q": c.q,
                        "u": c.u,
                        "sum": c.double_sum,
                        "ratio": c.ratio,
                    }
                    for c in cells
                ],
            },
            cfg,
        )
    if cfg.plots:
        plotting.save_sieve_figure(cells, _out(cfg, "sieve.png"))
    print(f"sieve: {len(cells)} cells, max ratio/log^2 = {worst:.4f}")
    return 0


def _cmd_direct(cfg: RunConfig, args) -> int:
    if args.input:
        with open(args.input, "r", encoding="utf-8") as handle:
            records = parse_eigenfile(handle)
    else:
        records = load_bundled_sample()
    spec = WeightSpec(args.k, args.q, _contour_from_args(args))
    reports = nonvanishing_report(records, spec, threads=cfg.threads)
    if cfg.fmt in ("csv", "both"):
        _write_csv(
            _out(cfg, "direct.csv"),
            reports[0].CSV_COLUMNS,
            [r.csv_row() for r in reports],
        )
    if cfg.fmt in ("json", "both"):
        _write_json(
            _out(cfg, "direct.json"),
            {"reports": [r.to_json_dict() for r in reports]},
            cfg,
        )
    for r in reports:
        print(
            f"direct {r.label}: L_f={r.L_f:.8f} L_sym2={r.L_sym2:.8f} "
            f"product={r.product:.8f} [{r.verdict}] ({r.mode})"
        )
    return 0


_COMMANDS = {
    "weights": _cmd_weights,
    "charsum": _cmd_charsum,
    "poisson": _cmd_poisson,
    "moment": _cmd_moment,
    "scan": _cmd_scan,
    "sieve": _cmd_sieve,
    "direct": _cmd_direct,
}


def _add_contour_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sigma", type=float, default=None, help="contour abscissa")
    p.add_argument("--height", type=float, default=None, help="contour height T")


def _add_policy_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n-cut", type=int, default=None)
    p.add_argument("--m-cut", type=int, default=None)
    p.add_argument("--c-cut", type=int, default=None)
    p.add_argument("--tail-tol", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lmoment",
        description="trace-formula moment engine for central L-values",
    )
    parser.add_argument("--config", default=None, help="flat key=value defaults file")
    parser.add_argument(
        "--threads",
        type=int,
        default=int(os.environ.get("LMOMENT_THREADS", "1")),
        help="worker threads (default: LMOMENT_THREADS or 1)",
    )
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--format", choices=("csv", "json", "both"), default="both")
    parser.add_argument("--no-plots", action="store_true", help="skip PNG rendering")
    parser.add_argument(
        "--no-timestamp", action="store_true", help="omit generated_at from JSON"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("weights", help="tabulate the V and W smoothing weights")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--grid", default="1e-6..1e2")
    p.add_argument("--points", type=int, default=200)
    _add_contour_args(p)

    p = sub.add_parser("charsum", help="character sums: single value or identity sweep")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--max-cq", type=int, default=1500)
    p.add_argument("--max-m", type=int, default=12)
    p.add_argument("--max-n", type=int, default=12)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--c", type=int, default=None)
    p.add_argument("--q", type=int, default=None)

    p = sub.add_parser("poisson", help="Poisson-summation identity crosscheck")
    p.add_argument("--suite", action="store_true", help="run the canonical 5 points")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--c", type=int, default=None)
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--N", type=float, default=None)
    p.add_argument("--k", type=int, default=None)

    p = sub.add_parser("moment", help="one full moment-engine run")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    _add_policy_args(p)
    _add_contour_args(p)

    p = sub.add_parser("scan", help="moment runs over a prime range plus log fit")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--q-min", type=int, required=True)
    p.add_argument("--q-max", type=int, required=True)
    p.add_argument("--count", type=int, default=20)
    _add_policy_args(p)

    p = sub.add_parser("sieve", help="quadratic large-sieve double-sum scan")
    p.add_argument("--grid", default="25,50,100,200,400")
    p.add_argument("--qs", default="101,103")
    p.add_argument("--u", type=int, default=1)

    p = sub.add_parser("direct", help="non-vanishing reports from eigenvalue data")
    p.add_argument("--input", default=None, help="eigenvalue file (default: bundled)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    _add_contour_args(p)

    return parser


def _load_config_tokens(path: str, command: str) -> list[str]:
    """Translate a flat key=value file into CLI tokens inserted before the
    user's flags (so explicit flags override the file)."""
    tokens: list[str] = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValidationError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            flag = "--" + key.replace("_", "-")
            if value.lower() in ("true", "false"):
                if value.lower() == "true":
                    tokens.append(flag)
            else:
                tokens.extend([flag, value])
    return tokens


def run(config: RunConfig, args) -> int:
    """Dispatch a validated RunConfig; outputs land under config.output_dir."""
    if config.threads < 1:
        raise ValidationError("threads must be positive")
    os.makedirs(config.output_dir, exist_ok=True)
    return _COMMANDS[config.command](config, args)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            # re-parse with file-provided defaults inserted before user flags
            idx = argv.index(args.command) + 1
            tokens = _load_config_tokens(args.config, args.command)
            argv = argv[:idx] + tokens + argv[idx:]
            args = parser.parse_args(argv)
        cfg = RunConfig(
            command=args.command,
            parameters={k: v for k, v in vars(args).items() if k != "command"},
            output_dir=args.out,
            fmt=args.format,
            threads=args.threads,
            plots=not args.no_plots,
            timestamp=not args.no_timestamp,
        )
        return run(cfg, args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
