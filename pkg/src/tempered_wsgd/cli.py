"""Command-line harness.

Subcommands: deriv-test, diffusion, black-scholes, stability-scan, bounds.
Every subcommand reads ``--config``; the convergence subcommands can instead
replay a reference table with ``--golden TABLE``.  The exit status is 0 only
when every requested comparison passes (and no row failed).
"""

from __future__ import annotations

import argparse
import io
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor

from . import config as cfgmod
from . import harness, stability
from .errors import ConfigError, StabilityWarning
from .report import compare_column, compare_to_golden, column_label, load_golden, to_json, write_atomic

SWEEPS = ("deriv-test", "diffusion", "black-scholes")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tempered-wsgd", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in cfgmod.COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", metavar="PATH", help="key=value or JSON run configuration")
        s.add_argument("--out", metavar="PATH", help="output file (stdout if omitted)")
        s.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
        s.add_argument("--jobs", type=int, default=1, metavar="N", help="worker processes for independent rows")
        if name in SWEEPS:
            s.add_argument("--golden", metavar="TABLE", help="compare against a reference table, e.g. table6")
            s.add_argument("--tol", type=float, default=0.05, metavar="X", help="relative tolerance on errors")
            s.add_argument("--order-tol", type=float, default=0.05, metavar="X", help="absolute tolerance on orders")
            s.add_argument("--max-rows", type=int, metavar="N", help="replay only the N coarsest grids of a table")
        if name in ("diffusion", "black-scholes"):
            s.add_argument("--solution", metavar="PATH", help="also write x,u,exact,error on the finest grid")
    return p


def _emit(text: str, out: str | None):
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _column_path(out: str, k: int) -> str:
    stem, ext = os.path.splitext(out)
    return f"{stem}.{k}{ext or '.csv'}"


def _match_column(ref: dict, cfg) -> tuple:
    for col in ref["columns"]:
        if ref["command"] == "deriv-test":
            if col["alpha"] == cfg.alpha and col["lam"] == cfg.lam:
                return col
        elif col["free_param"] == cfg.free_param:
            return col
    raise ConfigError("no column of the reference table matches the configured parameters")


def _run_sweep(args, fmt) -> int:
    if args.config:
        cfg = cfgmod.load(args.config, args.command)
        fmt = args.format or cfg.format
        out = args.out or cfg.out
        report = harness.sweep(cfg, args.jobs)
        status = 0 if report.ok else 1
        for r in report.rows:
            if r.error:
                print(f"row h={r.h:.6g} failed: {r.error}", file=sys.stderr)
        if args.golden:
            ref = load_golden(args.golden)
            if ref["command"] != cfg.command:
                raise ConfigError(f"{args.golden} is a {ref['command']} table")
            col = _match_column(ref, cfg)
            n = len(report.rows)
            col = {k: (v[:n] if isinstance(v, list) else v) for k, v in col.items()}
            cells = compare_column(report, col, column_label(ref, col), args.tol, args.order_tol)
            bad = [c for c in cells if not c.passed]
            print(f"{args.golden}: {len(cells) - len(bad)}/{len(cells)} cells within tolerance", file=sys.stderr)
            status = status or (1 if bad else 0)
        report.metadata["config"] = cfgmod.describe(cfg)
        _emit(report.to_csv() if fmt == "csv" else to_json(report.to_dict()), out)
        if getattr(args, "solution", None):
            write_atomic(args.solution, harness.solution_csv(cfg))
        return status

    if not args.golden:
        raise ConfigError("give --config or --golden")
    ref = load_golden(args.golden)
    if ref["command"] != args.command:
        raise ConfigError(f"{args.golden} is a {ref['command']} table, not {args.command}")
    reports = harness.run_table(args.golden, args.jobs, args.max_rows)
    cmp = compare_to_golden(reports, args.golden, args.tol, args.order_tol, args.max_rows)
    for c in cmp.failures():
        print(f"  {c.column} row {c.row} {c.quantity}: expected {c.expected:g}, got {c.got}", file=sys.stderr)
    print(cmp.summary(), file=sys.stderr)
    fmt = fmt or "csv"
    if fmt == "json":
        payload = {"table": args.golden, "passed": cmp.passed, "columns": [r.to_dict() for r in reports]}
        _emit(to_json(payload), args.out)
    elif args.out:
        for k, r in enumerate(reports):
            write_atomic(_column_path(args.out, k), r.to_csv())
    else:
        for r in reports:
            sys.stdout.write(r.to_csv())
    ok = cmp.passed and all(r.ok for r in reports)
    return 0 if ok else 1


def _run_scan(args, fmt) -> int:
    if not args.config:
        raise ConfigError("stability-scan needs --config")
    cfg = cfgmod.load(args.config, "stability-scan")
    fmt = args.format or cfg.format
    jobs = max(1, args.jobs)
    combos = [(a, lam, g) for a in cfg.alphas for lam in cfg.lambdas for g in cfg.gammas]
    args_list = [(cfg.order, a, lam, cfg.h, g, cfg.n_terms, cfg.samples) for a, lam, g in combos]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            scans = list(pool.map(_scan_one, args_list))
    else:
        scans = [_scan_one(a) for a in args_list]
    if fmt == "csv":
        buf = io.StringIO()
        stability.write_scan_csv(scans, buf)
        text = buf.getvalue()
    else:
        text = to_json({"config": cfgmod.describe(cfg), "rows": list(stability.scan_rows(scans))})
    _emit(text, args.out or cfg.out)
    return 0


def _scan_one(a):
    return stability.scan_generating_function(*a)


def _run_bounds(args, fmt) -> int:
    if args.config:
        cfg = cfgmod.load(args.config, "bounds")
        alphas, fmt, out = cfg.alphas, args.format or cfg.format, args.out or cfg.out
    else:
        alphas, out = [1.1 + 0.05 * k for k in range(18)], args.out
        fmt = fmt or "csv"
    recs = [stability.bounds_record(a) for a in alphas]
    lo, hi = stability.window_endpoints()
    if fmt == "json":
        text = to_json({"window": [lo, hi], "rows": recs})
    else:
        cols = ("alpha", "a1", "a2", "a3", "a4", "second_order_nonempty", "third_order_nonempty")
        lines = [",".join(cols)]
        for r in recs:
            vals = [f"{r[c]:.6e}" if isinstance(r[c], float) else str(r[c]).lower() for c in cols]
            lines.append(",".join(vals))
        text = "\n".join(lines) + "\n"
        print(f"third-order interval nonempty for alpha in ({lo:.6f}, {hi:.6f})", file=sys.stderr)
    _emit(text, out)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fmt = args.format
    try:
        with warnings.catch_warnings():
            # stability warnings are advisory; report them once each on stderr
            warnings.simplefilter("default", StabilityWarning)
            if args.command in SWEEPS:
                return _run_sweep(args, fmt)
            if args.command == "stability-scan":
                return _run_scan(args, fmt)
            return _run_bounds(args, fmt)
    except (ConfigError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
