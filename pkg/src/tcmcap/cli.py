"""Command-line front end.

Four commands: ``bound`` (one capacity bound as a JSON or CSV record),
``sweep`` (a CSV/JSON table over a range of widths), ``table1`` (recompute
every reproducible cell of the embedded reference table and report
PASS/FAIL per cell), and ``selfcheck`` (the runtime property suite).

Output records share one schema::

    activation,d,method,bound,std_error,c3_opt,gamma_opt,ez,mc_samples,seed,runtime_s

with empty fields where a column does not apply (for example c3_opt under
the plain method).  Numbers are printed with 6 significant digits unless
``--full-precision`` is given.  Exit codes: 0 success, 1 check failure,
2 usage or domain error, 3 I/O error.  The environment variable
``TCMCAP_THREADS`` caps the worker count without changing any result.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time

from . import reference
from .bounds_plrdt import plrdt_capacity
from .bounds_rdt import CapacityBound, rdt_capacity
from .config import DomainError, NumericsConfig, validate_width
from .selfcheck import run_selfcheck

__all__ = ["main", "SCHEMA"]

SCHEMA = ("activation", "d", "method", "bound", "std_error", "c3_opt",
          "gamma_opt", "ez", "mc_samples", "seed", "runtime_s")

_EXIT_OK, _EXIT_CHECK, _EXIT_USAGE, _EXIT_IO = 0, 1, 2, 3


def _fmt(value, full_precision: bool) -> str:
    if value is None or value == "":
        return ""
    if isinstance(value, float):
        return format(value, ".17g" if full_precision else ".6g")
    return str(value)


def _json_value(value, full_precision: bool):
    if value is None or value == "":
        return None
    if isinstance(value, float):
        return float(format(value, ".17g" if full_precision else ".6g"))
    return value


def _record(bound: CapacityBound, seed: int, runtime_s: float) -> dict:
    diag = bound.diagnostics
    return {
        "activation": bound.activation,
        "d": bound.d,
        "method": bound.method,
        "bound": bound.alpha,
        "std_error": bound.error,
        "c3_opt": diag.c3_opt if diag is not None else "",
        "gamma_opt": diag.gamma_opt if diag is not None else "",
        "ez": bound.ez if bound.ez is not None else "",
        "mc_samples": bound.mc_samples if bound.mc_samples is not None else "",
        "seed": seed,
        "runtime_s": runtime_s,
    }


def _render(records: list[dict], fmt: str, full_precision: bool) -> str:
    if fmt == "json":
        rows = [{k: _json_value(r[k], full_precision) for k in SCHEMA}
                for r in records]
        payload = rows[0] if len(rows) == 1 else rows
        return json.dumps(payload, indent=2) + "\n"
    rows = [{k: _fmt(r[k], full_precision) for k in SCHEMA} for r in records]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SCHEMA, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _numerics(args) -> NumericsConfig:
    mc_samples = args.mc_samples
    if mc_samples is None:
        mc_samples = 100_000 if getattr(args, "quick", False) else 10_000_000
    kwargs = {"mc_samples": int(mc_samples), "seed": int(args.seed)}
    if args.tol is not None:
        kwargs["root_tol"] = float(args.tol)
    return NumericsConfig(**kwargs)


def _compute(activation: str, d: int, method: str,
             cfg: NumericsConfig) -> CapacityBound:
    if method == "rdt":
        return rdt_capacity(activation, d, cfg)
    if method == "plrdt":
        return plrdt_capacity(activation, d, cfg)
    raise DomainError(f"unknown method {method!r}; expected rdt or plrdt")


def _cmd_bound(args) -> int:
    cfg = _numerics(args)
    activation, d = validate_width(args.activation, args.d)
    start = time.perf_counter()
    bound = _compute(activation, d, args.method, cfg)
    rec = _record(bound, cfg.seed, time.perf_counter() - start)
    _write(_render([rec], args.format, args.full_precision), args.out)
    return _EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = _numerics(args)
    methods = [m.strip() for m in args.method.split(",") if m.strip()]
    for m in methods:
        if m not in ("rdt", "plrdt"):
            raise DomainError(f"unknown method {m!r}; expected rdt or plrdt")
    if args.d_step < 1 or args.d_max < args.d_min:
        raise DomainError("empty width range: require d-min <= d-max and d-step >= 1")
    widths = list(range(args.d_min, args.d_max + 1, args.d_step))
    if not widths or not methods:
        raise DomainError("empty sweep: no widths or no methods requested")
    for d in widths:
        validate_width(args.activation, d)

    records = []
    for method in sorted(methods):
        for d in widths:
            start = time.perf_counter()
            bound = _compute(args.activation, d, method, cfg)
            records.append(_record(bound, cfg.seed, time.perf_counter() - start))
    _write(_render(records, args.format, args.full_precision), args.out)
    return _EXIT_OK


def _cmd_table1(args) -> int:
    cfg = _numerics(args)
    rows = []
    failures = []
    for rec in reference.all_values():
        if rec.method not in ("rdt", "plrdt") or not math.isfinite(rec.d):
            continue
        try:
            activation, d = validate_width(rec.activation, int(rec.d))
        except DomainError as exc:
            rows.append((rec, None, None, f"SKIP ({exc})"))
            continue
        bound = _compute(activation, d, rec.method, cfg)
        diff = abs(bound.alpha - rec.value)
        ok = diff <= rec.tolerance + bound.error
        rows.append((rec, bound.alpha, diff, "PASS" if ok else "FAIL"))
        if not ok:
            failures.append(rec)

    header = (f"{'activation':<10} {'d':>3} {'method':<6} {'computed':>12} "
              f"{'reference':>10} {'tol':>8} {'diff':>10}  status")
    print(header)
    print("-" * len(header))
    for rec, value, diff, status in rows:
        comp = "" if value is None else format(value, ".6g")
        dd = "" if diff is None else format(diff, ".2g")
        print(f"{rec.activation:<10} {int(rec.d):>3} {rec.method:<6} "
              f"{comp:>12} {rec.value:>10} {rec.tolerance:>8} {dd:>10}  {status}")
    if failures:
        names = ", ".join(f"({r.activation}, d={int(r.d)}, {r.method})"
                          for r in failures)
        print(f"FAILED cells: {names}")
        return _EXIT_CHECK
    return _EXIT_OK


def _cmd_selfcheck(args) -> int:
    results = run_selfcheck(quick=args.quick)
    bad = [r for r in results if not r.ok]
    if bad:
        print(f"selfcheck failed: {', '.join(r.name for r in bad)}")
        return _EXIT_CHECK
    return _EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tcmcap",
        description="Memory-capacity upper bounds for treelike committee machines")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, activation=False):
        if activation:
            p.add_argument("--activation", required=True,
                           choices=["linear", "quad", "relu"])
        p.add_argument("--mc-samples", type=int, default=None,
                       help="Monte Carlo budget (default 1e7; 1e5 with --quick)")
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--tol", type=float, default=None,
                       help="accepted |saddle value| at a located root")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=["csv", "json"], default="json")
        p.add_argument("--quick", action="store_true")
        p.add_argument("--full-precision", action="store_true")

    p_bound = sub.add_parser("bound", help="one capacity bound")
    common(p_bound, activation=True)
    p_bound.add_argument("--d", type=int, required=True)
    p_bound.add_argument("--method", choices=["rdt", "plrdt"], default="rdt")
    p_bound.set_defaults(fn=_cmd_bound)

    p_sweep = sub.add_parser("sweep", help="bounds over a width range")
    common(p_sweep, activation=True)
    p_sweep.add_argument("--d-min", type=int, required=True)
    p_sweep.add_argument("--d-max", type=int, required=True)
    p_sweep.add_argument("--d-step", type=int, default=2)
    p_sweep.add_argument("--method", default="rdt",
                         help="comma-separated subset of rdt,plrdt")
    p_sweep.set_defaults(fn=_cmd_sweep, format="csv")

    p_table = sub.add_parser("table1", help="recompute the reference table")
    common(p_table)
    p_table.set_defaults(fn=_cmd_table1)

    p_check = sub.add_parser("selfcheck", help="run the property suite")
    common(p_check)
    p_check.set_defaults(fn=_cmd_selfcheck)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return _EXIT_USAGE if exc.code not in (0, None) else _EXIT_OK
    try:
        return args.fn(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return _EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
