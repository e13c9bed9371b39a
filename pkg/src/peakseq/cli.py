"""Command-line front end: solvers, the benchmark table, envelope validation.

Output contract: the machine-readable report goes to stdout (JSON by
default), diagnostics go to stderr, and the exit code is the only failure
channel: 0 success, 1 usage, 2 precondition or parameter errors, 3 envelope
violation (or a failed validation).  Floats in JSON are serialized with 17
significant digits so reruns are bit-comparable.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

from .core import (
    DEFAULT_SCAN_LIMIT,
    EnvelopeViolation,
    PeakSolution,
    PeakseqError,
    Tie,
    UpperBoundValue,
    solve,
    validate_envelope,
)
from .sequences import (
    FactorialRatioAdapter,
    FibonacciRatioAdapter,
    LogisticAdapter,
    collatz_envelope_check,
    fibonacci_solve,
    logistic_solve,
    syracuse_excursion,
)
from . import linsys

SCAN_LIMIT_ENV = "PEAKSEQ_SCAN_LIMIT"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PRECONDITION = 2
EXIT_VIOLATION = 3


class _Parser(argparse.ArgumentParser):
    # Argparse exits 2 on usage errors by default; the contract wants 1.
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _dumps(value) -> str:
    """JSON with floats at 17 significant digits."""
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise PeakseqError(f"non-finite float in report: {value!r}")
        return format(value, ".17g")
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_dumps(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_dumps(v)}" for k, v in value.items()) + "}"
    raise PeakseqError(f"unserializable value: {value!r}")


def scan_limit_from_env() -> int:
    raw = os.environ.get(SCAN_LIMIT_ENV)
    if raw is None:
        return DEFAULT_SCAN_LIMIT
    try:
        limit = int(raw)
        if limit < 1:
            raise ValueError
    except ValueError:
        raise SystemExit(
            f"peakseq: error: {SCAN_LIMIT_ENV}={raw!r} is not a positive integer"
        ) from None
    return limit


def _solution_dict(sol: PeakSolution) -> dict:
    return {
        "sup_value": sol.sup_value,
        "argmax_min": sol.argmax_min,
        "truncation_index": sol.truncation_index,
        "terms_evaluated": sol.terms_evaluated,
        "argmax_max_requested": sol.argmax_max_requested,
    }


def _trace_recorder(trace: list):
    def on_step(k: int, u_k: float, bound: UpperBoundValue | None, running_k: int | None):
        if bound is None:
            encoded = None
        elif bound.is_finite:
            encoded = bound.value
        else:
            encoded = "inf"
        trace.append({"k": k, "u_k": u_k, "bound": encoded, "K": running_k})

    return on_step


def _print_report(report: dict, fmt: str) -> None:
    if fmt == "json":
        print(_dumps(report))
        return
    for key, value in report.items():
        if isinstance(value, dict):
            print(f"{key}:")
            for k2, v2 in value.items():
                print(f"  {k2}: {v2}")
        elif isinstance(value, list):
            print(f"{key}: [{len(value)} entries]")
        else:
            print(f"{key}: {value}")


def _run_solve(args, argv: list[str]) -> int:
    tie = Tie.MAX_ARGMAX if args.tie == "max" else Tie.MIN_ARGMAX
    scan_limit = scan_limit_from_env()
    trace: list | None = [] if args.trace else None
    on_step = _trace_recorder(trace) if args.trace else None
    started = time.perf_counter()

    if args.adapter == "factorial":
        adapter = FactorialRatioAdapter(args.a)
        env = adapter.const_env if args.envelope == "constant" else adapter.seq_env
        sol = solve(adapter.source, env, tie=tie, scan_limit=scan_limit, on_step=on_step)
        params = {"a": args.a, "envelope": args.envelope}
    elif args.adapter == "fibonacci":
        if args.u0 > 0:
            sol = fibonacci_solve(args.u0, args.u1, tie=tie)
            if trace is not None:
                trace.append(
                    {"k": 0, "u_k": FibonacciRatioAdapter(args.u0, args.u1).ratio(0),
                     "bound": None, "K": 0}
                )
        else:
            adapter = FibonacciRatioAdapter(args.u0, args.u1)
            sol = solve(adapter.source, adapter.env, tie=tie, scan_limit=scan_limit, on_step=on_step)
        params = {"u0": args.u0, "u1": args.u1}
    elif args.adapter == "logistic":
        sol = logistic_solve(args.r, args.y0, tie=tie)
        if trace is not None:
            adapter = LogisticAdapter(args.r, args.y0)
            for k in range(sol.terms_evaluated):
                trace.append({"k": k, "u_k": adapter.term(k), "bound": None, "K": 0})
        params = {"r": args.r, "y0": args.y0}
    elif args.adapter == "syracuse":
        mx, arg, cycled = syracuse_excursion(args.n0, args.max_steps)
        report = {
            "command": " ".join(argv),
            "adapter": "syracuse",
            "parameters": {"n0": args.n0, "max_steps": args.max_steps},
            "excursion": {"max": mx, "argmax_min": arg, "reached_cycle": cycled},
            "elapsed_seconds": time.perf_counter() - started,
        }
        _print_report(report, args.format)
        return EXIT_OK
    elif args.adapter == "linsys":
        matrix = linsys.a_lambda(args.lam, args.d)
        env = linsys.envelope_from_certificate(matrix, linsys.p_q(args.lam, args.d, args.q))
        source = linsys.a_lambda_source(args.lam, args.d, generic=args.generic)
        sol = solve(source, env, tie=tie, scan_limit=scan_limit, on_step=on_step)
        params = {"lambda": args.lam, "d": args.d, "q": args.q, "generic": args.generic}
    else:  # pragma: no cover - argparse restricts choices
        raise PeakseqError(f"unknown adapter {args.adapter!r}")

    report = {
        "command": " ".join(argv),
        "adapter": args.adapter,
        "parameters": params,
        "solution": _solution_dict(sol),
        "trace": trace,
        "elapsed_seconds": time.perf_counter() - started,
    }
    _print_report(report, args.format)
    return EXIT_OK


def _run_table(args, argv: list[str]) -> int:
    if args.lambdas is None:
        lambdas = list(linsys.TABLE_LAMBDAS)
    else:
        parts = [p for p in args.lambdas.split(",") if p.strip()]
        if not parts:
            print("peakseq table: error: empty lambda list", file=sys.stderr)
            return EXIT_USAGE
        lambdas = [float(p) for p in parts]
    rows = linsys.table_run(
        lambdas, d=args.d, q=args.q, generic=args.generic, scan_limit=scan_limit_from_env()
    )
    if args.format == "csv":
        sys.stdout.write(linsys.rows_to_csv(rows))
    else:
        print(_dumps(linsys.rows_to_json_obj(rows)))
    return EXIT_OK


def _run_validate(args, argv: list[str]) -> int:
    if args.adapter == "syracuse":
        outcome = collatz_envelope_check(args.n0, args.a, args.b, args.c, args.horizon)
        report = {
            "command": " ".join(argv),
            "adapter": "syracuse",
            "consistent": outcome.consistent,
            "violated_at": outcome.violated_at,
            "horizon": args.horizon,
        }
        _print_report(report, args.format)
        return EXIT_OK if outcome.consistent else EXIT_VIOLATION

    if args.adapter == "factorial":
        adapter = FactorialRatioAdapter(args.a)
        env = adapter.const_env if args.envelope == "constant" else adapter.seq_env
        source = adapter.source
    elif args.adapter == "fibonacci":
        adapter = FibonacciRatioAdapter(args.u0, args.u1)
        source, env = adapter.source, adapter.env
    elif args.adapter == "logistic":
        adapter = LogisticAdapter(args.r, args.y0)
        source, env = adapter.source, adapter.env
    elif args.adapter == "linsys":
        matrix = linsys.a_lambda(args.lam, args.d)
        env = linsys.envelope_from_certificate(matrix, linsys.p_q(args.lam, args.d, args.q))
        source = linsys.a_lambda_source(args.lam, args.d, generic=args.generic)
    else:  # pragma: no cover
        raise PeakseqError(f"unknown adapter {args.adapter!r}")

    findings = validate_envelope(source, env, args.horizon)
    report = {
        "command": " ".join(argv),
        "adapter": args.adapter,
        "clean": not findings,
        "horizon": args.horizon,
        "findings": [
            {"k": f.k, "kind": f.kind, "detail": f.detail} for f in findings[:10]
        ],
        "finding_count": len(findings),
    }
    _print_report(report, args.format)
    return EXIT_OK if not findings else EXIT_VIOLATION


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tie", choices=["min", "max"], default="min",
                        help="which maximizer to report on ties")
    parser.add_argument("--trace", action="store_true",
                        help="record one entry per evaluated term (off by default; long runs emit many lines)")
    parser.add_argument("--format", choices=["json", "text"], default="json")


def build_parser() -> _Parser:
    parser = _Parser(prog="peakseq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_solve = sub.add_parser("solve", help="compute the peak of a bundled sequence")
    solve_sub = p_solve.add_subparsers(dest="adapter", required=True, parser_class=_Parser)

    p = solve_sub.add_parser("factorial")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--envelope", choices=["sequence", "constant"], default="sequence")
    _add_common(p)

    p = solve_sub.add_parser("fibonacci")
    p.add_argument("--u0", type=int, required=True)
    p.add_argument("--u1", type=int, required=True)
    _add_common(p)

    p = solve_sub.add_parser("logistic")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--y0", type=float, required=True)
    _add_common(p)

    p = solve_sub.add_parser("syracuse")
    p.add_argument("--n0", type=int, required=True)
    p.add_argument("--max-steps", type=int, default=1_000_000)
    _add_common(p)

    p = solve_sub.add_parser("linsys")
    p.add_argument("--lam", "--lambda", dest="lam", type=float, required=True)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--generic", action="store_true",
                   help="use the generic matrix-power kernel instead of the closed form")
    _add_common(p)

    p = sub.add_parser("table", help="benchmark rows for the lambda*Id + U family")
    p.add_argument("--lambdas", "--lambda", dest="lambdas", type=str, default=None,
                   help="comma-separated lambda values (default: the 8 benchmark values)")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--generic", action="store_true")
    p.add_argument("--format", choices=["json", "csv"], default="json")

    p_val = sub.add_parser("validate", help="check an envelope against its sequence on a horizon")
    val_sub = p_val.add_subparsers(dest="adapter", required=True, parser_class=_Parser)

    p = val_sub.add_parser("factorial")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--envelope", choices=["sequence", "constant"], default="sequence")
    p.add_argument("--horizon", type=int, default=100)
    p.add_argument("--format", choices=["json", "text"], default="json")

    p = val_sub.add_parser("fibonacci")
    p.add_argument("--u0", type=int, required=True)
    p.add_argument("--u1", type=int, required=True)
    p.add_argument("--horizon", type=int, default=40)
    p.add_argument("--format", choices=["json", "text"], default="json")

    p = val_sub.add_parser("logistic")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--y0", type=float, required=True)
    p.add_argument("--horizon", type=int, default=100)
    p.add_argument("--format", choices=["json", "text"], default="json")

    p = val_sub.add_parser("linsys")
    p.add_argument("--lam", "--lambda", dest="lam", type=float, required=True)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--generic", action="store_true")
    p.add_argument("--horizon", type=int, default=50)
    p.add_argument("--format", choices=["json", "text"], default="json")

    p = val_sub.add_parser("syracuse", help="finite-horizon geometric-bound check")
    p.add_argument("--n0", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--format", choices=["json", "text"], default="json")

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "solve":
            return _run_solve(args, argv)
        if args.command == "table":
            return _run_table(args, argv)
        if args.command == "validate":
            return _run_validate(args, argv)
        parser.error(f"unknown command {args.command!r}")
    except EnvelopeViolation as exc:
        print(f"peakseq: envelope violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except (PeakseqError, OverflowError) as exc:
        print(f"peakseq: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    return EXIT_USAGE  # pragma: no cover


if __name__ == "__main__":
    raise SystemExit(main())
