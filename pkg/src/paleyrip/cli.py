"""Command-line interface.

Commands: construct, rip, flat-rip, coherence, charsum-scan, clique,
transitive, bounds, scan, export.  Report commands append their records to
the JSONL cache (default $PALEY_CACHE or ./paley_cache.jsonl) and print the
new records to stdout, one JSON object per line.

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 a measured
value exceeded a closed-form bound.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import store
from .errors import (
    BoundViolationError,
    BudgetExceededError,
    ConstructionError,
    InputError,
    NumericalError,
)
from .field import PrimeField
from .paley import (
    build_paley_graph,
    build_paley_matrix,
    build_paley_tournament,
    graph_payload,
    matrix_csv_lines,
    matrix_header,
    tournament_payload,
)


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--cache",
        default=None,
        help="JSONL result cache (default: $PALEY_CACHE or ./paley_cache.jsonl)",
    )
    common.add_argument(
        "--out", default=None, help="alias for --cache on report commands"
    )
    common.add_argument("--seed", type=int, default=None, help="64-bit global seed")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--budget", type=int, default=None)
    return common


def _parse_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError as exc:
        raise InputError(f"--p-range expects LO:HI, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paleyrip",
        description="Paley matrix/graph/tournament toolkit: exact RIP and "
        "flat-RIP constants, character-sum scans, extremal searches, bound "
        "ledgers.",
    )
    common = _common_parser()
    sub = parser.add_subparsers(dest="command", required=True)

    con = sub.add_parser("construct", parents=[common], help="export a matrix/graph/tournament")
    con.add_argument("--p", type=int, required=True)
    con.add_argument("--what", choices=("matrix", "graph", "tournament"), default="matrix")
    con.add_argument("--prefix", required=True, help="output path prefix")
    con.set_defaults(handler=_handle_construct)

    coh = sub.add_parser("coherence", parents=[common], help="coherence vs Welch bound")
    coh.add_argument("--p", type=int, required=True)
    coh.set_defaults(handler=lambda a: _run_reports(a, "coherence", a.p, a.p, {}))

    for name in ("rip", "flat-rip"):
        cmd = sub.add_parser(name, parents=[common], help=f"{name} constant")
        cmd.add_argument("--p", type=int, required=True)
        cmd.add_argument("--K", type=int, required=True)
        cmd.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
        cmd.set_defaults(handler=_handle_rip_family, rip_command=name)

    cs = sub.add_parser("charsum-scan", parents=[common], help="double character-sum scan")
    cs.add_argument("--p", type=int, required=True)
    cs.add_argument("--alpha", type=float, default=0.5)
    cs.add_argument("--mode", choices=("exhaustive", "sampled"), default="sampled")
    cs.add_argument("--self-pairs", action="store_true", help="sample only (S, S) pairs")
    cs.set_defaults(handler=_handle_charsum)

    for name in ("clique", "transitive", "bounds"):
        cmd = sub.add_parser(name, parents=[common], help=f"{name} ledger")
        group = cmd.add_mutually_exclusive_group()
        cmd.add_argument("--p", type=int, default=None)
        cmd.add_argument("--p-range", default=None)
        group.add_argument("--exact", action="store_true", help="force exact search")
        group.add_argument(
            "--bounds-only", action="store_true", help="skip the extremal search"
        )
        cmd.add_argument("--node-budget", type=int, default=None)
        cmd.set_defaults(handler=_handle_extremal, extremal_command=name)

    sc = sub.add_parser("scan", parents=[common], help="scan a prime range")
    sc.add_argument("--p-range", required=True)
    sc.add_argument("--mod4", choices=("1", "3", "both"), default="both")
    sc.add_argument("--commands", required=True, help="comma-separated scan commands")
    sc.add_argument("--K", type=int, default=2)
    sc.add_argument("--alpha", type=float, default=0.5)
    sc.add_argument("--mode", choices=("exhaustive", "sampled"), default=None)
    sc.add_argument("--exact", action="store_true")
    sc.add_argument("--bounds-only", action="store_true")
    sc.add_argument("--node-budget", type=int, default=None)
    sc.add_argument("--self-pairs", action="store_true")
    sc.set_defaults(handler=_handle_scan)

    ex = sub.add_parser("export", parents=[common], help="render the cache to CSV/JSON")
    ex.add_argument("--format", choices=("csv", "json"), required=True)
    ex.add_argument("--only-command", dest="only_command", default=None,
                    choices=store.SCAN_COMMANDS)
    ex.add_argument("--p-range", default=None)
    ex.add_argument("--file", default=None, help="output file (default: stdout)")
    ex.add_argument(
        "--no-volatile",
        action="store_true",
        help="omit timestamp and runtime_ms (for determinism comparisons)",
    )
    ex.set_defaults(handler=_handle_export)
    return parser


def _cache_path(args) -> Path:
    if getattr(args, "cache", None):
        return Path(args.cache)
    if getattr(args, "out", None):
        return Path(args.out)
    return store.default_cache_path()


def _require_seed(args, mode: str) -> int:
    if mode == "sampled" and args.seed is None:
        raise InputError("--seed is mandatory in sampled mode")
    return args.seed if args.seed is not None else 0


def _run_reports(args, command, p_min, p_max, options, mod4=None, seed=None) -> int:
    config = store.ScanConfig(
        p_min=p_min,
        p_max=p_max,
        commands=(command,) if isinstance(command, str) else tuple(command),
        mod4=mod4,
        seed=seed if seed is not None else (args.seed or 0),
        workers=args.workers,
        cache=_cache_path(args),
        options=options,
    )
    outcome = store.run_scan(config)
    for record in outcome.records:
        print(record.to_line())
    if outcome.skipped:
        print(f"skipped {outcome.skipped} cached record(s)", file=sys.stderr)
    for lineno, reason in outcome.cache_problems:
        print(f"cache line {lineno}: {reason} (skipped)", file=sys.stderr)
    if outcome.violations:
        print("bound violation detected -- inspect the ledger records",
              file=sys.stderr)
        return 3
    if outcome.numerical_failures:
        return 2
    return 0


def _handle_construct(args) -> int:
    fld = PrimeField(args.p)
    prefix = str(args.prefix)
    written = []
    if args.what == "matrix":
        matrix = build_paley_matrix(fld)
        csv_path = Path(prefix + ".csv")
        csv_path.write_text("\n".join(matrix_csv_lines(matrix)) + "\n", encoding="utf-8")
        header_path = Path(prefix + ".json")
        header_path.write_text(
            json.dumps(matrix_header(matrix), indent=1, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        written = [csv_path, header_path]
    else:
        if args.what == "graph":
            payload = graph_payload(build_paley_graph(fld))
        else:
            payload = tournament_payload(build_paley_tournament(fld))
        out = Path(prefix + ".json")
        out.write_text(json.dumps(payload, sort_keys=True) + "\n", encoding="utf-8")
        written = [out]
    for path in written:
        print(path)
    return 0


def _handle_rip_family(args) -> int:
    seed = _require_seed(args, args.mode)
    options = {"K": args.K, "mode": args.mode, "budget": args.budget}
    return _run_reports(args, args.rip_command, args.p, args.p, options, seed=seed)


def _handle_charsum(args) -> int:
    seed = _require_seed(args, args.mode)
    options = {
        "alpha": args.alpha,
        "mode": args.mode,
        "budget": args.budget,
        "self_pairs": args.self_pairs,
    }
    return _run_reports(args, "charsum-scan", args.p, args.p, options, seed=seed)


def _resolve_extremal_options(args) -> dict:
    if args.bounds_only:
        search = "none"
    elif args.exact:
        search = "exact"
    elif args.node_budget is not None:
        search = "budget"
    else:
        search = "auto"
    return {"search": search, "node_budget": args.node_budget}


def _handle_extremal(args) -> int:
    if (args.p is None) == (args.p_range is None):
        raise InputError("give exactly one of --p or --p-range")
    if args.p is not None:
        lo = hi = args.p
    else:
        lo, hi = _parse_range(args.p_range)
    mod4 = {"clique": 1, "transitive": 3, "bounds": None}[args.extremal_command]
    options = _resolve_extremal_options(args)
    return _run_reports(args, args.extremal_command, lo, hi, options, mod4=mod4)


def _handle_scan(args) -> int:
    commands = tuple(c.strip() for c in args.commands.split(",") if c.strip())
    if not commands:
        raise InputError("--commands must name at least one command")
    lo, hi = _parse_range(args.p_range)
    mod4 = None if args.mod4 == "both" else int(args.mod4)
    sampled_active = args.mode == "sampled" or (
        "charsum-scan" in commands and args.mode is None
    )
    seed = _require_seed(args, "sampled" if sampled_active else "exhaustive")
    options = {
        "K": args.K,
        "alpha": args.alpha,
        "budget": args.budget,
        "self_pairs": args.self_pairs,
        "node_budget": args.node_budget,
    }
    if args.mode is not None:
        options["mode"] = args.mode
    if args.bounds_only:
        options["search"] = "none"
    elif args.exact:
        options["search"] = "exact"
    return _run_reports(args, commands, lo, hi, options, mod4=mod4, seed=seed)


def _handle_export(args) -> int:
    p_range = _parse_range(args.p_range) if args.p_range else None
    text, problems = store.export_records(
        _cache_path(args),
        args.format,
        out_path=args.file,
        command=args.only_command,
        p_range=p_range,
        include_volatile=not args.no_volatile,
    )
    if args.file is None:
        sys.stdout.write(text)
    else:
        print(args.file)
    for lineno, reason in problems:
        print(f"cache line {lineno}: {reason} (skipped)", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.handler(args)
    except (InputError, ConstructionError, BudgetExceededError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except BoundViolationError as exc:
        print(f"BOUND VIOLATION: {exc}", file=sys.stderr)
        return 3


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
