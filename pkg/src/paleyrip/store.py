"""JSONL result cache, deterministic scan orchestration, and exporters.

Every committed result is one JSON object per line: append-only,
streamable, diff-friendly.  A record is keyed by (command, p, params) where
params embeds the per-record seed; re-running a scan with the same
configuration finds the keys already cached and appends nothing.  The
global seed never feeds the samplers directly: each record's seed is a hash
of (global seed, command, p, params), so growing a prime range does not
perturb the sampling of records that already exist.
"""

from __future__ import annotations

import fcntl
import hashlib
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from datetime import datetime, timezone
from pathlib import Path

from . import charsum, extremal, rip
from .errors import (
    BoundViolationError,
    BudgetExceededError,
    InputError,
    NumericalError,
)
from .field import PrimeField, primes_in_range
from .paley import build_paley_matrix

SCHEMA_VERSION = 1
CACHE_ENV_VAR = "PALEY_CACHE"
DEFAULT_CACHE_NAME = "paley_cache.jsonl"

SCAN_COMMANDS = (
    "coherence",
    "rip",
    "flat-rip",
    "charsum-scan",
    "clique",
    "transitive",
    "bounds",
)

# exact-search defaults: exact searches are feasible below these primes,
# budgeted node-capped searches (still deterministic) beyond
EXACT_TRANSITIVE_LIMIT = 200
EXACT_CLIQUE_LIMIT = 100


def default_cache_path() -> Path:
    return Path(os.environ.get(CACHE_ENV_VAR, DEFAULT_CACHE_NAME))


def derive_record_seed(global_seed: int, command: str, p: int, params: dict) -> int:
    """64-bit per-record seed from the global seed and the record identity."""
    payload = json.dumps(
        [int(global_seed), command, int(p), params],
        sort_keys=True,
        separators=(",", ":"),
    )
    return int.from_bytes(
        hashlib.blake2b(payload.encode(), digest_size=8).digest(), "big"
    )


@dataclass(frozen=True)
class ScanRecord:
    schema_version: int
    timestamp: str
    command: str
    p: int
    params: dict
    result: dict
    runtime_ms: int

    def to_dict(self, include_volatile: bool = True) -> dict:
        payload = {
            "schema_version": self.schema_version,
            "command": self.command,
            "p": self.p,
            "params": self.params,
            "result": self.result,
        }
        if include_volatile:
            payload["timestamp"] = self.timestamp
            payload["runtime_ms"] = self.runtime_ms
        return payload

    def to_line(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, payload: dict) -> "ScanRecord":
        return cls(
            schema_version=int(payload["schema_version"]),
            timestamp=payload.get("timestamp", ""),
            command=payload["command"],
            p=int(payload["p"]),
            params=payload["params"],
            result=payload["result"],
            runtime_ms=int(payload.get("runtime_ms", 0)),
        )

    def key(self) -> str:
        return record_key(self.command, self.p, self.params)


def record_key(command: str, p: int, params: dict) -> str:
    return json.dumps([command, int(p), params], sort_keys=True, separators=(",", ":"))


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


# -- cache file ----------------------------------------------------------------


def read_cache(path) -> tuple[list[ScanRecord], list[tuple[int, str]]]:
    """All parseable records plus (line number, reason) for corrupt lines."""
    path = Path(path)
    records: list[ScanRecord] = []
    problems: list[tuple[int, str]] = []
    if not path.exists():
        return records, problems
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text:
                continue
            try:
                records.append(ScanRecord.from_dict(json.loads(text)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                problems.append((lineno, f"{type(exc).__name__}: {exc}"))
    return records, problems


def repair_cache(path) -> int:
    """Quarantine a torn final line (crash mid-append); returns lines moved."""
    path = Path(path)
    if not path.exists():
        return 0
    lines = path.read_text(encoding="utf-8", errors="replace").splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        return 0
    try:
        json.loads(lines[-1])
        return 0
    except json.JSONDecodeError:
        quarantine = Path(str(path) + ".quarantine")
        with open(quarantine, "a", encoding="utf-8") as fh:
            fh.write(lines[-1] + "\n")
        path.write_text(
            "".join(line + "\n" for line in lines[:-1]), encoding="utf-8"
        )
        return 1


def append_records(path, records) -> None:
    """Line-atomic appends under an advisory lock (single-writer contract)."""
    if not records:
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a", encoding="utf-8") as fh:
        fcntl.flock(fh, fcntl.LOCK_EX)
        try:
            for record in records:
                fh.write(record.to_line() + "\n")
            fh.flush()
        finally:
            fcntl.flock(fh, fcntl.LOCK_UN)


# -- scan orchestration ----------------------------------------------------------


@dataclass
class ScanConfig:
    p_min: int
    p_max: int
    commands: tuple[str, ...]
    mod4: int | None = None  # 1, 3, or None for both congruence classes
    seed: int = 0
    workers: int = 1
    cache: Path | str = dc_field(default_factory=default_cache_path)
    options: dict = dc_field(default_factory=dict)


@dataclass
class ScanOutcome:
    records: list[ScanRecord]
    skipped: int
    violations: int
    numerical_failures: int
    cache_problems: list[tuple[int, str]]


def _resolve_search(command: str, p: int, options: dict) -> dict:
    search = options.get("search", "auto")
    if search == "auto":
        limit = EXACT_TRANSITIVE_LIMIT if p % 4 == 3 else EXACT_CLIQUE_LIMIT
        search = "exact" if p < limit else "budget"
    params: dict = {"search": search}
    if search == "budget":
        params["node_budget"] = int(
            options.get("node_budget") or extremal.DEFAULT_NODE_BUDGET
        )
    return params


def params_for(command: str, p: int, config: ScanConfig) -> dict:
    options = config.options
    if command in ("rip", "flat-rip"):
        params = {
            "K": int(options.get("K", 2)),
            "mode": options.get("mode", "exhaustive"),
            "budget": options.get("budget"),
        }
    elif command == "charsum-scan":
        params = {
            "alpha": float(options.get("alpha", 0.5)),
            "mode": options.get("mode", "sampled"),
            "budget": options.get("budget"),
            "self_pairs": bool(options.get("self_pairs", False)),
        }
    elif command in ("clique", "transitive", "bounds"):
        params = _resolve_search(command, p, options)
    elif command == "coherence":
        params = {}
    else:
        raise InputError(f"unknown scan command {command!r}")
    params["seed"] = derive_record_seed(config.seed, command, p, params)
    return params


def compute_result(command: str, p: int, params: dict) -> dict:
    """Result payload for one (command, p); failures become error payloads."""
    try:
        return _dispatch(command, p, params)
    except BudgetExceededError as exc:
        return {"error": str(exc), "kind": "budget_exceeded"}
    except BoundViolationError as exc:
        return {"error": str(exc), "kind": "bound_violation", "ledger": exc.details}
    except NumericalError as exc:
        return {"error": str(exc), "kind": "numerical"}


def _dispatch(command: str, p: int, params: dict) -> dict:
    fld = PrimeField(p)
    if command == "coherence":
        matrix = build_paley_matrix(fld)
        value = rip.coherence(matrix)
        floor = rip.welch_bound((p + 1) // 2, p + 1)
        return {
            "p": p,
            "coherence": value,
            "welch_bound": floor,
            "meets_welch_bound": bool(abs(value - floor) <= 1e-12),
        }
    if command == "rip":
        report = rip.rip_constant_exact(
            build_paley_matrix(fld),
            params["K"],
            mode=params["mode"],
            budget=params["budget"],
            seed=params["seed"],
        )
        return report.to_dict()
    if command == "flat-rip":
        report = rip.flat_rip_constant_exact(
            build_paley_matrix(fld),
            params["K"],
            mode=params["mode"],
            budget=params["budget"],
            seed=params["seed"],
        )
        return report.to_dict()
    if command == "charsum-scan":
        report = charsum.scan_pgc_property(
            fld,
            params["alpha"],
            mode=params["mode"],
            budget=params["budget"],
            seed=params["seed"],
            self_pairs=params["self_pairs"],
        )
        return report.to_dict()
    if command in ("clique", "transitive", "bounds"):
        if command == "clique" and p % 4 != 1:
            raise InputError(f"clique needs p % 4 == 1, got p={p}")
        if command == "transitive" and p % 4 != 3:
            raise InputError(f"transitive needs p % 4 == 3, got p={p}")
        search = params["search"]
        ledger = extremal.bounds_ledger(
            fld,
            compute_exact=search != "none",
            node_budget=params.get("node_budget") if search == "budget" else None,
        )
        return ledger.to_dict()
    raise InputError(f"unknown command {command!r}")


def _job(job):
    command, p, params = job
    start = time.perf_counter()
    result = compute_result(command, p, params)
    runtime_ms = int(round((time.perf_counter() - start) * 1000))
    return result, runtime_ms


def run_scan(config: ScanConfig) -> ScanOutcome:
    """One record per (prime, command), appended in ascending-p order.

    Already-cached keys are skipped; per-record failures are recorded and
    the scan continues.
    """
    for command in config.commands:
        if command not in SCAN_COMMANDS:
            raise InputError(f"unknown scan command {command!r}")
    if config.p_min > config.p_max:
        raise InputError(f"empty prime range {config.p_min}..{config.p_max}")
    path = Path(config.cache)
    repair_cache(path)
    existing, problems = read_cache(path)
    have = {record.key() for record in existing}

    jobs = []
    skipped = 0
    for p in primes_in_range(config.p_min, config.p_max, config.mod4):
        for command in config.commands:
            if command == "clique" and p % 4 != 1:
                continue
            if command == "transitive" and p % 4 != 3:
                continue
            params = params_for(command, p, config)
            if record_key(command, p, params) in have:
                skipped += 1
                continue
            jobs.append((command, p, params))

    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(_job, jobs))
    else:
        outcomes = [_job(job) for job in jobs]

    records = []
    violations = 0
    numerical = 0
    for (command, p, params), (result, runtime_ms) in zip(jobs, outcomes):
        kind = result.get("kind") if "error" in result else None
        if kind == "bound_violation":
            violations += 1
        elif kind == "numerical":
            numerical += 1
        records.append(
            ScanRecord(
                schema_version=SCHEMA_VERSION,
                timestamp=_utc_now(),
                command=command,
                p=p,
                params=params,
                result=result,
                runtime_ms=runtime_ms,
            )
        )
    append_records(path, records)
    return ScanOutcome(records, skipped, violations, numerical, problems)


# -- exporters --------------------------------------------------------------------


_LEDGER_COLUMNS = ["p", "tabib", "hp", "appendix", "measured", "witness"]
_CSV_FIELDS = {
    "bounds": _LEDGER_COLUMNS,
    "clique": _LEDGER_COLUMNS,
    "transitive": _LEDGER_COLUMNS,
    "rip": ["p", "K", "mode", "delta", "witness_support", "enumerated_count", "rng_seed"],
    "flat-rip": ["p", "K", "mode", "theta", "witness_I", "witness_J", "rng_seed"],
    "charsum-scan": [
        "p",
        "alpha",
        "mode",
        "sample_count",
        "worst_ratio",
        "implied_beta",
        "witness_S",
        "witness_T",
        "rng_seed",
    ],
    "coherence": ["p", "coherence", "welch_bound", "meets_welch_bound"],
}


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, (list, tuple, dict)):
        return json.dumps(value, sort_keys=True, separators=(",", ":"))
    return str(value)


def _csv_row_values(record: ScanRecord) -> dict:
    result = record.result
    row = {"command": record.command, "p": record.p, "runtime_ms": record.runtime_ms}
    if record.command in ("bounds", "clique", "transitive"):
        row.update(
            tabib=result.get("tabib_bound"),
            hp=result.get("hp_clique_bound"),
            appendix=result.get("appendix_bound"),
            measured=result.get("measured_extremal"),
            witness=result.get("witness"),
        )
    elif record.command == "rip":
        row.update({k: result.get(k) for k in ("K", "mode", "delta", "witness_support",
                                                "enumerated_count", "rng_seed")})
    elif record.command == "flat-rip":
        witness = result.get("witness") or {}
        row.update(
            K=result.get("K"),
            mode=result.get("mode"),
            theta=result.get("theta"),
            witness_I=witness.get("I"),
            witness_J=witness.get("J"),
            rng_seed=result.get("rng_seed"),
        )
    elif record.command == "charsum-scan":
        witness = result.get("worst_pair_witness") or {}
        row.update(
            alpha=result.get("alpha"),
            mode=result.get("mode"),
            sample_count=result.get("sample_count"),
            worst_ratio=result.get("worst_ratio"),
            implied_beta=result.get("implied_beta"),
            witness_S=witness.get("S"),
            witness_T=witness.get("T"),
            rng_seed=result.get("rng_seed"),
        )
    elif record.command == "coherence":
        row.update({k: result.get(k) for k in ("coherence", "welch_bound",
                                               "meets_welch_bound")})
    return row


def export_records(
    cache_path,
    fmt: str,
    out_path=None,
    command: str | None = None,
    p_range: tuple[int, int] | None = None,
    include_volatile: bool = True,
):
    """Render the cache to CSV or JSON with a stable layout.

    Returns (text, problems); corrupt cache lines are skipped and reported
    with their line numbers.  Rows are sorted by (command, p, params key);
    floats print at 17 significant digits.
    """
    cache_path = Path(cache_path)
    if not cache_path.exists():
        raise InputError(f"cache {cache_path} does not exist")
    if fmt not in ("csv", "json"):
        raise InputError(f"unknown export format {fmt!r}")
    records, problems = read_cache(cache_path)
    chosen = [
        record
        for record in records
        if (command is None or record.command == command)
        and (p_range is None or p_range[0] <= record.p <= p_range[1])
    ]
    chosen.sort(key=lambda record: (record.command, record.p, record.key()))

    if fmt == "json":
        payload = [record.to_dict(include_volatile=include_volatile) for record in chosen]
        text = json.dumps(payload, sort_keys=True, indent=1) + "\n"
    else:
        commands_present = sorted({record.command for record in chosen})
        columns = ["command", "p"]
        for name in SCAN_COMMANDS:
            if name in commands_present:
                for col in _CSV_FIELDS[name]:
                    if col not in columns:
                        columns.append(col)
        if include_volatile:
            columns.append("runtime_ms")
        lines = [",".join(columns)]
        for record in chosen:
            if "error" in record.result:
                problems.append(
                    (-1, f"skipping failed record {record.key()}: "
                         f"{record.result.get('kind')}")
                )
                continue
            row = _csv_row_values(record)
            cells = []
            for col in columns:
                cell = _csv_cell(row.get(col))
                if "," in cell or '"' in cell:
                    cell = '"' + cell.replace('"', '""') + '"'
                cells.append(cell)
            lines.append(",".join(cells))
        text = "\n".join(lines) + "\n"

    if out_path is not None:
        Path(out_path).write_text(text, encoding="utf-8")
    return text, problems
