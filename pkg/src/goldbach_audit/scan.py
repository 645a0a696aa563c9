"""Range scanner: ordered fan-out over work units, checkpoints, reports.

A scan splits ``[start, end]`` into contiguous runs of ``segment`` even
targets.  Units are evaluated (optionally in worker processes sharing the
sieve copy-on-write) and merged strictly in ascending order, so the report
stream does not depend on the worker count.  After every merged unit the
checkpoint, if any, is rewritten atomically.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import multiprocessing
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, TextIO

import numpy as np

from .bounds import F_MIN_ARGUMENT, check_eq1
from .classification import bertrand_witness, classify, fast_counts
from .errors import (
    AuditNotApplicableError,
    CheckpointCorruptError,
    EmptySystemError,
    InvalidArgumentError,
    ResumeRefusedError,
)
from .gsystem import audit_chain, build_gsystem, distinct_odd_witnesses, partition_counts_range
from .sieve import SieveTable, SpfTable, build_sieve, build_spf

log = logging.getLogger(__name__)

MODES = ("verify-very-strong", "count-partitions", "theorem-checks", "audit-chain")
FORMATS = ("json-lines", "csv")
DEFAULT_SEGMENT = 1 << 16
SPF_CAP = 1 << 22
# s > h and s - h > f(2N) are only claimed from here on
THEOREM_THRESHOLD = 3_000_000

MODE_FIELDS: dict[str, tuple[str, ...]] = {
    "verify-very-strong": ("two_n", "r_star_positive", "witness_p"),
    "count-partitions": ("two_n", "r", "r_star"),
    "theorem-checks": (
        "two_n", "h", "s", "phi_2n", "bertrand_witness",
        "f_value", "s_minus_h", "eq1_holds", "eq1_marginal",
    ),
    "audit-chain": (
        "two_n", "h", "s", "audit_applicable", "premise_holds", "top_relation_holds",
        "forward_checked", "forward_violations", "backward_checked", "backward_violations",
        "floor_last_holds", "floor_second_last_holds", "h_minus_s_plus_1",
    ),
}


@dataclass(frozen=True)
class ScanConfig:
    start: int
    end: int
    mode: str = "verify-very-strong"
    workers: int = 1
    segment: int = DEFAULT_SEGMENT
    output_format: str = "json-lines"
    checkpoint_path: str | None = None
    strict_constants: bool = False

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise InvalidArgumentError(f"unknown mode {self.mode!r}; choose from {MODES}")
        if self.output_format not in FORMATS:
            raise InvalidArgumentError(f"unknown format {self.output_format!r}")
        if self.start % 2 or self.end % 2:
            raise InvalidArgumentError("start and end must be even")
        if self.start < 4:
            raise InvalidArgumentError("start must be >= 4")
        if self.start > self.end:
            raise InvalidArgumentError("start must not exceed end")
        if self.workers < 1:
            raise InvalidArgumentError("workers must be >= 1")
        if self.segment < 1:
            raise InvalidArgumentError("segment must be >= 1")

    def digest(self) -> str:
        """Identity of the scan for resume purposes; ignores worker count and paths."""
        key = {
            "start": self.start,
            "end": self.end,
            "mode": self.mode,
            "segment": self.segment,
            "output_format": self.output_format,
            "strict_constants": self.strict_constants,
        }
        return hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()

    def units(self) -> Iterator[tuple[int, int]]:
        step = 2 * self.segment
        for lo in range(self.start, self.end + 1, step):
            yield lo, min(lo + step - 2, self.end)


# ---------------------------------------------------------------- checkpoint

CHECKPOINT_KIND = "goldbach-audit-checkpoint/1"


@dataclass(frozen=True)
class Checkpoint:
    config_digest: str
    start: int
    end: int
    last_completed: int
    violations: tuple[int, ...] = ()
    tallies: dict = field(default_factory=dict)
    notable: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.start - 2 <= self.last_completed <= self.end:
            raise InvalidArgumentError(
                f"last_completed {self.last_completed} outside [{self.start}, {self.end}]"
            )


def _payload(cp: Checkpoint) -> dict:
    d = asdict(cp)
    d["violations"] = list(cp.violations)
    return {"kind": CHECKPOINT_KIND, **d}


def _checksum(payload: dict) -> str:
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def checkpoint_save(path: str | os.PathLike, cp: Checkpoint) -> None:
    payload = _payload(cp)
    payload["checksum"] = _checksum(payload)
    tmp = f"{os.fspath(path)}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(payload, sort_keys=True) + "\n")
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def checkpoint_load(path: str | os.PathLike) -> Checkpoint:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        payload = json.loads(text)
        checksum = payload.pop("checksum")
        kind = payload.pop("kind")
    except (ValueError, KeyError, AttributeError) as exc:
        raise CheckpointCorruptError(f"{path}: unreadable checkpoint ({exc})") from None
    if kind != CHECKPOINT_KIND or _checksum({"kind": kind, **payload}) != checksum:
        raise CheckpointCorruptError(f"{path}: checksum mismatch")
    try:
        return Checkpoint(
            config_digest=payload["config_digest"],
            start=payload["start"],
            end=payload["end"],
            last_completed=payload["last_completed"],
            violations=tuple(payload["violations"]),
            tallies=payload["tallies"],
            notable=payload["notable"],
        )
    except (KeyError, TypeError, InvalidArgumentError) as exc:
        raise CheckpointCorruptError(f"{path}: malformed checkpoint ({exc})") from None


# ------------------------------------------------------------------ reports

def _render_float(x: float) -> str:
    return format(x, ".17g")


def _json_value(v) -> str:
    if isinstance(v, float):
        return _render_float(v)
    return json.dumps(v)


def _csv_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return _render_float(v)
    return str(v)


class ReportWriter:
    """Streams records in ascending ``two_n`` order as json-lines or csv."""

    def __init__(self, stream: TextIO, fmt: str, fields: Iterable[str]):
        if fmt not in FORMATS:
            raise InvalidArgumentError(f"unknown format {fmt!r}")
        self.stream = stream
        self.fmt = fmt
        self.fields = tuple(fields)
        self._last: int | None = None
        self._csv = None
        if fmt == "csv":
            self._csv = csv.writer(stream, lineterminator="\n")
            self._csv.writerow(self.fields)

    def write(self, record: Mapping) -> None:
        two_n = record["two_n"]
        if self._last is not None and two_n <= self._last:
            raise InvalidArgumentError(
                f"records out of order: {two_n} after {self._last}"
            )
        self._last = two_n
        if self._csv is not None:
            self._csv.writerow([_csv_value(record.get(k)) for k in self.fields])
        else:
            body = ", ".join(f'"{k}": {_json_value(record.get(k))}' for k in self.fields)
            self.stream.write("{" + body + "}\n")

    def write_all(self, records: Iterable[Mapping]) -> None:
        for rec in records:
            self.write(rec)


def emit_report(records: Iterable[Mapping], fmt: str, stream: TextIO | None = None,
                fields: Iterable[str] | None = None) -> str | None:
    """Write ``records`` to ``stream``; returns the text when no stream is given.

    ``fields`` defaults to the keys of the first record; pass it explicitly
    to get a csv header for an empty record list.
    """
    records = list(records)
    if fields is None:
        fields = list(records[0]) if records else []
    sink = stream if stream is not None else io.StringIO()
    ReportWriter(sink, fmt, fields).write_all(records)
    return sink.getvalue() if stream is None else None


# -------------------------------------------------------------- work units

@dataclass
class UnitResult:
    lo: int
    hi: int
    columns: dict
    violations: list[int]
    tallies: dict
    notable: dict

    def records(self, fields: tuple[str, ...]) -> Iterator[dict]:
        cols = [self.columns[f] for f in fields]
        for row in zip(*cols):
            yield dict(zip(fields, row))


def _unit_verify(table: SieveTable, lo: int, hi: int) -> UnitResult:
    targets = np.arange(lo, hi + 1, 2, dtype=np.int64)
    wit = distinct_odd_witnesses(table, targets)
    ok = wit > 0
    return UnitResult(
        lo, hi,
        columns={
            "two_n": targets.tolist(),
            "r_star_positive": ok.tolist(),
            "witness_p": [int(w) if w else None for w in wit.tolist()],
        },
        violations=targets[~ok].tolist(),
        tallies={"processed": int(targets.size), "max_witness": int(wit.max(initial=0))},
        notable={},
    )


def _unit_count(table: SieveTable, lo: int, hi: int) -> UnitResult:
    targets, r, r_star = partition_counts_range(table, lo, hi)
    return UnitResult(
        lo, hi,
        columns={"two_n": targets.tolist(), "r": r.tolist(), "r_star": r_star.tolist()},
        violations=targets[r == 0].tolist(),
        tallies={
            "processed": int(targets.size),
            "r_star_zero": int((r_star == 0).sum()),
        },
        notable={"r_equals_one": targets[r == 1].tolist()},
    )


def _unit_theorem(table: SieveTable, spf: SpfTable, lo: int, hi: int, strict: bool) -> UnitResult:
    cols: dict[str, list] = {k: [] for k in MODE_FIELDS["theorem-checks"]}
    violations: list[int] = []
    tallies = {"processed": 0, "eq1_holds": 0, "eq1_fails": 0, "eq1_marginal": 0, "s_gt_h": 0}
    for two_n in range(lo, hi + 1, 2):
        counts = fast_counts(table, spf, two_n)
        witness = bertrand_witness(table, two_n) if two_n > 6 else None
        f_value = holds = marginal = None
        if two_n >= F_MIN_ARGUMENT:
            rep = check_eq1(counts, strict=strict)
            f_value, holds, marginal = rep.f_value, rep.eq1_holds, rep.eq1_marginal
            decided = holds and not marginal
            tallies["eq1_holds" if decided else "eq1_fails"] += 1
            tallies["eq1_marginal"] += marginal
        tallies["processed"] += 1
        tallies["s_gt_h"] += counts.s > counts.h
        bad = two_n > 6 and counts.h < 2
        if two_n >= THEOREM_THRESHOLD:
            bad = bad or counts.s <= counts.h or not (holds and not marginal)
        if bad:
            violations.append(two_n)
        for k, v in (
            ("two_n", two_n), ("h", counts.h), ("s", counts.s), ("phi_2n", counts.phi_2n),
            ("bertrand_witness", witness), ("f_value", f_value),
            ("s_minus_h", counts.s - counts.h), ("eq1_holds", holds), ("eq1_marginal", marginal),
        ):
            cols[k].append(v)
    return UnitResult(lo, hi, cols, violations, tallies, {})


_AUDIT_TALLIES = (
    "processed", "applicable", "premise_holds", "top_relation_holds",
    "forward_rows", "forward_violations", "backward_rows", "backward_violations",
    "floor_last_holds", "floor_second_last_checked", "floor_second_last_holds",
    "h_equals_s",
)


def _unit_audit(table: SieveTable, spf: SpfTable, lo: int, hi: int) -> UnitResult:
    fields = MODE_FIELDS["audit-chain"]
    cols: dict[str, list] = {k: [] for k in fields}
    tallies = dict.fromkeys(_AUDIT_TALLIES, 0)
    for two_n in range(lo, hi + 1, 2):
        tallies["processed"] += 1
        c = classify(table, spf, two_n)
        row = dict.fromkeys(fields)
        row.update(two_n=two_n, h=c.h, s=c.s, audit_applicable=False)
        try:
            rep = audit_chain(c, build_gsystem(c))
        except (AuditNotApplicableError, EmptySystemError):
            rep = None
        if rep is not None:
            row.update(
                audit_applicable=True,
                premise_holds=rep.premise_holds,
                top_relation_holds=rep.top_relation_holds,
                forward_checked=rep.forward_checked,
                forward_violations=len(rep.forward_violations),
                backward_checked=rep.backward_checked,
                backward_violations=len(rep.backward_violations),
                floor_last_holds=rep.floor_last_holds,
                floor_second_last_holds=rep.floor_second_last_holds,
                h_minus_s_plus_1=rep.h_minus_s_plus_1,
            )
            tallies["applicable"] += 1
            tallies["premise_holds"] += rep.premise_holds
            tallies["top_relation_holds"] += rep.top_relation_holds
            tallies["forward_rows"] += rep.forward_checked
            tallies["forward_violations"] += len(rep.forward_violations)
            tallies["backward_rows"] += rep.backward_checked
            tallies["backward_violations"] += len(rep.backward_violations)
            tallies["floor_last_holds"] += rep.floor_last_holds
            if rep.floor_second_last_holds is not None:
                tallies["floor_second_last_checked"] += 1
                tallies["floor_second_last_holds"] += rep.floor_second_last_holds
            tallies["h_equals_s"] += rep.h_minus_s_plus_1 == 1
        for k in fields:
            cols[k].append(row[k])
    # the audit characterises the argument; it has no pass/fail criterion
    return UnitResult(lo, hi, cols, [], tallies, {})


def process_unit(table: SieveTable, spf: SpfTable, mode: str, lo: int, hi: int,
                 strict: bool = False) -> UnitResult:
    if mode == "verify-very-strong":
        return _unit_verify(table, lo, hi)
    if mode == "count-partitions":
        return _unit_count(table, lo, hi)
    if mode == "theorem-checks":
        return _unit_theorem(table, spf, lo, hi, strict)
    if mode == "audit-chain":
        return _unit_audit(table, spf, lo, hi)
    raise InvalidArgumentError(f"unknown mode {mode!r}")


_WORKER_TABLES: tuple[SieveTable, SpfTable] | None = None


def _init_worker(table: SieveTable, spf: SpfTable) -> None:
    global _WORKER_TABLES
    _WORKER_TABLES = (table, spf)


def _worker(args: tuple[str, int, int, bool]) -> UnitResult:
    table, spf = _WORKER_TABLES
    return process_unit(table, spf, *args)


# ------------------------------------------------------------------ driver

@dataclass
class ScanSummary:
    config: ScanConfig
    processed: int
    violations: list[int]
    tallies: dict
    notable: dict
    wall_time: float
    resumed_from: int | None = None

    @property
    def exit_code(self) -> int:
        return 1 if self.violations else 0

    def as_dict(self) -> dict:
        return {
            "mode": self.config.mode,
            "start": self.config.start,
            "end": self.config.end,
            "workers": self.config.workers,
            "processed": self.processed,
            "violation_count": len(self.violations),
            "violations": self.violations[:1000],
            "tallies": self.tallies,
            "notable": {k: v[:1000] for k, v in self.notable.items()},
            "resumed_from": self.resumed_from,
            "wall_time_s": round(self.wall_time, 3),
        }


def _merge(tallies: dict, new: dict) -> None:
    for k, v in new.items():
        if k.startswith("max_"):
            tallies[k] = max(tallies.get(k, v), v)
        else:
            tallies[k] = tallies.get(k, 0) + v


def build_tables(config: ScanConfig) -> tuple[SieveTable, SpfTable]:
    table = build_sieve(max(config.end, 3))
    spf = build_spf(max(min(config.end, SPF_CAP), 2))
    return table, spf


def scan_range(
    config: ScanConfig,
    out: TextIO | None = None,
    *,
    tables: tuple[SieveTable, SpfTable] | None = None,
    on_unit: Callable[[int, int], None] | None = None,
) -> ScanSummary:
    """Process every even target of ``config`` exactly once.

    ``out`` receives the record stream (skipped when None).  ``on_unit`` is
    called with ``(units_done, last_completed)`` after each merged unit,
    once the checkpoint for it has been written.
    """
    t0 = time.perf_counter()
    digest = config.digest()
    violations: list[int] = []
    tallies: dict = {}
    notable: dict = {}
    last_completed = config.start - 2
    resumed_from = None

    cp_path = config.checkpoint_path
    if cp_path and os.path.exists(cp_path):
        cp = checkpoint_load(cp_path)
        if cp.config_digest != digest:
            raise ResumeRefusedError(
                f"{cp_path} was written for a different scan configuration"
            )
        violations = list(cp.violations)
        tallies = dict(cp.tallies)
        notable = {k: list(v) for k, v in cp.notable.items()}
        last_completed = cp.last_completed
        resumed_from = cp.last_completed
        log.info("resuming after %d", last_completed)

    if tables is None:
        tables = build_tables(config)
    table, spf = tables

    units = [(lo, hi) for lo, hi in config.units() if hi > last_completed]
    jobs = [(config.mode, lo, hi, config.strict_constants) for lo, hi in units]
    fields = MODE_FIELDS[config.mode]
    writer = ReportWriter(out, config.output_format, fields) if out is not None else None

    def commit(done: int, res: UnitResult) -> None:
        nonlocal last_completed
        if writer is not None:
            writer.write_all(res.records(fields))
        violations.extend(res.violations)
        _merge(tallies, res.tallies)
        for k, v in res.notable.items():
            notable.setdefault(k, []).extend(v)
        last_completed = res.hi
        if cp_path:
            checkpoint_save(cp_path, Checkpoint(
                digest, config.start, config.end, last_completed,
                tuple(violations), dict(tallies), {k: list(v) for k, v in notable.items()},
            ))
        if on_unit is not None:
            on_unit(done, last_completed)

    if config.workers == 1 or len(jobs) <= 1:
        for done, job in enumerate(jobs, 1):
            commit(done, process_unit(table, spf, *job[:3], strict=job[3]))
    else:
        ctx = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(
            max_workers=config.workers, mp_context=ctx,
            initializer=_init_worker, initargs=(table, spf),
        ) as pool:
            results = pool.map(_worker, jobs)
            try:
                for done, res in enumerate(results, 1):
                    commit(done, res)
            except BaseException:
                pool.shutdown(wait=False, cancel_futures=True)
                raise

    processed = (last_completed - config.start) // 2 + 1
    return ScanSummary(
        config=config,
        processed=processed,
        violations=violations,
        tallies=tallies,
        notable=notable,
        wall_time=time.perf_counter() - t0,
        resumed_from=resumed_from,
    )


def expected_units(config: ScanConfig) -> int:
    return math.ceil(((config.end - config.start) // 2 + 1) / config.segment)
