"""Exhaustive surveys of colored graphs with a single (1, 2) face.

E1 = {0,1},{2,3},... and E2 = {1,2},...,{2n-1,0} are fixed, E3 runs over all
(2n-1)!! matchings.  Candidates are deduplicated by canonical code before any
face maximization, so the expensive search runs once per isomorphism class.

Work is split into shards of consecutive E3 ranks.  Each class keeps the
smallest rank that produced it, so merging shards in any order (or across any
number of workers) gives the same representatives as a sequential run.
"""

from __future__ import annotations

import enum
import json
import logging
import os
import pickle
import struct
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import IO, NamedTuple

import numpy as np

from . import __version__, _kernels
from .bounds import TheoremViolation, certified_lower_bound
from .canonical import canonical_form, encode_labels
from .graphcore import ColoredGraph, cycle_graph_matchings, face_profile, is_connected
from .io import FORMAT_VERSION, atomic_open, dumps_json, serialize_graph
from .matching import (
    Matching,
    MemoryCapExceeded,
    matching_count,
    max_faces,
    precompute_partial_faces,
)

log = logging.getLogger(__name__)

CHECKPOINT_MAGIC = b"CGSRVCKP"
CHECKPOINT_VERSION = 2
DEFAULT_HARD_CAP = 9
ALL_COLORED_CAP = 5
WORKERS_ENV = "COLORGRAPHS_WORKERS"


class Mode(str, enum.Enum):
    SINGLE_FACE_PAIR = "single_face_pair"
    MST_ONLY = "mst_only"
    ALL_COLORED = "all_colored"


class SurveyError(RuntimeError):
    pass


class CheckpointError(SurveyError):
    pass


class SurveyInterrupted(SurveyError):
    """Raised after ``interrupt_after`` work units; the checkpoint is on disk."""


def default_workers() -> int:
    return int(os.environ.get(WORKERS_ENV, "1"))


@dataclass
class SurveyConfig:
    n: int
    mode: Mode = Mode.SINGLE_FACE_PAIR
    workers: int = field(default_factory=default_workers)
    checkpoint: Path | None = None
    checkpoint_interval: int = 20_000
    out: Path | None = None
    exact_all: bool = False
    hard_cap: int = DEFAULT_HARD_CAP
    classes_per_unit: int = 250
    # minimum seconds between checkpoint writes; a write also happens on interrupt
    checkpoint_seconds: float = 30.0

    def __post_init__(self) -> None:
        self.mode = Mode(self.mode)
        if self.checkpoint is not None:
            self.checkpoint = Path(self.checkpoint)
        if self.out is not None:
            self.out = Path(self.out)
        if self.n < 1:
            raise SurveyError(f"n must be positive, got {self.n}")
        cap = min(self.hard_cap, ALL_COLORED_CAP) if self.mode is Mode.ALL_COLORED else self.hard_cap
        if self.n > cap:
            raise SurveyError(f"n={self.n} exceeds the cap {cap} for mode {self.mode.value}")
        if self.workers < 1 or self.checkpoint_interval < 1 or self.classes_per_unit < 1:
            raise SurveyError("workers, checkpoint_interval and classes_per_unit must be positive")

    @property
    def threshold(self) -> Fraction:
        return Fraction(3 * self.n, 2)

    def fingerprint(self) -> dict:
        return {"n": self.n, "mode": self.mode.value, "exact_all": self.exact_all,
                "checkpoint_interval": self.checkpoint_interval,
                "classes_per_unit": self.classes_per_unit}

    def to_dict(self) -> dict:
        d = self.fingerprint()
        d.update(workers=self.workers, threshold=str(self.threshold))
        return d


@dataclass
class SurveyReport:
    """Summary in ``results``; per-class outcomes in ``class_records`` (code order)."""

    config: SurveyConfig
    results: dict
    class_records: list[ClassRecord]
    provenance: dict

    @property
    def records(self) -> list[dict]:
        """Per-class records as JSON-ready dicts; built on demand."""
        return [r.to_dict(self.config.n, self.config.mode.value) for r in self.class_records]

    @property
    def mst_count(self) -> int:
        return self.results["mst_count"]

    @property
    def mst_histogram(self) -> dict[int, int]:
        return {int(k): v for k, v in self.results["mst_max_f_histogram"].items()}

    @property
    def violators(self) -> list[ClassRecord]:
        return [r for r in self.class_records if r.violates]

    def to_dict(self) -> dict:
        return {"format_version": FORMAT_VERSION, "kind": "survey",
                "results": dict(self.results, classes=self.records), "provenance": self.provenance}

    def write(self, fh: IO[str]) -> None:
        """Stream the same JSON as ``dumps_json(self.to_dict())`` without building it."""
        marker = "\x00classes\x00"
        doc = {"format_version": FORMAT_VERSION, "kind": "survey",
               "results": dict(self.results, classes=marker), "provenance": self.provenance}
        head, tail = dumps_json(doc).split(json.dumps(marker))
        indent = " " * 6
        if not self.class_records:
            fh.write(head + "[]" + tail)
            return
        fh.write(head + "[\n")
        n, mode = self.config.n, self.config.mode.value
        for k, rec in enumerate(self.class_records):
            if k:
                fh.write(",\n")
            body = json.dumps(rec.to_dict(n, mode), indent=2, sort_keys=True)
            fh.write(indent + body.replace("\n", "\n" + indent))
        fh.write("\n    ]" + tail)


# ---------------------------------------------------------------- phase 1

def _fixed(n: int) -> tuple[np.ndarray, np.ndarray]:
    e1, e2 = cycle_graph_matchings(n)
    return np.array(e1, np.int64), np.array(e2, np.int64)


def _units(config: SurveyConfig) -> list[tuple[int, int]]:
    if config.mode is Mode.ALL_COLORED:
        # ranks over E2; each E2 sweeps all E3
        total = matching_count(config.n)
        step = max(1, config.checkpoint_interval // total)
    else:
        total = matching_count(config.n)
        step = config.checkpoint_interval
    return [(lo, min(lo + step, total)) for lo in range(0, total, step)]


def _dedup_unit(n: int, mode: str, lo: int, hi: int) -> tuple[dict[bytes, int], int]:
    """Smallest candidate rank for every class met in [lo, hi)."""
    e1, e2 = _fixed(n)
    found: dict[bytes, int] = {}
    if mode == Mode.ALL_COLORED.value:
        total = matching_count(n)
        scanned = 0
        for e2_rank in range(lo, hi):
            ranks, codes = _kernels.colored_sweep_batch(n, e2_rank, total, e1)
            scanned += total
            for rank, row in zip(ranks, codes):
                found.setdefault(encode_labels(n, row), int(e2_rank) * total + int(rank))
        return found, scanned
    ranks, _, _, codes = _kernels.survey_batch(n, lo, hi, e1, e2, mode == Mode.MST_ONLY.value)
    for rank, row in zip(ranks, codes):
        found.setdefault(encode_labels(n, row), int(rank))
    return found, hi - lo


# ---------------------------------------------------------------- phase 2

def representative(n: int, mode: str, rank: int) -> ColoredGraph:
    e1, e2 = cycle_graph_matchings(n)
    if mode == Mode.ALL_COLORED.value:
        total = matching_count(n)
        e2 = Matching.from_index(n, rank // total).partner
        rank %= total
    e3 = Matching.from_index(n, rank).partner
    return ColoredGraph(n, (e1, e2, e3))


class ClassRecord(NamedTuple):
    """Outcome for one isomorphism class; the witness is kept only for violators."""

    code: bytes
    rank: int
    profile: tuple[int, int, int]
    connected: bool
    mst: bool
    bipartite: bool
    max_f: int | None
    exact: bool
    certified_bound: int | None
    certificate_rule: str | None
    certificate_error: str | None
    violates: bool
    matchings_examined: int
    witness: tuple[tuple[int, int], ...] | None

    def to_dict(self, n: int, mode: str) -> dict:
        convention = "explicit" if mode == Mode.ALL_COLORED.value else "table3"
        base = 1 if convention == "table3" else 0
        d = self._asdict()
        d["code"] = self.code.hex()
        d["profile"] = list(self.profile)
        d["graph"] = serialize_graph(representative(n, mode, self.rank), convention)
        d["witness"] = None if self.witness is None else [[u + base, v + base] for u, v in self.witness]
        return d


def evaluate_class(n: int, mode: str, exact_all: bool, code: bytes, rank: int) -> ClassRecord:
    """Face profile, certificate and (exact or threshold-decided) max for one class."""
    G = representative(n, mode, rank)
    prof = face_profile(G)
    threshold = Fraction(3 * n, 2)
    try:
        cert = certified_lower_bound(G)
        cert_bound, cert_rule, cert_error = cert.bound, cert.rule.value, None
    except TheoremViolation as exc:
        cert_bound, cert_rule, cert_error = None, None, str(exc)

    need_exact = prof.is_mst or exact_all or mode == Mode.ALL_COLORED.value
    if need_exact:
        res = max_faces(G, lower_bound=cert_bound)
    elif cert_bound is not None and cert_bound > threshold:
        res = None
    else:
        res = max_faces(G, lower_bound=cert_bound, stop_above=int(threshold))

    if res is None:
        max_f, exact, examined, witness = cert_bound, False, 0, None
    else:
        max_f, exact, examined, witness = res.max_f, res.exact, res.matchings_examined, res.witness
    violates = bool(exact and max_f <= threshold)
    return ClassRecord(
        code=code,
        rank=rank,
        profile=prof.as_tuple(),
        connected=prof.connected,
        mst=prof.is_mst,
        bipartite=prof.bipartite,
        max_f=max_f,
        exact=exact,
        certified_bound=cert_bound,
        certificate_rule=cert_rule,
        certificate_error=cert_error,
        violates=violates,
        matchings_examined=examined,
        witness=tuple(witness.edges()) if (violates and witness is not None) else None,
    )


def _evaluate_unit(n: int, mode: str, exact_all: bool, items: list[tuple[bytes, int]]) -> list[ClassRecord]:
    return [evaluate_class(n, mode, exact_all, code, rank) for code, rank in items]


# ---------------------------------------------------------------- checkpoints

def save_checkpoint(path: Path, state: dict) -> None:
    with atomic_open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC + struct.pack("<H", CHECKPOINT_VERSION))
        pickle.dump(state, fh, protocol=pickle.HIGHEST_PROTOCOL)


def load_checkpoint(path: Path, config: SurveyConfig) -> dict:
    with open(path, "rb") as fh:
        magic = fh.read(len(CHECKPOINT_MAGIC))
        if magic != CHECKPOINT_MAGIC:
            raise CheckpointError(f"{path}: bad magic, not a survey checkpoint")
        raw = fh.read(2)
        version = struct.unpack("<H", raw)[0] if len(raw) == 2 else None
        if version != CHECKPOINT_VERSION:
            raise CheckpointError(f"{path}: checkpoint version {version}, expected {CHECKPOINT_VERSION}")
        try:
            state = pickle.load(fh)
        except Exception as exc:
            raise CheckpointError(f"{path}: corrupt payload ({exc})") from exc
    if not isinstance(state, dict) or state.get("fingerprint") != config.fingerprint():
        raise CheckpointError(f"{path}: written for a different configuration "
                              f"({state.get('fingerprint') if isinstance(state, dict) else None})")
    return state


# ---------------------------------------------------------------- driver

class _Runner:
    def __init__(self, config: SurveyConfig, interrupt_after: int | None) -> None:
        self.config = config
        self.interrupt_after = interrupt_after
        self.units_done_now = 0
        self.resumed = False
        self.last_save = time.monotonic()
        self.state = {"fingerprint": config.fingerprint(), "dedup_done": set(), "classes": {},
                      "scanned": 0, "eval_done": set(), "records": {}}
        if config.checkpoint is not None and config.checkpoint.exists():
            self.state = load_checkpoint(config.checkpoint, config)
            self.resumed = True
            log.info("resumed from %s: %d shards, %d classes evaluated", config.checkpoint,
                     len(self.state["dedup_done"]), len(self.state["records"]))

    def _tick(self) -> None:
        self.units_done_now += 1
        stop = self.interrupt_after is not None and self.units_done_now >= self.interrupt_after
        due = time.monotonic() - self.last_save >= self.config.checkpoint_seconds
        if self.config.checkpoint is not None and (stop or due):
            save_checkpoint(self.config.checkpoint, self.state)
            self.last_save = time.monotonic()
        if stop:
            raise SurveyInterrupted(f"stopped after {self.units_done_now} work units")

    def _run(self, fn, jobs: dict, on_result) -> None:
        if not jobs:
            return
        if self.config.workers == 1:
            for key, args in jobs.items():
                on_result(key, fn(*args))
                self._tick()
            return
        with ProcessPoolExecutor(max_workers=self.config.workers) as pool:
            futures = {pool.submit(fn, *args): key for key, args in jobs.items()}
            try:
                for fut in as_completed(futures):
                    on_result(futures[fut], fut.result())
                    self._tick()
            except BaseException:
                for fut in futures:
                    fut.cancel()
                raise

    def dedup(self) -> None:
        cfg, st = self.config, self.state
        jobs = {unit: (cfg.n, cfg.mode.value, *unit) for unit in _units(cfg) if unit not in st["dedup_done"]}

        def merge(unit, result):
            found, scanned = result
            classes = st["classes"]
            for code, rank in found.items():
                if code not in classes or rank < classes[code]:
                    classes[code] = rank
            st["scanned"] += scanned
            st["dedup_done"].add(unit)

        self._run(_dedup_unit, jobs, merge)

    def evaluate(self) -> None:
        cfg, st = self.config, self.state
        items = sorted(st["classes"].items())
        size = cfg.classes_per_unit
        jobs = {}
        for start in range(0, len(items), size):
            if start not in st["eval_done"]:
                jobs[start] = (cfg.n, cfg.mode.value, cfg.exact_all, items[start:start + size])

        def merge(start, records):
            for rec in records:
                st["records"][rec.code] = rec
            st["eval_done"].add(start)

        self._run(_evaluate_unit, jobs, merge)


def _histogram(values) -> dict[str, int]:
    out: dict[int, int] = {}
    for v in values:
        out[v] = out.get(v, 0) + 1
    return {str(k): out[k] for k in sorted(out)}


def summarize(config: SurveyConfig, records: list[ClassRecord]) -> dict:
    threshold = config.threshold
    violators = [r for r in records if r.violates]
    return {
        "n": config.n,
        "mode": config.mode.value,
        "threshold": str(threshold),
        "class_count": len(records),
        "mst_count": sum(1 for r in records if r.mst),
        "mst_max_f_histogram": _histogram(r.max_f for r in records if r.mst),
        "exact_max_f_histogram": _histogram(r.max_f for r in records if r.exact),
        "violator_count": len(violators),
        "violators": [r.code.hex() for r in violators],
        "violators_all_mst": all(r.mst for r in violators),
        "non_mst_all_exceed_threshold": all(r.max_f is not None and r.max_f > threshold
                                            for r in records if not r.mst),
        "certificate_errors": sum(1 for r in records if r.certificate_error),
        "certificate_consistent": all(r.certified_bound is None or r.certified_bound <= r.max_f
                                      for r in records),
    }


def run_survey(config: SurveyConfig, *, interrupt_after: int | None = None) -> SurveyReport:
    """Run (or resume) a survey; see :class:`SurveyConfig` for the modes."""
    started = time.time()
    runner = _Runner(config, interrupt_after)
    runner.dedup()
    runner.evaluate()
    st = runner.state
    records = [st["records"][code] for code in sorted(st["classes"])]
    provenance = {
        "config": config.to_dict(),
        "version": __version__,
        "runtime_seconds": round(time.time() - started, 3),
        "candidates_scanned": st["scanned"],
        "matchings_examined": sum(r.matchings_examined for r in records),
        "resumed": runner.resumed,
    }
    report = SurveyReport(config, summarize(config, records), records, provenance)
    if config.out is not None:
        with atomic_open(config.out, "w") as fh:
            report.write(fh)
    return report


# ---------------------------------------------------------------- entry points

def find_violators(n: int, workers: int | None = None, report: SurveyReport | None = None) -> list[dict]:
    """Classes with max_M F <= 3n/2, each re-checked by an unpruned pass.

    The re-check scans the precomputed (F01, F02) table when it fits in
    memory and falls back to the unpruned search otherwise.
    """
    if report is None:
        cfg = SurveyConfig(n, Mode.SINGLE_FACE_PAIR, workers=workers or default_workers())
        report = run_survey(cfg)
    found = report.violators
    if not found:
        return []
    try:
        table = precompute_partial_faces(n)
    except MemoryCapExceeded:
        table = None
    out = []
    for rec in found:
        G = representative(n, report.config.mode.value, rec.rank)
        check = table.max_faces(G.partners[2]) if table is not None else max_faces(G, bound="none")
        if check.max_f != rec.max_f:
            raise SurveyError(f"class {rec.code.hex()}: unpruned max {check.max_f} != survey max {rec.max_f}")
        out.append({"graph": G, "code": rec.code.hex(), "max_f": check.max_f, "witness": check.witness})
    return out


def verify_fixture_set(fixtures: list[ColoredGraph]) -> dict:
    """Check each graph: connected, MST, non-bipartite, exact max_F = 3n/2, all distinct."""
    rows = []
    seen: dict[bytes, int] = {}
    for no, G in enumerate(fixtures, start=1):
        prof = face_profile(G)
        res = max_faces(G)
        code = canonical_form(G).code
        duplicate_of = seen.get(code)
        seen.setdefault(code, no)
        checks = {
            "connected": prof.connected,
            "mst": prof.is_mst,
            "non_bipartite": not prof.bipartite,
            "max_f_is_threshold": 2 * res.max_f == 3 * G.n,
            "distinct": duplicate_of is None,
        }
        rows.append({"no": no, "n": G.n, "max_f": res.max_f, "code": code.hex(),
                     "duplicate_of": duplicate_of, "checks": checks, "pass": all(checks.values())})
    failed = [r["no"] for r in rows if not r["pass"]]
    return {"count": len(rows), "passed": len(rows) - len(failed), "failed": failed,
            "pass": not failed and bool(rows), "graphs": rows}


def colored_classes(n: int, cap: int = ALL_COLORED_CAP) -> dict[bytes, int]:
    """Connected classes with E1 fixed and (E2, E3) swept, keyed by code."""
    if n > cap:
        raise SurveyError(f"n={n} exceeds the cap {cap} for the full (E2, E3) sweep")
    cfg = SurveyConfig(n, Mode.ALL_COLORED, workers=1, hard_cap=cap)
    found: dict[bytes, int] = {}
    for lo, hi in _units(cfg):
        part, _ = _dedup_unit(n, Mode.ALL_COLORED.value, lo, hi)
        for code, rank in part.items():
            if code not in found or rank < found[code]:
                found[code] = rank
    return found


def count_colored_graphs(n: int, cap: int = ALL_COLORED_CAP) -> int:
    """Number of connected 3-edge-colored cubic graphs on 2n vertices up to
    color-preserving isomorphism."""
    return len(colored_classes(n, cap))


def class_graphs(n: int, mode: Mode | str = Mode.ALL_COLORED) -> list[ColoredGraph]:
    """One representative per class, in code order."""
    mode = Mode(mode)
    if mode is Mode.ALL_COLORED:
        classes = colored_classes(n)
    else:
        cfg = SurveyConfig(n, mode, workers=1)
        classes = {}
        for lo, hi in _units(cfg):
            part, _ = _dedup_unit(n, mode.value, lo, hi)
            for code, rank in part.items():
                classes[code] = min(rank, classes.get(code, rank))
    graphs = [representative(n, mode.value, classes[c]) for c in sorted(classes)]
    assert all(is_connected(G) for G in graphs)
    return graphs


__all__ = [
    "CheckpointError", "ClassRecord", "Mode", "SurveyConfig", "SurveyError", "SurveyInterrupted", "SurveyReport",
    "class_graphs", "count_colored_graphs", "default_workers", "evaluate_class", "find_violators",
    "representative", "run_survey", "verify_fixture_set",
]
