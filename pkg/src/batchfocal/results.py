"""Run records, aggregation, and CSV/JSON result files.

runs.csv column order is fixed and documented; costs and ratios are blank
for unsolved runs.  Aggregates use the population standard deviation.  The
two timing columns (inference_time, wall_time) are the only fields excluded
from the determinism guarantee.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence

RUN_FIELDS = (
    "algorithm",
    "k_fast",
    "batch_size",
    "instance_id",
    "expansions",
    "lazy_reinsertions",
    "generations",
    "flushes",
    "flushed_states",
    "inference_time",
    "wall_time",
    "status",
    "cost",
    "optimal_cost",
    "suboptimality_ratio",
)

TIMING_FIELDS = ("inference_time", "wall_time")

AGGREGATE_FIELDS = (
    "algorithm",
    "k_fast",
    "batch_size",
    "mean_expansions",
    "std_expansions",
    "mean_wall_time",
    "std_wall_time",
    "mean_inference_ratio",
    "std_inference_ratio",
    "solve_rate",
)

# batch_size written for focal rows, which take no batches
NO_BATCH = 0


@dataclass(frozen=True)
class RunRecord:
    algorithm: str
    k_fast: float
    batch_size: int
    instance_id: int
    expansions: int
    lazy_reinsertions: int
    generations: int
    flushes: int
    flushed_states: int
    inference_time: float
    wall_time: float
    status: str
    cost: int | None
    optimal_cost: int
    suboptimality_ratio: float | None

    @property
    def solved(self) -> bool:
        return self.status == "solved"

    @property
    def inference_ratio(self) -> float:
        return self.inference_time / self.wall_time if self.wall_time > 0 else 0.0

    def to_row(self) -> list[str]:
        out = []
        for name in RUN_FIELDS:
            v = getattr(self, name)
            out.append("" if v is None else repr(v) if isinstance(v, float) else str(v))
        return out

    @classmethod
    def from_row(cls, row: Sequence[str]) -> "RunRecord":
        d = dict(zip(RUN_FIELDS, row))
        return cls(
            algorithm=d["algorithm"],
            k_fast=float(d["k_fast"]),
            batch_size=int(d["batch_size"]),
            instance_id=int(d["instance_id"]),
            expansions=int(d["expansions"]),
            lazy_reinsertions=int(d["lazy_reinsertions"]),
            generations=int(d["generations"]),
            flushes=int(d["flushes"]),
            flushed_states=int(d["flushed_states"]),
            inference_time=float(d["inference_time"]),
            wall_time=float(d["wall_time"]),
            status=d["status"],
            cost=int(d["cost"]) if d["cost"] else None,
            optimal_cost=int(d["optimal_cost"]),
            suboptimality_ratio=float(d["suboptimality_ratio"]) if d["suboptimality_ratio"] else None,
        )


@dataclass(frozen=True)
class AggregateRow:
    algorithm: str
    k_fast: float
    batch_size: int
    mean_expansions: float
    std_expansions: float
    mean_wall_time: float
    std_wall_time: float
    mean_inference_ratio: float
    std_inference_ratio: float
    solve_rate: float

    def to_row(self) -> list[str]:
        out = []
        for name in AGGREGATE_FIELDS:
            v = getattr(self, name)
            out.append(repr(v) if isinstance(v, float) else str(v))
        return out

    @classmethod
    def from_row(cls, row: Sequence[str]) -> "AggregateRow":
        d = dict(zip(AGGREGATE_FIELDS, row))
        return cls(
            algorithm=d["algorithm"],
            k_fast=float(d["k_fast"]),
            batch_size=int(d["batch_size"]),
            mean_expansions=float(d["mean_expansions"]),
            std_expansions=float(d["std_expansions"]),
            mean_wall_time=float(d["mean_wall_time"]),
            std_wall_time=float(d["std_wall_time"]),
            mean_inference_ratio=float(d["mean_inference_ratio"]),
            std_inference_ratio=float(d["std_inference_ratio"]),
            solve_rate=float(d["solve_rate"]),
        )


def _mean_std(values: list[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / n
    return mean, math.sqrt(var)


def aggregate(records: Iterable[RunRecord]) -> list[AggregateRow]:
    """Group by (algorithm, k_fast, batch_size) and compute mean/population
    stddev of expansions, wall time, and inference ratio, plus solve rate.
    Unsolved runs stay in all three statistics (their expansion counts are
    the capped values)."""
    groups: dict[tuple[str, float, int], list[RunRecord]] = {}
    for r in records:
        groups.setdefault((r.algorithm, r.k_fast, r.batch_size), []).append(r)
    if not groups:
        return []
    rows = []
    for key in sorted(groups):
        rs = groups[key]
        if not rs:
            raise ValueError(f"empty aggregation group {key}")
        me, se = _mean_std([float(r.expansions) for r in rs])
        mw, sw = _mean_std([r.wall_time for r in rs])
        mr, sr = _mean_std([r.inference_ratio for r in rs])
        rows.append(
            AggregateRow(
                algorithm=key[0],
                k_fast=key[1],
                batch_size=key[2],
                mean_expansions=me,
                std_expansions=se,
                mean_wall_time=mw,
                std_wall_time=sw,
                mean_inference_ratio=mr,
                std_inference_ratio=sr,
                solve_rate=sum(1 for r in rs if r.solved) / len(rs),
            )
        )
    return rows


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf)  # RFC 4180: CRLF line endings, quoting as needed
    w.writerow(header)
    for row in rows:
        w.writerow(row)
    path.write_text(buf.getvalue(), encoding="utf-8", newline="")


def write_results(records: Sequence[RunRecord], aggregates: Sequence[AggregateRow],
                  out_dir: str | Path, config_doc: dict) -> None:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        _write_csv(out / "runs.csv", RUN_FIELDS, (r.to_row() for r in records))
        _write_csv(out / "aggregates.csv", AGGREGATE_FIELDS, (a.to_row() for a in aggregates))
        (out / "config.json").write_text(json.dumps(config_doc, indent=2) + "\n", encoding="utf-8")
    except OSError as e:
        raise OSError(f"cannot write results under {out}: {e}") from e


def _read_csv(path: Path, expected_header: Sequence[str]) -> list[list[str]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != list(expected_header):
                raise ValueError(f"{path}: unexpected header {header}")
            return [row for row in reader]
    except OSError as e:
        raise OSError(f"cannot read {path}: {e}") from e


def read_runs(path: str | Path) -> list[RunRecord]:
    return [RunRecord.from_row(r) for r in _read_csv(Path(path), RUN_FIELDS)]


def read_aggregates(path: str | Path) -> list[AggregateRow]:
    return [AggregateRow.from_row(r) for r in _read_csv(Path(path), AGGREGATE_FIELDS)]


class BoundViolation(RuntimeError):
    """A solved run exceeded w_so * optimal: a correctness failure, not data."""

    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


def check_records(records: Sequence[RunRecord], w_so: float, max_expansions: int) -> list[str]:
    """Invariant suite over run records; returns human-readable problems.
    Bound violations raise immediately."""
    problems = []
    for r in records:
        tag = f"{r.algorithm} k={r.k_fast} B={r.batch_size} instance={r.instance_id}"
        if r.solved:
            if r.cost is None or r.suboptimality_ratio is None:
                problems.append(f"{tag}: solved but cost/ratio missing")
                continue
            if r.cost > w_so * r.optimal_cost:
                raise BoundViolation(
                    f"{tag}: cost {r.cost} > {w_so} * optimal {r.optimal_cost}",
                    diagnostics=asdict(r),
                )
        elif r.cost is not None:
            problems.append(f"{tag}: unsolved but cost present")
        if r.inference_time > r.wall_time:
            problems.append(f"{tag}: inference_time {r.inference_time} > wall_time {r.wall_time}")
        if r.expansions > max_expansions:
            problems.append(f"{tag}: expansions {r.expansions} exceed the cap {max_expansions}")
        if r.generations < r.expansions:
            problems.append(f"{tag}: generations {r.generations} < expansions {r.expansions}")
        if r.flushed_states > r.generations:
            problems.append(f"{tag}: flushed_states {r.flushed_states} > generations {r.generations}")
        if r.algorithm == "focal" and (r.flushes or r.flushed_states or r.batch_size != NO_BATCH):
            problems.append(f"{tag}: focal row carries batch fields")
    return problems
