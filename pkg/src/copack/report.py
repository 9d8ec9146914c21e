"""Heuristic sweeps over pack sizes and their CSV/JSON serialization."""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .heuristics import HeuristicSpec, best_of
from .metrics import compute_metrics
from .pack_core import CoSchedule
from .workload import Workload

CSV_COLUMNS = ("workload", "heuristic", "k", "cost", "rel_cost", "packing_ratio",
               "rel_response", "ms", "seed")
DEFAULT_K_VALUES = (2, 4, 6, 8, 10, 12, 14, 16)


@dataclass
class ReportRow:
    workload: str
    heuristic: str
    k: int
    seed: int
    cost: float | None = None
    rel_cost: float | None = None
    packing_ratio: float | None = None
    rel_response: float | None = None
    ms: float | None = None
    epsilon: float | None = None
    schedule: CoSchedule | None = None
    error: str | None = None


@dataclass
class ExperimentReport:
    workload: str
    p: int
    n: int
    seed: int
    rows: list[ReportRow] = field(default_factory=list)

    def row(self, heuristic: str, k: int) -> ReportRow:
        for r in self.rows:
            if r.heuristic == heuristic and r.k == k:
                return r
        raise KeyError((heuristic, k))


def run_sweep(workload: Workload, name: str, ks: Sequence[int],
              specs: Sequence[HeuristicSpec], seed: int) -> ExperimentReport:
    """One row per (heuristic, k), in config order.  Failures are recorded, not raised."""
    report = ExperimentReport(name, workload.p, workload.n, seed)
    for spec in specs:
        for k in ks:
            row = ReportRow(name, spec.name, k, spec.seed)
            try:
                start = time.perf_counter()
                result = best_of(spec, workload, k)
                row.ms = (time.perf_counter() - start) * 1000.0
                m = compute_metrics(workload, result.schedule)
            except Exception as exc:  # noqa: BLE001 - cell failures go into the report
                row.error = f"{type(exc).__name__}: {exc}"
            else:
                row.cost = result.schedule.total_cost
                row.rel_cost = m.relative_cost
                row.packing_ratio = m.packing_ratio
                row.rel_response = m.relative_response_time
                row.epsilon = result.epsilon
                row.schedule = result.schedule
            report.rows.append(row)
    return report


def _sig4(x: float | None) -> float | None:
    if x is None or not math.isfinite(x):
        return x
    return float(f"{x:.4g}")


def serialized_fields(row: ReportRow) -> dict:
    """The CSV columns of a row, rounded as they are written out."""
    return {
        "workload": row.workload,
        "heuristic": row.heuristic,
        "k": row.k,
        "cost": row.cost,
        "rel_cost": _sig4(row.rel_cost),
        "packing_ratio": _sig4(row.packing_ratio),
        "rel_response": _sig4(row.rel_response),
        "ms": None if row.ms is None else round(row.ms, 3),
        "seed": row.seed,
    }


def write_csv(report: ExperimentReport, path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in report.rows:
            rec = serialized_fields(row)
            writer.writerow(["" if rec[c] is None else
                             (repr(rec[c]) if isinstance(rec[c], float) else rec[c])
                             for c in CSV_COLUMNS])


def to_json_document(report: ExperimentReport) -> dict:
    rows = []
    for row in report.rows:
        rec = serialized_fields(row)
        rec["epsilon"] = row.epsilon
        rec["error"] = row.error
        rec["schedule"] = None if row.schedule is None else row.schedule.to_dict()
        rows.append(rec)
    return {"workload": report.workload, "p": report.p, "n": report.n,
            "seed": report.seed, "columns": list(CSV_COLUMNS), "rows": rows}


def write_json(report: ExperimentReport, path) -> None:
    Path(path).write_text(json.dumps(to_json_document(report), indent=2) + "\n")


def read_csv_rows(path) -> list[dict]:
    """Parse a report CSV back into typed records (empty cells become None)."""
    out = []
    with Path(path).open(newline="") as fh:
        for rec in csv.DictReader(fh):
            typed = {}
            for c in CSV_COLUMNS:
                v = rec[c]
                if v == "":
                    typed[c] = None
                elif c in ("workload", "heuristic"):
                    typed[c] = v
                elif c in ("k", "seed"):
                    typed[c] = int(v)
                else:
                    typed[c] = float(v)
            out.append(typed)
    return out
