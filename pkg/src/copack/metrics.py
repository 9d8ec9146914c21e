"""Schedule quality measures, all relative to running tasks one by one on every processor."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Sequence

from .pack_core import CoSchedule, evaluate
from .workload import Workload


def _mean_response(blocks: Sequence[tuple[float, Sequence[float]]]) -> float:
    """Mean completion time when ``(cost, member_times)`` blocks run back to back in order."""
    elapsed = 0.0
    finishes = []
    for cost, member_times in blocks:
        finishes.extend(elapsed + t for t in member_times)
        elapsed += cost
    return math.fsum(finishes) / len(finishes)


def baseline_one_pack(workload: Workload) -> tuple[float, float]:
    """Cost and mean response time of the shortest-task-first sequence on all ``p`` processors."""
    full = sorted(t.profile.times[-1] for t in workload.tasks)
    return math.fsum(full), _mean_response([(t, (t,)) for t in full])


def ordered_packs(schedule: CoSchedule) -> list[int]:
    """Pack indices by non-decreasing cost, ties by original position."""
    return sorted(range(len(schedule.packs)), key=lambda b: (schedule.packs[b].cost, b))


def mean_response(workload: Workload, schedule: CoSchedule, order: Sequence[int] | None = None) -> float:
    by_id = {t.id: t for t in workload.tasks}
    if order is None:
        order = ordered_packs(schedule)
    blocks = []
    for b in order:
        pack = schedule.packs[b]
        blocks.append((pack.cost, [by_id[tid].profile.times[q - 1] for tid, q in pack.members]))
    return _mean_response(blocks)


def relative_cost(workload: Workload, schedule: CoSchedule) -> float:
    total = evaluate(workload, schedule).total_cost
    return total / baseline_one_pack(workload)[0]


def packing_ratio(workload: Workload, schedule: CoSchedule) -> float:
    """Assigned work over ``p`` times the schedule cost; 1 means no idle processor time."""
    ev = evaluate(workload, schedule)
    by_id = {t.id: t for t in workload.tasks}
    work = sum(Fraction(by_id[tid].profile.times[q - 1]) * q
               for pack in schedule.packs for tid, q in pack.members)
    capacity = workload.p * sum(Fraction(c) for c in ev.pack_costs)
    return float(work / capacity)


def relative_response_time(workload: Workload, schedule: CoSchedule) -> float:
    evaluate(workload, schedule)
    return mean_response(workload, schedule) / baseline_one_pack(workload)[1]


@dataclass(frozen=True)
class MetricsReport:
    relative_cost: float
    packing_ratio: float
    relative_response_time: float
    baseline_cost: float
    baseline_mean_response: float

    def to_dict(self) -> dict:
        return asdict(self)


def compute_metrics(workload: Workload, schedule: CoSchedule) -> MetricsReport:
    base_cost, base_resp = baseline_one_pack(workload)
    return MetricsReport(
        relative_cost=relative_cost(workload, schedule),
        packing_ratio=packing_ratio(workload, schedule),
        relative_response_time=relative_response_time(workload, schedule),
        baseline_cost=base_cost,
        baseline_mean_response=base_resp,
    )
