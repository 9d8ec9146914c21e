"""Pack-Approx: refine processor counts one at a time, re-packing after each step."""

from __future__ import annotations

import bisect
import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

from .pack_core import CoSchedule, build_schedule, first_fit, reallocate
from .workload import Workload


class ExitReason(str, enum.Enum):
    MAX_TASK_AT_P = "MAX_TASK_AT_P"
    WORK_EXCEEDS_TMAX = "WORK_EXCEEDS_TMAX"
    ITERATION_BUDGET = "ITERATION_BUDGET"


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    a_tot: float
    t_max: float
    j_star: int
    cost: float


@dataclass
class ApproxTrace:
    records: list[TraceRecord] = field(default_factory=list)
    best_cost: float = math.inf
    exit_reason: ExitReason | None = None

    def write_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iter", "A_tot", "t_max", "j_star", "cost"])
            for r in self.records:
                writer.writerow([r.iteration, repr(r.a_tot), repr(r.t_max), r.j_star, repr(r.cost)])


def pack_approx(workload: Workload, k: int, *, refine: bool = False) -> tuple[CoSchedule, ApproxTrace]:
    """Best co-schedule met while growing the longest task's processor count.

    Starts from one processor per task.  Each iteration packs the tasks with
    first-fit decreasing (at most ``k`` per pack), then stops if the total
    work divided by ``p`` exceeds the longest execution time or the longest
    task already holds all ``p`` processors; otherwise it gives that task
    one more processor.  For ``k == p`` the result is within a factor 3 of
    optimal.

    With ``refine`` the returned packs keep their members but processors
    are redistributed inside each pack by the optimal single-pack
    allocation, which can only lower the cost; the trace is unaffected.

    ``j_star`` in the trace is the 0-based index of the longest task in the
    workload.
    """
    p, n = workload.p, workload.n
    if not 1 <= k <= p:
        raise ValueError(f"k must lie in [1, {p}], got {k}")
    table = workload.time_table()
    sigma = [1] * n
    # kept sorted by (-time, index); head is the longest task, lowest index on ties
    order = sorted((-table[i][0], i) for i in range(n))
    work = [table[i][0] for i in range(n)]

    trace = ApproxTrace()
    best_groups = None
    # n(p-1) increments are possible, so n(p-1)+1 allocations can be visited
    for it in range(n * (p - 1) + 1):
        a_tot = math.fsum(work)
        neg_t, j_star = order[0]
        t_max = -neg_t
        groups = first_fit([i for _, i in order], sigma, p, k)
        cost = math.fsum(max(table[i][sigma[i] - 1] for i in g) for g in groups)
        trace.records.append(TraceRecord(it, a_tot, t_max, j_star, cost))
        if cost < trace.best_cost:
            trace.best_cost = cost
            best_groups = [[(i, sigma[i]) for i in g] for g in groups]
        if a_tot / p > t_max:
            trace.exit_reason = ExitReason.WORK_EXCEEDS_TMAX
            break
        if sigma[j_star] == p:
            trace.exit_reason = ExitReason.MAX_TASK_AT_P
            break
        del order[0]
        sigma[j_star] += 1
        t_new = table[j_star][sigma[j_star] - 1]
        work[j_star] = sigma[j_star] * t_new
        bisect.insort(order, (-t_new, j_star))
    else:
        trace.exit_reason = ExitReason.ITERATION_BUDGET

    if refine:
        return reallocate(workload, [[i for i, _ in g] for g in best_groups]), trace
    return build_schedule(workload, best_groups), trace
