"""Packs, co-schedules and the two building-block algorithms.

``optimal_one_pack`` is the greedy processor allocator for a fixed set of
tasks sharing one pack; ``one_pack_dp`` computes the same optimum by dynamic
programming and exists as an independent check.  ``make_packs`` is the
first-fit-decreasing packer used when every task's processor count is fixed.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import EmptyPack, InfeasibleSchedule, TooManyTasks
from .workload import Task, Workload

Allocation = dict  # task id -> processor count


@dataclass(frozen=True)
class Pack:
    members: tuple[tuple[str, int], ...]
    cost: float

    @property
    def ids(self) -> list[str]:
        return [tid for tid, _ in self.members]

    @property
    def procs(self) -> int:
        return sum(q for _, q in self.members)

    def to_dict(self) -> dict:
        return {"cost": self.cost, "members": [{"id": tid, "procs": q} for tid, q in self.members]}


@dataclass(frozen=True)
class CoSchedule:
    packs: tuple[Pack, ...]
    total_cost: float = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "packs", tuple(self.packs))
        if self.total_cost is None:
            object.__setattr__(self, "total_cost", math.fsum(pk.cost for pk in self.packs))

    def allocation(self) -> Allocation:
        return {tid: q for pk in self.packs for tid, q in pk.members}

    def to_dict(self) -> dict:
        return {"total_cost": self.total_cost, "packs": [pk.to_dict() for pk in self.packs]}

    @classmethod
    def from_dict(cls, doc: Mapping) -> "CoSchedule":
        packs = tuple(
            Pack(tuple((m["id"], int(m["procs"])) for m in pk["members"]), float(pk["cost"]))
            for pk in doc["packs"]
        )
        return cls(packs, float(doc["total_cost"]))


def build_schedule(workload: Workload, groups: Sequence[Sequence[tuple[int, int]]]) -> CoSchedule:
    """Turn index-level packs ``[(task_index, procs), ...]`` into a CoSchedule."""
    tasks = workload.tasks
    packs = []
    for group in groups:
        members = tuple((tasks[i].id, q) for i, q in group)
        cost = max(tasks[i].profile.times[q - 1] for i, q in group)
        packs.append(Pack(members, cost))
    return CoSchedule(tuple(packs))


# --------------------------------------------------------------------------
# single pack


def greedy_allocation(rows: Sequence[Sequence[float]], p: int) -> tuple[list[int], float]:
    """Greedy allocation on time rows (``rows[i][q-1]``); returns per-row counts and cost.

    Every row starts with one processor; each remaining processor goes to the
    row whose current time is largest (ties: lowest row index).
    """
    k = len(rows)
    if k == 0:
        raise EmptyPack("cannot allocate processors to an empty pack")
    if k > p:
        raise TooManyTasks(f"{k} tasks cannot share {p} processors")
    sigma = [1] * k
    heap = [(-row[0], i) for i, row in enumerate(rows)]
    heapq.heapify(heap)
    for _ in range(p - k):
        _, i = heapq.heappop(heap)
        sigma[i] += 1
        heapq.heappush(heap, (-rows[i][sigma[i] - 1], i))
    return sigma, -heap[0][0]


def optimal_one_pack(tasks: Sequence[Task], p: int) -> tuple[Allocation, float]:
    """Minimum-cost processor allocation for ``tasks`` sharing a single pack of ``p`` processors.

    All ``p`` processors are handed out.  Raises :class:`TooManyTasks` when
    ``len(tasks) > p`` and :class:`EmptyPack` for an empty list.
    """
    sigma, cost = greedy_allocation([t.profile.times for t in tasks], p)
    return {t.id: q for t, q in zip(tasks, sigma)}, cost


def one_pack_dp(tasks: Sequence[Task], p: int) -> float:
    """Optimal single-pack cost by dynamic programming over (tasks, processors).

    ``c(i, q) = min_{1<=q'<=q} max(c(i-1, q-q'), t_{i,q'})`` with
    ``c(1, q) = t_{1,q}`` and ``c(i, 0) = inf``.  Returns ``math.inf`` when
    there are more tasks than processors.
    """
    if not tasks:
        raise EmptyPack("cannot allocate processors to an empty pack")
    first = tasks[0].profile.times
    prev = [math.inf] + [first[q - 1] for q in range(1, p + 1)]
    for task in tasks[1:]:
        t = task.profile.times
        cur = [math.inf] * (p + 1)
        for q in range(1, p + 1):
            best = math.inf
            for qq in range(1, q + 1):
                cand = max(prev[q - qq], t[qq - 1])
                if cand < best:
                    best = cand
            cur[q] = best
        prev = cur
    return prev[p]


# --------------------------------------------------------------------------
# first-fit packing with fixed allocations


def decreasing_order(times_now: Sequence[float]) -> list[int]:
    """Indices sorted by non-increasing current time, ties by lower index."""
    return sorted(range(len(times_now)), key=lambda i: (-times_now[i], i))


def first_fit(order: Sequence[int], sigma: Sequence[int], p: int, k: int) -> list[list[int]]:
    """Place tasks in ``order`` into the first pack with room for ``sigma[i]`` processors and < k members."""
    free: list[int] = []
    groups: list[list[int]] = []
    open_packs: list[int] = []
    for i in order:
        need = sigma[i]
        for pos, b in enumerate(open_packs):
            if free[b] >= need:
                groups[b].append(i)
                free[b] -= need
                if free[b] == 0 or len(groups[b]) >= k:
                    del open_packs[pos]
                break
        else:
            b = len(groups)
            groups.append([i])
            free.append(p - need)
            if free[b] > 0 and k > 1:
                open_packs.append(b)
    return groups


def make_packs(workload: Workload, alloc: Mapping[str, int], k: int) -> CoSchedule:
    """Pack tasks with fixed processor counts, first-fit by decreasing execution time."""
    p = workload.p
    if not 1 <= k <= p:
        raise ValueError(f"k must lie in [1, {p}], got {k}")
    sigma = []
    for task in workload.tasks:
        q = alloc[task.id]
        if not 1 <= q <= p:
            raise ValueError(f"task {task.id!r}: processor count {q} outside [1, {p}]")
        sigma.append(q)
    times_now = [t.profile.times[q - 1] for t, q in zip(workload.tasks, sigma)]
    groups = first_fit(decreasing_order(times_now), sigma, p, k)
    return build_schedule(workload, [[(i, sigma[i]) for i in g] for g in groups])


def reallocate(workload: Workload, groups: Sequence[Sequence[int]]) -> CoSchedule:
    """Keep pack membership, re-run the optimal single-pack allocation inside each pack."""
    table = workload.time_table()
    out = []
    for g in groups:
        sigma, _ = greedy_allocation([table[i] for i in g], workload.p)
        out.append(list(zip(g, sigma)))
    return build_schedule(workload, out)


# --------------------------------------------------------------------------
# checking


@dataclass(frozen=True)
class Evaluation:
    total_cost: float
    pack_costs: tuple[float, ...]
    mismatches: tuple[str, ...] = ()

    @property
    def consistent(self) -> bool:
        return not self.mismatches


def evaluate(workload: Workload, schedule: CoSchedule, k: int | None = None) -> Evaluation:
    """Recompute costs from the profiles and check the structural invariants.

    Raises :class:`InfeasibleSchedule` naming the broken invariant.  Stored
    costs that differ from the recomputed ones are reported in
    ``Evaluation.mismatches`` rather than raised.
    """
    by_id = {t.id: t for t in workload.tasks}
    p = workload.p
    seen: set[str] = set()
    costs = []
    mismatches = []
    for b, pack in enumerate(schedule.packs):
        if not pack.members:
            raise InfeasibleSchedule("empty", f"pack {b} has no members")
        if k is not None and len(pack.members) > k:
            raise InfeasibleSchedule("cardinality", f"pack {b} has {len(pack.members)} tasks > k={k}")
        used = 0
        cost = -math.inf
        for tid, q in pack.members:
            if tid not in by_id:
                raise InfeasibleSchedule("partition", f"unknown task {tid!r} in pack {b}")
            if tid in seen:
                raise InfeasibleSchedule("partition", f"task {tid!r} scheduled more than once")
            seen.add(tid)
            if not 1 <= q <= p:
                raise InfeasibleSchedule("allocation", f"task {tid!r} given {q} processors, p={p}")
            used += q
            cost = max(cost, by_id[tid].profile.times[q - 1])
        if used > p:
            raise InfeasibleSchedule("capacity", f"pack {b} uses {used} processors > p={p}")
        if cost != pack.cost:
            mismatches.append(f"pack {b}: stored cost {pack.cost!r}, recomputed {cost!r}")
        costs.append(cost)
    missing = [tid for tid in by_id if tid not in seen]
    if missing:
        raise InfeasibleSchedule("partition", f"tasks not scheduled: {missing[:10]}")
    total = math.fsum(costs)
    if total != schedule.total_cost:
        mismatches.append(f"stored total {schedule.total_cost!r}, recomputed {total!r}")
    return Evaluation(total, tuple(costs), tuple(mismatches))
