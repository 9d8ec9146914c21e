"""Exact solvers for small instances and the integer program as an exportable model.

* ``exhaustive_opt`` enumerates every set partition with blocks of at most
  ``min(k, p)`` tasks and prices each block with the optimal single-pack
  allocation.
* ``exact_k2`` solves the two-tasks-per-pack case as a minimum-weight perfect
  matching where a self-loop means "runs alone on all processors".
* ``export_ilp`` writes the assignment ILP in CPLEX LP format and
  ``verify_ilp_solution`` checks a solution produced by any external solver.

Variable naming in the ILP (all indices 1-based): ``x_i_j_b`` is 1 when task
``i`` runs on ``j`` processors in pack ``b``; ``y_b`` is the cost of pack
``b``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterator, Mapping

from .errors import BudgetExceeded, InfeasibleAssignment
from .pack_core import CoSchedule, build_schedule, greedy_allocation
from .workload import Workload

DEFAULT_PARTITION_BUDGET = 100_000
DEFAULT_MATCHING_LIMIT = 20


def count_partitions(n: int, max_block: int) -> int:
    """Number of set partitions of ``n`` elements with every block of size <= ``max_block``."""
    counts = [1]
    for m in range(1, n + 1):
        # the block holding element m contains j of the other m-1 elements
        counts.append(sum(math.comb(m - 1, j) * counts[m - 1 - j]
                          for j in range(min(max_block, m))))
    return counts[n]


def partitions(n: int, max_block: int) -> Iterator[list[list[int]]]:
    """Set partitions of ``range(n)`` in lexicographic restricted-growth-string order."""
    blocks: list[list[int]] = []

    def rec(i):
        if i == n:
            yield [list(b) for b in blocks]
            return
        for b in blocks:
            if len(b) < max_block:
                b.append(i)
                yield from rec(i + 1)
                b.pop()
        blocks.append([i])
        yield from rec(i + 1)
        blocks.pop()

    if n == 0:
        yield []
        return
    yield from rec(0)


def exhaustive_opt(workload: Workload, k: int,
                   budget: int = DEFAULT_PARTITION_BUDGET) -> tuple[CoSchedule, float]:
    """Optimal co-schedule by enumerating all partitions into packs of at most ``k`` tasks.

    Raises :class:`BudgetExceeded` before enumerating if the number of
    candidate partitions exceeds ``budget``.  Ties keep the first partition
    visited.
    """
    p, n = workload.p, workload.n
    if not 1 <= k <= p:
        raise ValueError(f"k must lie in [1, {p}], got {k}")
    cap = min(k, p)
    total = count_partitions(n, cap)
    if total > budget:
        raise BudgetExceeded(
            f"{total} partitions of {n} tasks into packs of <= {cap} exceed the budget of {budget}")
    table = workload.time_table()
    block_cost: dict[tuple[int, ...], tuple[float, list[int]]] = {}

    def price(block):
        key = tuple(block)
        hit = block_cost.get(key)
        if hit is None:
            sigma, cost = greedy_allocation([table[i] for i in block], p)
            hit = block_cost[key] = (cost, sigma)
        return hit

    best_cost, best = math.inf, None
    for part in partitions(n, cap):
        cost = math.fsum(price(b)[0] for b in part)
        if cost < best_cost:
            best_cost, best = cost, part
    groups = [list(zip(b, price(b)[1])) for b in best]
    schedule = build_schedule(workload, groups)
    return schedule, schedule.total_cost


def pair_weight(t_a, t_b, p: int) -> tuple[float, int]:
    """Best split of ``p`` processors between two tasks: ``min_j max(t_a[p-j], t_b[j])``.

    ``j`` ranges over 1..p-1 so both tasks get a processor; returns
    ``(inf, 0)`` when ``p < 2``.  Ties keep the smallest ``j``.
    """
    best, arg = math.inf, 0
    for j in range(1, p):
        w = max(t_a[p - j - 1], t_b[j - 1])
        if w < best:
            best, arg = w, j
    return best, arg


def exact_k2(workload: Workload,
             limit: int = DEFAULT_MATCHING_LIMIT) -> tuple[CoSchedule, float]:
    """Optimal co-schedule with at most two tasks per pack, via minimum-weight perfect matching.

    The matching is solved exactly by memoized recursion over the set of
    unmatched tasks; the lowest unmatched task is either self-matched (cost
    ``t_{i,p}``) or paired with a later one.  Practical up to about 20 tasks.
    """
    n, p = workload.n, workload.p
    if n > limit:
        raise BudgetExceeded(f"{n} tasks exceed the matching limit of {limit}")
    table = workload.time_table()
    loops = [row[p - 1] for row in table]
    pairs = {(a, b): pair_weight(table[a], table[b], p)
             for a in range(n) for b in range(a + 1, n)}
    full = (1 << n) - 1

    @lru_cache(maxsize=None)
    def solve(mask: int) -> tuple[float, tuple]:
        if mask == full:
            return 0.0, ()
        a = (~mask & (mask + 1)).bit_length() - 1  # lowest unmatched
        rest, plan = solve(mask | 1 << a)
        best, choice = loops[a] + rest, ((a, None),) + plan
        for b in range(a + 1, n):
            if mask >> b & 1:
                continue
            w, _ = pairs[(a, b)]
            if w == math.inf:
                continue
            rest, plan = solve(mask | 1 << a | 1 << b)
            if w + rest < best:
                best, choice = w + rest, ((a, b),) + plan
        return best, choice

    _, plan = solve(0)
    solve.cache_clear()
    groups = []
    for a, b in plan:
        if b is None:
            groups.append([(a, p)])
        else:
            j = pairs[(a, b)][1]
            groups.append([(a, p - j), (b, j)])
    schedule = build_schedule(workload, groups)
    return schedule, schedule.total_cost


# --------------------------------------------------------------------------
# integer linear program


def x_name(i: int, j: int, b: int) -> str:
    return f"x_{i}_{j}_{b}"


def y_name(b: int) -> str:
    return f"y_{b}"


@dataclass(frozen=True)
class Constraint:
    name: str
    terms: tuple[tuple[float, str], ...]
    sense: str  # "=", "<="
    rhs: float


@dataclass(frozen=True)
class IlpModel:
    n: int
    p: int
    k: int
    binaries: tuple[str, ...]
    continuous: tuple[str, ...]
    objective: tuple[tuple[float, str], ...]
    constraints: tuple[Constraint, ...]

    def constraint_counts(self) -> dict[str, int]:
        counts = {"i": 0, "ii": 0, "iii": 0, "iv": 0}
        for c in self.constraints:
            counts[c.name.split("_", 1)[0]] += 1
        return counts

    def summary(self) -> dict:
        return {"n": self.n, "p": self.p, "k": self.k,
                "binaries": len(self.binaries), "continuous": len(self.continuous),
                "constraints": self.constraint_counts()}

    def to_lp(self) -> str:
        def expr(terms):
            parts = []
            for coef, var in terms:
                sign = "-" if coef < 0 else "+"
                mag = abs(coef)
                body = var if mag == 1 else f"{mag!r} {var}"
                parts.append(f"{sign} {body}")
            text = " ".join(parts)
            return text[2:] if text.startswith("+ ") else text

        lines = [f"\\ pack scheduling ILP: n={self.n} p={self.p} k={self.k}",
                 "Minimize", f" cost: {expr(self.objective)}", "Subject To"]
        for c in self.constraints:
            rhs = int(c.rhs) if float(c.rhs).is_integer() else c.rhs
            lines.append(f" {c.name}: {expr(c.terms)} {c.sense} {rhs}")
        lines.append("Bounds")
        lines.extend(f" {v} >= 0" for v in self.continuous)
        lines.append("Binaries")
        lines.extend(f" {v}" for v in self.binaries)
        lines.append("End")
        return "\n".join(lines) + "\n"


def build_ilp(workload: Workload, k: int) -> IlpModel:
    n, p = workload.n, workload.p
    table = workload.time_table()
    idx = [(i, j, b) for i in range(1, n + 1) for j in range(1, p + 1) for b in range(1, n + 1)]
    binaries = tuple(x_name(*t) for t in idx)
    ys = tuple(y_name(b) for b in range(1, n + 1))
    cons = []
    for i in range(1, n + 1):
        cons.append(Constraint(f"i_{i}", tuple((1.0, x_name(i, j, b))
                                              for j in range(1, p + 1) for b in range(1, n + 1)), "=", 1))
    for b in range(1, n + 1):
        cons.append(Constraint(f"ii_{b}", tuple((1.0, x_name(i, j, b))
                                               for i in range(1, n + 1) for j in range(1, p + 1)), "<=", k))
    for b in range(1, n + 1):
        cons.append(Constraint(f"iii_{b}", tuple((float(j), x_name(i, j, b))
                                                for i in range(1, n + 1) for j in range(1, p + 1)), "<=", p))
    for i, j, b in idx:
        cons.append(Constraint(f"iv_{i}_{j}_{b}",
                               ((table[i - 1][j - 1], x_name(i, j, b)), (-1.0, y_name(b))), "<=", 0))
    return IlpModel(n, p, k, binaries, ys, tuple((1.0, y) for y in ys), tuple(cons))


def export_ilp(workload: Workload, k: int, path) -> IlpModel:
    """Write the model as a CPLEX LP file and return it."""
    model = build_ilp(workload, k)
    Path(path).write_text(model.to_lp())
    return model


def read_solution(path) -> dict[str, float]:
    """Parse ``name value`` lines; blank lines and ``#`` comments are skipped."""
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'name value', got {line!r}")
        values[parts[0]] = float(parts[1])
    return values


def encode_schedule(workload: Workload, schedule: CoSchedule) -> dict[str, float]:
    """The (x, y) assignment representing ``schedule``, packs numbered in order."""
    pos = workload.index_of()
    values = {}
    for b, pack in enumerate(schedule.packs, start=1):
        for tid, q in pack.members:
            values[x_name(pos[tid] + 1, q, b)] = 1.0
        values[y_name(b)] = pack.cost
    return values


@dataclass(frozen=True)
class IlpCheck:
    objective: float
    schedule: CoSchedule
    tight: bool


def verify_ilp_solution(workload: Workload, k: int, values: Mapping[str, float],
                        tol: float = 1e-6) -> IlpCheck:
    """Check an assignment against all four constraint families.

    Variables absent from ``values`` are taken as 0, matching solvers that
    only print non-zeros.  Raises :class:`InfeasibleAssignment` naming the
    first violated family.  ``tight`` is true when every ``y_b`` equals the
    cost of the induced pack (0 for empty packs).
    """
    n, p = workload.n, workload.p
    table = workload.time_table()
    known = {y_name(b) for b in range(1, n + 1)}
    chosen: dict[int, list[tuple[int, int]]] = {}
    for i in range(1, n + 1):
        for j in range(1, p + 1):
            for b in range(1, n + 1):
                name = x_name(i, j, b)
                known.add(name)
                v = values.get(name, 0.0)
                if abs(v) > tol and abs(v - 1) > tol:
                    raise InfeasibleAssignment("integrality", f"{name} = {v!r}")
                if abs(v - 1) <= tol:
                    chosen.setdefault(b, []).append((i, j))
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown variables: {sorted(unknown)[:5]}")
    y = {b: values.get(y_name(b), 0.0) for b in range(1, n + 1)}

    placed = [0] * (n + 1)
    for members in chosen.values():
        for i, _ in members:
            placed[i] += 1
    for i in range(1, n + 1):
        if placed[i] != 1:
            raise InfeasibleAssignment("i", f"task {i} placed {placed[i]} times")
    for b, members in chosen.items():
        if len(members) > k + tol:
            raise InfeasibleAssignment("ii", f"pack {b} holds {len(members)} tasks > k={k}")
        used = sum(j for _, j in members)
        if used > p + tol:
            raise InfeasibleAssignment("iii", f"pack {b} uses {used} processors > p={p}")
        for i, j in members:
            t = table[i - 1][j - 1]
            if t > y[b] + tol * max(1.0, abs(t)):
                raise InfeasibleAssignment("iv", f"t_{i},{j} = {t!r} exceeds y_{b} = {y[b]!r}")
    for b, v in y.items():
        if v < -tol:
            raise InfeasibleAssignment("iv", f"y_{b} = {v!r} is negative")

    groups = [[(i - 1, j) for i, j in sorted(chosen[b])] for b in sorted(chosen)]
    schedule = build_schedule(workload, groups)
    tight = all(
        abs(y[b] - (max(table[i - 1][j - 1] for i, j in chosen[b]) if b in chosen else 0.0))
        <= tol * max(1.0, abs(y[b]))
        for b in y
    )
    return IlpCheck(math.fsum(y.values()), schedule, tight)
