"""Random-Pack, Random-Proc and Pack-by-Pack, plus multi-run selection.

Randomness comes from numpy's PCG64.  Run ``r`` of a heuristic seeded with
``seed`` draws from ``SeedSequence(seed, spawn_key=(r,))``, so run 0 of a
9-run batch is exactly the single-run configuration with the same seed.
"""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .approx import pack_approx
from .pack_core import CoSchedule, decreasing_order, first_fit, reallocate
from .workload import Workload

NINE_EPSILONS = tuple(i / 10 for i in range(1, 10))
SEED_MASK = (1 << 64) - 1


class HeuristicKind(str, enum.Enum):
    RANDOM_PACK = "RANDOM_PACK"
    RANDOM_PROC = "RANDOM_PROC"
    PACK_BY_PACK = "PACK_BY_PACK"
    PACK_APPROX = "PACK_APPROX"


def run_rng(seed: int, run: int) -> np.random.Generator:
    """Generator for run ``run`` of a heuristic seeded with ``seed``."""
    ss = np.random.SeedSequence(seed & SEED_MASK, spawn_key=(run,))
    return np.random.Generator(np.random.PCG64(ss))


def _check_k(workload: Workload, k: int) -> None:
    if not 1 <= k <= workload.p:
        raise ValueError(f"k must lie in [1, {workload.p}], got {k}")


def random_pack(workload: Workload, k: int, rng: np.random.Generator) -> CoSchedule:
    _check_k(workload, k)
    remaining = list(range(workload.n))
    groups = []
    while remaining:
        size = int(rng.integers(1, k + 1))
        if size >= len(remaining):
            groups.append(remaining)
            break
        picked = set(int(x) for x in rng.choice(len(remaining), size=size, replace=False))
        groups.append([remaining[x] for x in sorted(picked)])
        remaining = [r for x, r in enumerate(remaining) if x not in picked]
    return reallocate(workload, groups)


def random_proc(workload: Workload, k: int, rng: np.random.Generator) -> CoSchedule:
    _check_k(workload, k)
    p = workload.p
    sigma = [int(q) for q in rng.integers(1, p + 1, size=workload.n)]
    table = workload.time_table()
    order = decreasing_order([table[i][q - 1] for i, q in enumerate(sigma)])
    return reallocate(workload, first_fit(order, sigma, p, k))


@dataclass(frozen=True)
class SealedPack:
    members: tuple[tuple[int, int], ...]  # (task index, processors at seal time)
    t_max: float


def pack_by_pack_seals(workload: Workload, k: int, epsilon: float) -> list[SealedPack]:
    """Pack formation of Pack-by-Pack, before the per-pack reallocation."""
    _check_k(workload, k)
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    p = workload.p
    table = workload.time_table()
    sigma = [1] * workload.n
    order = sorted((-table[i][0], i) for i in range(workload.n))
    sealed = []
    while order:
        neg_t, head = order[0]
        t_max = -neg_t
        threshold = (1 - epsilon) * t_max
        end = bisect.bisect_right(order, (-threshold, math.inf))
        p_req = 0
        for _, i in order[:end]:
            p_req += sigma[i]
            if p_req >= p:
                break
        if p_req >= p or sigma[head] == p:
            used, members = 0, []
            for _, i in order[:end]:
                if used + sigma[i] <= p:
                    members.append((i, sigma[i]))
                    used += sigma[i]
                    if len(members) == k or used == p:
                        break
            taken = {i for i, _ in members}
            order = [e for e in order if e[1] not in taken]
            sealed.append(SealedPack(tuple(members), t_max))
        else:
            del order[0]
            sigma[head] += 1
            bisect.insort(order, (-table[head][sigma[head] - 1], head))
    return sealed


def pack_by_pack(workload: Workload, k: int, epsilon: float) -> CoSchedule:
    """Balanced packs: seal a pack once the near-longest tasks can fill ``p`` processors."""
    seals = pack_by_pack_seals(workload, k, epsilon)
    return reallocate(workload, [[i for i, _ in s.members] for s in seals])


# --------------------------------------------------------------------------
# multi-run variants


@dataclass(frozen=True)
class HeuristicSpec:
    kind: HeuristicKind
    runs: int = 1
    epsilons: tuple[float, ...] = (0.5,)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", HeuristicKind(self.kind))
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.kind is HeuristicKind.PACK_BY_PACK:
            if not self.epsilons or not all(0 < e < 1 for e in self.epsilons):
                raise ValueError("Pack-by-Pack needs a non-empty list of epsilons in (0, 1)")

    @property
    def name(self) -> str:
        base = self.kind.value.lower().replace("_", "-")
        if self.kind is HeuristicKind.PACK_APPROX:
            return base
        if self.kind is HeuristicKind.PACK_BY_PACK:
            return f"{base}-{len(self.epsilons)}"
        return f"{base}-{self.runs}"


HEURISTIC_NAMES = (
    "pack-approx",
    "pack-by-pack-1",
    "pack-by-pack-9",
    "random-pack-1",
    "random-pack-9",
    "random-proc-1",
    "random-proc-9",
)


def heuristic_spec(name: str, seed: int = 0, runs: int | None = None,
                   epsilons=None) -> HeuristicSpec:
    """Build a spec from a name such as ``random-proc-9`` or ``pack-by-pack``.

    A trailing run count may be omitted; ``runs``/``epsilons`` override it.
    """
    name = name.strip().lower()
    count = None
    base = name
    head, _, tail = name.rpartition("-")
    if head and tail.isdigit():
        base, count = head, int(tail)
    if base == "pack-approx":
        return HeuristicSpec(HeuristicKind.PACK_APPROX, seed=seed)
    if base == "pack-by-pack":
        if epsilons is None:
            if count in (None, 1):
                epsilons = (0.5,)
            elif count == 9:
                epsilons = NINE_EPSILONS
            else:
                epsilons = tuple(i / (count + 1) for i in range(1, count + 1))
        return HeuristicSpec(HeuristicKind.PACK_BY_PACK, epsilons=tuple(epsilons), seed=seed)
    kinds = {"random-pack": HeuristicKind.RANDOM_PACK, "random-proc": HeuristicKind.RANDOM_PROC}
    if base not in kinds:
        raise ValueError(f"unknown heuristic {name!r}")
    return HeuristicSpec(kinds[base], runs=runs or count or 1, seed=seed)


@dataclass
class BestOf:
    schedule: CoSchedule
    run_costs: list[float] = field(default_factory=list)
    best_run: int = 0
    epsilon: float | None = None


def best_of(spec: HeuristicSpec, workload: Workload, k: int) -> BestOf:
    """Run the heuristic as configured and keep the cheapest schedule (earliest run on ties)."""
    if spec.kind is HeuristicKind.PACK_APPROX:
        schedule, _ = pack_approx(workload, k, refine=True)
        return BestOf(schedule, [schedule.total_cost], 0)
    if spec.kind is HeuristicKind.PACK_BY_PACK:
        results = [pack_by_pack(workload, k, eps) for eps in spec.epsilons]
    else:
        fn = random_pack if spec.kind is HeuristicKind.RANDOM_PACK else random_proc
        results = [fn(workload, k, run_rng(spec.seed, r)) for r in range(spec.runs)]
    costs = [s.total_cost for s in results]
    best = min(range(len(costs)), key=lambda r: (costs[r], r))
    eps = spec.epsilons[best] if spec.kind is HeuristicKind.PACK_BY_PACK else None
    return BestOf(results[best], costs, best, eps)
