import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from copack import metrics
from copack.errors import InfeasibleSchedule
from copack.pack_core import CoSchedule, Pack, build_schedule
from copack.workload import SpeedupProfile, Task, Workload

from randgen import random_feasible_schedule, workloads


def _singletons(w):
    return build_schedule(w, [[(i, w.p)] for i in range(w.n)])


def test_hand_computed_example():
    w = Workload(2, (Task("a", SpeedupProfile((4.0, 2.0))), Task("b", SpeedupProfile((2.0, 1.0)))))
    s = build_schedule(w, [[(0, 1), (1, 1)]])
    assert metrics.baseline_one_pack(w) == (3.0, (1.0 + 3.0) / 2)
    assert metrics.relative_cost(w, s) == 4.0 / 3.0
    assert metrics.packing_ratio(w, s) == (4.0 + 2.0) / (2 * 4.0)
    assert metrics.relative_response_time(w, s) == ((4.0 + 2.0) / 2) / 2.0


@settings(max_examples=100, deadline=None)
@given(workloads(max_n=10, max_p=8))
def test_one_pack_schedule_is_unit(w):
    s = _singletons(w)
    assert metrics.relative_cost(w, s) == 1.0
    assert metrics.relative_response_time(w, s) == 1.0


@settings(max_examples=200, deadline=None)
@given(workloads(max_n=10, max_p=8), st.integers(0, 2**32 - 1))
def test_packing_ratio_in_unit_interval(w, seed):
    rng = random.Random(seed)
    s = random_feasible_schedule(rng, w, rng.randint(1, w.p))
    assert 0.0 < metrics.packing_ratio(w, s) <= 1.0


def _order_is_optimal(w, s, order):
    best = metrics.mean_response(w, s, order)
    return all(best <= metrics.mean_response(w, s, o) * (1 + 1e-12)
               for o in itertools.permutations(range(len(s.packs))))


@settings(max_examples=100, deadline=None)
@given(workloads(max_n=7, max_p=6), st.integers(0, 2**32 - 1))
def test_cost_per_member_order_minimizes_mean_response(w, seed):
    # each pack delays all of its successors' members, so Smith's ratio rule is optimal
    rng = random.Random(seed)
    s = random_feasible_schedule(rng, w, rng.randint(1, w.p))
    if len(s.packs) > 5:
        return
    smith = sorted(range(len(s.packs)), key=lambda b: s.packs[b].cost / len(s.packs[b].members))
    assert _order_is_optimal(w, s, smith)


@settings(max_examples=100, deadline=None)
@given(workloads(max_n=10, max_p=6), st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_cost_order_optimal_for_equal_pack_sizes(w, seed, size):
    size = min(size, w.p)
    n = w.n - w.n % size
    if n == 0 or n // size > 5:
        return
    rng = random.Random(seed)
    ids = list(range(n))
    rng.shuffle(ids)
    groups = [[(i, 1) for i in ids[b:b + size]] for b in range(0, n, size)]
    sub = w.subset([w.tasks[i].id for i in range(n)])
    s = build_schedule(sub, groups)
    assert _order_is_optimal(sub, s, metrics.ordered_packs(s))


def test_cost_order_not_optimal_for_mixed_pack_sizes():
    # a cheap singleton first delays two members of the slightly dearer pair
    w = Workload(2, (Task("a", SpeedupProfile((5.0, 5.0))), Task("b", SpeedupProfile((1.0, 1.0))),
                     Task("c", SpeedupProfile((4.0, 4.0)))))
    s = build_schedule(w, [[(0, 1), (1, 1)], [(2, 2)]])
    assert metrics.ordered_packs(s) == [1, 0]
    assert metrics.mean_response(w, s, [0, 1]) < metrics.mean_response(w, s)


def test_metrics_reject_infeasible():
    w = Workload(2, (Task("a", SpeedupProfile((4.0, 2.0))),))
    bad = CoSchedule((Pack((("a", 3),), 1.0),))
    with pytest.raises(InfeasibleSchedule):
        metrics.compute_metrics(w, bad)


def test_report_dict():
    w = Workload(1, (Task("a", SpeedupProfile((4.0,))), Task("b", SpeedupProfile((1.0,)))))
    rep = metrics.compute_metrics(w, _singletons(w))
    assert rep.to_dict() == {"relative_cost": 1.0, "packing_ratio": 1.0,
                             "relative_response_time": 1.0, "baseline_cost": 5.0,
                             "baseline_mean_response": 3.0}
