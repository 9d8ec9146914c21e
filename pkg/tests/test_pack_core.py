import random

import pytest
from hypothesis import given, settings

from copack.errors import EmptyPack, InfeasibleSchedule, TooManyTasks
from copack.pack_core import (CoSchedule, Pack, evaluate, first_fit, make_packs, one_pack_dp,
                              optimal_one_pack, reallocate)
from copack.workload import SpeedupProfile, Task, Workload

from randgen import brute_one_pack, random_workload, workloads


def _w(*rows):
    return Workload(len(rows[0]), tuple(Task(f"t{i}", SpeedupProfile(r)) for i, r in enumerate(rows)))


def test_greedy_small_example():
    w = _w((12.0, 6.0, 4.0, 3.0), (6.0, 3.0, 2.0, 1.5))
    alloc, cost = optimal_one_pack(w.tasks, 4)
    assert alloc == {"t0": 3, "t1": 1}
    assert cost == 6.0


def test_greedy_uses_every_processor():
    w = random_workload(random.Random(1), 3, 10)
    alloc, _ = optimal_one_pack(w.tasks, 10)
    assert sum(alloc.values()) == 10


def test_one_pack_errors():
    w = _w((2.0, 1.0), (2.0, 1.0), (2.0, 1.0))
    with pytest.raises(TooManyTasks):
        optimal_one_pack(w.tasks, 2)
    with pytest.raises(EmptyPack):
        optimal_one_pack([], 2)
    assert one_pack_dp(w.tasks, 2) == float("inf")


@settings(max_examples=200, deadline=None)
@given(workloads(max_n=3, max_p=7))
def test_greedy_matches_brute_force(w):
    if w.n > w.p:
        return
    _, cost = optimal_one_pack(w.tasks, w.p)
    assert cost == brute_one_pack(w.time_table(), w.p)
    assert cost == one_pack_dp(w.tasks, w.p)


def test_first_fit_respects_limits():
    # sigma 3,3,2,1 on p=4, k=2
    groups = first_fit([0, 1, 2, 3], [3, 3, 2, 1], 4, 2)
    assert groups == [[0, 3], [1], [2]]
    assert first_fit([0, 1, 2], [1, 1, 1], 4, 1) == [[0], [1], [2]]


@settings(max_examples=100, deadline=None)
@given(workloads(max_n=8, max_p=8))
def test_make_packs_feasible(w):
    rng = random.Random(w.n * 31 + w.p)
    alloc = {tid: rng.randint(1, w.p) for tid in w.ids}
    for k in range(1, w.p + 1):
        s = make_packs(w, alloc, k)
        ev = evaluate(w, s, k)
        assert ev.consistent
        assert s.allocation() == alloc


@settings(max_examples=100, deadline=None)
@given(workloads(max_n=8, max_p=8))
def test_reallocate_never_worse(w):
    rng = random.Random(w.p)
    alloc = {tid: 1 for tid in w.ids}
    k = rng.randint(1, w.p)
    s = make_packs(w, alloc, k)
    idx = w.index_of()
    r = reallocate(w, [[idx[t] for t in pk.ids] for pk in s.packs])
    assert evaluate(w, r, k).consistent
    assert r.total_cost <= s.total_cost


def test_evaluate_detects_each_invariant():
    w = _w((4.0, 2.0, 2.0), (3.0, 2.0, 1.0))
    ok = CoSchedule((Pack((("t0", 2), ("t1", 1)), 3.0),))
    assert evaluate(w, ok).total_cost == 3.0
    cases = {
        "partition": CoSchedule((Pack((("t0", 3),), 2.0),)),
        "capacity": CoSchedule((Pack((("t0", 2), ("t1", 2)), 2.0),)),
        "allocation": CoSchedule((Pack((("t0", 4),), 2.0), Pack((("t1", 3),), 1.0))),
        "empty": CoSchedule((Pack((), 0.0), Pack((("t0", 3), ), 2.0), Pack((("t1", 3),), 1.0))),
    }
    for invariant, s in cases.items():
        with pytest.raises(InfeasibleSchedule) as info:
            evaluate(w, s)
        assert info.value.invariant == invariant
    with pytest.raises(InfeasibleSchedule) as info:
        evaluate(w, ok, k=1)
    assert info.value.invariant == "cardinality"


def test_evaluate_reports_stale_cost():
    w = _w((4.0, 2.0), (3.0, 2.0))
    s = CoSchedule((Pack((("t0", 1),), 9.0), Pack((("t1", 1),), 3.0)))
    ev = evaluate(w, s)
    assert not ev.consistent
    assert ev.total_cost == 7.0


def test_schedule_dict_roundtrip():
    w = random_workload(random.Random(3), 5, 6)
    s = make_packs(w, {t: 2 for t in w.ids}, 3)
    assert CoSchedule.from_dict(s.to_dict()) == s
