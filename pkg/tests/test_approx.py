import csv
import random

import pytest
from hypothesis import given, settings

from copack.approx import ExitReason, pack_approx
from copack.exact import exhaustive_opt
from copack.pack_core import evaluate
from copack.workload import SpeedupProfile, Task, Workload

from randgen import random_workload, workloads


def test_single_task_reaches_all_processors():
    w = Workload(4, (Task("a", SpeedupProfile((8.0, 4.0, 3.0, 2.0))),))
    s, trace = pack_approx(w, 4)
    assert s.total_cost == 2.0
    assert trace.exit_reason is ExitReason.MAX_TASK_AT_P
    assert [r.j_star for r in trace.records] == [0, 0, 0, 0]


def test_exits_when_work_dominates():
    # many identical flat tasks: the average load beats the longest task at once
    w = Workload(2, tuple(Task(f"t{i}", SpeedupProfile((1.0, 1.0))) for i in range(5)))
    s, trace = pack_approx(w, 2)
    assert trace.exit_reason is ExitReason.WORK_EXCEEDS_TMAX
    assert len(trace.records) == 1
    assert s.total_cost == 3.0


@settings(max_examples=150, deadline=None)
@given(workloads(max_n=6, max_p=6))
def test_trace_invariants(w):
    s, trace = pack_approx(w, w.p)
    evaluate(w, s, w.p)
    recs = trace.records
    assert recs[0].iteration == 0
    for a, b in zip(recs, recs[1:]):
        assert b.a_tot >= a.a_tot - 1e-9 * a.a_tot
        assert b.t_max <= a.t_max
    for r in recs:
        assert r.cost <= 3 * max(r.t_max, r.a_tot / w.p) * (1 + 1e-12)
    assert s.total_cost == min(r.cost for r in recs)
    assert trace.best_cost == s.total_cost


@settings(max_examples=100, deadline=None)
@given(workloads(max_n=6, max_p=6))
def test_three_approximation(w):
    s, _ = pack_approx(w, w.p)
    _, opt = exhaustive_opt(w, w.p)
    assert s.total_cost <= 3 * opt


@settings(max_examples=100, deadline=None)
@given(workloads(max_n=7, max_p=8))
def test_refine_keeps_packs_and_lowers_cost(w):
    for k in range(1, w.p + 1):
        plain, _ = pack_approx(w, k)
        refined, _ = pack_approx(w, k, refine=True)
        evaluate(w, refined, k)
        assert [pk.ids for pk in refined.packs] == [pk.ids for pk in plain.packs]
        assert refined.total_cost <= plain.total_cost


def test_trace_csv(tmp_path):
    w = random_workload(random.Random(2), 5, 4)
    _, trace = pack_approx(w, 4)
    path = tmp_path / "trace.csv"
    trace.write_csv(path)
    rows = list(csv.DictReader(path.open()))
    assert list(rows[0]) == ["iter", "A_tot", "t_max", "j_star", "cost"]
    assert len(rows) == len(trace.records)
    assert float(rows[-1]["cost"]) == trace.records[-1].cost


def test_bad_k():
    w = random_workload(random.Random(0), 2, 3)
    with pytest.raises(ValueError):
        pack_approx(w, 4)
