import json
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from copack import workload as wl
from copack.errors import NonPositiveEntry, ParseError, ValidationError
from copack.workload import SpeedupProfile, SyntheticTaskSpec, Task, Workload

from randgen import random_workload

positive = st.floats(min_value=1e-6, max_value=1e9, allow_nan=False, allow_infinity=False)


def test_profile_rejects_non_positive():
    with pytest.raises(NonPositiveEntry):
        SpeedupProfile((3.0, 0.0))
    with pytest.raises(NonPositiveEntry):
        SpeedupProfile((3.0, math.nan))
    with pytest.raises(NonPositiveEntry):
        SpeedupProfile(())


def test_workload_rejects_bad_shapes():
    prof = SpeedupProfile((2.0, 1.0))
    with pytest.raises(ValueError, match="duplicate"):
        Workload(2, (Task("a", prof), Task("a", prof)))
    with pytest.raises(ValueError, match="expected p=3"):
        Workload(3, (Task("a", prof),))


def test_validate_reports_both_kinds():
    w = Workload(3, (Task("up", SpeedupProfile((4.0, 5.0, 3.0))),
                     Task("superlinear", SpeedupProfile((4.0, 1.0, 1.0)))))
    kinds = {(v.task_id, v.j, v.kind) for v in wl.validate(w)}
    assert ("up", 1, "time") in kinds
    assert ("superlinear", 1, "work") in kinds


@given(st.lists(positive, min_size=1, max_size=20))
def test_normalize_yields_valid_profile(raw):
    prof = wl.normalize(raw)
    assert wl.profile_violations("x", prof.times) == []
    # clamping only lowers to the running minimum; the work repair only raises from there
    running = list(raw)
    for j in range(1, len(running)):
        running[j] = min(running[j], running[j - 1])
    assert all(a >= b for a, b in zip(prof.times, running))
    assert prof.times[0] == raw[0]


@given(st.lists(positive, min_size=1, max_size=20))
def test_normalize_idempotent(raw):
    once = wl.normalize(raw)
    assert wl.normalize(once.times) == once


def test_normalize_keeps_valid_input():
    rng = random.Random(5)
    for _ in range(50):
        w = random_workload(rng, 3, 9)
        for t in w.tasks:
            assert wl.normalize(t.profile.times).times == t.profile.times


def test_synthetic_model_values():
    spec = SyntheticTaskSpec(1024, 2.0, "LINEAR", 0.25, "LOG2Q")
    t1 = 2.0 * 1024
    assert spec.time_on_cores(8) == pytest.approx(0.25 * t1 + 0.75 * t1 / 8 + 3.0)
    assert wl.SeqForm.NLOGN.sequential_time(8, 1.0) == 24.0
    assert wl.KappaForm.SQRT_M_OVER_Q.overhead(64, 4) == 4.0
    assert wl.KappaForm.MLOG2Q.overhead(10, 8) == 30.0


def test_generate_uses_slot_cores():
    spec = SyntheticTaskSpec(1024, 1.0, "QUADRATIC", 0.0, "LOG2Q")
    w = wl.generate_synthetic([spec], 4, cores_per_slot=8)
    assert w.p == 4 and w.cores_per_slot == 8
    assert wl.validate(w) == []
    # perfect scaling apart from a small overhead: valid times close to t1/(8j)
    assert w.tasks[0].profile.times[1] == pytest.approx(1024 ** 2 / 16 + 4.0)


@pytest.mark.parametrize("name,n,p", [("workload-ii", 65, 16), ("workload-iii", 260, 32),
                                      ("fixture-i", 10, 16)])
def test_presets_are_valid(name, n, p):
    w = wl.preset(name)
    assert (w.n, w.p) == (n, p)
    assert wl.validate(w) == []
    assert len(set(w.ids)) == n


def test_preset_covers_all_model_combinations():
    specs = wl.workload_iii_preset()
    combos = {(s.seq_form, s.f, s.kappa_form) for s in specs}
    assert len(combos) == 4 * 5 * 6
    assert {s.m for s in specs} == set(wl.M_LADDER)


def test_unknown_preset():
    with pytest.raises(ValueError, match="unknown preset"):
        wl.preset("workload-iv")


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([".json", ".csv"]))
def test_save_load_roundtrip(tmp_path_factory, seed, suffix):
    w = random_workload(random.Random(seed), 4, 5)
    path = tmp_path_factory.mktemp("rt") / f"w{suffix}"
    wl.save(w, path)
    assert wl.load(path) == w


def test_strict_and_lax_load(tmp_path):
    doc = {"p": 3, "tasks": [{"id": "a", "times": [4.0, 5.0, 1.0]}]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(ValidationError) as info:
        wl.load(path)
    assert {v.kind for v in info.value.violations} == {"time", "work"}
    with pytest.warns(wl.NormalizationWarning):
        w = wl.load(path, strict=False)
    assert wl.validate(w) == []


def test_parse_errors(tmp_path):
    p = tmp_path / "w.json"
    p.write_text('{"p": 2, "tasks": [{"id": "a", "times": [1.0]}]}')
    with pytest.raises(ParseError, match="expected p=2"):
        wl.load(p)
    p.write_text("{not json")
    with pytest.raises(ParseError) as info:
        wl.load(p)
    assert info.value.line == 1
    c = tmp_path / "w.csv"
    c.write_text("id,t1,t2\na,2,1\nb,2,x\n")
    with pytest.raises(ParseError) as info:
        wl.load(c)
    assert info.value.line == 3
    c.write_text("id,t1,t2\na,2,-1\n")
    with pytest.raises(ParseError, match="positive"):
        wl.load(c)
    c.write_text("name,t1\na,1\n")
    with pytest.raises(ParseError, match="header"):
        wl.load(c)
