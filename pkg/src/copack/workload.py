"""Tasks, speedup profiles and workloads.

A speedup profile stores ``times[j-1]``, the execution time of a task on
``j`` processor slots.  Valid profiles are non-increasing in time and
non-decreasing in work (``j * times[j-1]``).  Profiles are not forced to be
valid at construction so that :func:`validate` can report what is wrong
with an input file; :func:`normalize` repairs them.
"""

from __future__ import annotations

import csv
import enum
import itertools
import json
import math
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .errors import NonPositiveEntry, ParseError, ValidationError

DEFAULT_CORES_PER_SLOT = 8
SERIAL_FRACTIONS = (0.0, 0.04, 0.08, 0.16, 0.32)


class NormalizationWarning(UserWarning):
    """Emitted when a lax load rewrites an invalid profile."""


def _check_duration(value: float, position: int) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        raise NonPositiveEntry(
            f"duration at processor count {position} must be positive and finite, got {value!r}"
        )
    return value


@dataclass(frozen=True)
class SpeedupProfile:
    times: tuple[float, ...]

    def __post_init__(self):
        times = tuple(_check_duration(t, j) for j, t in enumerate(self.times, start=1))
        if not times:
            raise NonPositiveEntry("a speedup profile needs at least one duration")
        object.__setattr__(self, "times", times)

    @property
    def p(self) -> int:
        return len(self.times)

    def time(self, procs: int) -> float:
        """Execution time on ``procs`` slots (1-based)."""
        return self.times[procs - 1]

    def work(self, procs: int) -> float:
        return procs * self.times[procs - 1]


@dataclass(frozen=True)
class Task:
    id: str
    profile: SpeedupProfile

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise ValueError("task id must be a non-empty string")


@dataclass(frozen=True)
class Workload:
    p: int
    tasks: tuple[Task, ...]
    cores_per_slot: int = DEFAULT_CORES_PER_SLOT

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))
        if self.p < 1:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if not self.tasks:
            raise ValueError("a workload needs at least one task")
        seen = set()
        for task in self.tasks:
            if task.id in seen:
                raise ValueError(f"duplicate task id {task.id!r}")
            seen.add(task.id)
            if task.profile.p != self.p:
                raise ValueError(
                    f"task {task.id!r} has {task.profile.p} durations, expected p={self.p}"
                )

    @property
    def n(self) -> int:
        return len(self.tasks)

    @property
    def ids(self) -> list[str]:
        return [t.id for t in self.tasks]

    def index_of(self) -> dict[str, int]:
        return {t.id: i for i, t in enumerate(self.tasks)}

    def time_table(self) -> list[tuple[float, ...]]:
        """Row ``i`` holds task ``i``'s durations, indexed by ``procs - 1``."""
        return [t.profile.times for t in self.tasks]

    def subset(self, ids: Iterable[str]) -> "Workload":
        wanted = set(ids)
        return Workload(self.p, tuple(t for t in self.tasks if t.id in wanted), self.cores_per_slot)


@dataclass(frozen=True)
class Violation:
    task_id: str
    j: int
    kind: str  # "time": time goes up with j; "work": work goes down
    left: float
    right: float

    def __str__(self):
        if self.kind == "time":
            return (f"task {self.task_id}: time increases from j={self.j} to j={self.j + 1} "
                    f"({self.left!r} -> {self.right!r})")
        return (f"task {self.task_id}: work decreases from j={self.j} to j={self.j + 1} "
                f"({self.left!r} -> {self.right!r})")


def profile_violations(task_id: str, times: Sequence[float]) -> list[Violation]:
    out = []
    for j in range(1, len(times)):
        t_j, t_next = times[j - 1], times[j]
        if t_next > t_j:
            out.append(Violation(task_id, j, "time", t_j, t_next))
        w_j, w_next = j * t_j, (j + 1) * t_next
        if w_j > w_next:
            out.append(Violation(task_id, j, "work", w_j, w_next))
    return out


def validate(workload: Workload) -> list[Violation]:
    """Every (task, j) pair breaking monotone time or monotone work."""
    violations = []
    for task in workload.tasks:
        violations.extend(profile_violations(task.id, task.profile.times))
    return violations


def normalize(raw: Sequence[float]) -> SpeedupProfile:
    """Smallest pointwise change of ``raw`` that makes it a valid profile.

    Times are first clamped to their running minimum, then each entry is
    raised just enough that work does not decrease.  A valid input is
    returned unchanged, so the function is idempotent.
    """
    times = [_check_duration(t, j) for j, t in enumerate(raw, start=1)]
    if not times:
        raise NonPositiveEntry("a speedup profile needs at least one duration")
    times = list(itertools.accumulate(times, min))
    for j in range(1, len(times)):
        floor_work = j * times[j - 1]
        if (j + 1) * times[j] < floor_work:
            x = floor_work / (j + 1)
            # the float check decides validity, so step to the least passing value
            while (j + 1) * x < floor_work:
                x = math.nextafter(x, math.inf)
            while x > 0 and (j + 1) * math.nextafter(x, 0.0) >= floor_work:
                x = math.nextafter(x, 0.0)
            times[j] = x
    return SpeedupProfile(tuple(times))


# --------------------------------------------------------------------------
# synthetic workloads


class SeqForm(str, enum.Enum):
    LINEAR = "LINEAR"
    NLOGN = "NLOGN"
    QUADRATIC = "QUADRATIC"
    CUBIC = "CUBIC"

    def sequential_time(self, m: float, c: float) -> float:
        if self is SeqForm.LINEAR:
            return c * m
        if self is SeqForm.NLOGN:
            return c * m * math.log2(m)
        if self is SeqForm.QUADRATIC:
            return c * m ** 2
        return c * m ** 3


class KappaForm(str, enum.Enum):
    LOG2Q = "LOG2Q"
    LOG2Q_SQ = "LOG2Q_SQ"
    QLOG2Q = "QLOG2Q"
    M_OVER_Q_LOG2Q = "M_OVER_Q_LOG2Q"
    SQRT_M_OVER_Q = "SQRT_M_OVER_Q"
    MLOG2Q = "MLOG2Q"

    def overhead(self, m: float, q: int) -> float:
        lq = math.log2(q)
        if self is KappaForm.LOG2Q:
            return lq
        if self is KappaForm.LOG2Q_SQ:
            return lq * lq
        if self is KappaForm.QLOG2Q:
            return q * lq
        if self is KappaForm.M_OVER_Q_LOG2Q:
            return m / q * lq
        if self is KappaForm.SQRT_M_OVER_Q:
            return math.sqrt(m / q)
        return m * lq


@dataclass(frozen=True)
class SyntheticTaskSpec:
    """Parameters of ``t(m, q) = f*t(m,1) + (1-f)*t(m,1)/q + kappa(m, q)``."""

    m: int
    c: float
    seq_form: SeqForm
    f: float
    kappa_form: KappaForm

    def __post_init__(self):
        object.__setattr__(self, "seq_form", SeqForm(self.seq_form))
        object.__setattr__(self, "kappa_form", KappaForm(self.kappa_form))
        if self.m < 1:
            raise ValueError("m must be a positive integer")
        if not self.c > 0:
            raise ValueError("c must be positive")
        if not 0.0 <= self.f <= 1.0:
            raise ValueError("serial fraction f must lie in [0, 1]")

    def time_on_cores(self, q: int) -> float:
        t1 = self.seq_form.sequential_time(self.m, self.c)
        return self.f * t1 + (1 - self.f) * t1 / q + self.kappa_form.overhead(self.m, q)

    def label(self) -> str:
        return f"{self.seq_form.value.lower()}-f{self.f:g}-{self.kappa_form.value.lower()}-m{self.m}"


def generate_synthetic(
    specs: Sequence[SyntheticTaskSpec], p: int, cores_per_slot: int = DEFAULT_CORES_PER_SLOT
) -> Workload:
    """Evaluate each spec at ``q = j * cores_per_slot`` cores for ``j = 1..p`` and normalize."""
    if p < 1 or cores_per_slot < 1:
        raise ValueError("p and cores_per_slot must be >= 1")
    tasks = []
    for idx, spec in enumerate(specs):
        raw = [spec.time_on_cores(j * cores_per_slot) for j in range(1, p + 1)]
        tasks.append(Task(f"s{idx:03d}-{spec.label()}", normalize(raw)))
    return Workload(p, tuple(tasks), cores_per_slot)


M_LADDER = tuple(2 ** e for e in range(10, 17))
# Preset tasks share one sequential time; c is solved per task from it.
# At this scale the overhead terms are corrections, not the bulk of the time.
PRESET_SEQUENTIAL_TIME = float(2 ** 30)


def _combinations() -> list[tuple[SeqForm, float, KappaForm]]:
    return list(itertools.product(SeqForm, SERIAL_FRACTIONS, KappaForm))


def _preset(count: int) -> list[SyntheticTaskSpec]:
    combos = _combinations()
    specs = []
    for idx in range(count):
        seq, f, kappa = combos[idx % len(combos)]
        m = M_LADDER[idx % len(M_LADDER)]
        c = PRESET_SEQUENTIAL_TIME / seq.sequential_time(m, 1.0)
        specs.append(SyntheticTaskSpec(m, c, seq, f, kappa))
    return specs


def workload_ii_preset() -> list[SyntheticTaskSpec]:
    """65 specs, meant for p=16 slots of 8 cores."""
    return _preset(65)


def workload_iii_preset() -> list[SyntheticTaskSpec]:
    """260 specs, meant for p=32 slots of 8 cores."""
    return _preset(260)


def fixture_i() -> Workload:
    """Bundled 10-task, 16-slot stand-in for a measured application mix."""
    text = resources.files("copack.data").joinpath("fixture_i.json").read_text()
    return _from_document(json.loads(text), strict=True)


PRESETS = {
    "workload-ii": lambda: generate_synthetic(workload_ii_preset(), 16),
    "workload-iii": lambda: generate_synthetic(workload_iii_preset(), 32),
    "fixture-i": fixture_i,
}


def preset(name: str) -> Workload:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


# --------------------------------------------------------------------------
# file formats


def to_document(workload: Workload) -> dict:
    return {
        "p": workload.p,
        "cores_per_slot": workload.cores_per_slot,
        "tasks": [{"id": t.id, "times": list(t.profile.times)} for t in workload.tasks],
    }


def save(workload: Workload, path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["id"] + [f"t{j}" for j in range(1, workload.p + 1)])
            for t in workload.tasks:
                writer.writerow([t.id] + [repr(x) for x in t.profile.times])
        return
    path.write_text(json.dumps(to_document(workload), indent=2) + "\n")


def _finish(p: int, cores_per_slot: int, rows: list[tuple[str, list[float], int | None]], strict: bool) -> Workload:
    ids = set()
    tasks = []
    problems = []
    for task_id, times, line in rows:
        if task_id in ids:
            raise ParseError(f"duplicate task id {task_id!r}", line=line, field="id")
        ids.add(task_id)
        if len(times) != p:
            raise ParseError(f"task {task_id!r} has {len(times)} durations, expected p={p}",
                             line=line, field="times")
        try:
            profile = SpeedupProfile(tuple(times))
        except NonPositiveEntry as exc:
            raise ParseError(str(exc), line=line, field="times") from exc
        bad = profile_violations(task_id, profile.times)
        if bad:
            problems.extend(bad)
            if not strict:
                profile = normalize(profile.times)
                warnings.warn(f"task {task_id!r}: profile normalized ({len(bad)} violation(s))",
                              NormalizationWarning, stacklevel=3)
        tasks.append(Task(task_id, profile))
    if problems and strict:
        raise ValidationError(problems)
    if not tasks:
        raise ParseError("workload has no tasks", field="tasks")
    return Workload(p, tuple(tasks), cores_per_slot)


def _from_document(doc, strict: bool) -> Workload:
    if not isinstance(doc, dict):
        raise ParseError("top-level value must be an object")
    p = doc.get("p")
    if not isinstance(p, int) or isinstance(p, bool) or p < 1:
        raise ParseError("p must be a positive integer", field="p")
    cps = doc.get("cores_per_slot", DEFAULT_CORES_PER_SLOT)
    if not isinstance(cps, int) or isinstance(cps, bool) or cps < 1:
        raise ParseError("cores_per_slot must be a positive integer", field="cores_per_slot")
    raw_tasks = doc.get("tasks")
    if not isinstance(raw_tasks, list):
        raise ParseError("tasks must be a list", field="tasks")
    rows = []
    for idx, entry in enumerate(raw_tasks):
        if not isinstance(entry, dict) or not isinstance(entry.get("id"), str) or not entry["id"]:
            raise ParseError(f"task #{idx} needs a non-empty string id", field=f"tasks[{idx}].id")
        times = entry.get("times")
        if not isinstance(times, list) or not all(
                isinstance(x, (int, float)) and not isinstance(x, bool) for x in times):
            raise ParseError(f"task #{idx} times must be a list of numbers", field=f"tasks[{idx}].times")
        rows.append((entry["id"], [float(x) for x in times], None))
    return _finish(p, cps, rows, strict)


def _load_csv(path: Path, strict: bool, cores_per_slot: int) -> Workload:
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty CSV file", line=1) from None
        header = [h.strip() for h in header]
        expected = ["id"] + [f"t{j}" for j in range(1, len(header))]
        if len(header) < 2 or header != expected:
            raise ParseError("header must be id,t1,...,tp", line=1)
        p = len(header) - 1
        rows = []
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            task_id = row[0].strip()
            if not task_id:
                raise ParseError("empty task id", line=line, field="id")
            try:
                times = [float(c) for c in row[1:]]
            except ValueError as exc:
                raise ParseError(str(exc), line=line, field="times") from None
            rows.append((task_id, times, line))
    return _finish(p, cores_per_slot, rows, strict)


def load(path, strict: bool = True, cores_per_slot: int = DEFAULT_CORES_PER_SLOT) -> Workload:
    """Read a workload from JSON, or from a CSV profile matrix when the suffix is ``.csv``.

    In strict mode invalid profiles raise :class:`ValidationError`; otherwise
    they are normalized and a :class:`NormalizationWarning` is issued.
    ``cores_per_slot`` only applies to CSV input, which does not carry it.
    """
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return _load_csv(path, strict, cores_per_slot)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    return _from_document(doc, strict)
