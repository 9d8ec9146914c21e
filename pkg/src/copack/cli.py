"""Command-line entry point: ``copack {validate,generate,solve,sweep,export-ilp}``.

Exit codes: 0 success, 1 invalid input, 2 I/O failure, 3 exhaustive budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import warnings

from . import workload as wl
from .errors import BudgetExceeded, CopackError, ParseError, ValidationError
from .exact import DEFAULT_PARTITION_BUDGET, exact_k2, exhaustive_opt, export_ilp
from .heuristics import HEURISTIC_NAMES, best_of, heuristic_spec
from .metrics import compute_metrics
from .report import DEFAULT_K_VALUES, run_sweep, write_csv, write_json

log = logging.getLogger("copack")

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_BUDGET = 0, 1, 2, 3
EXACT_SOLVERS = ("exhaustive", "exact-k2")


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _default_seed() -> int:
    raw = os.environ.get("COPACK_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"COPACK_SEED must be an integer, got {raw!r}") from None


def _resolve_workload(source: str, strict: bool) -> tuple[wl.Workload, str]:
    if source in wl.PRESETS:
        return wl.preset(source), source
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", wl.NormalizationWarning)
        workload = wl.load(source, strict=strict)
    for w in caught:
        log.warning("%s", w.message)
    stem = os.path.splitext(os.path.basename(source))[0]
    return workload, stem


def _check_k(workload: wl.Workload, ks) -> None:
    bad = [k for k in ks if not 1 <= k <= workload.p]
    if bad:
        raise UsageError(f"k values {bad} outside [1, p={workload.p}]")


def _spec(args, name: str, seed: int):
    return heuristic_spec(name, seed=seed, runs=args.runs, epsilons=args.eps_list)


# --------------------------------------------------------------------------
# subcommands


def cmd_validate(args) -> int:
    path = args.workload
    try:
        workload = wl.load(path, strict=True)
    except ValidationError as exc:
        print(f"{path}: INVALID", file=sys.stdout)
        for v in exc.violations:
            print(f"  task={v.task_id} j={v.j} kind={v.kind}: {v}")
        return EXIT_INVALID
    print(f"{path}: OK ({workload.n} tasks, p={workload.p})")
    return EXIT_OK


def cmd_generate(args) -> int:
    workload = wl.preset(args.preset)
    wl.save(workload, args.out)
    print(f"wrote {args.out}: {workload.n} tasks, p={workload.p}")
    return EXIT_OK


def cmd_solve(args) -> int:
    workload, _ = _resolve_workload(args.workload, args.strict)
    k = args.k
    _check_k(workload, [k])
    seed = args.seed
    out = {"workload": args.workload, "k": k, "heuristic": args.heuristic}
    if args.heuristic == "exhaustive":
        schedule, _ = exhaustive_opt(workload, k, budget=args.budget)
    elif args.heuristic == "exact-k2":
        if k != 2:
            raise UsageError("exact-k2 requires --k 2")
        schedule, _ = exact_k2(workload)
    else:
        spec = _spec(args, args.heuristic, seed)
        result = best_of(spec, workload, k)
        schedule = result.schedule
        out.update(heuristic=spec.name, seed=seed, run_costs=result.run_costs,
                   best_run=result.best_run)
        if result.epsilon is not None:
            out["epsilon"] = result.epsilon
        if args.trace and spec.kind.value == "PACK_APPROX":
            from .approx import pack_approx
            _, trace = pack_approx(workload, k)
            trace.write_csv(args.trace)
    out["schedule"] = schedule.to_dict()
    out["metrics"] = compute_metrics(workload, schedule).to_dict()
    json.dump(out, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def cmd_sweep(args) -> int:
    workload, name = _resolve_workload(args.workload, args.strict)
    ks = args.k if args.k else [k for k in DEFAULT_K_VALUES if k <= workload.p]
    _check_k(workload, ks)
    names = args.heuristic or list(HEURISTIC_NAMES)
    specs = [_spec(args, n, args.seed) for n in names]
    report = run_sweep(workload, name, ks, specs, args.seed)
    os.makedirs(args.out, exist_ok=True)
    write_csv(report, os.path.join(args.out, "report.csv"))
    write_json(report, os.path.join(args.out, "report.json"))
    written = ["report.csv", "report.json"]
    if not args.no_plots:
        from .plotting import plot_report
        written += [p.name for p in plot_report(report, args.out)]
    failed = [r for r in report.rows if r.error]
    for r in failed:
        log.error("%s k=%d failed: %s", r.heuristic, r.k, r.error)
    print(f"{len(report.rows)} rows ({len(failed)} failed) -> {args.out}: {', '.join(written)}")
    return EXIT_OK


def cmd_export_ilp(args) -> int:
    workload, _ = _resolve_workload(args.workload, args.strict)
    _check_k(workload, [args.k])
    model = export_ilp(workload, args.k, args.out)
    print(json.dumps(model.summary()))
    return EXIT_OK


# --------------------------------------------------------------------------


def _add_workload(p, required=True):
    p.add_argument("--workload", required=required,
                   help="workload JSON/CSV path, or a preset name (%s)" % ", ".join(wl.PRESETS))
    group = p.add_mutually_exclusive_group()
    group.add_argument("--strict", dest="strict", action="store_true", default=True,
                       help="reject invalid profiles (default)")
    group.add_argument("--lax", dest="strict", action="store_false",
                       help="normalize invalid profiles with a warning")


def _add_heuristic_opts(p):
    p.add_argument("--seed", type=int, default=None, help="master seed (default: $COPACK_SEED or 0)")
    p.add_argument("--runs", type=int, default=None, help="override the run count of random heuristics")
    p.add_argument("--eps-list", type=_float_list, default=None,
                   help="comma-separated epsilons for pack-by-pack")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="copack", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a workload file's speedup profiles")
    p.add_argument("--workload", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("generate", help="write a preset workload")
    p.add_argument("preset", choices=sorted(wl.PRESETS))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="run one solver and print the schedule as JSON")
    _add_workload(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--heuristic", default="pack-by-pack-9",
                   help="one of %s, or %s" % (", ".join(HEURISTIC_NAMES), ", ".join(EXACT_SOLVERS)))
    p.add_argument("--budget", type=int, default=DEFAULT_PARTITION_BUDGET,
                   help="maximum number of partitions for exhaustive search")
    p.add_argument("--trace", default=None, help="write the pack-approx iteration trace CSV here")
    _add_heuristic_opts(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="run heuristics over pack sizes; write CSV, JSON and figures")
    _add_workload(p)
    p.add_argument("--k", type=_int_list, default=None,
                   help="comma-separated pack sizes (default 2,4,...,16 up to p)")
    p.add_argument("--heuristic", action="append", default=None,
                   help="heuristic name; repeat for several (default: all seven)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--no-plots", action="store_true", help="skip figure rendering")
    _add_heuristic_opts(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("export-ilp", help="write the integer program in CPLEX LP format")
    _add_workload(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_ilp)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = _default_seed()
        if getattr(args, "heuristic", None) and args.command == "sweep":
            args.heuristic = [h for item in args.heuristic for h in item.split(",") if h.strip()]
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"error: BudgetExceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ParseError, ValidationError, UsageError, CopackError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
