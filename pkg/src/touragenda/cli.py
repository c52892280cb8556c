"""Command-line entry point: ``touragenda <subcommand> ...``.

Exit codes: 0 success, 1 domain error (infeasible problem, invalid plan,
malformed input document), 2 usage error. Results go to stdout, diagnostics
to stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import bench, pddl
from .generate import GenSpec, generate
from .model import SCHEMA_VERSION, OccupPref, ProblemError, VisitPref, dump_plan, dump_problem, load_plan, load_problem
from .oracle import MAX_VISITS, oracle_solve
from .scoring import ALL_METRICS, MetricKind, fraction_json, metric, score_report
from .solver import SolveOptions, solve
from .validate import explain, validate


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _emit(text: str, out: str | None) -> None:
    if out and out != "-":
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _metric(name: str) -> MetricKind:
    try:
        return MetricKind(name.lower().replace("'", "prime"))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"unknown metric {name!r}; choose from {', '.join(k.value for k in ALL_METRICS)}"
        ) from None


def _enum(cls):
    def parse(text: str):
        for member in cls:
            if member.value.lower() == text.lower():
                return member
        raise argparse.ArgumentTypeError(f"choose from {', '.join(m.value for m in cls)}")

    return parse


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _metric_list(text: str) -> list[MetricKind]:
    return [_metric(x.strip()) for x in text.split(",") if x.strip()]


# ------------------------------------------------------------------ commands


def cmd_gen(args) -> int:
    spec = GenSpec(seed=args.seed, n_visits=args.n, horizon=args.horizon,
                   pref_visits=args.pref_visits, pref_occup=args.pref_occup)
    _emit(dump_problem(generate(spec)), args.output)
    return 0


def _solve_opts(args) -> SolveOptions:
    return SolveOptions(duration_grid=args.grid, node_limit=args.node_limit,
                        time_limit=args.time_limit, seed=args.seed)


def cmd_solve(args) -> int:
    problem = load_problem(_read(args.input))
    result = solve(problem, args.metric, _solve_opts(args))
    _emit(_json(result.to_dict()), args.output)
    return 0


def cmd_oracle(args) -> int:
    problem = load_problem(_read(args.input))
    result = oracle_solve(problem, args.metric, args.grid, args.max_visits)
    _emit(_json(result.to_dict()), args.output)
    return 0


def cmd_score(args) -> int:
    problem = load_problem(_read(args.input))
    plan = load_plan(_read(args.plan))
    violations = validate(problem, plan)
    doc = score_report(problem, plan)
    if args.metric is not None:
        doc = {"metric": args.metric.value, "value": fraction_json(metric(problem, plan, args.metric)), **doc}
    doc["violations"] = [v.to_dict() for v in violations]
    _emit(_json(doc), args.output)
    if violations:
        print(f"warning: plan has {len(violations)} violation(s); scores describe an infeasible plan",
              file=sys.stderr)
    return 0


def cmd_validate(args) -> int:
    problem = load_problem(_read(args.input))
    plan = load_plan(_read(args.plan))
    violations = validate(problem, plan)
    _emit(_json({"valid": not violations, "violations": [v.to_dict() for v in violations]}), args.output)
    return 1 if violations else 0


def cmd_explain(args) -> int:
    problem = load_problem(_read(args.input))
    plan = load_plan(_read(args.plan))
    _emit(explain(problem, plan), args.output)
    return 0


def cmd_export_pddl(args) -> int:
    if args.input is None:
        if args.out_dir:
            path = Path(args.out_dir) / "domain.pddl"
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(pddl.export_domain())
            print(_json({"domain": str(path)}), end="")
        else:
            sys.stdout.write(pddl.export_domain())
        return 0
    problem = load_problem(_read(args.input))
    text = pddl.export_problem(problem, args.metric)
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        dom = out / "domain.pddl"
        prob = out / f"problem-{pddl._pddl_name(problem.name or 'tour')}.pddl"
        dom.write_text(pddl.export_domain())
        prob.write_text(text)
        print(_json({"domain": str(dom), "problem": str(prob)}), end="")
    else:
        sys.stdout.write(text)
    return 0


def cmd_import_plan(args) -> int:
    problem = load_problem(_read(args.input))
    plan = pddl.import_plan_trace(problem, _read(args.trace))
    _emit(dump_plan(plan), args.output)
    if args.check:
        violations = validate(problem, plan)
        for v in violations:
            print(f"{v.code.value}: {v.detail}", file=sys.stderr)
        return 1 if violations else 0
    return 0


def cmd_bench(args) -> int:
    report = bench.run_suite(
        seed=args.seed, sizes=args.sizes, horizons=args.horizons, metric_set=args.metrics,
        instances_per_combo=args.per_combo, time_limit=args.time_limit, grid=args.grid,
        workers=args.workers, out_dir=args.out_dir,
    )
    w = csv.DictWriter(sys.stdout, fieldnames=bench.AGG_FIELDS, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for row in report.aggregates():
        w.writerow({k: ("" if row.get(k) is None else row[k]) for k in bench.AGG_FIELDS})
    timeouts = sum(r["status"] == "timeout" for r in report.rows)
    if timeouts:
        print(f"{timeouts} solve(s) hit the time limit", file=sys.stderr)
    return 0


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="touragenda", description="Tourist agenda planning with travel-style preferences.")
    p.add_argument("--version", action="version", version=f"touragenda schema {SCHEMA_VERSION}")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    def io(sp, plan=False):
        sp.add_argument("-i", "--input", required=True, help="problem JSON file, or - for stdin")
        if plan:
            sp.add_argument("-p", "--plan", required=True, help="plan JSON file, or - for stdin")
        sp.add_argument("-o", "--output", help="write here instead of stdout")

    g = sub.add_parser("gen", help="generate a random problem")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--n", type=int, default=5, help="number of POIs")
    g.add_argument("--horizon", type=int, default=180, help="route length in minutes")
    g.add_argument("--pref-visits", type=_enum(VisitPref), default=VisitPref.INDIF)
    g.add_argument("--pref-occup", type=_enum(OccupPref), default=OccupPref.INDIF)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    for name, func, doc in (("solve", cmd_solve, "optimal plan by branch and bound"),
                            ("oracle", cmd_oracle, "optimal plan by exhaustive enumeration")):
        s = sub.add_parser(name, help=doc)
        io(s)
        s.add_argument("--metric", type=_metric, default=MetricKind.M1)
        s.add_argument("--grid", type=int, default=5 if name == "solve" else 10,
                       help="duration step in minutes")
        if name == "solve":
            s.add_argument("--time-limit", type=float, help="seconds")
            s.add_argument("--node-limit", type=int)
            s.add_argument("--seed", type=int, help="shuffle the branching order")
        else:
            s.add_argument("--max-visits", type=int, default=MAX_VISITS)
        s.set_defaults(func=func)

    s = sub.add_parser("score", help="penalties, metrics and evaluation measures of a plan")
    io(s, plan=True)
    s.add_argument("--metric", type=_metric)
    s.set_defaults(func=cmd_score)

    s = sub.add_parser("validate", help="list constraint violations of a plan")
    io(s, plan=True)
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("explain", help="print a plan as a timeline table")
    io(s, plan=True)
    s.set_defaults(func=cmd_explain)

    s = sub.add_parser("export-pddl", help="write the PDDL domain and, with -i, a problem")
    s.add_argument("-i", "--input", help="problem JSON; omit to print only the domain")
    s.add_argument("--metric", type=_metric, default=MetricKind.M1_PRIME)
    s.add_argument("--out-dir", help="write domain.pddl and problem-<name>.pddl here")
    s.set_defaults(func=cmd_export_pddl)

    s = sub.add_parser("import-plan", help="convert a planner trace to plan JSON")
    s.add_argument("-i", "--input", required=True, help="problem JSON")
    s.add_argument("-t", "--trace", required=True, help="trace file, or - for stdin")
    s.add_argument("-o", "--output")
    s.add_argument("--check", action="store_true", help="also validate; exit 1 on violations")
    s.set_defaults(func=cmd_import_plan)

    b = sub.add_parser("bench", help="run the benchmark suite")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--time-limit", type=float, default=60.0, help="seconds per solve")
    b.add_argument("--metrics", type=_metric_list, default=list(ALL_METRICS))
    b.add_argument("--out-dir", default="bench-out")
    b.add_argument("--sizes", type=_int_list, default=[3, 5, 7])
    b.add_argument("--horizons", type=_int_list, default=list(bench.HORIZONS))
    b.add_argument("--per-combo", type=int, default=2)
    b.add_argument("--grid", type=int, default=5)
    b.add_argument("--workers", type=int)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ProblemError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
