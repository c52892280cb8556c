"""Benchmark suite: generate instances, solve them under each metric, aggregate.

Rows are produced per (instance, metric). Aggregates follow two layouts:
averages per occupation preference and per visit-count preference, and
the 3x3 preference grid used for the nine-panel figures.
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from statistics import fmean

from .generate import GenSpec, generate
from .model import OccupPref, VisitPref, load_problem, problem_to_dict
from .scoring import ALL_METRICS, MetricKind, eval_occupation, eval_u1_star
from .solver import InfeasibleError, SolveOptions, solve

HORIZONS = (180, 300, 540)
MEASURES = ("occup", "n_visits", "u1_star", "u2", "u3", "elapsed_ms")

RESULT_FIELDS = [
    "instance", "n", "horizon", "pref_visits", "pref_occup", "metric", "status",
    "objective", "n_visits", "occup", "u1_star", "u2", "u3",
    "p_u1", "p_u2", "p_u3", "p_journey", "p_visits", "p_occup",
    "free_time", "nodes", "elapsed_ms",
]
AGG_FIELDS = ["table", "pref_visits", "pref_occup", "metric", "count", *MEASURES]


@dataclass
class SuiteReport:
    instances: list[GenSpec] = field(default_factory=list)
    rows: list[dict] = field(default_factory=list)

    def aggregates(self) -> list[dict]:
        return aggregate(self.rows)


def suite_specs(seed: int, sizes, horizons=HORIZONS, instances_per_combo: int = 2) -> list[GenSpec]:
    """Every (size, horizon, preference pair, copy) combination, in a fixed order."""
    specs = []
    k = 0
    for n, h, pv, po, _ in product(sizes, horizons, VisitPref, OccupPref, range(instances_per_combo)):
        specs.append(GenSpec(seed=seed * 100_000 + k, n_visits=n, horizon=h, pref_visits=pv, pref_occup=po))
        k += 1
    return specs


def _num(x) -> float:
    return float(x)


def solve_instance(problem_doc: dict, metrics: list[str], grid: int, time_limit: float | None) -> list[dict]:
    """Solve one instance under each metric; picklable for the worker pool."""
    problem = load_problem(problem_doc)
    vmax = problem.vmax
    route = problem.route
    out = []
    for name in metrics:
        kind = MetricKind(name)
        row = dict(
            instance=problem.name, n=len(problem.visits), horizon=problem.total_time,
            pref_visits=route.pref_visits.value, pref_occup=route.pref_occup.value, metric=kind.value,
        )
        try:
            res = solve(problem, kind, SolveOptions(duration_grid=grid, time_limit=time_limit))
        except InfeasibleError as e:
            row.update(status="infeasible" if e.proven else "timeout")
            out.append(row)
            continue
        b = res.breakdown
        row.update(
            status="optimal" if res.proven_optimal else "timeout",
            objective=_num(res.objective),
            n_visits=res.n_visits,
            occup=_num(eval_occupation(problem, res.plan)),
            u1_star=_num(eval_u1_star(problem, res.plan)),
            u2=_num(b.u2) / vmax,
            u3=_num(b.u3) / vmax,
            p_u1=_num(b.p_u1), p_u2=_num(b.p_u2), p_u3=_num(b.p_u3),
            p_journey=_num(b.p_journey), p_visits=_num(b.p_visits), p_occup=_num(b.p_occup),
            free_time=b.free_time, nodes=res.nodes_explored, elapsed_ms=res.elapsed_ms,
        )
        out.append(row)
    return out


def run_suite(
    seed: int,
    sizes=(3, 5, 7),
    horizons=HORIZONS,
    metric_set=ALL_METRICS,
    instances_per_combo: int = 2,
    time_limit: float | None = 60.0,
    grid: int = 5,
    workers: int | None = None,
    out_dir: str | os.PathLike | None = None,
) -> SuiteReport:
    """Generate and solve the suite; rows come back in instance order."""
    specs = suite_specs(seed, sizes, horizons, instances_per_combo)
    metrics = [MetricKind(m).value for m in metric_set]
    docs = [problem_to_dict(generate(s)) for s in specs]
    if workers is None:
        workers = min(len(docs), os.cpu_count() or 1)
    if workers <= 1 or len(docs) <= 1:
        per_instance = [solve_instance(d, metrics, grid, time_limit) for d in docs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(solve_instance, d, metrics, grid, time_limit) for d in docs]
            per_instance = [f.result() for f in futures]
    report = SuiteReport(instances=specs, rows=[r for rows in per_instance for r in rows])
    if out_dir is not None:
        write_outputs(report, docs, out_dir)
    return report


def _group_mean(rows: list[dict]) -> dict:
    solved = [r for r in rows if "objective" in r]
    out = {"count": len(solved)}
    for m in MEASURES:
        out[m] = fmean(r[m] for r in solved) if solved else None
    return out


def aggregate(rows: list[dict]) -> list[dict]:
    """Averages by occupation preference, by visit preference and by preference pair."""
    metrics = list(dict.fromkeys(r["metric"] for r in rows))
    out = []
    for po, m in product(OccupPref, metrics):
        sel = [r for r in rows if r["pref_occup"] == po.value and r["metric"] == m]
        if sel:
            out.append(dict(table="by_occup", pref_visits="*", pref_occup=po.value, metric=m, **_group_mean(sel)))
    for pv, m in product(VisitPref, metrics):
        sel = [r for r in rows if r["pref_visits"] == pv.value and r["metric"] == m]
        if sel:
            out.append(dict(table="by_visits", pref_visits=pv.value, pref_occup="*", metric=m, **_group_mean(sel)))
    for pv, po, m in product(VisitPref, OccupPref, metrics):
        sel = [r for r in rows if r["pref_visits"] == pv.value and r["pref_occup"] == po.value and r["metric"] == m]
        if sel:
            out.append(dict(table="grid", pref_visits=pv.value, pref_occup=po.value, metric=m, **_group_mean(sel)))
    return out


def lookup(aggs: list[dict], table: str, metric: str, pref_visits: str = "*", pref_occup: str = "*") -> dict | None:
    for a in aggs:
        if (a["table"], a["metric"], a["pref_visits"], a["pref_occup"]) == (table, metric, pref_visits, pref_occup):
            return a
    return None


def _write_csv(path: Path, fields: list[str], rows: list[dict]) -> None:
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields, extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow({k: ("" if r.get(k) is None else r.get(k)) for k in fields})


def write_outputs(report: SuiteReport, docs: list[dict], out_dir, figures: bool = True) -> list[Path]:
    """Write instances/*.json, results.csv, aggregates.csv and the figure PNGs."""
    out = Path(out_dir)
    (out / "instances").mkdir(parents=True, exist_ok=True)
    for doc in docs:
        (out / "instances" / f"{doc['name']}.json").write_text(json.dumps(doc, indent=2) + "\n")
    written = [out / "results.csv", out / "aggregates.csv"]
    _write_csv(written[0], RESULT_FIELDS, report.rows)
    _write_csv(written[1], AGG_FIELDS, report.aggregates())
    if figures and report.rows:
        from .plots import render_figures

        written += render_figures(report.aggregates(), out)
    return written


__all__ = [
    "SuiteReport",
    "aggregate",
    "lookup",
    "run_suite",
    "solve_instance",
    "suite_specs",
    "write_outputs",
]
