"""Acceptance criteria, each checked at its stated tolerance."""

import random
import time
from itertools import product

import pytest

from touragenda.bench import lookup, run_suite
from touragenda.generate import GenSpec, generate
from touragenda.model import OccupPref, VisitPref, free_time, load_problem
from touragenda.oracle import oracle_solve_all
from touragenda.pddl import export_domain, export_problem
from touragenda.scoring import ALL_METRICS, MetricKind, OccupVariant, breakdown, metric
from touragenda.solver import InfeasibleError, SolveOptions, solve
from touragenda.validate import validate

from .conftest import random_plan
from .test_pddl import MOVE_ACTION, VISIT_ACTION, _squash, two_poi_problem
from .test_validate import BASE_PLAN, BASE_PROBLEM, MUTATIONS


def _close(got, want, tol):
    return abs(float(got) - want) <= tol + 1e-12


def _check(values: dict, tol: float) -> tuple[bool, str]:
    bad = {k: (round(float(g), 4), w) for k, (g, w) in values.items() if not _close(g, w, tol)}
    shown = ", ".join(f"{k}={float(g):.4f}/{w}" for k, (g, w) in values.items())
    return not bad, shown + (f"; off: {sorted(bad)}" if bad else "")


def test_criterion_1_plan1_penalties(day, day_plans, criterion):
    b = breakdown(day, day_plans[1])
    ok, detail = _check({
        "P_U1": (b.p_u1, 0.61), "P_U2": (b.p_u2, 0.37), "P_U3": (b.p_u3, 0.03),
        "P_journey": (b.p_journey, 0.13), "P_visits": (b.p_visits, 0.33), "P_occup": (b.p_occup, 0.0),
    }, 0.01)
    criterion("criterion 1 (plan-1 penalties +-0.01)", ok, f"{detail}; free_time={b.free_time}")


def test_criterion_2_metric_vectors(day, day_plans, criterion):
    expected = {
        MetricKind.M1: (1.09, 1.54, 1.18, 1.28),
        MetricKind.M2: (0.7, 1.61, 1.34, 1.48),
        MetricKind.M3: (0.51, 0.96, 1.2, 1.28),
    }
    values = {
        f"{kind.label}[{n}]": (metric(day, day_plans[n], kind), want[n - 1])
        for kind, want in expected.items() for n in range(1, 5)
    }
    ok, detail = _check(values, 0.05)
    criterion("criterion 2 (four-plan M1/M2/M3 +-0.05)", ok, detail)


def test_criterion_3_plan4_penalties(day, day_plans, criterion):
    b = breakdown(day, day_plans[4])
    ok, detail = _check({
        "P_U1": (b.p_u1, 0.14), "P_U2": (b.p_u2, 0.57), "P_U3": (b.p_u3, 0.15), "P_visits": (b.p_visits, 0.83),
    }, 0.01)
    criterion("criterion 3 (plan-4 penalties +-0.01)", ok, detail)


def equivalence_specs(count=200):
    combos = list(product(VisitPref, OccupPref))
    out = []
    for i in range(count):
        pv, po = combos[(i // 9) % 9]
        out.append(GenSpec(seed=7000 + i, n_visits=(3, 4, 5)[i % 3], horizon=(180, 300, 540)[(i // 3) % 3],
                           pref_visits=pv, pref_occup=po))
    return out


def test_criterion_4_oracle_equivalence(criterion):
    t0 = time.perf_counter()
    mismatches = []
    compared = 0
    for spec in equivalence_specs():
        problem = generate(spec)
        try:
            oracle = oracle_solve_all(problem, grid=10)
        except InfeasibleError:
            oracle = None
        for kind in ALL_METRICS:
            try:
                got = solve(problem, kind, SolveOptions(duration_grid=10)).objective
            except InfeasibleError:
                got = None
            want = oracle[kind].objective if oracle else None
            compared += 1
            if got != want:
                mismatches.append((spec.name, kind.value, got, want))
    elapsed = time.perf_counter() - t0
    ok = not mismatches and elapsed < 600
    criterion("criterion 4 (solver == oracle, 200 instances x 4 metrics)", ok,
              f"{compared} comparisons, {len(mismatches)} mismatches, {elapsed:.1f}s {mismatches[:3]}")


def test_criterion_5_validator_mutations(criterion):
    problem = load_problem(BASE_PROBLEM)
    base_clean = validate(problem, BASE_PLAN) == []
    wrong = {}
    for code, mutate in MUTATIONS.items():
        found = {v.code for v in validate(problem, mutate(BASE_PLAN))}
        if found != {code}:
            wrong[code.value] = sorted(c.value for c in found)
    criterion("criterion 5 (each mutation -> exactly its code)", base_clean and not wrong,
              f"{len(MUTATIONS)} codes, base valid={base_clean}, wrong={wrong}")


def test_criterion_6_pddl_fragments(criterion):
    few = export_problem(two_poi_problem(), MetricKind.M1_PRIME)
    ten = export_problem(two_poi_problem(n_extra=8), MetricKind.M1_PRIME)
    domain = _squash(export_domain())
    checks = {
        "(/ (* 250 (is-violated p1)) 532)": "(/ (* 250 (is-violated p1)) 532)" in few,
        "(/ (transport_time) 540)": "(/ (transport_time) 540)" in few,
        "(/ (number_visit_location) 10)": "(/ (number_visit_location) 10)" in ten,
        "move action": _squash(MOVE_ACTION) in domain,
        "visit action": _squash(VISIT_ACTION) in domain,
    }
    missing = [k for k, v in checks.items() if not v]
    criterion("criterion 6 (PDDL literal fragments)", not missing, f"missing={missing}")


@pytest.mark.slow
def test_criterion_7_benchmark_trends(tmp_path, criterion):
    report = run_suite(2016, sizes=(3, 5, 7), time_limit=60.0, grid=5, out_dir=tmp_path)
    aggs = report.aggregates()
    metrics = [k.value for k in ALL_METRICS]
    occup = {m: (lookup(aggs, "by_occup", m, pref_occup="High")["occup"],
                 lookup(aggs, "by_occup", m, pref_occup="Low")["occup"]) for m in metrics}
    visits = {m: (lookup(aggs, "by_visits", m, pref_visits="Many")["n_visits"],
                  lookup(aggs, "by_visits", m, pref_visits="Few")["n_visits"]) for m in metrics}
    u2 = {}
    for m in metrics:
        solved = [r["u2"] for r in report.rows if r["metric"] == m and "u2" in r]
        u2[m] = sum(solved) / len(solved)
    a = all(h > lo for h, lo in occup.values())
    b = all(many > few for many, few in visits.values())
    c = max(u2, key=u2.get) == "m2"
    timeouts = sum(r["status"] == "timeout" for r in report.rows)
    detail = (
        f"{len(report.instances)} instances, {timeouts} timeouts; "
        f"(a) occup High>Low {a} {{{', '.join(f'{m}: {h:.3f}>{lo:.3f}' for m, (h, lo) in occup.items())}}}; "
        f"(b) visits Many>Few {b} {{{', '.join(f'{m}: {x:.2f}>{y:.2f}' for m, (x, y) in visits.items())}}}; "
        f"(c) best U2 = {max(u2, key=u2.get)} {{{', '.join(f'{m}: {v:.3f}' for m, v in u2.items())}}}"
    )
    criterion("criterion 7 (benchmark directional trends)", len(report.instances) == 162 and a and b and c, detail)


def test_criterion_8_properties(criterion):
    rng = random.Random(8)
    plans = 0
    out_of_range = 0
    identity_broken = 0
    while plans < 10_000:
        spec = GenSpec(seed=rng.randrange(10**9), n_visits=rng.randint(1, 7),
                       horizon=rng.choice([180, 300, 540]),
                       pref_visits=rng.choice(list(VisitPref)), pref_occup=rng.choice(list(OccupPref)))
        problem = generate(spec)
        for _ in range(20):
            plan = random_plan(problem, rng)
            if plan is None or validate(problem, plan):
                continue
            plans += 1
            for variant in OccupVariant:
                b = breakdown(problem, plan, variant)
                vals = (b.p_u1, b.p_u2, b.p_u3, b.p_journey, b.p_visits, b.p_occup)
                out_of_range += not all(0 <= v <= 1 for v in vals)
            used = sum(v.dur for v in plan.visits) + sum(m.dur for m in plan.moves)
            identity_broken += free_time(problem, plan) + used != problem.total_time
    spec = GenSpec(seed=11, n_visits=6, horizon=540, pref_visits=VisitPref.MANY, pref_occup=OccupPref.LOW)
    same_gen = generate(spec) == generate(spec)
    runs = [solve(generate(spec), k, SolveOptions(duration_grid=10)) for k in ALL_METRICS for _ in range(2)]
    same_solve = all(runs[i].plan == runs[i + 1].plan for i in range(0, len(runs), 2))
    ok = out_of_range == 0 and identity_broken == 0 and same_gen and same_solve
    criterion("criterion 8 (penalty range, free_time identity, determinism)", ok,
              f"{plans} plans, {out_of_range} out of range, {identity_broken} identity breaks, "
              f"generate deterministic={same_gen}, solve deterministic={same_solve}")
