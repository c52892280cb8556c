import math
from dataclasses import replace
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from touragenda.generate import GenSpec, generate
from touragenda.model import RESTAURANT, OccupPref, Plan, VisitPref, load_problem
from touragenda.scoring import ALL_METRICS, MetricKind, metric
from touragenda.solver import (
    BranchAndBound,
    InfeasibleError,
    SolveOptions,
    duration_grid,
    schedule_sequence,
    solve,
)
from touragenda.validate import validate

# optimum over the 5-minute grid; the oracle (exhaustive) agrees, see test_oracle
DAY_OPTIMUM = {
    MetricKind.M1: F(1193, 1110),
    MetricKind.M1_PRIME: F(1193, 1110),
    MetricKind.M2: F(41, 60),
    MetricKind.M3: F(59, 120),
}


def test_duration_grid():
    assert duration_grid(50, 150, 50) == [50, 100, 150]
    assert duration_grid(50, 90, 25) == [50, 75, 90]
    assert duration_grid(60, 60, 5) == [60]
    with pytest.raises(ValueError):
        duration_grid(1, 2, 0)


def test_schedule_sequence_reproduces_plan1(day, day_plans):
    plan = schedule_sequence(day, ["V2", RESTAURANT, "V1"], [150, None, 240])
    assert plan.sequence() == day_plans[1].sequence()
    assert [v.t_s for v in plan.visits] == [20, 180, 320]
    assert validate(day, plan) == []


def test_schedule_waits_for_opening(day):
    # V1 opens at 300: arriving at 30 means waiting
    plan = schedule_sequence(day, [RESTAURANT, "V1"], [None, 60])
    assert plan.visits[1].t_s == 320
    plan = schedule_sequence(replace(day, route=replace(day.route, lunch=None)), ["V1"], [60])
    assert plan.moves[0].t_s == 0 and plan.visits[0].t_s == 300


def test_schedule_rejects_impossible_sequences(day):
    with pytest.raises(InfeasibleError):
        schedule_sequence(day, ["V2"], [100])  # lunch missing
    with pytest.raises(InfeasibleError):
        schedule_sequence(day, ["V1", RESTAURANT], [60, None])  # V1 opens after lunch
    with pytest.raises(InfeasibleError):
        schedule_sequence(day, ["V2", "V2", RESTAURANT], [50, 50, None])


@pytest.mark.parametrize("kind", ALL_METRICS, ids=lambda k: k.value)
def test_sample_day_optimum(day, kind):
    res = solve(day, kind, SolveOptions(duration_grid=5))
    assert res.proven_optimal
    assert res.objective == DAY_OPTIMUM[kind]
    assert res.plan.sequence() == (("V2", 150), (RESTAURANT, 120), ("V1", 250))
    assert validate(day, res.plan) == []
    assert metric(day, res.plan, kind) == res.objective


def test_optimum_beats_reference_plans(day, day_plans):
    for kind in (MetricKind.M1, MetricKind.M2, MetricKind.M3):
        best = DAY_OPTIMUM[kind]
        assert all(best <= metric(day, p, kind) for p in day_plans.values())


def _tiny(**route):
    doc = {
        "name": "tiny",
        "route": {"t_start": 600, "t_end": 720, "start_loc": "hotel", "final_loc": "station",
                  "mode": "walk", "pref_visits": "Indif", "pref_occup": "Indif", **route},
        "vmax": 300,
        "visits": [],
        "hours": [],
        "travel": [{"from": "hotel", "to": "station", "minutes": 30},
                   {"from": "station", "to": "hotel", "minutes": 30}],
    }
    return load_problem(doc)


def test_no_pois_gives_single_move():
    res = solve(_tiny(), MetricKind.M1)
    assert res.plan.visits == ()
    assert len(res.plan.moves) == 1
    assert (res.plan.moves[0].from_loc, res.plan.moves[0].to_loc) == ("hotel", "station")


def test_destination_unreachable():
    with pytest.raises(InfeasibleError) as err:
        solve(_tiny(t_end=620), MetricKind.M1)
    assert err.value.proven


def test_closed_pois_give_empty_route(day):
    hours = tuple(replace(h, open=0, close=10) for h in day.hours)
    closed = replace(day, hours=hours, route=replace(day.route, t_start=20, lunch=None))
    res = solve(closed, MetricKind.M2)
    assert res.plan.visits == ()


def test_node_limit_returns_unproven(day):
    res = solve(day, MetricKind.M1, SolveOptions(duration_grid=5, node_limit=50))
    assert not res.proven_optimal
    assert validate(day, res.plan) == []


def test_deterministic_and_order_independent(day):
    a = solve(day, MetricKind.M3, SolveOptions(duration_grid=10))
    b = solve(day, MetricKind.M3, SolveOptions(duration_grid=10))
    c = solve(day, MetricKind.M3, SolveOptions(duration_grid=10, seed=7))
    assert a.plan == b.plan == c.plan and a.nodes_explored == b.nodes_explored


def test_result_document(day):
    doc = solve(day, MetricKind.M2, SolveOptions(duration_grid=10)).to_dict()
    assert doc["metric"] == "m2" and doc["objective"]["exact"] == "41/60"
    assert doc["proven_optimal"] is True


class _BoundProbe(BranchAndBound):
    """Search without pruning, recording (bound, best leaf below) per node."""

    def __init__(self, *a, **kw):
        super().__init__(*a, **kw)
        self.records = []
        self._stack = []

    def _prune(self, node):
        return False

    def _leaf(self, node):
        inst = self.inst
        tr = inst.tr[node.loc][inst.F]
        if node.time + tr > inst.t_end:
            return
        journey = node.journey + tr
        free = inst.total - node.visit_time - journey - (inst.lunch_len if inst.lunch else 0)
        val = self.ex.objective(self.kind, node.n, node.value_sum, node.weighted,
                                node.visit_time, journey, free)
        self._stack[-1] = min(self._stack[-1], val)

    def _dfs(self, node):
        bound = self.lower_bound(node, exact=True)
        self._stack.append(math.inf)
        super()._dfs(node)
        best = self._stack.pop()
        if self._stack:
            self._stack[-1] = min(self._stack[-1], best)
        self.records.append((bound, best))


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 10_000),
    n=st.integers(2, 4),
    horizon=st.sampled_from([180, 300, 540]),
    pv=st.sampled_from(list(VisitPref)),
    po=st.sampled_from(list(OccupPref)),
    kind=st.sampled_from(list(ALL_METRICS)),
)
def test_bound_never_exceeds_best_completion(seed, n, horizon, pv, po, kind):
    problem = generate(GenSpec(seed=seed, n_visits=n, horizon=horizon, pref_visits=pv, pref_occup=po))
    probe = _BoundProbe(problem, kind, SolveOptions(duration_grid=20))
    probe._dfs(probe.root())
    for bound, best in probe.records:
        if best != math.inf:
            assert bound <= best
