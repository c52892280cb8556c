import random

from hypothesis import given, settings
from hypothesis import strategies as st

from touragenda.generate import GenSpec, generate
from touragenda.model import OccupPref, VisitPref, free_time
from touragenda.scoring import ALL_METRICS, OccupVariant, breakdown
from touragenda.solver import SolveOptions, solve
from touragenda.validate import timeline_rows, validate

from .conftest import random_plan

specs = st.builds(
    GenSpec,
    seed=st.integers(0, 10**9),
    n_visits=st.integers(1, 7),
    horizon=st.sampled_from([180, 300, 540]),
    pref_visits=st.sampled_from(list(VisitPref)),
    pref_occup=st.sampled_from(list(OccupPref)),
)


@settings(max_examples=300, deadline=None)
@given(spec=specs, pick=st.integers(0, 2**32))
def test_penalties_in_unit_interval(spec, pick):
    problem = generate(spec)
    plan = random_plan(problem, random.Random(pick))
    if plan is None:
        return
    assert validate(problem, plan) == []
    for variant in OccupVariant:
        b = breakdown(problem, plan, variant)
        for value in (b.p_u1, b.p_u2, b.p_u3, b.p_journey, b.p_visits, b.p_occup):
            assert 0 <= value <= 1


@settings(max_examples=300, deadline=None)
@given(spec=specs, pick=st.integers(0, 2**32))
def test_free_time_identity(spec, pick):
    problem = generate(spec)
    plan = random_plan(problem, random.Random(pick))
    if plan is None:
        return
    used = sum(v.dur for v in plan.visits) + sum(m.dur for m in plan.moves)
    assert free_time(problem, plan) + used == problem.total_time
    assert sum(r["idle"] for r in timeline_rows(problem, plan)) == free_time(problem, plan)


@settings(max_examples=25, deadline=None)
@given(spec=specs)
def test_solve_is_deterministic(spec):
    problem = generate(spec)
    assert generate(spec) == problem
    for kind in ALL_METRICS:
        a = solve(problem, kind, SolveOptions(duration_grid=15))
        b = solve(problem, kind, SolveOptions(duration_grid=15))
        assert (a.plan, a.objective, a.nodes_explored) == (b.plan, b.objective, b.nodes_explored)
