import json
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from touragenda.generate import GenSpec, generate
from touragenda.model import (
    RESTAURANT,
    MoveAction,
    Plan,
    ProblemValidationError,
    SchemaError,
    dump_plan,
    dump_problem,
    free_time,
    hhmm,
    load_plan,
    load_problem,
    problem_to_dict,
    total_time,
)
from touragenda.solver import schedule_sequence

from .conftest import DATA


def _doc():
    return json.loads((DATA / "day.json").read_text())


def test_sample_day_document(day):
    assert len(day.visits) == 6
    assert total_time(day) == 600
    assert (day.route.lunch.start, day.route.lunch.end) == (180, 300)
    assert day.value_sum == 1480
    assert day.value(RESTAURANT) == 0


def test_empty_recommendations_without_lunch():
    doc = _doc()
    doc["visits"], doc["hours"] = [], []
    del doc["route"]["lunch"]
    doc["travel"] = []
    problem = load_problem(doc)
    assert problem.poi_ids == () and not problem.has_lunch
    assert free_time(problem, Plan()) == 600


def test_missing_travel_pair_is_listed():
    doc = _doc()
    doc["travel"] = [t for t in doc["travel"] if (t["from"], t["to"]) != ("hotel", "V3")]
    with pytest.raises(ProblemValidationError, match=r"\(hotel, V3\)"):
        load_problem(doc)


@pytest.mark.parametrize("mutate,match", [
    (lambda d: d["route"].update(t_end=d["route"]["t_start"]), "t_start"),
    (lambda d: d["route"].update(lunch={"start": 500, "end": 700}), "lunch"),
    (lambda d: d["visits"][0].update(dmin=300), "V1"),
    (lambda d: d["visits"][1].update(value=400), "V2"),
    (lambda d: d["hours"].pop(), "no opening hours"),
    (lambda d: d["hours"][0].update(open=700, close=600), "open"),
    (lambda d: d["travel"][0].update(minutes=-5), "negative"),
    (lambda d: d["travel"].append(dict(d["travel"][0])), "duplicate"),
    (lambda d: d["visits"].append(dict(d["visits"][0])), "twice"),
])
def test_invalid_documents(mutate, match):
    doc = _doc()
    mutate(doc)
    with pytest.raises(ProblemValidationError, match=match):
        load_problem(doc)


@pytest.mark.parametrize("mutate,field", [
    (lambda d: d.pop("route"), "route"),
    (lambda d: d["visits"][2].pop("dmax"), "visits[2].dmax"),
    (lambda d: d["route"].update(pref_visits="Lots"), "route.pref_visits"),
    (lambda d: d["route"].update(t_start=2000), "route.t_start"),
    (lambda d: d["travel"][3].update(minutes="ten"), "travel[3].minutes"),
])
def test_schema_errors_name_the_field(mutate, field):
    doc = _doc()
    mutate(doc)
    with pytest.raises(SchemaError) as err:
        load_problem(doc)
    assert err.value.field == field


def test_lunch_as_pair():
    doc = _doc()
    doc["route"]["lunch"] = [180, 300]
    assert load_problem(doc).route.lunch.length == 120


def test_free_time_examples(day, day_plans):
    # plan 1 spends 240 min at V1, leaving 10 idle minutes
    assert free_time(day, day_plans[1]) == 10
    # a 250-minute V1 visit leaves none
    table_plan = schedule_sequence(day, ["V2", RESTAURANT, "V1"], [150, None, 250])
    assert free_time(day, table_plan) == 0
    assert free_time(day, day_plans[3]) == 0


def test_free_time_single_move():
    doc = _doc()
    doc["visits"], doc["hours"] = [], []
    del doc["route"]["lunch"]
    doc["route"]["final_loc"] = "station"
    doc["travel"] = [{"from": "hotel", "to": "station", "minutes": 15},
                     {"from": "station", "to": "hotel", "minutes": 15}]
    problem = load_problem(doc)
    plan = Plan(moves=(MoveAction("hotel", "station", 0, 15),))
    assert free_time(problem, plan) == 585


def test_plan_round_trip(day_plans):
    for plan in day_plans.values():
        assert load_plan(dump_plan(plan)) == plan


def test_hhmm():
    assert hhmm(540) == "09:00"
    assert hhmm(1439) == "23:59"


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(0, 8), h=st.sampled_from([180, 300, 540]))
def test_problem_round_trip(seed, n, h):
    problem = generate(GenSpec(seed=seed, n_visits=n, horizon=h))
    again = load_problem(dump_problem(problem))
    assert again == problem
    assert problem_to_dict(again) == problem_to_dict(problem)


def test_problems_are_immutable(day):
    with pytest.raises(Exception):
        day.vmax = 10
    assert replace(day, vmax=280).vmax == 280
