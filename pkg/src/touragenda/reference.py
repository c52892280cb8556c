"""Bundled worked example: the six-POI day with four agendas.

Plans 2-4 are rebuilt from their target metric values;
see the README for the derivation.
"""

from __future__ import annotations

import json
from importlib import resources

from .model import Plan, TouristProblem, load_plan, load_problem


def _read(name: str) -> str:
    return resources.files("touragenda").joinpath("data").joinpath(name).read_text()


def sample_day() -> TouristProblem:
    return load_problem(_read("six_poi_day.json"))


def sample_plans() -> dict[str, Plan]:
    docs = json.loads(_read("six_poi_plans.json"))
    return {name: load_plan(doc) for name, doc in docs.items()}


def sample_plan(n: int) -> Plan:
    return sample_plans()[f"plan{n}"]
