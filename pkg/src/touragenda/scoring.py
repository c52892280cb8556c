"""Utilities, preference penalties and the plan metrics.

Every value is an exact :class:`fractions.Fraction`; rounding happens only
when a report is printed. The search code reuses the same formulas through
:class:`Evaluator`, which can also run in plain floats for speed.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable

from .model import (
    RESTAURANT,
    OccupPref,
    Plan,
    ProblemError,
    TouristProblem,
    VisitPref,
    free_time,
)


class DegenerateProblemError(ProblemError):
    """A penalty denominator is zero for this problem."""


class OccupVariant(str, Enum):
    RECIPROCAL = "Reciprocal"
    LINEAR = "Linear"


class MetricKind(str, Enum):
    M1 = "m1"
    M2 = "m2"
    M3 = "m3"
    M1_PRIME = "m1prime"

    @property
    def variant(self) -> OccupVariant:
        return OccupVariant.LINEAR if self is MetricKind.M1_PRIME else OccupVariant.RECIPROCAL

    @property
    def label(self) -> str:
        return "M1'" if self is MetricKind.M1_PRIME else self.name


ALL_METRICS = (MetricKind.M1, MetricKind.M2, MetricKind.M3, MetricKind.M1_PRIME)


@dataclass(frozen=True)
class PlanTotals:
    """The plan aggregates every penalty depends on.

    ``n_visits``, ``visit_time`` and ``weighted_value`` ignore the lunch stop.
    """

    n_visits: int
    value_sum: int
    weighted_value: int
    visit_time: int
    journey: int
    free_time: int


def plan_totals(problem: TouristProblem, plan: Plan) -> PlanTotals:
    pois = [v for v in plan.visits if v.poi_id != RESTAURANT]
    return PlanTotals(
        n_visits=len(pois),
        value_sum=sum(problem.value(v.poi_id) for v in pois),
        weighted_value=sum(problem.value(v.poi_id) * v.dur for v in pois),
        visit_time=sum(v.dur for v in pois),
        journey=sum(m.dur for m in plan.moves),
        free_time=free_time(problem, plan),
    )


@dataclass(frozen=True)
class PenaltyBreakdown:
    u1: Fraction
    u2: Fraction
    u3: Fraction
    p_u1: Fraction
    p_u2: Fraction
    p_u3: Fraction
    p_journey: Fraction
    p_visits: Fraction
    p_occup: Fraction
    free_time: int
    occup_variant: OccupVariant

    def metric(self, kind: MetricKind) -> Fraction:
        if kind is MetricKind.M2:
            return self.p_u2 + self.p_visits + self.p_occup
        if kind is MetricKind.M3:
            return self.p_u3 + self.p_journey + self.p_visits + self.p_occup
        if kind is MetricKind.M1_PRIME and self.occup_variant is not OccupVariant.LINEAR:
            raise ValueError("M1' needs a breakdown computed with the Linear occupation variant")
        return self.p_u1 + self.p_journey + self.p_visits + self.p_occup


Div = Callable[[int, int], "Fraction | float"]


class Evaluator:
    """Penalty formulas evaluated from :class:`PlanTotals`-style integers.

    ``exact=True`` divides with Fraction, otherwise with float division. The
    two modes share every formula so a float screen followed by an exact
    recheck always agrees on ordering up to rounding.
    """

    def __init__(self, problem: TouristProblem, exact: bool = True):
        self.problem = problem
        self.total = problem.total_time
        self.vmax = problem.vmax
        self.value_total = problem.value_sum
        self.n_total = len(problem.visits)
        self.pref_visits = problem.route.pref_visits
        self.pref_occup = problem.route.pref_occup
        self.div: Div = Fraction if exact else operator.truediv
        if self.n_total and not self.value_total:
            raise DegenerateProblemError("sum of recommendation values is zero")

    def u1(self, value_sum: int):
        if not self.value_total:
            return self.div(0, 1)
        return self.div(value_sum, self.value_total)

    def u2(self, weighted: int):
        return self.div(weighted, self.total)

    def u3(self, weighted: int, visit_time: int):
        if visit_time <= 0:
            return self.div(0, 1)
        return self.div(weighted, visit_time)

    def p_u1(self, value_sum: int):
        if not self.value_total:
            return self.div(1, 1)
        return self.div(self.value_total - value_sum, self.value_total)

    def p_u2(self, weighted: int):
        return self.div(self.vmax * self.total - weighted, self.vmax * self.total)

    def p_u3(self, weighted: int, visit_time: int):
        if visit_time <= 0:
            return self.div(1, 1)
        return self.div(self.vmax * visit_time - weighted, self.vmax * visit_time)

    def p_journey(self, journey: int):
        return self.div(journey, self.total)

    def p_visits(self, n_visits: int, pref: VisitPref | None = None):
        pref = self.pref_visits if pref is None else pref
        if pref is VisitPref.INDIF or not self.n_total:
            return self.div(0, 1)
        if pref is VisitPref.MANY:
            return self.div(self.n_total - n_visits, self.n_total)
        return self.div(n_visits, self.n_total)

    def p_occup(self, free: int, variant: OccupVariant, pref: OccupPref | None = None):
        pref = self.pref_occup if pref is None else pref
        if pref is OccupPref.HIGH:
            return self.div(free, self.total)
        if pref is OccupPref.INDIF:
            return self.div(0, 1)
        if variant is OccupVariant.LINEAR:
            return self.div(self.total - free, self.total)
        # reciprocal form diverges at zero slack; cap at the penalty maximum
        if free <= 0:
            return self.div(1, 1)
        return self.div(1, free * self.total)

    def objective(self, kind: MetricKind, n_visits: int, value_sum: int, weighted: int,
                  visit_time: int, journey: int, free: int):
        occ = self.p_occup(free, kind.variant)
        pv = self.p_visits(n_visits)
        if kind is MetricKind.M2:
            return self.p_u2(weighted) + pv + occ
        if kind is MetricKind.M3:
            return self.p_u3(weighted, visit_time) + self.p_journey(journey) + pv + occ
        return self.p_u1(value_sum) + self.p_journey(journey) + pv + occ

    def breakdown(self, t: PlanTotals, variant: OccupVariant) -> PenaltyBreakdown:
        return PenaltyBreakdown(
            u1=self.u1(t.value_sum),
            u2=self.u2(t.weighted_value),
            u3=self.u3(t.weighted_value, t.visit_time),
            p_u1=self.p_u1(t.value_sum),
            p_u2=self.p_u2(t.weighted_value),
            p_u3=self.p_u3(t.weighted_value, t.visit_time),
            p_journey=self.p_journey(t.journey),
            p_visits=self.p_visits(t.n_visits),
            p_occup=self.p_occup(t.free_time, variant),
            free_time=t.free_time,
            occup_variant=variant,
        )


# ------------------------------------------------------------ public API


def utility_u1(problem: TouristProblem, plan: Plan) -> Fraction:
    """Collected recommendation value as a share of the total on offer."""
    total = problem.value_sum
    if not total:
        raise DegenerateProblemError("utility U1 undefined: recommendation values sum to zero")
    return Fraction(plan_totals(problem, plan).value_sum, total)


def utility_u2(problem: TouristProblem, plan: Plan) -> Fraction:
    return Fraction(plan_totals(problem, plan).weighted_value, problem.total_time)


def utility_u3(problem: TouristProblem, plan: Plan) -> Fraction:
    t = plan_totals(problem, plan)
    return Evaluator(problem).u3(t.weighted_value, t.visit_time)


def penalty_journey(problem: TouristProblem, plan: Plan) -> Fraction:
    return Fraction(sum(m.dur for m in plan.moves), problem.total_time)


def penalty_visits(problem: TouristProblem, plan: Plan, pref: VisitPref | None = None) -> Fraction:
    if not problem.visits:
        raise DegenerateProblemError("visit-count penalty undefined: no recommended visits")
    return Evaluator(problem).p_visits(plan_totals(problem, plan).n_visits, pref)


def penalty_occup(
    problem: TouristProblem,
    plan: Plan,
    pref: OccupPref | None = None,
    variant: OccupVariant = OccupVariant.RECIPROCAL,
) -> Fraction:
    return Evaluator(problem).p_occup(free_time(problem, plan), variant, pref)


def breakdown(
    problem: TouristProblem, plan: Plan, variant: OccupVariant = OccupVariant.RECIPROCAL
) -> PenaltyBreakdown:
    return Evaluator(problem).breakdown(plan_totals(problem, plan), variant)


def metric(problem: TouristProblem, plan: Plan, kind: MetricKind) -> Fraction:
    """Equal-weight penalty sum; lower is better."""
    return breakdown(problem, plan, kind.variant).metric(kind)


def eval_u1_star(problem: TouristProblem, plan: Plan) -> Fraction:
    """Mean value of the visited POIs relative to the maximum value."""
    t = plan_totals(problem, plan)
    if not t.n_visits:
        return Fraction(0)
    return Fraction(t.value_sum, t.n_visits * problem.vmax)


def eval_occupation(problem: TouristProblem, plan: Plan) -> Fraction:
    return 1 - Fraction(free_time(problem, plan), problem.total_time)


def fraction_json(x: Fraction) -> dict:
    return {"value": round(float(x), 6), "exact": f"{x.numerator}/{x.denominator}"}


def score_report(problem: TouristProblem, plan: Plan) -> dict:
    """The ``score`` output document."""
    rec = breakdown(problem, plan, OccupVariant.RECIPROCAL)
    lin = breakdown(problem, plan, OccupVariant.LINEAR)
    fields = ["u1", "u2", "u3", "p_u1", "p_u2", "p_u3", "p_journey", "p_visits", "p_occup"]
    return {
        "breakdown": {
            **{f: fraction_json(getattr(rec, f)) for f in fields},
            "p_occup_linear": fraction_json(lin.p_occup),
            "free_time": rec.free_time,
            "occup_variant": rec.occup_variant.value,
        },
        "metrics": {
            k.value: fraction_json(lin.metric(k) if k is MetricKind.M1_PRIME else rec.metric(k))
            for k in ALL_METRICS
        },
        "u1_star": fraction_json(eval_u1_star(problem, plan)),
        "occupation": fraction_json(eval_occupation(problem, plan)),
        "n_visits": plan_totals(problem, plan).n_visits,
    }
