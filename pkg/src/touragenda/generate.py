"""Seeded random tourist problems in the style of the benchmark study."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .model import (
    RESTAURANT,
    Lunch,
    OccupPref,
    PoiHours,
    Recommendation,
    RouteDetails,
    TouristProblem,
    TravelTable,
    VisitPref,
    check_problem,
)

DAY_START = 9 * 60
ALL_DAY = 540
LUNCH = (13 * 60, 14 * 60)
HOTEL = "hotel"


@dataclass(frozen=True)
class GenSpec:
    seed: int
    n_visits: int = 5
    horizon: int = 180
    pref_visits: VisitPref = VisitPref.INDIF
    pref_occup: OccupPref = OccupPref.INDIF
    value_range: tuple[int, int] = (180, 300)
    travel_range: tuple[int, int] = (1, 60)
    avg_dur_range: tuple[int, int] = (30, 200)
    # dmin/dmax = avg -/+ this share of the average
    dur_spread: float = 0.2
    t_start: int = DAY_START
    vmax: int = 300

    @property
    def name(self) -> str:
        return (
            f"s{self.seed}-n{self.n_visits}-h{self.horizon}-"
            f"{self.pref_visits.value}-{self.pref_occup.value}"
        )


def _half_up(x: float) -> int:
    return int(x + 0.5)


def generate(spec: GenSpec) -> TouristProblem:
    """Build the problem for ``spec``; identical specs give identical problems."""
    if spec.n_visits < 0 or spec.horizon <= 0:
        raise ValueError("n_visits must be >= 0 and horizon > 0")
    rng = random.Random(spec.seed)
    t_start = spec.t_start
    t_end = t_start + spec.horizon
    lunch = Lunch(*LUNCH) if spec.horizon >= ALL_DAY else None
    if lunch is not None and not (t_start <= lunch.start and lunch.end <= t_end):
        raise ValueError("the fixed lunch slot does not fit this horizon")

    ids = [f"P{i + 1}" for i in range(spec.n_visits)]
    visits = []
    lo, hi = spec.avg_dur_range
    if lo > spec.horizon:
        raise ValueError("no average duration fits the horizon")
    for poi in ids:
        value = rng.randint(*spec.value_range)
        avg = rng.randint(lo, hi)
        while avg > spec.horizon:
            avg = rng.randint(lo, hi)
        dmin = max(1, _half_up(avg * (1 - spec.dur_spread)))
        dmax = max(dmin, _half_up(avg * (1 + spec.dur_spread)))
        visits.append(Recommendation(poi, value, dmin, dmax))

    hours = []
    for poi in ids:
        open_ = rng.randint(t_start - 120, t_start + spec.horizon // 2)
        close = open_ + rng.randint(120, 600)
        open_, close = max(0, open_), min(1440, close)
        hours.append(PoiHours(poi, open_, close))

    locs = [HOTEL, *ids] + ([RESTAURANT] if lunch else [])
    entries = {}
    for i, p in enumerate(locs):
        for q in locs[i + 1:]:
            minutes = rng.randint(*spec.travel_range)
            entries[(p, q)] = minutes
            entries[(q, p)] = minutes

    route = RouteDetails(
        t_start=t_start,
        t_end=t_end,
        start_loc=HOTEL,
        final_loc=HOTEL,
        lunch=lunch,
        mode="walk",
        pref_visits=spec.pref_visits,
        pref_occup=spec.pref_occup,
    )
    problem = TouristProblem(
        route=route,
        visits=tuple(visits),
        hours=tuple(hours),
        travel=TravelTable("walk", entries),
        vmax=spec.vmax,
        name=spec.name,
    )
    check_problem(problem)
    return problem
