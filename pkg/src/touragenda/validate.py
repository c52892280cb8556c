"""Plan feasibility checks and a plain-text timeline.

``validate`` is the single definition of a feasible plan: solver and
oracle results are both run through it. A plan is read as the chain

    move(start_loc -> v1), v1, move(v1 -> v2), v2, ..., move(vn -> final_loc)

with ``plan.visits`` in route order and ``plan.moves[i]`` leading into
``plan.visits[i]``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum

from .model import RESTAURANT, Plan, TouristProblem, free_time, hhmm


class ViolationCode(str, Enum):
    DUPLICATE_VISIT = "DuplicateVisit"
    EMPTY_POSITION = "EmptyPosition"
    DESTINATION_NOT_LAST = "DestinationNotLast"
    DURATION_OUT_OF_BOUNDS = "DurationOutOfBounds"
    OUTSIDE_OPENING_HOURS = "OutsideOpeningHours"
    TRAVEL_TIME_VIOLATED = "TravelTimeViolated"
    LUNCH_MISPLACED = "LunchMisplaced"
    HORIZON_EXCEEDED = "HorizonExceeded"
    UNKNOWN_POI = "UnknownPoi"


@dataclass(frozen=True)
class Violation:
    code: ViolationCode
    detail: str

    def to_dict(self) -> dict:
        return {"code": self.code.value, "detail": self.detail}


def _known_locations(problem: TouristProblem) -> set[str]:
    return set(problem.locations())


def validate(problem: TouristProblem, plan: Plan) -> list[Violation]:
    """Return every broken constraint; an empty list means feasible."""
    out: list[Violation] = []
    route = problem.route
    known = _known_locations(problem)

    def add(code: ViolationCode, detail: str) -> None:
        out.append(Violation(code, detail))

    # referenced locations must exist
    unknown_visit = set()
    for i, v in enumerate(plan.visits):
        ok = problem.is_poi(v.poi_id) or (v.poi_id == RESTAURANT and problem.has_lunch)
        if not ok:
            unknown_visit.add(i)
            add(ViolationCode.UNKNOWN_POI, f"visit[{i}] references unknown POI {v.poi_id!r}")
    for i, m in enumerate(plan.moves):
        for loc in (m.from_loc, m.to_loc):
            if loc not in known:
                add(ViolationCode.UNKNOWN_POI, f"move[{i}] references unknown location {loc!r}")

    # each place at most once
    counts = Counter(v.poi_id for v in plan.visits)
    for poi, n in counts.items():
        if n > 1:
            idx = [i for i, v in enumerate(plan.visits) if v.poi_id == poi]
            add(ViolationCode.DUPLICATE_VISIT, f"{poi} visited {n} times at positions {idx}")

    # chain structure: no gaps, origin first, destination last
    chain_ok = _check_chain(problem, plan, add)

    # durations
    for i, v in enumerate(plan.visits):
        if i in unknown_visit or v.poi_id == RESTAURANT:
            continue
        rec = problem.recommendation(v.poi_id)
        if not rec.dmin <= v.dur <= rec.dmax:
            add(
                ViolationCode.DURATION_OUT_OF_BOUNDS,
                f"visit[{i}] {v.poi_id} lasts {v.dur}, allowed [{rec.dmin}, {rec.dmax}]",
            )

    # opening hours
    for i, v in enumerate(plan.visits):
        if i in unknown_visit or v.poi_id == RESTAURANT:
            continue
        h = problem.opening(v.poi_id)
        if v.t_s < h.open or v.end > h.close:
            add(
                ViolationCode.OUTSIDE_OPENING_HOURS,
                f"visit[{i}] {v.poi_id} at [{v.t_s}, {v.end}] outside opening [{h.open}, {h.close}]",
            )

    # lunch
    if problem.has_lunch:
        lunch = route.lunch
        stops = [(i, v) for i, v in enumerate(plan.visits) if v.poi_id == RESTAURANT]
        if not stops:
            add(ViolationCode.LUNCH_MISPLACED, f"no lunch stop although lunch is [{lunch.start}, {lunch.end}]")
        for i, v in stops:
            if v.t_s != lunch.start or v.end != lunch.end:
                add(
                    ViolationCode.LUNCH_MISPLACED,
                    f"visit[{i}] lunch at [{v.t_s}, {v.end}], required [{lunch.start}, {lunch.end}]",
                )

    # travel times between consecutive places
    _check_travel(problem, plan, unknown_visit, chain_ok, add)

    # horizon
    for kind, actions in (("move", plan.moves), ("visit", plan.visits)):
        for i, a in enumerate(actions):
            if a.t_s < route.t_start or a.end > route.t_end:
                add(
                    ViolationCode.HORIZON_EXCEEDED,
                    f"{kind}[{i}] spans [{a.t_s}, {a.end}] outside route [{route.t_start}, {route.t_end}]",
                )
    if chain_ok and plan.visits and plan.moves:
        last = plan.visits[-1]
        if last.poi_id in known and route.final_loc in known:
            arrival = last.end + problem.travel.duration(last.poi_id, route.final_loc)
            if arrival > route.t_end and plan.moves[-1].end <= route.t_end:
                add(
                    ViolationCode.HORIZON_EXCEEDED,
                    f"cannot reach {route.final_loc} before {route.t_end} (earliest {arrival})",
                )
    return out


def _check_chain(problem: TouristProblem, plan: Plan, add) -> bool:
    route = problem.route
    visits, moves = plan.visits, plan.moves
    if not visits and not moves:
        if route.start_loc == route.final_loc:
            return True
        add(ViolationCode.DESTINATION_NOT_LAST, f"plan never reaches {route.final_loc}")
        return False
    ok = True
    loc = route.start_loc
    for i, v in enumerate(visits):
        if i >= len(moves):
            add(ViolationCode.EMPTY_POSITION, f"no move leads into visit[{i}] {v.poi_id}")
            return False
        m = moves[i]
        if m.from_loc != loc or m.to_loc != v.poi_id:
            where = "origin" if i == 0 and m.from_loc != loc else f"position {i + 1}"
            add(
                ViolationCode.EMPTY_POSITION,
                f"move[{i}] {m.from_loc}->{m.to_loc} does not connect {loc} to visit[{i}] "
                f"{v.poi_id} ({where})",
            )
            ok = False
        loc = v.poi_id
    n = len(visits)
    if len(moves) <= n:
        if loc != route.final_loc:
            add(ViolationCode.DESTINATION_NOT_LAST, f"route ends at {loc}, not {route.final_loc}")
            ok = False
        return ok
    last = moves[n]
    if last.from_loc != loc:
        add(ViolationCode.EMPTY_POSITION, f"move[{n}] leaves {last.from_loc}, expected {loc}")
        ok = False
    if last.to_loc != route.final_loc:
        add(
            ViolationCode.DESTINATION_NOT_LAST,
            f"last move ends at {last.to_loc}, not destination {route.final_loc}",
        )
        ok = False
    if len(moves) > n + 1:
        add(
            ViolationCode.DESTINATION_NOT_LAST,
            f"{len(moves) - n - 1} move(s) after reaching the destination",
        )
        ok = False
    return ok


def _check_travel(problem, plan, unknown_visit, chain_ok, add) -> None:
    route = problem.route
    travel = problem.travel
    known = _known_locations(problem)
    prev_loc, prev_end = route.start_loc, route.t_start
    for i, v in enumerate(plan.visits):
        problems = []
        if i not in unknown_visit and prev_loc in known:
            need = travel.duration(prev_loc, v.poi_id)
            if v.t_s < prev_end + need:
                problems.append(f"starts at {v.t_s}, earliest {prev_end + need}")
            if chain_ok and i < len(plan.moves):
                m = plan.moves[i]
                if m.dur != need:
                    problems.append(f"move[{i}] lasts {m.dur}, table says {need}")
                if i > 0 and m.t_s < prev_end:
                    problems.append(f"move[{i}] departs at {m.t_s} before {prev_end}")
                if m.end > v.t_s:
                    problems.append(f"move[{i}] arrives at {m.end} after the visit starts")
        if problems:
            add(
                ViolationCode.TRAVEL_TIME_VIOLATED,
                f"{prev_loc}->{v.poi_id}: " + "; ".join(problems),
            )
        prev_loc, prev_end = v.poi_id, v.end
    n = len(plan.visits)
    if chain_ok and n < len(plan.moves):
        m = plan.moves[n]
        if m.from_loc in known and m.to_loc in known:
            need = travel.duration(m.from_loc, m.to_loc)
            problems = []
            if m.dur != need:
                problems.append(f"move[{n}] lasts {m.dur}, table says {need}")
            if n > 0 and m.t_s < prev_end:
                problems.append(f"move[{n}] departs at {m.t_s} before {prev_end}")
            if problems:
                add(
                    ViolationCode.TRAVEL_TIME_VIOLATED,
                    f"{m.from_loc}->{m.to_loc}: " + "; ".join(problems),
                )


def is_valid(problem: TouristProblem, plan: Plan) -> bool:
    return not validate(problem, plan)


# ---------------------------------------------------------------- explain


def timeline_rows(problem: TouristProblem, plan: Plan) -> list[dict]:
    """One row per route position: origin, each stop, destination.

    ``idle`` holds the slack charged to the position: waiting before the
    activity starts plus lingering before the next departure. For a valid
    plan the idle column sums to ``free_time``.
    """
    route = problem.route
    rows = []
    first_depart = plan.moves[0].t_s if plan.moves else route.t_end
    rows.append(
        dict(pos=0, loc=route.start_loc, travel=None, arrive=None, start=route.t_start,
             end=route.t_start, idle=first_depart - route.t_start)
    )
    for i, v in enumerate(plan.visits):
        m = plan.moves[i] if i < len(plan.moves) else None
        depart = plan.moves[i + 1].t_s if i + 1 < len(plan.moves) else v.end
        arrive = m.end if m is not None else v.t_s
        rows.append(
            dict(pos=i + 1, loc=v.poi_id, travel=m.dur if m else None, arrive=arrive,
                 start=v.t_s, end=v.end, idle=(v.t_s - arrive) + (depart - v.end))
        )
    n = len(plan.visits)
    if n < len(plan.moves):
        m = plan.moves[n]
        rows.append(
            dict(pos=n + 1, loc=m.to_loc, travel=m.dur, arrive=m.end, start=None, end=None,
                 idle=route.t_end - m.end)
        )
    elif not plan.moves:
        rows.append(
            dict(pos=1, loc=route.final_loc, travel=0, arrive=route.t_start, start=None,
                 end=None, idle=0)
        )
    return rows


def explain(problem: TouristProblem, plan: Plan) -> str:
    """Render the route as a fixed-width timeline table."""
    route = problem.route
    rows = timeline_rows(problem, plan)
    fmt = "{:>3}  {:<16} {:>6} {:>6} {:>6} {:>6} {:>5}"
    lines = [
        f"timeline {problem.name} [{hhmm(route.t_start)}-{hhmm(route.t_end)}] "
        f"total {problem.total_time} min",
        fmt.format("pos", "location", "travel", "arrive", "start", "end", "idle"),
    ]

    def t(x):
        return "-" if x is None else hhmm(x)

    for r in rows:
        lines.append(
            fmt.format(
                r["pos"], r["loc"], "-" if r["travel"] is None else r["travel"],
                t(r["arrive"]), t(r["start"]), t(r["end"]), r["idle"],
            )
        )
    slack = sum(r["idle"] for r in rows)
    lines.append(f"slack {slack} min, free_time {free_time(problem, plan)} min")
    return "\n".join(lines) + "\n"
