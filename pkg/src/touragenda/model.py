"""Problem and plan data model plus the canonical JSON formats.

All times are integer minutes from 00:00. Problems and plans are immutable
once built; the loaders check every invariant so downstream code can trust
what it receives.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Mapping

DAY_MINUTES = 1440
DEFAULT_VMAX = 300
SCHEMA_VERSION = "1"

# Reserved location id for the single generic lunch stop.
RESTAURANT = "__restaurant__"


class ProblemError(ValueError):
    """Base class for problems with an instance or plan document."""


class SchemaError(ProblemError):
    """The document does not have the expected shape."""

    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


class ProblemValidationError(ProblemError):
    """The document parsed but breaks a model invariant."""


class VisitPref(str, Enum):
    FEW = "Few"
    INDIF = "Indif"
    MANY = "Many"


class OccupPref(str, Enum):
    HIGH = "High"
    INDIF = "Indif"
    LOW = "Low"


@dataclass(frozen=True)
class PoiHours:
    poi_id: str
    open: int
    close: int


@dataclass(frozen=True)
class Recommendation:
    poi_id: str
    value: int
    dmin: int
    dmax: int


@dataclass(frozen=True)
class Lunch:
    start: int
    end: int

    @property
    def length(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class RouteDetails:
    t_start: int
    t_end: int
    start_loc: str
    final_loc: str
    lunch: Lunch | None = None
    mode: str = "walk"
    pref_visits: VisitPref = VisitPref.INDIF
    pref_occup: OccupPref = OccupPref.INDIF

    @property
    def total_time(self) -> int:
        return self.t_end - self.t_start


@dataclass(frozen=True)
class TravelTable:
    """Directed travel durations; no symmetry is assumed."""

    mode: str
    entries: Mapping[tuple[str, str], int]

    def duration(self, p: str, q: str) -> int:
        if p == q:
            return 0
        return self.entries[(p, q)]

    def __contains__(self, pair: tuple[str, str]) -> bool:
        return pair[0] == pair[1] or pair in self.entries


@dataclass(frozen=True)
class TouristProblem:
    route: RouteDetails
    visits: tuple[Recommendation, ...]
    hours: tuple[PoiHours, ...]
    travel: TravelTable
    vmax: int = DEFAULT_VMAX
    name: str = "problem"
    _rec: dict = field(init=False, repr=False, compare=False)
    _hours: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_rec", {r.poi_id: r for r in self.visits})
        object.__setattr__(self, "_hours", {h.poi_id: h for h in self.hours})

    @property
    def total_time(self) -> int:
        return self.route.total_time

    @property
    def has_lunch(self) -> bool:
        return self.route.lunch is not None

    @property
    def poi_ids(self) -> tuple[str, ...]:
        return tuple(r.poi_id for r in self.visits)

    @property
    def value_sum(self) -> int:
        return sum(r.value for r in self.visits)

    def recommendation(self, poi_id: str) -> Recommendation:
        return self._rec[poi_id]

    def opening(self, poi_id: str) -> PoiHours:
        return self._hours[poi_id]

    def is_poi(self, poi_id: str) -> bool:
        return poi_id in self._rec

    def value(self, poi_id: str) -> int:
        if poi_id == RESTAURANT:
            return 0
        return self._rec[poi_id].value

    def locations(self) -> list[str]:
        """Every location the travel table has to cover."""
        locs = [self.route.start_loc]
        if self.route.final_loc != self.route.start_loc:
            locs.append(self.route.final_loc)
        locs.extend(self.poi_ids)
        if self.has_lunch:
            locs.append(RESTAURANT)
        return locs


@dataclass(frozen=True)
class VisitAction:
    poi_id: str
    t_s: int
    dur: int

    @property
    def end(self) -> int:
        return self.t_s + self.dur


@dataclass(frozen=True)
class MoveAction:
    from_loc: str
    to_loc: str
    t_s: int
    dur: int

    @property
    def end(self) -> int:
        return self.t_s + self.dur


@dataclass(frozen=True)
class Plan:
    visits: tuple[VisitAction, ...] = ()
    moves: tuple[MoveAction, ...] = ()

    def poi_visits(self) -> tuple[VisitAction, ...]:
        """Visits excluding the lunch stop."""
        return tuple(v for v in self.visits if v.poi_id != RESTAURANT)

    def sequence(self) -> tuple[tuple[str, int], ...]:
        return tuple((v.poi_id, v.dur) for v in self.visits)


def total_time(problem: TouristProblem) -> int:
    return problem.total_time


def free_time(problem: TouristProblem, plan: Plan) -> int:
    """Horizon minutes not spent in a visit or a move."""
    busy = sum(v.dur for v in plan.visits) + sum(m.dur for m in plan.moves)
    return problem.total_time - busy


# ---------------------------------------------------------------- loading


def _require(doc: Mapping[str, Any], key: str, where: str) -> Any:
    if not isinstance(doc, Mapping):
        raise SchemaError(where, "expected an object")
    if key not in doc:
        raise SchemaError(f"{where}.{key}" if where else key, "missing field")
    return doc[key]


def _int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(where, f"expected an integer, got {value!r}")
    return value


def _str(value: Any, where: str) -> str:
    if not isinstance(value, str) or not value:
        raise SchemaError(where, f"expected a non-empty string, got {value!r}")
    return value


def _time(value: Any, where: str) -> int:
    t = _int(value, where)
    if not 0 <= t <= DAY_MINUTES:
        raise SchemaError(where, f"time {t} outside [0, {DAY_MINUTES}]")
    return t


def _enum(cls, value: Any, where: str):
    for member in cls:
        if isinstance(value, str) and value.lower() == member.value.lower():
            return member
    allowed = ", ".join(m.value for m in cls)
    raise SchemaError(where, f"expected one of {allowed}, got {value!r}")


def _parse_doc(data: bytes | str | Mapping[str, Any]) -> Mapping[str, Any]:
    if isinstance(data, Mapping):
        return data
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError("<document>", f"invalid JSON ({exc})") from None
    if not isinstance(doc, Mapping):
        raise SchemaError("<document>", "expected a JSON object")
    return doc


def problem_from_dict(doc: Mapping[str, Any]) -> TouristProblem:
    r = _require(doc, "route", "")
    lunch_doc = r.get("lunch") if isinstance(r, Mapping) else None
    lunch = None
    if lunch_doc is not None:
        if isinstance(lunch_doc, Mapping):
            ls = _time(_require(lunch_doc, "start", "route.lunch"), "route.lunch.start")
            le = _time(_require(lunch_doc, "end", "route.lunch"), "route.lunch.end")
        elif isinstance(lunch_doc, (list, tuple)) and len(lunch_doc) == 2:
            ls = _time(lunch_doc[0], "route.lunch[0]")
            le = _time(lunch_doc[1], "route.lunch[1]")
        else:
            raise SchemaError("route.lunch", "expected {start, end} or [start, end]")
        lunch = Lunch(ls, le)
    route = RouteDetails(
        t_start=_time(_require(r, "t_start", "route"), "route.t_start"),
        t_end=_time(_require(r, "t_end", "route"), "route.t_end"),
        start_loc=_str(_require(r, "start_loc", "route"), "route.start_loc"),
        final_loc=_str(_require(r, "final_loc", "route"), "route.final_loc"),
        lunch=lunch,
        mode=_str(r.get("mode", "walk"), "route.mode"),
        pref_visits=_enum(VisitPref, r.get("pref_visits", "Indif"), "route.pref_visits"),
        pref_occup=_enum(OccupPref, r.get("pref_occup", "Indif"), "route.pref_occup"),
    )
    vmax = _int(doc.get("vmax", DEFAULT_VMAX), "vmax")

    visits_doc = _require(doc, "visits", "")
    if not isinstance(visits_doc, list):
        raise SchemaError("visits", "expected a list")
    visits = []
    for i, v in enumerate(visits_doc):
        where = f"visits[{i}]"
        visits.append(
            Recommendation(
                poi_id=_str(_require(v, "id", where), f"{where}.id"),
                value=_int(_require(v, "value", where), f"{where}.value"),
                dmin=_int(_require(v, "dmin", where), f"{where}.dmin"),
                dmax=_int(_require(v, "dmax", where), f"{where}.dmax"),
            )
        )

    hours_doc = _require(doc, "hours", "")
    if not isinstance(hours_doc, list):
        raise SchemaError("hours", "expected a list")
    hours = []
    for i, h in enumerate(hours_doc):
        where = f"hours[{i}]"
        hours.append(
            PoiHours(
                poi_id=_str(_require(h, "id", where), f"{where}.id"),
                open=_time(_require(h, "open", where), f"{where}.open"),
                close=_time(_require(h, "close", where), f"{where}.close"),
            )
        )

    travel_doc = _require(doc, "travel", "")
    if not isinstance(travel_doc, list):
        raise SchemaError("travel", "expected a list")
    entries: dict[tuple[str, str], int] = {}
    for i, t in enumerate(travel_doc):
        where = f"travel[{i}]"
        p = _str(_require(t, "from", where), f"{where}.from")
        q = _str(_require(t, "to", where), f"{where}.to")
        minutes = _int(_require(t, "minutes", where), f"{where}.minutes")
        if (p, q) in entries:
            raise ProblemValidationError(f"duplicate travel entry ({p}, {q})")
        entries[(p, q)] = minutes

    problem = TouristProblem(
        route=route,
        visits=tuple(visits),
        hours=tuple(hours),
        travel=TravelTable(route.mode, entries),
        vmax=vmax,
        name=str(doc.get("name", "problem")),
    )
    check_problem(problem)
    return problem


def check_problem(problem: TouristProblem) -> None:
    """Raise ProblemValidationError on the first broken invariant group."""
    r = problem.route
    if r.t_start >= r.t_end:
        raise ProblemValidationError(f"route: t_start {r.t_start} must be before t_end {r.t_end}")
    if r.lunch is not None:
        ls, le = r.lunch.start, r.lunch.end
        if not (r.t_start <= ls < le <= r.t_end):
            raise ProblemValidationError(
                f"route.lunch: [{ls}, {le}] must satisfy t_start <= start < end <= t_end"
            )
    if problem.vmax <= 0:
        raise ProblemValidationError(f"vmax must be positive, got {problem.vmax}")

    seen: set[str] = set()
    reserved = {RESTAURANT, r.start_loc, r.final_loc}
    for rec in problem.visits:
        if rec.poi_id in seen:
            raise ProblemValidationError(f"POI {rec.poi_id}: listed twice in visits")
        if rec.poi_id in reserved:
            raise ProblemValidationError(f"POI {rec.poi_id}: id clashes with a route location")
        seen.add(rec.poi_id)
        if not 0 < rec.dmin <= rec.dmax:
            raise ProblemValidationError(
                f"POI {rec.poi_id}: need 0 < dmin <= dmax, got dmin={rec.dmin} dmax={rec.dmax}"
            )
        if not 0 <= rec.value <= problem.vmax:
            raise ProblemValidationError(
                f"POI {rec.poi_id}: value {rec.value} outside [0, {problem.vmax}]"
            )

    hour_ids = [h.poi_id for h in problem.hours]
    for h in problem.hours:
        if h.poi_id not in seen:
            raise ProblemValidationError(f"POI {h.poi_id}: opening hours given but not recommended")
        if hour_ids.count(h.poi_id) > 1:
            raise ProblemValidationError(f"POI {h.poi_id}: opening hours listed twice")
        if h.open >= h.close:
            raise ProblemValidationError(
                f"POI {h.poi_id}: open {h.open} must be before close {h.close}"
            )
    missing_hours = [p for p in problem.poi_ids if p not in set(hour_ids)]
    if missing_hours:
        raise ProblemValidationError(f"POI {missing_hours[0]}: no opening hours")

    for pair, minutes in problem.travel.entries.items():
        if minutes < 0:
            raise ProblemValidationError(f"travel ({pair[0]}, {pair[1]}): negative duration {minutes}")
    locs = problem.locations()
    missing = [(p, q) for p in locs for q in locs if p != q and (p, q) not in problem.travel.entries]
    if missing:
        listed = ", ".join(f"({p}, {q})" for p, q in missing[:10])
        more = f" and {len(missing) - 10} more" if len(missing) > 10 else ""
        raise ProblemValidationError(f"travel table is missing pairs: {listed}{more}")


def load_problem(data: bytes | str | Mapping[str, Any]) -> TouristProblem:
    """Parse a canonical instance document (bytes, text or decoded dict)."""
    return problem_from_dict(_parse_doc(data))


def problem_to_dict(problem: TouristProblem) -> dict[str, Any]:
    r = problem.route
    route: dict[str, Any] = {
        "t_start": r.t_start,
        "t_end": r.t_end,
        "start_loc": r.start_loc,
        "final_loc": r.final_loc,
    }
    if r.lunch is not None:
        route["lunch"] = {"start": r.lunch.start, "end": r.lunch.end}
    route.update(mode=r.mode, pref_visits=r.pref_visits.value, pref_occup=r.pref_occup.value)
    travel = [
        {"from": p, "to": q, "minutes": m}
        for (p, q), m in sorted(problem.travel.entries.items())
    ]
    return {
        "name": problem.name,
        "route": route,
        "vmax": problem.vmax,
        "visits": [
            {"id": v.poi_id, "value": v.value, "dmin": v.dmin, "dmax": v.dmax}
            for v in problem.visits
        ],
        "hours": [{"id": h.poi_id, "open": h.open, "close": h.close} for h in problem.hours],
        "travel": travel,
    }


def dump_problem(problem: TouristProblem) -> str:
    return json.dumps(problem_to_dict(problem), indent=2) + "\n"


# ---------------------------------------------------------------- plans


def plan_from_dict(doc: Mapping[str, Any]) -> Plan:
    visits_doc = doc.get("visits", []) if isinstance(doc, Mapping) else None
    moves_doc = doc.get("moves", []) if isinstance(doc, Mapping) else None
    if not isinstance(visits_doc, list):
        raise SchemaError("visits", "expected a list")
    if not isinstance(moves_doc, list):
        raise SchemaError("moves", "expected a list")
    visits = []
    for i, v in enumerate(visits_doc):
        where = f"visits[{i}]"
        visits.append(
            VisitAction(
                poi_id=_str(_require(v, "id", where), f"{where}.id"),
                t_s=_int(_require(v, "start", where), f"{where}.start"),
                dur=_int(_require(v, "dur", where), f"{where}.dur"),
            )
        )
    moves = []
    for i, m in enumerate(moves_doc):
        where = f"moves[{i}]"
        moves.append(
            MoveAction(
                from_loc=_str(_require(m, "from", where), f"{where}.from"),
                to_loc=_str(_require(m, "to", where), f"{where}.to"),
                t_s=_int(_require(m, "start", where), f"{where}.start"),
                dur=_int(_require(m, "dur", where), f"{where}.dur"),
            )
        )
    return Plan(tuple(visits), tuple(moves))


def load_plan(data: bytes | str | Mapping[str, Any]) -> Plan:
    return plan_from_dict(_parse_doc(data))


def plan_to_dict(plan: Plan) -> dict[str, Any]:
    return {
        "visits": [{"id": v.poi_id, "start": v.t_s, "dur": v.dur} for v in plan.visits],
        "moves": [
            {"from": m.from_loc, "to": m.to_loc, "start": m.t_s, "dur": m.dur}
            for m in plan.moves
        ],
    }


def dump_plan(plan: Plan) -> str:
    return json.dumps(plan_to_dict(plan), indent=2) + "\n"


def chronological(plan: Plan) -> list[VisitAction | MoveAction]:
    """Interleave moves and visits by start time (moves first on ties)."""
    tagged: Iterable[tuple[int, int, int, VisitAction | MoveAction]] = [
        *((m.t_s, 0, i, m) for i, m in enumerate(plan.moves)),
        *((v.t_s, 1, i, v) for i, v in enumerate(plan.visits)),
    ]
    return [a for *_, a in sorted(tagged, key=lambda t: t[:3])]


def hhmm(minutes: int) -> str:
    return f"{minutes // 60:02d}:{minutes % 60:02d}"
