"""PDDL3 encoding of a tourist problem and import of temporal plan traces.

The domain has three durative actions: ``move``, ``visit`` and ``eat``.
Opening hours become timed initial literals, each POI gets a soft goal and
the plan metric is the linear-occupation variant of the first metric, which
is the only one expressible with linear numeric fluents.

Clock: PDDL time 0 is the route start, so every absolute minute ``t`` is
written as ``t - t_start``.
"""

from __future__ import annotations

import re

from .model import RESTAURANT, MoveAction, OccupPref, Plan, ProblemError, TouristProblem, VisitAction, VisitPref, chronological
from .scoring import MetricKind

DOMAIN_NAME = "tourism"
PERSON = "tourist"

DOMAIN = """\
(define (domain tourism)
  (:requirements :typing :durative-actions :duration-inequalities
                 :numeric-fluents :timed-initial-literals :preferences)
  (:types location person)
  (:predicates
    (person_at ?y - person ?x - location)
    (open ?x - location)
    (not_visit_location ?x - location)
    (visit_location ?x - location)
    (restaurant ?x - location)
    (lunch_time))
  (:functions
    (location_time ?x - location ?z - location)
    (min_visit_time ?x - location)
    (max_visit_time ?x - location)
    (free_time)
    (transport_time)
    (number_visit_location))

(:durative-action move
  :parameters (?x - location ?y - person ?z - location)
  :duration (= ?duration (location_time ?x ?z))
  :condition
    (and
      (at start (person_at ?y ?x))
      (at start (>= (free_time)(location_time ?x ?z))))
  :effect
    (and
      (at start (not (person_at ?y ?x)))
      (at end (person_at ?y ?z))
      (at end (decrease (free_time)
        (location_time ?x ?z)))
      (at end (increase (transport_time)
        (location_time ?x ?z)))))

(:durative-action visit
  :parameters (?x - location ?y - person)
  :duration
    (and
      (>= ?duration (min_visit_time ?x))
      (<= ?duration (max_visit_time ?x))
      (<= ?duration (free_time)))
  :condition
    (and
      (at start (not_visit_location ?x))
      (over all (person_at ?y ?x))
      (over all (open ?x)))
  :effect
    (and
      (at start (not (not_visit_location ?x)))
      (at end (visit_location ?x))
      (at end (increase (number_visit_location) 1))
      (at end (decrease (free_time) ?duration))))

; lunch: same shape as visit, restricted to the restaurant and the lunch
; window; it does not count as a visit
(:durative-action eat
  :parameters (?x - location ?y - person)
  :duration
    (and
      (>= ?duration (min_visit_time ?x))
      (<= ?duration (max_visit_time ?x))
      (<= ?duration (free_time)))
  :condition
    (and
      (at start (restaurant ?x))
      (at start (not_visit_location ?x))
      (over all (person_at ?y ?x))
      (over all (lunch_time)))
  :effect
    (and
      (at start (not (not_visit_location ?x)))
      (at end (visit_location ?x))
      (at end (decrease (free_time) ?duration))))
)
"""


class UnsupportedMetricError(ProblemError):
    """The metric needs nonlinear numeric expressions."""


class TraceParseError(ProblemError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def export_domain() -> str:
    return DOMAIN


def _pddl_name(raw: str) -> str:
    name = re.sub(r"[^a-z0-9_-]", "_", raw.lower())
    if not name or not name[0].isalpha():
        name = "l_" + name
    return name


def location_names(problem: TouristProblem) -> dict[str, str]:
    """Map every location id to a unique, valid PDDL object name."""
    out: dict[str, str] = {}
    taken: set[str] = set()
    for loc in problem.locations():
        base = "restaurant" if loc == RESTAURANT else _pddl_name(loc)
        name, k = base, 2
        while name in taken:
            name, k = f"{base}_{k}", k + 1
        taken.add(name)
        out[loc] = name
    return out


def _frac(num: str, den: int) -> str:
    return f"(/ {num} {den})"


def export_problem(problem: TouristProblem, kind: MetricKind = MetricKind.M1_PRIME) -> str:
    if kind is not MetricKind.M1_PRIME:
        raise UnsupportedMetricError(
            f"metric {kind.value} is nonlinear in the plan variables and cannot be written "
            "as a PDDL plan metric for planners that do not handle nonlinear functions; use m1prime"
        )
    route = problem.route
    names = location_names(problem)
    pois = list(problem.poi_ids)
    total = problem.total_time
    t0 = route.t_start

    lines = [f"(define (problem {_pddl_name(problem.name or 'tour')})", f"  (:domain {DOMAIN_NAME})"]
    lines.append("  (:objects")
    lines.append("    " + " ".join(names[loc] for loc in problem.locations()) + " - location")
    lines.append(f"    {PERSON} - person)")

    init = [f"(person_at {PERSON} {names[route.start_loc]})"]
    init += [f"(not_visit_location {names[p]})" for p in pois]
    for p in pois:
        rec = problem.recommendation(p)
        init.append(f"(= (min_visit_time {names[p]}) {rec.dmin})")
        init.append(f"(= (max_visit_time {names[p]}) {rec.dmax})")
    for p in pois:
        h = problem.opening(p)
        opens, closes = h.open - t0, h.close - t0
        if closes <= 0 or opens >= total:
            continue
        if opens <= 0:
            init.append(f"(open {names[p]})")
        else:
            init.append(f"(at {opens} (open {names[p]}))")
        if closes < total:
            init.append(f"(at {closes} (not (open {names[p]})))")
    if problem.has_lunch:
        lunch = route.lunch
        r = names[RESTAURANT]
        init += [
            f"(restaurant {r})",
            f"(not_visit_location {r})",
            f"(= (min_visit_time {r}) {lunch.length})",
            f"(= (max_visit_time {r}) {lunch.length})",
            f"(at {lunch.start - t0} (lunch_time))",
            f"(at {lunch.end - t0} (not (lunch_time)))",
        ]
    locs = problem.locations()
    for p in locs:
        for q in locs:
            if p != q and (p, q) in problem.travel:
                init.append(f"(= (location_time {names[p]} {names[q]}) {problem.travel.duration(p, q)})")
    init += [f"(= (free_time) {total})", "(= (transport_time) 0)", "(= (number_visit_location) 0)"]
    lines.append("  (:init")
    lines += [f"    {fact}" for fact in init]
    lines[-1] += ")"

    goals = [f"(person_at {PERSON} {names[route.final_loc]})"]
    if problem.has_lunch:
        goals.append(f"(visit_location {names[RESTAURANT]})")
    goals += [f"(preference p{i + 1} (visit_location {names[p]}))" for i, p in enumerate(pois)]
    lines.append("  (:goal")
    lines.append("    (and")
    lines += [f"      {g}" for g in goals]
    lines[-1] += "))"

    terms = []
    vsum = problem.value_sum
    if pois and vsum > 0:
        terms += [
            _frac(f"(* {problem.value(p)} (is-violated p{i + 1}))", vsum) for i, p in enumerate(pois)
        ]
    elif pois:
        raise ProblemError("all recommendation values are zero; the utility penalty is undefined")
    else:
        terms.append("1")
    terms.append(_frac("(transport_time)", total))
    n = len(pois)
    if n and route.pref_visits is VisitPref.FEW:
        terms.append(_frac("(number_visit_location)", n))
    elif n and route.pref_visits is VisitPref.MANY:
        terms.append(_frac(f"(- {n} (number_visit_location))", n))
    if route.pref_occup is OccupPref.HIGH:
        terms.append(_frac("(free_time)", total))
    elif route.pref_occup is OccupPref.LOW:
        terms.append(_frac(f"(- {total} (free_time))", total))
    lines.append("  (:metric minimize")
    lines.append("    (+")
    lines += [f"      {t}" for t in terms]
    lines[-1] += "))"
    lines.append(")")
    return "\n".join(lines) + "\n"


_LINE = re.compile(
    r"^\s*(?P<t>\d+(?:\.\d*)?)\s*:\s*\((?P<body>[^()]*)\)\s*(?:\[\s*(?P<d>\d+(?:\.\d*)?)\s*\])?\s*$"
)


def _minutes(text: str, lineno: int, what: str) -> int:
    value = float(text)
    rounded = round(value)
    # planners separate dependent actions by a small epsilon
    if abs(value - rounded) > 0.01 + 1e-9:
        raise TraceParseError(lineno, f"{what} {text} is not a whole minute")
    return int(rounded)


def import_plan_trace(problem: TouristProblem, trace: str) -> Plan:
    """Read ``time: (action args) [duration]`` lines into a Plan.

    Names that match no location are kept verbatim so that ``validate``
    reports them as unknown POIs.
    """
    back = {name: loc for loc, name in location_names(problem).items()}
    t0 = problem.route.t_start
    moves: list[tuple[int, int, MoveAction]] = []
    visits: list[tuple[int, int, VisitAction]] = []
    for lineno, raw in enumerate(trace.splitlines(), start=1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if m is None:
            raise TraceParseError(lineno, f"expected 'time: (action args) [duration]', got {raw.strip()!r}")
        if m["d"] is None:
            raise TraceParseError(lineno, "missing [duration]")
        start = _minutes(m["t"], lineno, "start") + t0
        dur = _minutes(m["d"], lineno, "duration")
        action, *args = m["body"].lower().split()
        locs = [back.get(a, a) for a in args]
        if action == "move":
            if len(args) != 3:
                raise TraceParseError(lineno, f"move takes 3 arguments, got {len(args)}")
            moves.append((start, lineno, MoveAction(locs[0], locs[2], start, dur)))
        elif action in ("visit", "eat"):
            if len(args) != 2:
                raise TraceParseError(lineno, f"{action} takes 2 arguments, got {len(args)}")
            visits.append((start, lineno, VisitAction(locs[0], start, dur)))
        else:
            raise TraceParseError(lineno, f"unknown action {action!r}")
    moves.sort(key=lambda t: t[:2])
    visits.sort(key=lambda t: t[:2])
    return Plan(visits=tuple(v for *_, v in visits), moves=tuple(m for *_, m in moves))


def plan_to_trace(problem: TouristProblem, plan: Plan) -> str:
    """Write a plan in the trace format read by :func:`import_plan_trace`."""
    names = location_names(problem)
    t0 = problem.route.t_start
    out = []
    for a in chronological(plan):
        if isinstance(a, MoveAction):
            body = f"move {names.get(a.from_loc, a.from_loc)} {PERSON} {names.get(a.to_loc, a.to_loc)}"
        else:
            action = "eat" if a.poi_id == RESTAURANT else "visit"
            body = f"{action} {names.get(a.poi_id, a.poi_id)} {PERSON}"
        out.append(f"{a.t_s - t0:.3f}: ({body}) [{a.dur:.3f}]")
    return "\n".join(out) + ("\n" if out else "")
