"""Exact agenda search by depth-first branch and bound.

A search node is a route prefix: the stops placed so far (each with a
duration picked from the POI's duration grid) scheduled at their earliest
start. Children append one more stop; every node whose lunch is settled also
closes into a complete plan by moving to the destination.

Bounds and leaf values are screened in floats and rechecked with exact
fractions whenever they fall within ``EPS`` of the incumbent, so the returned
objective is the exact optimum over the grid and ties are broken by
(objective, number of visits, stop sequence).
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .model import (
    RESTAURANT,
    MoveAction,
    OccupPref,
    Plan,
    ProblemError,
    TouristProblem,
    VisitAction,
    VisitPref,
)
from .scoring import Evaluator, MetricKind, OccupVariant, PenaltyBreakdown, breakdown, metric
from .validate import validate

EPS = 1e-9
INF = math.inf


class InfeasibleError(ProblemError):
    """No plan satisfies the constraints (or none was found within limits)."""

    def __init__(self, message: str, proven: bool = True):
        super().__init__(message)
        self.proven = proven


@dataclass
class SolveOptions:
    duration_grid: int = 5
    node_limit: int | None = None
    time_limit: float | None = None
    seed: int | None = None


@dataclass(frozen=True)
class SolveResult:
    plan: Plan
    objective: Fraction
    breakdown: PenaltyBreakdown
    kind: MetricKind
    nodes_explored: int
    elapsed_ms: float
    proven_optimal: bool

    @property
    def n_visits(self) -> int:
        return len(self.plan.poi_visits())

    def to_dict(self) -> dict:
        from .model import plan_to_dict
        from .scoring import fraction_json

        b = self.breakdown
        return {
            "metric": self.kind.value,
            "objective": fraction_json(self.objective),
            "proven_optimal": self.proven_optimal,
            "nodes_explored": self.nodes_explored,
            "elapsed_ms": round(self.elapsed_ms, 3),
            "plan": plan_to_dict(self.plan),
            "breakdown": {
                **{
                    f: fraction_json(getattr(b, f))
                    for f in ("u1", "u2", "u3", "p_u1", "p_u2", "p_u3", "p_journey", "p_visits", "p_occup")
                },
                "free_time": b.free_time,
                "occup_variant": b.occup_variant.value,
            },
        }


def duration_grid(dmin: int, dmax: int, step: int) -> list[int]:
    """Grid durations ``dmin, dmin+step, ...`` plus ``dmax`` itself."""
    if step < 1:
        raise ValueError("duration grid step must be >= 1")
    grid = list(range(dmin, dmax + 1, step))
    if grid[-1] != dmax:
        grid.append(dmax)
    return grid


def schedule_sequence(
    problem: TouristProblem, ordered_pois: list[str], durations: list[int | None]
) -> Plan:
    """Earliest-start schedule for a fixed stop order and durations.

    The lunch stop (``RESTAURANT``) always starts at the lunch start and its
    duration may be given as None. Raises InfeasibleError when a window,
    the lunch slot or the route end cannot be met.
    """
    route = problem.route
    travel = problem.travel
    if len(ordered_pois) != len(durations):
        raise ValueError("ordered_pois and durations differ in length")
    if len(set(ordered_pois)) != len(ordered_pois):
        raise InfeasibleError("a stop appears twice in the sequence")
    if problem.has_lunch and RESTAURANT not in ordered_pois:
        raise InfeasibleError("lunch is required but the sequence has no lunch stop")
    loc, t = route.start_loc, route.t_start
    visits, moves = [], []
    for poi, dur in zip(ordered_pois, durations):
        tr = travel.duration(loc, poi)
        arrive = t + tr
        if poi == RESTAURANT:
            lunch = route.lunch
            if lunch is None:
                raise InfeasibleError("lunch stop in a route without lunch")
            if dur is not None and dur != lunch.length:
                raise InfeasibleError(f"lunch lasts {lunch.length}, not {dur}")
            if arrive > lunch.start:
                raise InfeasibleError(f"reaches lunch at {arrive}, after {lunch.start}")
            start, dur = lunch.start, lunch.length
        else:
            if not problem.is_poi(poi):
                raise InfeasibleError(f"unknown POI {poi!r}")
            h = problem.opening(poi)
            start = max(arrive, h.open)
            if start + dur > h.close:
                raise InfeasibleError(f"{poi} cannot finish before closing time {h.close}")
        if start + dur > route.t_end:
            raise InfeasibleError(f"{poi} ends after the route end {route.t_end}")
        moves.append(MoveAction(loc, poi, t, tr))
        visits.append(VisitAction(poi, start, dur))
        loc, t = poi, start + dur
    if loc != route.final_loc or not moves:
        tr = travel.duration(loc, route.final_loc)
        if t + tr > route.t_end:
            raise InfeasibleError(f"cannot reach {route.final_loc} before {route.t_end}")
        if loc != route.final_loc:
            moves.append(MoveAction(loc, route.final_loc, t, tr))
    return Plan(tuple(visits), tuple(moves))


class Instance:
    """Index-based view of a problem used by the search and the oracle.

    POIs are 0..n-1, then the lunch stop, the origin and the destination.
    """

    def __init__(self, problem: TouristProblem, grid: int):
        self.problem = problem
        route = problem.route
        self.ids = list(problem.poi_ids)
        n = self.n = len(self.ids)
        self.R, self.S, self.F = n, n + 1, n + 2
        names = self.ids + [RESTAURANT, route.start_loc, route.final_loc]
        self.names = names
        self.tr = [
            [
                problem.travel.duration(p, q)
                if (p != RESTAURANT and q != RESTAURANT) or problem.has_lunch
                else 0
                for q in names
            ]
            for p in names
        ]
        recs = [problem.recommendation(p) for p in self.ids]
        hours = [problem.opening(p) for p in self.ids]
        self.value = [r.value for r in recs]
        self.dmin = [r.dmin for r in recs]
        self.dmax = [r.dmax for r in recs]
        self.open = [h.open for h in hours]
        self.close = [h.close for h in hours]
        self.grid = [duration_grid(r.dmin, r.dmax, grid) for r in recs]
        self.t_start, self.t_end = route.t_start, route.t_end
        self.total = problem.total_time
        self.lunch = route.lunch is not None
        self.l_start = route.lunch.start if self.lunch else 0
        self.l_end = route.lunch.end if self.lunch else 0
        self.lunch_len = self.l_end - self.l_start
        self.max_tr = max((max(row) for row in self.tr), default=0)


@dataclass(slots=True)
class SearchNode:
    """A route prefix; ``mask`` is the set of visited POIs as a bitset."""

    loc: int
    time: int
    mask: int = 0
    lunch_done: bool = False
    n: int = 0
    value_sum: int = 0
    weighted: int = 0
    visit_time: int = 0
    journey: int = 0
    seq: tuple = field(default=())


class BranchAndBound:
    def __init__(self, problem: TouristProblem, kind: MetricKind, opts: SolveOptions | None = None):
        self.opts = opts or SolveOptions()
        self.problem = problem
        self.kind = kind
        self.inst = Instance(problem, self.opts.duration_grid)
        self.ev = Evaluator(problem, exact=False)
        self.ex = Evaluator(problem, exact=True)
        inst = self.inst
        # high value per minute first
        order = sorted(range(inst.n), key=lambda i: (-inst.value[i] / inst.dmin[i], inst.ids[i]))
        if self.opts.seed is not None:
            random.Random(self.opts.seed).shuffle(order)
        self.order = order
        self.by_value = sorted(range(inst.n), key=lambda i: -inst.value[i])
        self.best_f = INF
        self.best_key = None
        self.nodes = 0
        self._deadline = None

    # ---------------------------------------------------------- bounds

    def candidates(self, node: SearchNode) -> list[int]:
        """Unvisited POIs that could still fit somewhere after this prefix."""
        inst = self.inst
        pending = inst.lunch and not node.lunch_done
        out = []
        row = inst.tr[node.loc]
        for c in range(inst.n):
            if node.mask >> c & 1:
                continue
            latest = min(inst.close[c], inst.t_end)
            s = max(node.time + row[c], inst.open[c])
            if pending:
                ok = s + inst.dmin[c] <= min(latest, inst.l_start)
                ok = ok or max(inst.l_end, inst.open[c]) + inst.dmin[c] <= latest
            else:
                ok = s + inst.dmin[c] <= latest
            if ok:
                out.append(c)
        return out

    def lower_bound(self, node: SearchNode, exact: bool = False):
        """Admissible bound on the metric of every completion of ``node``."""
        inst = self.inst
        ev = self.ex if exact else self.ev
        kind = self.kind
        cands = self.candidates(node)
        pending = inst.lunch and not node.lunch_done
        row = inst.tr[node.loc]
        full_lunch = inst.lunch_len if inst.lunch else 0
        if not cands and not pending:
            # only one completion left: go to the destination
            tr = row[inst.F]
            if node.time + tr > inst.t_end:
                return INF
            journey = node.journey + tr
            free = inst.total - node.visit_time - journey - full_lunch
            return ev.objective(kind, node.n, node.value_sum, node.weighted,
                                node.visit_time, journey, free)
        outs = [row[c] for c in cands]
        outs.append(row[inst.R] if pending else row[inst.F])
        min_out = min(outs)
        pend_l = inst.lunch_len if pending else 0
        used_now = node.visit_time + node.journey + (inst.lunch_len if node.lunch_done else 0)
        remaining = inst.t_end - node.time
        waited = (node.time - inst.t_start) - used_now
        extra = pend_l + sum(inst.dmax[c] for c in cands) + (len(cands) + 1 + pending) * inst.max_tr
        free_lb = max(waited, inst.total - used_now - min(remaining, extra))
        free_ub = inst.total - used_now - pend_l - min_out
        if free_ub < 0 or free_lb > free_ub:
            return INF

        pref_o = ev.pref_occup
        if pref_o is OccupPref.HIGH:
            po = ev.p_occup(free_lb, kind.variant)
        else:
            po = ev.p_occup(free_ub, kind.variant)
        journey = ev.p_journey(node.journey + min_out)
        cap = remaining - pend_l - min_out
        if pref_o is OccupPref.HIGH and kind is not MetricKind.M2:
            # journey + slack = horizon - lunch - visit time, so it cannot
            # drop below what the remaining visit time leaves uncovered
            most = node.visit_time + min(max(cap, 0), sum(inst.dmax[c] for c in cands))
            floor = ev.p_journey(inst.total - full_lunch - most)
            if floor > journey + po:
                journey, po = floor, ev.p_journey(0)

        if kind is MetricKind.M1 or kind is MetricKind.M1_PRIME:
            # each extra visit trades its value share against the count term
            step = _count_step(ev)
            base = ev.p_u1(node.value_sum) + ev.p_visits(node.n)
            for c in cands:
                gain = ev.div(inst.value[c], ev.value_total) - step
                if gain > 0:
                    base -= gain
            return base + journey + po

        if ev.pref_visits is VisitPref.MANY:
            pv = ev.p_visits(node.n + len(cands))
        else:
            pv = ev.p_visits(node.n)
        if kind is MetricKind.M2:
            gain = 0
            cset = set(cands)
            for c in self.by_value:
                if cap <= 0:
                    break
                if c not in cset:
                    continue
                take = min(inst.dmax[c], cap)
                gain += inst.value[c] * take
                cap -= take
            return ev.p_u2(node.weighted + gain) + pv + po
        maxv = max((inst.value[c] for c in cands), default=None)
        if node.visit_time > 0 and (maxv is None or node.weighted >= maxv * node.visit_time):
            pu3 = ev.p_u3(node.weighted, node.visit_time)
        elif maxv is not None:
            pu3 = ev.p_u3(maxv, 1)
        else:
            pu3 = ev.p_u3(0, 0)
        return pu3 + journey + pv + po

    # ---------------------------------------------------------- search

    def _prune(self, node: SearchNode) -> bool:
        if self.best_key is None:
            return self.lower_bound(node) == INF
        b = self.lower_bound(node)
        if b > self.best_f + EPS:
            return True
        if b < self.best_f - EPS:
            return False
        exact = self.lower_bound(node, exact=True)
        best_obj, best_n, best_seq = self.best_key
        if exact > best_obj:
            return True
        if exact < best_obj:
            return False
        # a tie at best can only win on fewer visits or an earlier sequence
        if node.n > best_n:
            return True
        return node.n == best_n and node.seq > best_seq[: len(node.seq)]

    def _leaf(self, node: SearchNode) -> None:
        inst = self.inst
        tr = inst.tr[node.loc][inst.F]
        if node.time + tr > inst.t_end:
            return
        journey = node.journey + tr
        free = inst.total - node.visit_time - journey - (inst.lunch_len if inst.lunch else 0)
        args = (self.kind, node.n, node.value_sum, node.weighted, node.visit_time, journey, free)
        val = self.ev.objective(*args)
        if val > self.best_f + EPS:
            return
        exact = self.ex.objective(*args)
        key = (exact, node.n, node.seq)
        if self.best_key is None or key < self.best_key:
            self.best_key = key
            self.best_f = float(exact)

    def _tick(self) -> None:
        self.nodes += 1
        limit = self.opts.node_limit
        if limit is not None and self.nodes > limit:
            raise _Stop
        if self._deadline is not None and self.nodes & 255 == 0:
            if time.perf_counter() > self._deadline:
                raise _Stop

    def _dfs(self, node: SearchNode) -> None:
        self._tick()
        if self._prune(node):
            return
        inst = self.inst
        pending = inst.lunch and not node.lunch_done
        if not pending:
            self._leaf(node)
        row = inst.tr[node.loc]
        for c in self.order:
            if node.mask >> c & 1:
                continue
            start = max(node.time + row[c], inst.open[c])
            latest = min(inst.close[c], inst.t_end)
            if pending:
                latest = min(latest, inst.l_start)
            v = inst.value[c]
            for d in reversed(inst.grid[c]):
                finish = start + d
                if finish > latest:
                    continue
                self._dfs(
                    SearchNode(
                        loc=c,
                        time=finish,
                        mask=node.mask | (1 << c),
                        lunch_done=node.lunch_done,
                        n=node.n + 1,
                        value_sum=node.value_sum + v,
                        weighted=node.weighted + v * d,
                        visit_time=node.visit_time + d,
                        journey=node.journey + row[c],
                        seq=node.seq + ((inst.ids[c], d),),
                    )
                )
        if pending and node.time + row[inst.R] <= inst.l_start:
            self._dfs(
                SearchNode(
                    loc=inst.R,
                    time=inst.l_end,
                    mask=node.mask,
                    lunch_done=True,
                    n=node.n,
                    value_sum=node.value_sum,
                    weighted=node.weighted,
                    visit_time=node.visit_time,
                    journey=node.journey + row[inst.R],
                    seq=node.seq + ((RESTAURANT, inst.lunch_len),),
                )
            )

    def root(self) -> SearchNode:
        return SearchNode(loc=self.inst.S, time=self.inst.t_start)

    def run(self) -> SolveResult:
        t0 = time.perf_counter()
        if self.opts.time_limit is not None:
            self._deadline = t0 + self.opts.time_limit
        proven = True
        try:
            self._dfs(self.root())
        except _Stop:
            proven = False
        elapsed = (time.perf_counter() - t0) * 1000.0
        if self.best_key is None:
            if proven:
                raise InfeasibleError("no feasible plan for this problem")
            raise InfeasibleError("no feasible plan found within the search limits", proven=False)
        return build_result(self.problem, self.kind, self.best_key, self.nodes, elapsed, proven)


class _Stop(Exception):
    pass


def _count_step(ev: Evaluator):
    """Signed change of the visit-count penalty per extra visit."""
    if not ev.n_total or ev.pref_visits is VisitPref.INDIF:
        return ev.div(0, 1)
    one = ev.div(1, ev.n_total)
    return one if ev.pref_visits is VisitPref.FEW else -one


def build_result(problem, kind, key, nodes, elapsed_ms, proven) -> SolveResult:
    """Turn a winning (objective, n, sequence) key into a checked SolveResult."""
    objective, _, seq = key
    plan = schedule_sequence(problem, [p for p, _ in seq], [d for _, d in seq])
    violations = validate(problem, plan)
    if violations:
        raise RuntimeError(f"search produced an invalid plan: {violations}")
    value = metric(problem, plan, kind)
    if value != objective:
        raise RuntimeError(f"objective mismatch: search {objective}, rescored {value}")
    return SolveResult(
        plan=plan,
        objective=value,
        breakdown=breakdown(problem, plan, kind.variant),
        kind=kind,
        nodes_explored=nodes,
        elapsed_ms=elapsed_ms,
        proven_optimal=proven,
    )


def solve(problem: TouristProblem, kind: MetricKind, opts: SolveOptions | None = None) -> SolveResult:
    """Minimise ``kind`` over all plans whose durations lie on the grid."""
    return BranchAndBound(problem, kind, opts).run()


def lower_bound(problem: TouristProblem, node: SearchNode, kind: MetricKind,
                opts: SolveOptions | None = None) -> Fraction | float:
    """Exact admissible bound for ``node`` (``inf`` when it cannot complete)."""
    return BranchAndBound(problem, kind, opts).lower_bound(node, exact=True)


__all__ = [
    "InfeasibleError",
    "Instance",
    "SearchNode",
    "SolveOptions",
    "SolveResult",
    "OccupVariant",
    "duration_grid",
    "lower_bound",
    "schedule_sequence",
    "solve",
]
