"""Brute-force optimum for small problems.

Enumerates every ordered subset of POIs, every lunch position and every
grid duration, schedules each candidate at earliest start and keeps the best
by (objective, visits, sequence). The only pruning is dropping a prefix that
is already infeasible; its extensions are still counted so ``candidates``
always equals the closed form in :func:`enumeration_count`.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction
from itertools import combinations, permutations

from .model import RESTAURANT, ProblemError, TouristProblem
from .scoring import ALL_METRICS, Evaluator, MetricKind
from .solver import InfeasibleError, SolveResult, build_result, duration_grid

MAX_VISITS = 7
EPS = 1e-9


class OracleRefusedError(ProblemError):
    """The problem is too large to enumerate."""


def enumerable_pois(problem: TouristProblem) -> list[str]:
    """POIs whose shortest visit fits the horizon at all."""
    return [r.poi_id for r in problem.visits if r.dmin <= problem.total_time]


def enumeration_count(problem: TouristProblem, grid: int) -> int:
    """Number of candidate plans, computed from combinatorics alone."""
    pois = enumerable_pois(problem)
    sizes = {p: len(duration_grid(problem.recommendation(p).dmin,
                                  problem.recommendation(p).dmax, grid)) for p in pois}
    total = 0
    for k in range(len(pois) + 1):
        for subset in combinations(pois, k):
            total += math.factorial(k) * math.prod(sizes[p] for p in subset) * (
                k + 1 if problem.has_lunch else 1
            )
    return total


class _Enumerator:
    def __init__(self, problem: TouristProblem, kinds, grid: int):
        self.problem = problem
        self.kinds = list(kinds)
        self.route = problem.route
        self.pois = enumerable_pois(problem)
        self.grids = {
            p: duration_grid(problem.recommendation(p).dmin, problem.recommendation(p).dmax, grid)
            for p in self.pois
        }
        self.evf = Evaluator(problem, exact=False)
        self.lunch = self.route.lunch
        self.lunch_len = self.lunch.length if self.lunch else 0
        self.candidates = 0
        self.feasible = 0
        self.best = {k: math.inf for k in self.kinds}
        # per metric: totals key -> (float value, n, sequence)
        self.ties = {k: {} for k in self.kinds}

    def subtree(self, remaining: list[str], pending: bool) -> int:
        """Candidates extending a prefix, the prefix's own closure included."""
        sizes = [len(self.grids[p]) for p in remaining]
        # elementary symmetric sums of the grid sizes
        e = [1] + [0] * len(sizes)
        for s in sizes:
            for k in range(len(sizes), 0, -1):
                e[k] += e[k - 1] * s
        extra = 1 if pending else 0
        return sum(math.factorial(k + extra) * e[k] for k in range(len(sizes) + 1))

    def run(self) -> None:
        self._extend(self.route.start_loc, self.route.t_start, [], (), 0, 0, 0, 0,
                     self.lunch is not None)

    def _close(self, loc, t, seq, n, value_sum, weighted, visit_time, journey) -> None:
        self.candidates += 1
        tr = self.problem.travel.duration(loc, self.route.final_loc)
        if t + tr > self.route.t_end:
            return
        self.feasible += 1
        journey += tr
        free = self.problem.total_time - visit_time - journey - self.lunch_len
        key = (n, value_sum, weighted, visit_time, journey, free)
        for kind in self.kinds:
            val = self.evf.objective(kind, n, value_sum, weighted, visit_time, journey, free)
            best = self.best[kind]
            if val > best + EPS:
                continue
            ties = self.ties[kind]
            if val < best - EPS:
                self.best[kind] = val
                cutoff = val + EPS
                for k2 in [k2 for k2, c in ties.items() if c[0] > cutoff]:
                    del ties[k2]
            elif val < best:
                self.best[kind] = val
            old = ties.get(key)
            if old is None or (n, seq) < old[1:]:
                ties[key] = (val, n, seq)

    def _extend(self, loc, t, remaining_used, seq, n, value_sum, weighted, visit_time, pending,
                journey=0) -> None:
        problem = self.problem
        travel = problem.travel
        remaining = [p for p in self.pois if p not in remaining_used]
        if not pending:
            self._close(loc, t, seq, n, value_sum, weighted, visit_time, journey)
        for p in remaining:
            rec = problem.recommendation(p)
            h = problem.opening(p)
            tr = travel.duration(loc, p)
            start = max(t + tr, h.open)
            rest = [q for q in remaining if q != p]
            for d in self.grids[p]:
                finish = start + d
                if finish > h.close or finish > self.route.t_end or (
                    pending and finish > self.lunch.start
                ):
                    self.candidates += self.subtree(rest, pending)
                    continue
                self._extend(p, finish, remaining_used + [p], seq + ((p, d),), n + 1,
                             value_sum + rec.value, weighted + rec.value * d,
                             visit_time + d, pending, journey + tr)
        if pending:
            tr = travel.duration(loc, RESTAURANT)
            if t + tr > self.lunch.start:
                self.candidates += self.subtree(remaining, False)
            else:
                self._extend(RESTAURANT, self.lunch.end, remaining_used,
                             seq + ((RESTAURANT, self.lunch_len),), n, value_sum, weighted,
                             visit_time, False, journey + tr)

    def winner(self, kind: MetricKind):
        ties = self.ties[kind]
        if not ties:
            return None
        ex = Evaluator(self.problem, exact=True)
        best = None
        for key, (_, n, seq) in ties.items():
            exact: Fraction = ex.objective(kind, *key)
            cand = (exact, n, seq)
            if best is None or cand < best:
                best = cand
        return best


def oracle_solve_all(problem: TouristProblem, kinds=ALL_METRICS, grid: int = 10,
                     max_visits: int = MAX_VISITS) -> dict[MetricKind, SolveResult]:
    """Optimal plans for several metrics from a single enumeration."""
    if len(problem.visits) > max_visits:
        raise OracleRefusedError(
            f"{len(problem.visits)} POIs exceeds the enumeration limit of {max_visits}"
        )
    if grid < 1:
        raise ValueError("grid must be >= 1")
    t0 = time.perf_counter()
    en = _Enumerator(problem, kinds, grid)
    en.run()
    elapsed = (time.perf_counter() - t0) * 1000.0
    out = {}
    for kind in en.kinds:
        key = en.winner(kind)
        if key is None:
            raise InfeasibleError("no feasible plan for this problem")
        out[kind] = build_result(problem, kind, key, en.candidates, elapsed, True)
    return out


def oracle_solve(problem: TouristProblem, kind: MetricKind, grid: int = 10,
                 max_visits: int = MAX_VISITS) -> SolveResult:
    """Exact optimum by exhaustive enumeration (``nodes_explored`` = candidates)."""
    return oracle_solve_all(problem, (kind,), grid, max_visits)[kind]


def count_candidates(problem: TouristProblem, grid: int = 10) -> tuple[int, int]:
    """(candidates enumerated, feasible candidates) for the exhaustiveness check."""
    en = _Enumerator(problem, (MetricKind.M1,), grid)
    en.run()
    return en.candidates, en.feasible
