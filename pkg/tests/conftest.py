import random
from pathlib import Path

import pytest

from touragenda.model import RESTAURANT, load_plan, load_problem
from touragenda.solver import InfeasibleError, schedule_sequence

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def day():
    return load_problem((DATA / "day.json").read_text())


@pytest.fixture(scope="session")
def day_plans():
    return {n: load_plan((DATA / f"day_plan{n}.json").read_text()) for n in range(1, 5)}


def random_plan(problem, rng: random.Random, tries: int = 50):
    """A random feasible plan: random subset, order, lunch slot and durations."""
    pois = list(problem.poi_ids)
    for _ in range(tries):
        k = rng.randint(0, len(pois))
        seq = rng.sample(pois, k)
        if problem.has_lunch:
            seq.insert(rng.randint(0, k), RESTAURANT)
        durs = []
        for p in seq:
            if p == RESTAURANT:
                durs.append(None)
            else:
                rec = problem.recommendation(p)
                durs.append(rng.randint(rec.dmin, rec.dmax))
        try:
            return schedule_sequence(problem, seq, durs)
        except InfeasibleError:
            continue
    return None


ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    """Record one acceptance line; the summary prints them after the run."""

    def record(name: str, ok: bool, detail: str) -> None:
        ACCEPTANCE.append((name, ok, detail))
        print(f"{name}: {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, detail

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
