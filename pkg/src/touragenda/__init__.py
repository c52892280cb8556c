"""Personalised tourist agendas: scoring, validation and exact search."""

from .model import (
    RESTAURANT,
    Plan,
    TouristProblem,
    free_time,
    load_plan,
    load_problem,
    total_time,
)
from .scoring import MetricKind, breakdown, metric
from .solver import InfeasibleError, SolveOptions, SolveResult, schedule_sequence, solve
from .validate import Violation, ViolationCode, explain, validate

__version__ = "0.1.0"

__all__ = [
    "RESTAURANT",
    "InfeasibleError",
    "MetricKind",
    "Plan",
    "SolveOptions",
    "SolveResult",
    "TouristProblem",
    "Violation",
    "ViolationCode",
    "breakdown",
    "explain",
    "free_time",
    "load_plan",
    "load_problem",
    "metric",
    "schedule_sequence",
    "solve",
    "total_time",
    "validate",
]
