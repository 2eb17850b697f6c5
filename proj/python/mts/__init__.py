"""Parallel budgeted tree search: reverse search enumeration and SAT."""

from ._core import (
    AbortError,
    InputError,
    UsageError,
    compute_efficiency,
    enumerate,
    joblist_ratio,
    offspring_variance,
    predicted_ratio,
    select_budget,
    solve_sat,
)


def count(app, text, **kwargs):
    """Number of objects enumerated by ``app`` for the input text."""
    return enumerate(app, text, count_only=True, **kwargs)["count"]


__all__ = [
    "AbortError",
    "InputError",
    "UsageError",
    "compute_efficiency",
    "count",
    "enumerate",
    "joblist_ratio",
    "offspring_variance",
    "predicted_ratio",
    "select_budget",
    "solve_sat",
]
