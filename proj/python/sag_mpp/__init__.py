"""Split-and-group multi-robot planner for fully occupied grid graphs."""

from ._sag import (
    InfeasibleError,
    generate_instance,
    instance_to_json,
    lower_bounds,
    optimal_makespan,
    plan_to_json,
    solve,
    verify,
)

__all__ = [
    "InfeasibleError",
    "generate_instance",
    "instance_to_json",
    "lower_bounds",
    "optimal_makespan",
    "plan_to_json",
    "solve",
    "verify",
]
