"""Succinct population protocols: construction, lowering, verification and simulation."""

from ._core import (
    Protocol,
    decide,
    flock_binary,
    flock_standard,
    from_semigroup,
    linear_inequality,
    linear_system,
    lowered_state_count,
    majority_leaders,
    run_cli,
    simulate,
    to_2way,
    verify,
)

__all__ = [
    "Protocol",
    "decide",
    "flock_binary",
    "flock_standard",
    "from_semigroup",
    "linear_inequality",
    "linear_system",
    "lowered_state_count",
    "majority_leaders",
    "run_cli",
    "simulate",
    "to_2way",
    "verify",
]
