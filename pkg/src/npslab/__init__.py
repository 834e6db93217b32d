"""Exhaustive analysis of the generalised Novelli-Pak-Stoyanovskii sort on Young tableaux."""

from npslab.engine import SortTrace, Transposition, drop_records, sort
from npslab.errors import CapacityError, DomainError, InvariantViolation
from npslab.stats import aggregate, aggregate_sample, complexity, is_uniform
from npslab.young import (
    Cell,
    Partition,
    Tableau,
    column_order,
    enumerate_syt,
    enumerate_tableaux,
    is_standard,
    row_order,
    strip_order,
    strip_orders,
    syt_count,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError", "Cell", "DomainError", "InvariantViolation", "Partition", "SortTrace",
    "Tableau", "Transposition", "aggregate", "aggregate_sample", "column_order", "complexity",
    "drop_records", "enumerate_syt", "enumerate_tableaux", "is_standard", "is_uniform",
    "row_order", "sort", "strip_order", "strip_orders", "syt_count",
]
