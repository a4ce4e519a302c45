"""Offline-optimal transmission policies for energy-harvesting two-hop
relay networks: solver, verification, scheduling, and study reproduction."""

from ._core import (
    DomainError,
    SchemaError,
    ValidationError,
    broadcast_power,
    broadcast_split,
    epoch_energy,
    grid_search_throughput,
    link_rate,
    mac_rate_bounds,
    reproduce_figure,
    single_arrival_oracle,
    solve,
    validate_scenario,
    verify,
)

__all__ = [
    "DomainError",
    "SchemaError",
    "ValidationError",
    "broadcast_power",
    "broadcast_split",
    "epoch_energy",
    "grid_search_throughput",
    "link_rate",
    "mac_rate_bounds",
    "reproduce_figure",
    "single_arrival_oracle",
    "solve",
    "validate_scenario",
    "verify",
]
