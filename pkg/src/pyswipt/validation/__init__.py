"""PySWIPT Validation Package

Brute-force oracles and verification utilities certifying the power-control
policies on small instances.
"""

from .oracle import (
    OracleSolution,
    OracleInstance,
    OracleReport,
    SchedulingGap,
    grid_search_allocation,
    simplex_grid,
    harvest_split,
    random_instance,
    random_batch,
    oracle_scenarios,
    constraint_violations,
    verify,
    compare_scheduling,
    reports_frame,
    policy_options_for,
    MAX_GRID_K,
    DEFAULT_POWER_RESOLUTION,
    DEFAULT_BETA_RESOLUTION
)

__all__ = [
    "OracleSolution",
    "OracleInstance",
    "OracleReport",
    "SchedulingGap",
    "grid_search_allocation",
    "simplex_grid",
    "harvest_split",
    "random_instance",
    "random_batch",
    "oracle_scenarios",
    "constraint_violations",
    "verify",
    "compare_scheduling",
    "reports_frame",
    "policy_options_for",
    "MAX_GRID_K",
    "DEFAULT_POWER_RESOLUTION",
    "DEFAULT_BETA_RESOLUTION",
]
