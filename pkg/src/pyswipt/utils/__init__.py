"""PySWIPT Utilities Package

This package contains the shared data types and the unit conversions used by
the channel model, the policy solvers and the configuration layer.
"""

from .types import (
    UserMode,
    ITDirection,
    RateMode,
    BoundChoice,
    ScenarioParams,
    ChannelRealization,
    SolveDiagnostics,
    Allocation,
    ThroughputReport,
    ArrayLike,
    CONSTRAINT_TOL,
    zero_allocation,
    make_report,
    create_scenario,
    create_downlink_channels,
    create_uplink_channels
)

from .units import (
    SPEED_OF_LIGHT,
    db_to_linear,
    linear_to_db,
    dbm_to_watts,
    watts_to_dbm,
    wavelength_from_frequency,
    normalize_circuit_power
)

__all__ = [
    # Types
    "UserMode",
    "ITDirection",
    "RateMode",
    "BoundChoice",
    "ScenarioParams",
    "ChannelRealization",
    "SolveDiagnostics",
    "Allocation",
    "ThroughputReport",
    "ArrayLike",
    "CONSTRAINT_TOL",
    "zero_allocation",
    "make_report",
    "create_scenario",
    "create_downlink_channels",
    "create_uplink_channels",
    # Units
    "SPEED_OF_LIGHT",
    "db_to_linear",
    "linear_to_db",
    "dbm_to_watts",
    "watts_to_dbm",
    "wavelength_from_frequency",
    "normalize_circuit_power",
]
