"""PySWIPT Simulation Package

Monte Carlo sweeps of spectral efficiency versus circuit power, the
equal-power and TD-IPT baselines, and the CSV/SVG writers.
"""

from .baselines import (
    EqualPowerPolicy,
    TDIPTPolicy,
    equal_power_allocation,
    equal_power_solve,
    tdipt_allocation,
    tdipt_throughput,
    tdipt_solve
)

from .simulator import (
    SimConfig,
    CurveSet,
    CURVE_COLUMNS,
    run_sweep,
    create_sim_config
)

from .export import (
    write_curves_csv,
    write_curves_svg,
    write_reports_csv
)

__all__ = [
    # Baselines
    "EqualPowerPolicy",
    "TDIPTPolicy",
    "equal_power_allocation",
    "equal_power_solve",
    "tdipt_allocation",
    "tdipt_throughput",
    "tdipt_solve",
    # Sweeps
    "SimConfig",
    "CurveSet",
    "CURVE_COLUMNS",
    "run_sweep",
    "create_sim_config",
    # Export
    "write_curves_csv",
    "write_curves_svg",
    "write_reports_csv",
]
