"""PySWIPT - Broadband SWIPT Power Control

Power control for simultaneous wireless information and power transfer over
parallel sub-channels, where every mobile must harvest its circuit power
before it can receive or transmit.

Main components:
- Exceptions: error hierarchy with context dictionaries
- Types: scenarios, channel realizations, allocations and throughput reports
- Channels: free-space aperture model with line-of-sight fading
- Allocation: water-filling, circuit-constrained dual water-filling and
  greedy channel inversion
- Policies: optimal policies for single/multi-user downlink/uplink IT with
  variable or fixed coding rates, behind one registry
- Validation: brute-force oracles for small instances
- Simulation: Monte Carlo sweeps with equal-power and TD-IPT baselines
"""

from .exceptions import (
    PySwiptError,
    ValidationError,
    ConfigError,
    ChannelError,
    SolverError,
    InfeasibleError,
    AllocationError,
    OracleSizeError,
    SimulationError
)

from .utils.types import (
    UserMode,
    ITDirection,
    RateMode,
    BoundChoice,
    ScenarioParams,
    ChannelRealization,
    SolveDiagnostics,
    Allocation,
    ThroughputReport,
    create_scenario,
    create_downlink_channels,
    create_uplink_channels
)

from .channels import (
    LinkGeometry,
    FadingSample,
    GeometryTable,
    ChannelModel,
    sample_fading,
    link_gain,
    draw_realization,
    create_geometry_table
)

from .allocation import (
    WaterfillResult,
    GreedyInversionResult,
    waterfill,
    dual_waterfill_circuit,
    greedy_inversion
)

from .policies import (
    BasePolicy,
    create_policy,
    available_policies,
    evaluate_throughput,
    solve_su_dl_variable,
    solve_su_dl_fixed,
    solve_su_ul_variable,
    solve_su_ul_fixed,
    solve_mu_dl_variable,
    solve_mu_dl_fixed,
    solve_mu_ul_variable,
    solve_mu_ul_fixed,
    exhaustive_schedule_mu_ul_variable,
    beta_star
)

from .validation import (
    OracleReport,
    grid_search_allocation,
    verify,
    compare_scheduling
)

from .simulation import (
    SimConfig,
    CurveSet,
    run_sweep,
    create_sim_config,
    equal_power_solve,
    tdipt_solve,
    write_curves_csv,
    write_curves_svg,
    write_reports_csv
)

__version__ = "0.1.0"
__all__ = [
    # Exceptions
    "PySwiptError",
    "ValidationError",
    "ConfigError",
    "ChannelError",
    "SolverError",
    "InfeasibleError",
    "AllocationError",
    "OracleSizeError",
    "SimulationError",
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
    "create_scenario",
    "create_downlink_channels",
    "create_uplink_channels",
    # Channels
    "LinkGeometry",
    "FadingSample",
    "GeometryTable",
    "ChannelModel",
    "sample_fading",
    "link_gain",
    "draw_realization",
    "create_geometry_table",
    # Allocation
    "WaterfillResult",
    "GreedyInversionResult",
    "waterfill",
    "dual_waterfill_circuit",
    "greedy_inversion",
    # Policies
    "BasePolicy",
    "create_policy",
    "available_policies",
    "evaluate_throughput",
    "solve_su_dl_variable",
    "solve_su_dl_fixed",
    "solve_su_ul_variable",
    "solve_su_ul_fixed",
    "solve_mu_dl_variable",
    "solve_mu_dl_fixed",
    "solve_mu_ul_variable",
    "solve_mu_ul_fixed",
    "exhaustive_schedule_mu_ul_variable",
    "beta_star",
    # Validation
    "OracleReport",
    "grid_search_allocation",
    "verify",
    "compare_scheduling",
    # Simulation
    "SimConfig",
    "CurveSet",
    "run_sweep",
    "create_sim_config",
    "equal_power_solve",
    "tdipt_solve",
    "write_curves_csv",
    "write_curves_svg",
    "write_reports_csv"
]
