"""PySWIPT Policies Package

Optimal power-control policies for the four system types (single/multi user,
downlink/uplink information transfer) in both coding-rate modes, the policy
registry, and the unified throughput evaluator.
"""

from .base_policy import (
    BasePolicy,
    OPTIMAL,
    register_policy,
    register_baseline,
    create_policy,
    available_policies,
    keep_better
)

from .su_downlink import (
    SingleUserDownlinkPolicy,
    BetaSearchOptions,
    solve_su_dl_variable,
    solve_su_dl_fixed,
    throughput_su_dl,
    beta_star,
    snr_weight,
    parse_bound_choice,
    equal_power_su_dl
)

from .su_uplink import (
    SingleUserUplinkPolicy,
    solve_su_ul_variable,
    solve_su_ul_fixed,
    throughput_su_ul,
    equal_power_su_ul
)

from .mu_downlink import (
    MultiUserDownlinkPolicy,
    solve_mu_dl_variable,
    solve_mu_dl_fixed,
    throughput_mu_dl,
    active_count_rates,
    exact_prefix_powers,
    split_snr,
    equal_power_mu_dl,
    MU_DL_BOUNDS
)

from .mu_uplink import (
    MultiUserUplinkPolicy,
    ExhaustiveSchedulingPolicy,
    solve_mu_ul_variable,
    exhaustive_schedule_mu_ul_variable,
    solve_mu_ul_fixed,
    throughput_mu_ul,
    uplink_costs,
    equal_power_mu_ul,
    MAX_EXHAUSTIVE_K
)

from .throughput import evaluate_throughput

__all__ = [
    # Registry
    "BasePolicy",
    "OPTIMAL",
    "register_policy",
    "register_baseline",
    "create_policy",
    "available_policies",
    "keep_better",
    # Single-user downlink
    "SingleUserDownlinkPolicy",
    "BetaSearchOptions",
    "solve_su_dl_variable",
    "solve_su_dl_fixed",
    "throughput_su_dl",
    "beta_star",
    "snr_weight",
    "parse_bound_choice",
    "equal_power_su_dl",
    # Single-user uplink
    "SingleUserUplinkPolicy",
    "solve_su_ul_variable",
    "solve_su_ul_fixed",
    "throughput_su_ul",
    "equal_power_su_ul",
    # Multi-user downlink
    "MultiUserDownlinkPolicy",
    "solve_mu_dl_variable",
    "solve_mu_dl_fixed",
    "throughput_mu_dl",
    "active_count_rates",
    "exact_prefix_powers",
    "split_snr",
    "equal_power_mu_dl",
    "MU_DL_BOUNDS",
    # Multi-user uplink
    "MultiUserUplinkPolicy",
    "ExhaustiveSchedulingPolicy",
    "solve_mu_ul_variable",
    "exhaustive_schedule_mu_ul_variable",
    "solve_mu_ul_fixed",
    "throughput_mu_ul",
    "uplink_costs",
    "equal_power_mu_ul",
    "MAX_EXHAUSTIVE_K",
    # Throughput
    "evaluate_throughput",
]
