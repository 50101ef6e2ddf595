"""
PySWIPT Single-User Uplink Policies

The base station beams all of its power on the sub-channel with the best
power-transfer gain; the mobile spends whatever it harvests beyond its
circuit power on uplink information transfer.
"""

from typing import Tuple
import logging

import numpy as np

from ..utils.types import (
    ScenarioParams,
    ChannelRealization,
    Allocation,
    SolveDiagnostics,
    ThroughputReport,
    RateMode,
    UserMode,
    ITDirection,
    zero_allocation,
    make_report
)
from ..allocation.core import (
    waterfill_nonnegative,
    greedy_inversion,
    descending_order,
    unpermute
)
from ..exceptions import ValidationError
from .base_policy import (
    BasePolicy,
    register_policy,
    check_dimensions,
    check_power_budget,
    check_uplink_budget,
    meets
)


logger = logging.getLogger(__name__)


def power_tone(g_prime: np.ndarray, p_t: float) -> Tuple[np.ndarray, int]:
    """All power on the strongest power-transfer sub-channel (lowest index on ties)."""
    best = int(descending_order(g_prime)[0])
    powers = np.zeros(g_prime.size)
    powers[best] = p_t
    return powers, best


def _uplink_setup(ch: ChannelRealization, p: ScenarioParams):
    g_prime, g_up = ch.uplink_gains()
    if g_prime.size != p.K:
        raise ValidationError(f"expected {p.K} sub-channels, got {g_prime.size}",
                              field_name="g_prime", invalid_value=g_prime.size)
    downlink, best = power_tone(g_prime, p.p_t)
    budget = p.p_t * float(g_prime[best]) - p.p_c
    return g_prime, g_up, downlink, best, budget


def solve_su_ul_variable(ch: ChannelRealization, p: ScenarioParams) -> Allocation:
    """Single-user uplink IT with variable coding rates.

    Args:
        ch: Uplink-IT channel realization
        p: Scenario

    Returns:
        Allocation with one-hot downlink powers and water-filled uplink powers;
        infeasible when p_t * max g' < p_c
    """
    g_prime, g_up, downlink, best, budget = _uplink_setup(ch, p)
    if budget < 0:
        logger.info(f"SU-UL infeasible: harvest {budget + p.p_c:.6g} < p_c={p.p_c:.6g}")
        return zero_allocation(p.K, uplink=True)
    wf = waterfill_nonnegative(g_up, budget)
    logger.debug(f"SU-UL variable: tone={best}, uplink budget={budget:.6g}, eta={wf.water_level:.6g}")
    return Allocation(
        downlink_powers=downlink,
        uplink_powers=wf.powers,
        feasible=True,
        diagnostics=SolveDiagnostics(
            water_level=wf.water_level,
            stream_count=len(wf.active_set),
            permutation=tuple(int(i) for i in descending_order(g_prime)),
            extra={"uplink_budget": budget, "power_tone": best}
        )
    )


def solve_su_ul_fixed(ch: ChannelRealization, p: ScenarioParams) -> Allocation:
    """Single-user uplink IT with fixed coding rates.

    The uplink budget buys SNR theta on the strongest uplink sub-channels
    first (greedy channel inversion with costs theta / g_n).
    """
    if p.rate_mode is not RateMode.FIXED:
        raise ValidationError("solve_su_ul_fixed needs rate_mode=fixed",
                              field_name="rate_mode", invalid_value=p.rate_mode.value)
    g_prime, g_up, downlink, best, budget = _uplink_setup(ch, p)
    if budget < 0:
        logger.info(f"SU-UL infeasible: harvest {budget + p.p_c:.6g} < p_c={p.p_c:.6g}")
        return zero_allocation(p.K, uplink=True)
    order = descending_order(g_up)
    with np.errstate(divide="ignore"):
        costs = p.theta / g_up[order]
    greedy = greedy_inversion(costs, budget)
    logger.debug(f"SU-UL fixed: k*={greedy.count}, uplink budget={budget:.6g}")
    return Allocation(
        downlink_powers=downlink,
        uplink_powers=unpermute(greedy.powers, order),
        feasible=True,
        diagnostics=SolveDiagnostics(
            stream_count=greedy.count,
            permutation=tuple(int(i) for i in order),
            objective=greedy.count * p.fixed_rate,
            extra={"uplink_budget": budget, "power_tone": best}
        )
    )


def equal_power_su_ul(g_prime: np.ndarray, p: ScenarioParams) -> Allocation:
    """P_n = p_t / K; the harvested surplus is spread evenly over the uplink."""
    powers = np.full(p.K, p.p_t / p.K)
    surplus = float(np.dot(powers, g_prime)) - p.p_c
    uplink = np.full(p.K, max(surplus, 0.0) / p.K)
    return Allocation(downlink_powers=powers, uplink_powers=uplink,
                      feasible=surplus > 0 or p.p_c == 0,
                      diagnostics=SolveDiagnostics(stream_count=int(np.count_nonzero(uplink))))


def throughput_su_ul(
    alloc: Allocation,
    ch: ChannelRealization,
    p: ScenarioParams
) -> ThroughputReport:
    """Exact single-user uplink throughput.

    Variable rates: sum log2(1 + Q_n g_n); fixed rates: log2(1 + theta) per
    stream with Q_n g_n >= theta. Both are gated by sum P_n g'_n >= p_c.

    Raises:
        ValidationError: On dimension mismatch
        AllocationError: If the uplink powers exceed sum P_n g'_n - p_c
    """
    check_dimensions(alloc, ch, p)
    check_power_budget(alloc, p)
    g_prime, g_up = ch.uplink_gains()
    uplink = alloc.uplink_powers if alloc.uplink_powers is not None else np.zeros(p.K)
    harvested = float(np.dot(alloc.downlink_powers, g_prime))
    check_uplink_budget(np.array([uplink.sum()]), np.array([harvested - p.p_c]))
    circuit_ok = bool(meets(harvested, p.p_c))
    snr = uplink * g_up
    if p.rate_mode is RateMode.VARIABLE:
        rates = np.log2(1.0 + snr)
    else:
        rates = np.where((uplink > 0) & meets(snr, p.theta), p.fixed_rate, 0.0)
    if not circuit_ok:
        rates = np.zeros_like(rates)
    return make_report(rates, p.K, circuit_ok)


@register_policy(UserMode.SINGLE, ITDirection.UPLINK)
class SingleUserUplinkPolicy(BasePolicy):
    """Optimal single-user uplink-IT policy for either rate mode."""

    @classmethod
    def supports(cls, scenario: ScenarioParams) -> bool:
        return scenario.user_mode is UserMode.SINGLE and not scenario.is_downlink

    def solve(self, ch: ChannelRealization) -> Allocation:
        if self.scenario.is_fixed_rate:
            return solve_su_ul_fixed(ch, self.scenario)
        return solve_su_ul_variable(ch, self.scenario)

    def throughput(self, alloc: Allocation, ch: ChannelRealization) -> ThroughputReport:
        return throughput_su_ul(alloc, ch, self.scenario)
