"""
PySWIPT Multi-User Uplink Policies

The base station powers several mobiles, one sub-channel each; every mobile
transmits all of its harvested power beyond p_c back on its own sub-channel.

This module provides:
- solve_mu_ul_variable: schedule the mobiles with the best power-transfer
  gains first, then water-fill over composite round-trip gains
- exhaustive_schedule_mu_ul_variable: optimal reference over every subset
- solve_mu_ul_fixed: greedy inversion on the per-mobile cost
  v_n = (theta / g_n + p_c) / g'_n
- equal_power_mu_ul: equal downlink powers, every mobile sends its surplus
- throughput_mu_ul: exact throughput with per-mobile circuit indicators
"""

from typing import Tuple, Sequence
from itertools import combinations
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
    ascending_order,
    unpermute
)
from ..exceptions import ValidationError, OracleSizeError
from .base_policy import (
    BasePolicy,
    register_policy,
    register_baseline,
    check_dimensions,
    check_power_budget,
    check_uplink_budget,
    keep_better,
    meets
)


logger = logging.getLogger(__name__)

MAX_EXHAUSTIVE_K = 20


def _uplink_gains(ch: ChannelRealization, p: ScenarioParams) -> Tuple[np.ndarray, np.ndarray]:
    g_prime, g_up = ch.uplink_gains()
    if g_prime.size != p.K:
        raise ValidationError(f"expected {p.K} mobiles, got {g_prime.size}",
                              field_name="g_prime", invalid_value=g_prime.size)
    return g_prime, g_up


def schedule_subset(
    indices: Sequence[int],
    g_prime: np.ndarray,
    g_up: np.ndarray,
    p: ScenarioParams
) -> Tuple[float, np.ndarray, np.ndarray]:
    """Water-fill the uplink of a scheduled set of mobiles.

    Each scheduled mobile is first given p_c / g'_n so it can switch on; the
    remaining budget is water-filled over the composite gains g_n g'_n.

    Returns:
        (sum rate, downlink powers, uplink powers) over all K mobiles;
        rate is -inf when the circuit powers alone exceed p_t
    """
    idx = np.asarray(indices, dtype=int)
    powers = np.zeros(g_prime.size)
    uplink = np.zeros(g_prime.size)
    if idx.size == 0 or np.any(g_prime[idx] <= 0):
        return float("-inf"), powers, uplink
    offsets = p.p_c / g_prime[idx]
    budget = p.p_t - float(np.sum(offsets))
    if budget < 0:
        return float("-inf"), powers, uplink
    composite = g_up[idx] * g_prime[idx]
    wf = waterfill_nonnegative(composite, budget)
    powers[idx] = wf.powers + offsets
    uplink[idx] = wf.powers * g_prime[idx]
    rate = float(np.sum(np.log2(1.0 + wf.powers * composite)))
    return rate, powers, uplink


def solve_mu_ul_variable(ch: ChannelRealization, p: ScenarioParams) -> Allocation:
    """Multi-user uplink IT with variable coding rates (sequential scheduling).

    Mobiles are ranked by g'. z_max is the largest count whose circuit powers
    fit in p_t; every count k <= z_max is water-filled and the best k kept.

    Args:
        ch: Uplink-IT realization, one (g', g) pair per mobile
        p: Scenario with user_mode=multi

    Returns:
        Allocation with P_n = U_n + p_c/g'_n and Q_n = P_n g'_n - p_c on the
        scheduled mobiles
    """
    g_prime, g_up = _uplink_gains(ch, p)
    order = descending_order(g_prime)
    ranked = g_prime[order]
    with np.errstate(divide="ignore", invalid="ignore"):
        offsets = np.where(ranked > 0, p.p_c / ranked, np.inf)
    z_max = int(np.count_nonzero(np.cumsum(offsets) <= p.p_t))
    if z_max == 0:
        logger.info(f"MU-UL infeasible: no mobile can cover p_c={p.p_c:.6g}")
        return zero_allocation(p.K, uplink=True, diagnostics=SolveDiagnostics(
            stream_count=0, permutation=tuple(int(i) for i in order)))

    best_k, best = 0, (float("-inf"), np.zeros(p.K), np.zeros(p.K))
    for k in range(1, z_max + 1):
        candidate = schedule_subset(order[:k], g_prime, g_up, p)
        if candidate[0] > best[0]:
            best_k, best = k, candidate
    rate, powers, uplink = best
    logger.debug(f"MU-UL variable: z_max={z_max}, k*={best_k}, rate={rate:.6g}")
    return Allocation(
        downlink_powers=powers,
        uplink_powers=uplink,
        feasible=True,
        diagnostics=SolveDiagnostics(
            stream_count=best_k,
            permutation=tuple(int(i) for i in order),
            objective=rate,
            extra={"z_max": z_max}
        )
    )


def exhaustive_schedule_mu_ul_variable(ch: ChannelRealization, p: ScenarioParams) -> Allocation:
    """Optimal scheduling reference: water-fill every affordable subset.

    Raises:
        OracleSizeError: If K exceeds the enumeration limit
    """
    g_prime, g_up = _uplink_gains(ch, p)
    if p.K > MAX_EXHAUSTIVE_K:
        raise OracleSizeError(
            f"exhaustive scheduling supports at most {MAX_EXHAUSTIVE_K} mobiles, got {p.K}",
            field_name="K", invalid_value=p.K, expected=f"<= {MAX_EXHAUSTIVE_K}"
        )
    best_subset: Tuple[int, ...] = ()
    best = (float("-inf"), np.zeros(p.K), np.zeros(p.K))
    for size in range(1, p.K + 1):
        for subset in combinations(range(p.K), size):
            candidate = schedule_subset(subset, g_prime, g_up, p)
            if candidate[0] > best[0]:
                best_subset, best = subset, candidate
    rate, powers, uplink = best
    if not best_subset:
        logger.info("MU-UL exhaustive: no affordable subset")
        return zero_allocation(p.K, uplink=True)
    logger.debug(f"MU-UL exhaustive: subset={best_subset}, rate={rate:.6g}")
    return Allocation(
        downlink_powers=powers,
        uplink_powers=uplink,
        feasible=True,
        diagnostics=SolveDiagnostics(
            stream_count=len(best_subset),
            permutation=tuple(int(i) for i in descending_order(g_prime)),
            objective=rate,
            extra={"subset": best_subset}
        )
    )


def uplink_costs(g_prime: np.ndarray, g_up: np.ndarray, p: ScenarioParams) -> np.ndarray:
    """Per-mobile downlink power v_n for SNR theta; infinite when a gain is zero."""
    with np.errstate(divide="ignore", invalid="ignore"):
        costs = (p.theta / g_up + p.p_c) / g_prime
    return np.where((g_prime > 0) & (g_up > 0), costs, np.inf)


def solve_mu_ul_fixed(ch: ChannelRealization, p: ScenarioParams) -> Allocation:
    """Multi-user uplink IT with fixed coding rates.

    Served mobiles receive P_n = v_n and transmit Q_n = theta / g_n, reaching
    SNR theta exactly.
    """
    if p.rate_mode is not RateMode.FIXED:
        raise ValidationError("solve_mu_ul_fixed needs rate_mode=fixed",
                              field_name="rate_mode", invalid_value=p.rate_mode.value)
    g_prime, g_up = _uplink_gains(ch, p)
    costs = uplink_costs(g_prime, g_up, p)
    order = ascending_order(costs)
    greedy = greedy_inversion(costs[order], p.p_t)
    powers = unpermute(greedy.powers, order)
    served = powers > 0
    uplink = np.zeros(p.K)
    uplink[served] = p.theta / g_up[served]
    logger.debug(f"MU-UL fixed: q_max={greedy.count}")
    return Allocation(
        downlink_powers=powers,
        uplink_powers=uplink,
        feasible=greedy.count > 0,
        diagnostics=SolveDiagnostics(
            stream_count=greedy.count,
            permutation=tuple(int(i) for i in order),
            objective=greedy.count * p.fixed_rate
        )
    )


def equal_power_mu_ul(g_prime: np.ndarray, p: ScenarioParams) -> Allocation:
    """P_n = p_t / K; each mobile transmits whatever it harvests beyond p_c."""
    powers = np.full(p.K, p.p_t / p.K)
    uplink = np.maximum(powers * g_prime - p.p_c, 0.0)
    return Allocation(downlink_powers=powers, uplink_powers=uplink,
                      feasible=bool(np.any(uplink > 0)) or p.p_c == 0,
                      diagnostics=SolveDiagnostics(stream_count=int(np.count_nonzero(uplink))))


def throughput_mu_ul(
    alloc: Allocation,
    ch: ChannelRealization,
    p: ScenarioParams
) -> ThroughputReport:
    """Exact multi-user uplink throughput.

    Variable rates: sum log2(1 + (P_n g'_n - p_c) g_n) over mobiles with
    P_n g'_n >= p_c. Fixed rates: log2(1 + theta) per mobile with
    Q_n g_n >= theta and P_n g'_n >= p_c.
    """
    check_dimensions(alloc, ch, p)
    check_power_budget(alloc, p)
    g_prime, g_up = ch.uplink_gains()
    harvested = alloc.downlink_powers * g_prime
    surplus = harvested - p.p_c
    uplink = alloc.uplink_powers if alloc.uplink_powers is not None else np.maximum(surplus, 0.0)
    check_uplink_budget(uplink, surplus)
    circuit_ok = meets(harvested, p.p_c) & (alloc.downlink_powers > 0)
    if p.rate_mode is RateMode.VARIABLE:
        rates = np.log2(1.0 + np.maximum(surplus, 0.0) * g_up)
    else:
        rates = np.where((uplink > 0) & meets(uplink * g_up, p.theta), p.fixed_rate, 0.0)
    rates = np.where(circuit_ok, rates, 0.0)
    return make_report(rates, p.K, bool(np.any(circuit_ok)))


@register_policy(UserMode.MULTI, ITDirection.UPLINK)
class MultiUserUplinkPolicy(BasePolicy):
    """Optimal multi-user uplink-IT policy.

    Variable rates use sequential scheduling and fall back to equal power
    when that scores higher on the exact throughput.
    """

    @classmethod
    def supports(cls, scenario: ScenarioParams) -> bool:
        return scenario.user_mode is UserMode.MULTI and not scenario.is_downlink

    def solve(self, ch: ChannelRealization) -> Allocation:
        if self.scenario.is_fixed_rate:
            return solve_mu_ul_fixed(ch, self.scenario)
        g_prime, _ = _uplink_gains(ch, self.scenario)
        return keep_better(solve_mu_ul_variable(ch, self.scenario),
                           equal_power_mu_ul(g_prime, self.scenario),
                           lambda a: self.throughput(a, ch).sum_throughput)

    def throughput(self, alloc: Allocation, ch: ChannelRealization) -> ThroughputReport:
        return throughput_mu_ul(alloc, ch, self.scenario)


@register_baseline("exhaustive")
class ExhaustiveSchedulingPolicy(MultiUserUplinkPolicy):
    """Exhaustive-scheduling reference for multi-user uplink IT, variable rates."""

    @classmethod
    def supports(cls, scenario: ScenarioParams) -> bool:
        return (super().supports(scenario)
                and scenario.rate_mode is RateMode.VARIABLE
                and scenario.K <= MAX_EXHAUSTIVE_K)

    def solve(self, ch: ChannelRealization) -> Allocation:
        return exhaustive_schedule_mu_ul_variable(ch, self.scenario)
