"""
PySWIPT Baselines

Reference schemes the optimal policies are compared against:

- Equal power: P_n = p_t / K with the smallest power diversion that still
  meets the circuit constraint (variable rates) or the closed-form splitting
  ratio (fixed rates).
- TD-IPT: each slot is split into a power-transfer half and an
  information-transfer half. The harvester must collect twice the circuit
  power during its half; rates carry a factor 1/2. Uplink TD-IPT uses the
  full array in both halves, doubling g' and g.
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
    make_report
)
from ..allocation.core import waterfill_nonnegative, greedy_inversion, ascending_order, unpermute
from ..policies.base_policy import BasePolicy, register_baseline, create_policy
from ..policies.su_downlink import equal_power_su_dl
from ..policies.su_uplink import equal_power_su_ul
from ..policies.mu_downlink import equal_power_mu_dl
from ..policies.mu_uplink import equal_power_mu_ul
from ..policies.throughput import evaluate_throughput


logger = logging.getLogger(__name__)

TDIPT_UPLINK_ARRAY_GAIN = 2.0


def equal_power_allocation(scenario: ScenarioParams, ch: ChannelRealization) -> Allocation:
    """Allocation of the equal-power baseline for any scenario type."""
    if scenario.is_downlink:
        h = ch.downlink_gains()
        if scenario.is_single_user:
            return equal_power_su_dl(h, scenario)
        return equal_power_mu_dl(h, scenario)
    g_prime, _ = ch.uplink_gains()
    if scenario.is_single_user:
        return equal_power_su_ul(g_prime, scenario)
    return equal_power_mu_ul(g_prime, scenario)


def equal_power_solve(scenario: ScenarioParams, ch: ChannelRealization) -> ThroughputReport:
    """Throughput of the equal-power baseline.

    Args:
        scenario: Scenario
        ch: Channel realization

    Returns:
        ThroughputReport from the scenario's exact evaluator
    """
    return evaluate_throughput(equal_power_allocation(scenario, ch), ch, scenario)


def _tdipt_downlink(scenario: ScenarioParams, ch: ChannelRealization) -> Tuple[Allocation, np.ndarray]:
    """Information-half allocation and the mobiles powered in the MPT half."""
    h = ch.downlink_gains()
    K = scenario.K
    need = 2.0 * scenario.p_c

    if scenario.is_single_user:
        powered = np.full(K, scenario.p_t * float(np.max(h)) >= need)
    elif need == 0:
        powered = h > 0
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            costs = np.where(h > 0, need / h, np.inf)
        order = ascending_order(costs)
        greedy = greedy_inversion(costs[order], scenario.p_t)
        powered = np.zeros(K, dtype=bool)
        powered[order[:greedy.count]] = np.isfinite(costs[order[:greedy.count]])

    usable = np.where(powered, h, 0.0)
    if not np.any(powered):
        powers = np.zeros(K)
    elif scenario.is_fixed_rate:
        with np.errstate(divide="ignore"):
            costs = np.where(usable > 0, scenario.theta / np.where(usable > 0, usable, 1.0), np.inf)
        order = ascending_order(costs)
        powers = unpermute(greedy_inversion(costs[order], scenario.p_t).powers, order)
    else:
        powers = waterfill_nonnegative(usable, scenario.p_t).powers

    alloc = Allocation(
        downlink_powers=powers,
        beta=1.0 if scenario.is_single_user else np.ones(K),
        feasible=bool(np.any(powered)),
        diagnostics=SolveDiagnostics(
            stream_count=int(np.count_nonzero(powers)),
            extra={"powered": tuple(int(i) for i in np.flatnonzero(powered))}
        )
    )
    return alloc, powered


def tdipt_allocation(scenario: ScenarioParams, ch: ChannelRealization) -> Allocation:
    """Allocation used in the information-transfer half of a TD-IPT slot.

    Uplink TD-IPT returns the allocation of the SWIPT solver run on doubled
    gains with doubled circuit power.
    """
    if scenario.is_downlink:
        return _tdipt_downlink(scenario, ch)[0]
    doubled = scenario.replace(p_c=2.0 * scenario.p_c)
    return create_policy(doubled).solve(ch.scaled(TDIPT_UPLINK_ARRAY_GAIN))


def tdipt_throughput(
    alloc: Allocation,
    ch: ChannelRealization,
    scenario: ScenarioParams
) -> ThroughputReport:
    """Halved throughput of a TD-IPT allocation."""
    if scenario.is_downlink:
        powered = np.zeros(scenario.K, dtype=bool)
        powered[list(alloc.diagnostics.extra.get("powered", ()))] = True
        # decoding at beta = 1; the circuit is fed from the power-transfer half
        full = evaluate_throughput(alloc, ch, scenario.replace(p_c=0.0))
        rates = np.where(powered, np.asarray(full.per_stream), 0.0)
        circuit_ok = bool(np.any(powered))
    else:
        doubled = scenario.replace(p_c=2.0 * scenario.p_c)
        full = evaluate_throughput(alloc, ch.scaled(TDIPT_UPLINK_ARRAY_GAIN), doubled)
        rates = np.asarray(full.per_stream)
        circuit_ok = full.circuit_ok
    return make_report(rates / 2.0, scenario.K, circuit_ok)


def tdipt_solve(scenario: ScenarioParams, ch: ChannelRealization) -> ThroughputReport:
    """Throughput of the TD-IPT baseline.

    Args:
        scenario: Scenario
        ch: Channel realization

    Returns:
        ThroughputReport with rates carrying the factor 1/2
    """
    alloc = tdipt_allocation(scenario, ch)
    report = tdipt_throughput(alloc, ch, scenario)
    logger.debug(f"TD-IPT {scenario.label}: se={report.spectral_efficiency:.6g}")
    return report


@register_baseline("equal_power")
class EqualPowerPolicy(BasePolicy):
    """Equal power on every sub-channel, no power control."""

    def solve(self, ch: ChannelRealization) -> Allocation:
        return equal_power_allocation(self.scenario, ch)


@register_baseline("tdipt")
class TDIPTPolicy(BasePolicy):
    """Time-division information and power transfer with equal halves."""

    def solve(self, ch: ChannelRealization) -> Allocation:
        return tdipt_allocation(self.scenario, ch)

    def throughput(self, alloc: Allocation, ch: ChannelRealization) -> ThroughputReport:
        return tdipt_throughput(alloc, ch, self.scenario)
