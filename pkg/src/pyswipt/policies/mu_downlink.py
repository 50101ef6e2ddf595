"""
PySWIPT Multi-User Downlink Policies

One sub-channel per mobile; every active mobile must harvest its own circuit
power from the signal it receives.

This module provides:
- solve_mu_dl_variable: search over the number of active mobiles with an
  offset water-filling per candidate count (variable coding rates), on the
  lower-bound or the exact objective
- solve_mu_dl_fixed: common splitting ratio and greedy channel inversion
  (fixed coding rates)
- equal_power_mu_dl: equal powers with per-mobile splitting ratios
- throughput_mu_dl: exact per-mobile throughput with circuit indicators
"""

from typing import Dict, Union
import logging

import numpy as np
from scipy.optimize import brentq

from ..utils.types import (
    ScenarioParams,
    ChannelRealization,
    Allocation,
    SolveDiagnostics,
    ThroughputReport,
    RateMode,
    UserMode,
    ITDirection,
    BoundChoice,
    CONSTRAINT_TOL,
    zero_allocation,
    make_report
)
from ..allocation.core import (
    greedy_inversion,
    descending_order,
    ascending_order,
    unpermute,
    BRENTQ_XTOL,
    BRENTQ_RTOL
)
from ..exceptions import ValidationError
from .base_policy import (
    BasePolicy,
    register_policy,
    check_dimensions,
    check_power_budget,
    keep_better,
    meets,
    require_beta,
    snr_after_split
)
from .su_downlink import beta_star, fixed_rate_powers, parse_bound_choice


logger = logging.getLogger(__name__)


def _downlink_gains(ch: ChannelRealization, p: ScenarioParams) -> np.ndarray:
    h = ch.downlink_gains()
    if h.size != p.K:
        raise ValidationError(f"expected {p.K} mobiles, got {h.size}",
                              field_name="h", invalid_value=h.size)
    return h


def active_count_rates(h_sorted: np.ndarray, p_t: float, p_c: float) -> Dict[int, float]:
    """Lower-bound sum rate of every admissible number of active mobiles.

    For L active mobiles (the L strongest) the information powers are
    T_n = w_L - 1/h_n with water level
    w_L = (p_t + (1 - p_c) sum_{n<=L} 1/h_n) / L, and the sum rate is
    sum_{n<=L} log2(h_n w_L). Counts stop at the first L whose budget
    p_t - p_c sum 1/h_n is negative or whose weakest T_n is not positive.

    Returns:
        Mapping L -> sum rate for L = 1..l_max (empty when l_max = 0)
    """
    rates: Dict[int, float] = {}
    inv_sum = 0.0
    for L in range(1, h_sorted.size + 1):
        if h_sorted[L - 1] <= 0:
            break
        inv = 1.0 / h_sorted[L - 1]
        inv_sum += inv
        if p_t - p_c * inv_sum < 0:
            break
        level = (p_t + (1.0 - p_c) * inv_sum) / L
        if not level > inv:
            break
        rates[L] = float(np.sum(np.log2(h_sorted[:L] * level)))
    return rates


MU_DL_BOUNDS = (BoundChoice.LOWER, BoundChoice.EXACT)


def split_snr(x: np.ndarray, p: ScenarioParams) -> np.ndarray:
    """SNR of mobiles receiving ``x`` that keep exactly p_c for their circuits."""
    x = np.asarray(x, dtype=float)
    drained = x - p.p_c
    with np.errstate(divide="ignore", invalid="ignore"):
        snr = drained * x / (drained * p.sigma_a2 + p.sigma_b2 * x)
    return np.where((x > 0) & (drained > 0), snr, 0.0)


def _marginal(x: float, p: ScenarioParams) -> float:
    """d/dx ln(1 + split_snr(x)); strictly decreasing on x >= p_c."""
    slope = 1.0
    if p.p_c > 0:
        slope += (p.p_c ** 2) * p.sigma_a2 * p.sigma_b2 / (x - p.p_c * p.sigma_a2) ** 2
    return slope / (1.0 + float(split_snr(np.array([x]), p)[0]))


def _received_at(mu: float, p: ScenarioParams) -> float:
    """Received power where the marginal rate drops to ``mu``."""
    if _marginal(p.p_c, p) <= mu:
        return p.p_c
    hi = p.p_c + 1.0 / ((p.sigma_b2 or 1.0) * mu)
    return float(brentq(lambda x: _marginal(x, p) - mu, p.p_c, hi,
                        xtol=BRENTQ_XTOL, rtol=BRENTQ_RTOL))


def exact_prefix_powers(h_active: np.ndarray, p: ScenarioParams) -> np.ndarray:
    """Powers maximising the exact sum rate when all of ``h_active`` harvest p_c.

    Each mobile gets P_n >= p_c / h_n and the marginal rates h_n r'(P_n h_n)
    are equalised by bisection on the common multiplier.
    """
    floor = p.p_c / h_active
    if p.p_t - float(np.sum(floor)) <= CONSTRAINT_TOL * max(1.0, p.p_t):
        return floor

    def excess(nu: float) -> float:
        return sum(_received_at(nu / g, p) / g for g in h_active) - p.p_t

    nu_hi = float(np.max(h_active)) * _marginal(p.p_c, p)
    nu_lo = nu_hi
    while excess(nu_lo) <= 0:
        nu_lo /= 2.0
    nu = float(brentq(excess, nu_lo, nu_hi, xtol=BRENTQ_XTOL, rtol=BRENTQ_RTOL))
    return np.array([_received_at(nu / g, p) / g for g in h_active])


def _solve_mu_dl_exact(h: np.ndarray, order: np.ndarray, p: ScenarioParams) -> Allocation:
    h_sorted = h[order]
    inv_sum = np.cumsum(np.where(h_sorted > 0, 1.0 / np.where(h_sorted > 0, h_sorted, 1.0), np.inf))
    with np.errstate(invalid="ignore"):
        floors = p.p_c * inv_sum
    counts = [L for L in range(1, p.K + 1) if floors[L - 1] <= p.p_t]
    if not counts or h_sorted[0] <= 0:
        logger.info(f"MU-DL infeasible: no mobile can cover p_c={p.p_c:.6g} with p_t={p.p_t}")
        return zero_allocation(p.K, beta=np.zeros(p.K), diagnostics=SolveDiagnostics(
            stream_count=0, permutation=tuple(int(i) for i in order),
            extra={"bound": BoundChoice.EXACT.value}))

    candidates = {}
    for L in counts:
        powers = exact_prefix_powers(h_sorted[:L], p)
        rate = float(np.sum(np.log2(1.0 + split_snr(powers * h_sorted[:L], p))))
        candidates[L] = (rate, powers)
    rates = {L: c[0] for L, c in candidates.items()}
    best = max(rates.values())
    L_star = min(L for L, r in rates.items() if r >= best - CONSTRAINT_TOL * max(1.0, best))

    sorted_powers = np.zeros(p.K)
    sorted_powers[:L_star] = candidates[L_star][1]
    powers = unpermute(sorted_powers, order)
    betas = np.zeros(p.K)
    active = powers > 0
    betas[active] = np.clip(1.0 - p.p_c / (powers[active] * h[active]), 0.0, 1.0)
    logger.debug(f"MU-DL variable (exact): L*={L_star}, l_max={max(counts)}")
    return Allocation(
        downlink_powers=powers,
        beta=betas,
        feasible=True,
        diagnostics=SolveDiagnostics(
            stream_count=L_star,
            permutation=tuple(int(i) for i in order),
            objective=rates[L_star],
            extra={"bound": BoundChoice.EXACT.value, "l_max": max(counts), "candidate_rates": rates}
        )
    )


def solve_mu_dl_variable(
    ch: ChannelRealization,
    p: ScenarioParams,
    bound_choice: Union[str, BoundChoice] = BoundChoice.LOWER
) -> Allocation:
    """Multi-user downlink IT with variable coding rates.

    The lower-bound objective has a closed-form water level per candidate
    count and is returned as computed. The exact objective equalises
    marginal rates numerically for every prefix of the strongest mobiles;
    its result is replaced by equal_power_mu_dl when that scores higher.

    Args:
        ch: Downlink-IT realization, one gain per mobile
        p: Scenario with user_mode=multi
        bound_choice: "lower" (default) or "exact"

    Returns:
        Allocation with per-mobile splitting ratios; active mobiles harvest
        exactly p_c and inactive mobiles get beta_n = 0

    Raises:
        ValidationError: On a wrong channel size or an unsupported bound choice
    """
    h = _downlink_gains(ch, p)
    order = descending_order(h)
    bound = parse_bound_choice(bound_choice)
    if bound not in MU_DL_BOUNDS:
        raise ValidationError(
            f"multi-user downlink supports bound_choice lower or exact, got {bound.value}",
            field_name="bound_choice", invalid_value=bound.value,
            expected=", ".join(b.value for b in MU_DL_BOUNDS)
        )
    if bound is BoundChoice.EXACT:
        if p.sigma_b2 == 0 and p.p_c > 0:
            raise ValidationError("exact objective needs sigma_b2 > 0 when p_c > 0",
                                  field_name="sigma_b2", invalid_value=p.sigma_b2)
        return keep_better(_solve_mu_dl_exact(h, order, p), equal_power_mu_dl(h, p),
                           lambda a: throughput_mu_dl(a, ch, p).sum_throughput)
    h_sorted = h[order]
    rates = active_count_rates(h_sorted, p.p_t, p.p_c)
    if not rates:
        logger.info(f"MU-DL infeasible: no mobile can cover p_c={p.p_c:.6g} with p_t={p.p_t}")
        return zero_allocation(p.K, beta=np.zeros(p.K), diagnostics=SolveDiagnostics(
            stream_count=0, permutation=tuple(int(i) for i in order)))

    # first maximiser, i.e. the smallest count on ties
    L_star = max(rates, key=lambda L: (rates[L], -L))
    inv = 1.0 / h_sorted[:L_star]
    level = (p.p_t + (1.0 - p.p_c) * float(np.sum(inv))) / L_star
    sorted_powers = np.zeros(p.K)
    sorted_powers[:L_star] = (level - inv) + p.p_c * inv
    powers = unpermute(sorted_powers, order)

    betas = np.zeros(p.K)
    active = powers > 0
    betas[active] = 1.0 - p.p_c / (powers[active] * h[active])
    betas = np.clip(betas, 0.0, 1.0)
    logger.debug(f"MU-DL variable: L*={L_star}, l_max={max(rates)}, level={level:.6g}")
    return Allocation(
        downlink_powers=powers,
        beta=betas,
        feasible=True,
        diagnostics=SolveDiagnostics(
            water_level=level,
            stream_count=L_star,
            permutation=tuple(int(i) for i in order),
            objective=rates[L_star],
            extra={"bound": BoundChoice.LOWER.value, "l_max": max(rates), "candidate_rates": rates}
        )
    )


def equal_power_mu_dl(h: np.ndarray, p: ScenarioParams) -> Allocation:
    """P_n = p_t / K for every mobile.

    Fixed rates use beta*(1) everywhere. Variable rates give each mobile the
    largest ratio that still leaves p_c for its harvester, and 0 when its
    received power cannot cover p_c.
    """
    powers = np.full(p.K, p.p_t / p.K)
    if p.is_fixed_rate:
        betas = np.full(p.K, beta_star(p, 1))
    else:
        received = powers * h
        with np.errstate(divide="ignore"):
            betas = np.where(received > 0, np.maximum(0.0, 1.0 - p.p_c / received), 0.0)
    return Allocation(downlink_powers=powers, beta=betas,
                      diagnostics=SolveDiagnostics(stream_count=p.K))


def solve_mu_dl_fixed(ch: ChannelRealization, p: ScenarioParams) -> Allocation:
    """Multi-user downlink IT with fixed coding rates.

    Every mobile uses the single-stream splitting ratio beta*(1). A mobile's
    required power theta (beta sigma_a^2 + sigma_b^2)/(beta h_n) gives SNR
    theta and harvests exactly p_c; at p_c = 0 it reduces to theta / h_n.
    Mobiles are served cheapest first until p_t is exhausted.
    """
    if p.rate_mode is not RateMode.FIXED:
        raise ValidationError("solve_mu_dl_fixed needs rate_mode=fixed",
                              field_name="rate_mode", invalid_value=p.rate_mode.value)
    h = _downlink_gains(ch, p)
    beta = beta_star(p, 1)
    if beta <= 0:
        return zero_allocation(p.K, beta=np.zeros(p.K))
    required = fixed_rate_powers(p, beta, h)
    order = ascending_order(required)
    greedy = greedy_inversion(required[order], p.p_t)
    powers = unpermute(greedy.powers, order)
    logger.debug(f"MU-DL fixed: m_max={greedy.count}, beta~*={beta:.6g}")
    return Allocation(
        downlink_powers=powers,
        beta=np.full(p.K, beta),
        feasible=greedy.count > 0,
        diagnostics=SolveDiagnostics(
            stream_count=greedy.count,
            permutation=tuple(int(i) for i in order),
            objective=greedy.count * p.fixed_rate
        )
    )


def throughput_mu_dl(
    alloc: Allocation,
    ch: ChannelRealization,
    p: ScenarioParams
) -> ThroughputReport:
    """Exact multi-user downlink throughput with per-mobile indicators."""
    check_dimensions(alloc, ch, p)
    check_power_budget(alloc, p)
    h = ch.downlink_gains()
    betas = require_beta(alloc)
    powers = alloc.downlink_powers
    harvest_ok = meets((1.0 - betas) * powers * h, p.p_c)
    snr = snr_after_split(powers, h, betas, p)
    if p.rate_mode is RateMode.VARIABLE:
        rates = np.log2(1.0 + snr)
    else:
        rates = np.where((powers > 0) & meets(snr, p.theta), p.fixed_rate, 0.0)
    rates = np.where(harvest_ok, rates, 0.0)
    return make_report(rates, p.K, bool(np.any(harvest_ok & (powers > 0))))


@register_policy(UserMode.MULTI, ITDirection.DOWNLINK)
class MultiUserDownlinkPolicy(BasePolicy):
    """Optimal multi-user downlink-IT policy for either rate mode.

    For variable rates the solver output is never worse than equal power:
    the equal-power allocation is kept whenever its exact throughput is
    higher.

    Options:
        bound_choice: Objective for variable rates ("lower" or "exact")
    """

    @classmethod
    def supports(cls, scenario: ScenarioParams) -> bool:
        return scenario.user_mode is UserMode.MULTI and scenario.is_downlink

    def solve(self, ch: ChannelRealization) -> Allocation:
        if self.scenario.is_fixed_rate:
            return solve_mu_dl_fixed(ch, self.scenario)
        alloc = solve_mu_dl_variable(
            ch, self.scenario,
            bound_choice=self.options.get("bound_choice", BoundChoice.LOWER)
        )
        h = _downlink_gains(ch, self.scenario)
        return keep_better(alloc, equal_power_mu_dl(h, self.scenario),
                           lambda a: self.throughput(a, ch).sum_throughput)

    def throughput(self, alloc: Allocation, ch: ChannelRealization) -> ThroughputReport:
        return throughput_mu_dl(alloc, ch, self.scenario)
