"""
PySWIPT Single-User Downlink Policies

Power control for one mobile receiving information on all sub-channels while
a power splitter feeds its energy harvester.

This module provides:
- solve_su_dl_variable: splitting-ratio search around circuit-constrained
  dual water-filling (variable coding rates)
- solve_su_dl_fixed: closed-form splitting ratio and greedy channel
  inversion over the strongest sub-channels (fixed coding rates)
- beta_star: positive root of the splitting-ratio quadratic
- equal_power_su_dl: the equal-power allocation both rate modes are compared with
- throughput_su_dl: exact throughput with the circuit-power indicator
- SingleUserDownlinkPolicy: registry entry for both rate modes
"""

from typing import Union, Optional
from dataclasses import dataclass
import logging

import numpy as np
from scipy.optimize import minimize_scalar

from ..utils.types import (
    ScenarioParams,
    ChannelRealization,
    Allocation,
    SolveDiagnostics,
    ThroughputReport,
    BoundChoice,
    RateMode,
    UserMode,
    ITDirection,
    zero_allocation,
    make_report
)
from ..allocation.core import dual_waterfill_circuit, descending_order, unpermute
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


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BetaSearchOptions:
    """Options of the splitting-ratio search.

    Attributes:
        grid_points: Points of the coarse grid over the feasible interval
        xatol: Absolute tolerance of the bounded refinement
    """
    grid_points: int = 200
    xatol: float = 1e-6

    def __post_init__(self) -> None:
        if self.grid_points < 2:
            raise ValidationError(
                f"grid_points must be at least 2, got {self.grid_points}",
                field_name="grid_points", invalid_value=self.grid_points
            )
        if not self.xatol > 0:
            raise ValidationError(
                f"xatol must be positive, got {self.xatol}",
                field_name="xatol", invalid_value=self.xatol
            )


def parse_bound_choice(bound_choice: Union[str, BoundChoice]) -> BoundChoice:
    """Accept a BoundChoice or its string value."""
    if isinstance(bound_choice, BoundChoice):
        return bound_choice
    try:
        return BoundChoice(bound_choice)
    except ValueError as e:
        raise ValidationError(
            f"Invalid bound choice: {bound_choice}",
            field_name="bound_choice",
            invalid_value=bound_choice,
            expected="lower, upper or exact"
        ) from e


def snr_weight(beta: float, p: ScenarioParams, bound: BoundChoice) -> float:
    """Weight s(beta) multiplying P_n h_n inside the log for each objective."""
    if bound is BoundChoice.LOWER:
        return beta
    if bound is BoundChoice.UPPER:
        return beta / p.sigma_b2
    denom = beta * p.sigma_a2 + p.sigma_b2
    return beta / denom if denom > 0 else 0.0


def _dual_on_positive(h: np.ndarray, p: ScenarioParams, beta: float, weight: float):
    """Dual water-filling over the positive gains; zero gains get no power."""
    usable = np.flatnonzero(h > 0)
    result = dual_waterfill_circuit(h[usable], p.p_t, p.p_c, beta, snr_weight=weight)
    powers = np.zeros(h.size)
    powers[usable] = result.powers
    return result, powers


def _bound_objective(powers: np.ndarray, h: np.ndarray, weight: float) -> float:
    return float(np.sum(np.log2(1.0 + weight * powers * h)))


def solve_su_dl_variable(
    ch: ChannelRealization,
    p: ScenarioParams,
    bound_choice: Union[str, BoundChoice] = BoundChoice.LOWER,
    beta_search_opts: Optional[BetaSearchOptions] = None
) -> Allocation:
    """Single-user downlink IT with variable coding rates.

    For every candidate splitting ratio on a grid over the feasible interval
    the powers come from dual_waterfill_circuit; the best grid point is then
    refined with a bounded scalar search between its neighbours. The result
    is scored against equal_power_su_dl with the exact throughput and the
    better of the two is returned.

    Args:
        ch: Downlink-IT channel realization
        p: Scenario with rate_mode=variable
        bound_choice: Objective to optimise ("lower", "upper" or "exact")
        beta_search_opts: Grid size and refinement tolerance

    Returns:
        Allocation with a scalar beta; infeasible when p_t * max h < p_c

    Raises:
        ValidationError: On empty channels, wrong rate mode or bad bound choice
    """
    if p.rate_mode is not RateMode.VARIABLE:
        raise ValidationError("solve_su_dl_variable needs rate_mode=variable",
                              field_name="rate_mode", invalid_value=p.rate_mode.value)
    bound = parse_bound_choice(bound_choice)
    if bound is BoundChoice.UPPER and p.sigma_b2 == 0:
        raise ValidationError("upper bound is undefined for sigma_b2 = 0",
                              field_name="sigma_b2", invalid_value=p.sigma_b2)
    opts = beta_search_opts or BetaSearchOptions()
    h = ch.downlink_gains()
    if h.size != p.K:
        raise ValidationError(f"expected {p.K} sub-channels, got {h.size}",
                              field_name="h", invalid_value=h.size)

    h_max = float(np.max(h))
    if p.p_t * h_max < p.p_c or h_max == 0:
        logger.info(f"SU-DL infeasible: p_t*max h={p.p_t * h_max:.6g} < p_c={p.p_c:.6g}")
        return zero_allocation(p.K, beta=0.0, diagnostics=SolveDiagnostics(
            stream_count=0, extra={"bound": bound.value}))

    beta_max = 1.0 - p.p_c / (p.p_t * h_max)

    def objective(beta: float) -> float:
        weight = snr_weight(beta, p, bound)
        result, powers = _dual_on_positive(h, p, beta, weight)
        if not result.feasible:
            return -1.0
        return _bound_objective(powers, h, weight)

    grid = np.linspace(0.0, beta_max, opts.grid_points)
    values = np.array([objective(float(b)) for b in grid])
    best = int(np.argmax(values))
    beta_best, value_best = float(grid[best]), float(values[best])

    lo = float(grid[max(best - 1, 0)])
    hi = float(grid[min(best + 1, grid.size - 1)])
    if hi > lo:
        refined = minimize_scalar(lambda b: -objective(b), bounds=(lo, hi),
                                  method="bounded", options={"xatol": opts.xatol})
        if refined.success and -float(refined.fun) > value_best:
            beta_best, value_best = float(refined.x), -float(refined.fun)

    weight = snr_weight(beta_best, p, bound)
    result, powers = _dual_on_positive(h, p, beta_best, weight)
    lam, mu = result.multipliers if result.multipliers else (None, None)
    logger.debug(f"SU-DL variable ({bound.value}): beta*={beta_best:.6g}, "
                 f"objective={value_best:.6g}, mu*={mu}")
    alloc = Allocation(
        downlink_powers=powers,
        beta=beta_best,
        feasible=True,
        diagnostics=SolveDiagnostics(
            lambda_star=lam,
            mu_star=mu,
            water_level=result.water_level,
            stream_count=int(np.count_nonzero(powers)),
            permutation=tuple(int(i) for i in descending_order(h)),
            objective=value_best,
            extra={"bound": bound.value, "beta_max": beta_max}
        )
    )
    return keep_better(alloc, equal_power_su_dl(h, p),
                       lambda a: throughput_su_dl(a, ch, p).sum_throughput)


def beta_star(p: ScenarioParams, k: int) -> float:
    """Positive root of beta^2 - c(k) beta - d = 0.

    c(k) = 1 - sigma_b^2/sigma_a^2 - p_c/(k theta sigma_a^2) and
    d = sigma_b^2/sigma_a^2; the root always lies in [0, 1].

    Raises:
        ValidationError: If sigma_a^2 = 0 or k < 1
    """
    if p.sigma_a2 <= 0:
        raise ValidationError(
            "sigma_a2 must be positive for fixed-rate splitting",
            field_name="sigma_a2", invalid_value=p.sigma_a2, expected="> 0"
        )
    if k < 1:
        raise ValidationError(f"k must be at least 1, got {k}", field_name="k", invalid_value=k)
    d = p.sigma_b2 / p.sigma_a2
    c = 1.0 - d - p.p_c / (k * p.theta * p.sigma_a2)
    disc = np.sqrt(c * c + 4.0 * d)
    # stable form of the same root for c < 0
    root = (c + disc) / 2.0 if c >= 0 else 2.0 * d / (disc - c)
    return float(min(max(root, 0.0), 1.0))


def fixed_rate_powers(p: ScenarioParams, beta: float, gains: np.ndarray) -> np.ndarray:
    """Per-stream power theta (beta sigma_a^2 + sigma_b^2)/(beta h) reaching SNR = theta."""
    with np.errstate(divide="ignore"):
        return p.theta * (beta * p.sigma_a2 + p.sigma_b2) / (beta * gains)


def equal_power_su_dl(h: np.ndarray, p: ScenarioParams) -> Allocation:
    """P_n = p_t / K with the splitting ratio of the rate mode.

    Variable rates divert just enough power to meet p_c; fixed rates use
    beta*(K).
    """
    powers = np.full(p.K, p.p_t / p.K)
    if p.is_fixed_rate:
        beta = beta_star(p, p.K)
    else:
        received = float(np.dot(powers, h))
        beta = max(0.0, 1.0 - p.p_c / received) if received > 0 else 0.0
    return Allocation(downlink_powers=powers, beta=beta,
                      diagnostics=SolveDiagnostics(stream_count=p.K))


def solve_su_dl_fixed(ch: ChannelRealization, p: ScenarioParams) -> Allocation:
    """Single-user downlink IT with fixed coding rates.

    Sorts the gains descending and, for each stream count k, serves the k
    strongest sub-channels at SNR exactly theta while the harvester receives
    exactly p_c. The largest affordable k wins.

    Args:
        ch: Downlink-IT channel realization
        p: Scenario with rate_mode=fixed

    Returns:
        Allocation with scalar beta = beta*(k*); all-zero when k* = 0
    """
    if p.rate_mode is not RateMode.FIXED:
        raise ValidationError("solve_su_dl_fixed needs rate_mode=fixed",
                              field_name="rate_mode", invalid_value=p.rate_mode.value)
    h = ch.downlink_gains()
    if h.size != p.K:
        raise ValidationError(f"expected {p.K} sub-channels, got {h.size}",
                              field_name="h", invalid_value=h.size)
    order = descending_order(h)
    h_sorted = h[order]

    best_k, best_beta, best_powers = 0, beta_star(p, 1), np.zeros(h.size)
    for k in range(1, h.size + 1):
        beta = beta_star(p, k)
        if beta <= 0:
            continue
        required = fixed_rate_powers(p, beta, h_sorted[:k])
        if np.all(np.isfinite(required)) and float(np.sum(required)) <= p.p_t:
            best_k, best_beta = k, beta
            best_powers = np.zeros(h.size)
            best_powers[:k] = required

    powers = unpermute(best_powers, order)
    logger.debug(f"SU-DL fixed: k*={best_k}, beta*={best_beta:.6g}")
    if best_k == 0:
        logger.info("SU-DL fixed: no stream affordable")
    return Allocation(
        downlink_powers=powers,
        beta=best_beta,
        feasible=best_k > 0,
        diagnostics=SolveDiagnostics(
            stream_count=best_k,
            permutation=tuple(int(i) for i in order),
            objective=best_k * p.fixed_rate
        )
    )


def throughput_su_dl(
    alloc: Allocation,
    ch: ChannelRealization,
    p: ScenarioParams
) -> ThroughputReport:
    """Exact single-user downlink throughput.

    Variable rates: sum log2(1 + beta P_n h_n / (beta sigma_a^2 + sigma_b^2)).
    Fixed rates: log2(1 + theta) per stream whose SNR reaches theta. Both are
    zero unless (1 - beta) sum P_n h_n >= p_c.

    Raises:
        ValidationError: On dimension mismatch or a missing splitting ratio
        AllocationError: If the powers exceed p_t
    """
    check_dimensions(alloc, ch, p)
    check_power_budget(alloc, p)
    h = ch.downlink_gains()
    beta = require_beta(alloc)
    powers = alloc.downlink_powers
    harvested = (1.0 - beta[0]) * float(np.dot(powers, h))
    circuit_ok = bool(meets(harvested, p.p_c))
    snr = snr_after_split(powers, h, beta, p)
    if p.rate_mode is RateMode.VARIABLE:
        rates = np.log2(1.0 + snr)
    else:
        rates = np.where((powers > 0) & meets(snr, p.theta), p.fixed_rate, 0.0)
    if not circuit_ok:
        rates = np.zeros_like(rates)
    return make_report(rates, p.K, circuit_ok)


@register_policy(UserMode.SINGLE, ITDirection.DOWNLINK)
class SingleUserDownlinkPolicy(BasePolicy):
    """Optimal single-user downlink-IT policy for either rate mode.

    Options:
        bound_choice: Objective for variable rates ("lower", "upper", "exact")
        beta_search_opts: BetaSearchOptions for variable rates
    """

    @classmethod
    def supports(cls, scenario: ScenarioParams) -> bool:
        return scenario.user_mode is UserMode.SINGLE and scenario.is_downlink

    def solve(self, ch: ChannelRealization) -> Allocation:
        if self.scenario.is_fixed_rate:
            return solve_su_dl_fixed(ch, self.scenario)
        return solve_su_dl_variable(
            ch, self.scenario,
            bound_choice=self.options.get("bound_choice", BoundChoice.LOWER),
            beta_search_opts=self.options.get("beta_search_opts")
        )

    def throughput(self, alloc: Allocation, ch: ChannelRealization) -> ThroughputReport:
        return throughput_su_dl(alloc, ch, self.scenario)

