"""
PySWIPT Allocation Core

Numerical primitives shared by every power-control policy:

- waterfill: classic water-filling over parallel channels
- dual_waterfill_circuit: water-filling with an extra harvested-power
  constraint, solved through its two Lagrange multipliers
- greedy_inversion: serve the cheapest streams first until the budget runs out

All routines work in the noise-normalised domain and are pure functions.
"""

from typing import Optional, Tuple
from dataclasses import dataclass
import logging

import numpy as np
from scipy.optimize import brentq

from ..utils.types import ArrayLike
from ..exceptions import ValidationError, SolverError, InfeasibleError


# Setup logging for allocation routines
logger = logging.getLogger(__name__)

BRENTQ_XTOL = 1e-15
BRENTQ_RTOL = 1e-15
MAX_BRACKET_DOUBLINGS = 200


@dataclass
class WaterfillResult:
    """Result of a (dual) water-filling solve.

    Attributes:
        powers: Allocated powers in the caller's index order
        water_level: Water level eta (1/lambda for the dual solver)
        active_set: Indices with positive power
        multipliers: (lambda*, mu*) for the dual solver, None otherwise
        feasible: False when the circuit constraint cannot be met
    """
    powers: np.ndarray
    water_level: float
    active_set: Tuple[int, ...]
    multipliers: Optional[Tuple[float, float]] = None
    feasible: bool = True

    @property
    def total(self) -> float:
        """Sum of allocated powers."""
        return float(np.sum(self.powers))


@dataclass
class GreedyInversionResult:
    """Result of greedy prefix channel inversion.

    Attributes:
        count: Number of served streams (length of the affordable prefix)
        powers: Powers aligned with the sorted cost order
    """
    count: int
    powers: np.ndarray


def descending_order(values: ArrayLike) -> np.ndarray:
    """Stable descending sort order; ties keep the lowest index first."""
    arr = np.asarray(values, dtype=float)
    return np.argsort(-arr, kind="stable")


def ascending_order(values: ArrayLike) -> np.ndarray:
    """Stable ascending sort order; ties keep the lowest index first."""
    arr = np.asarray(values, dtype=float)
    return np.argsort(arr, kind="stable")


def unpermute(sorted_values: np.ndarray, order: np.ndarray) -> np.ndarray:
    """Place values given in sorted order back at their original indices."""
    result = np.zeros(order.size, dtype=float)
    result[order] = sorted_values
    return result



def _validate_gains(gains: ArrayLike, field_name: str = "gains") -> np.ndarray:
    arr = np.asarray(gains, dtype=float).reshape(-1)
    if arr.size == 0:
        raise ValidationError(
            "gain sequence must not be empty",
            field_name=field_name,
            expected="at least one positive gain"
        )
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise ValidationError(
            "gains must be finite and strictly positive",
            field_name=field_name,
            invalid_value=arr.tolist(),
            expected="gains > 0"
        )
    return arr


def _validate_budget(budget: float, field_name: str = "budget") -> float:
    if not (np.isfinite(budget) and budget >= 0):
        raise ValidationError(
            f"{field_name} must be finite and nonnegative, got {budget}",
            field_name=field_name,
            invalid_value=budget,
            expected=">= 0"
        )
    return float(budget)


def waterfill(gains: ArrayLike, budget: float) -> WaterfillResult:
    """Classic water-filling: maximise sum log(1 + Q_n g_n) s.t. sum Q_n = budget.

    Channels are sorted by gain and the weakest one is removed until every
    remaining allocation eta - 1/g_n is positive.

    Args:
        gains: Strictly positive channel gains
        budget: Total power to distribute

    Returns:
        WaterfillResult with Q_n = eta - 1/g_n on the active set

    Raises:
        ValidationError: If the gains are empty or not positive
    """
    g = _validate_gains(gains)
    budget = _validate_budget(budget)
    if budget == 0.0:
        return WaterfillResult(
            powers=np.zeros(g.size),
            water_level=float(np.min(1.0 / g)),
            active_set=()
        )

    order = descending_order(g)
    inv_sorted = 1.0 / g[order]
    levels = (budget + np.cumsum(inv_sorted)) / np.arange(1, g.size + 1)
    # Active prefixes are contiguous; the largest one with positive powers wins
    valid = levels > inv_sorted
    count = int(np.flatnonzero(valid)[-1]) + 1
    eta = float(levels[count - 1])

    sorted_powers = np.zeros(g.size)
    sorted_powers[:count] = eta - inv_sorted[:count]
    powers = unpermute(sorted_powers, order)
    active = tuple(sorted(int(i) for i in order[:count]))
    return WaterfillResult(powers=powers, water_level=eta, active_set=active)


def waterfill_nonnegative(gains: ArrayLike, budget: float) -> WaterfillResult:
    """Water-filling that tolerates zero gains; those channels get no power."""
    g = np.asarray(gains, dtype=float).reshape(-1)
    if g.size == 0:
        raise ValidationError("gain sequence must not be empty", field_name="gains")
    if np.any(g < 0) or not np.all(np.isfinite(g)):
        raise ValidationError(
            "gains must be finite and nonnegative",
            field_name="gains", invalid_value=g.tolist()
        )
    usable = np.flatnonzero(g > 0)
    if usable.size == 0:
        _validate_budget(budget)
        return WaterfillResult(powers=np.zeros(g.size), water_level=float("inf"), active_set=())
    partial = waterfill(g[usable], budget)
    powers = np.zeros(g.size)
    powers[usable] = partial.powers
    active = tuple(int(usable[i]) for i in partial.active_set)
    return WaterfillResult(powers=powers, water_level=partial.water_level, active_set=active)


def _clipped_powers(lam: float, mu: float, h: np.ndarray, s: float, beta: float) -> np.ndarray:
    """Lagrangian maximiser for fixed multipliers, clipped at zero."""
    denom = lam - mu * (1.0 - beta) * h
    with np.errstate(divide="ignore"):
        raw = 1.0 / denom - 1.0 / (s * h)
    return np.maximum(raw, 0.0)


def _solve_lambda(mu: float, h: np.ndarray, p_t: float, s: float, beta: float) -> float:
    """Find lambda with sum of clipped powers equal to p_t for a fixed mu."""
    floor = mu * (1.0 - beta) * float(np.max(h))
    inv_best = 1.0 / (s * float(np.max(h)))
    lo = floor + 0.5 / (p_t + inv_best)
    hi = floor + h.size / p_t

    def excess(lam: float) -> float:
        return float(np.sum(_clipped_powers(lam, mu, h, s, beta))) - p_t

    try:
        return float(brentq(excess, lo, hi, xtol=BRENTQ_XTOL, rtol=BRENTQ_RTOL))
    except (ValueError, RuntimeError) as e:
        logger.error(f"Sum-power multiplier search failed at mu={mu}: {e}")
        raise SolverError(
            "sum-power multiplier search failed",
            solver="dual_waterfill_circuit.lambda",
            residual=excess(lo),
            mu=mu
        ) from e


def _repair(powers: np.ndarray, h: np.ndarray, p_t: float,
            target: Optional[float]) -> np.ndarray:
    """Restore sum(P) = p_t and sum(P h) >= target after root-finding round-off."""
    powers = powers.copy()
    best = int(descending_order(h)[0])
    powers[best] = max(0.0, powers[best] + (p_t - float(np.sum(powers))))
    if target is None:
        return powers
    deficit = target - float(np.dot(powers, h))
    if deficit > 0:
        donors = [i for i in np.flatnonzero(powers > 0) if h[i] < h[best]]
        if donors:
            donor = min(donors, key=lambda i: h[i])
            shift = min(powers[donor], deficit / (h[best] - h[donor]))
            powers[donor] -= shift
            powers[best] += shift
    return powers


def _one_hot(h: np.ndarray, p_t: float) -> np.ndarray:
    powers = np.zeros(h.size)
    powers[int(descending_order(h)[0])] = p_t
    return powers


def _result(powers: np.ndarray, water_level: float,
            multipliers: Optional[Tuple[float, float]] = None,
            feasible: bool = True) -> WaterfillResult:
    active = tuple(int(i) for i in np.flatnonzero(powers > 0))
    return WaterfillResult(powers=powers, water_level=water_level,
                           active_set=active, multipliers=multipliers,
                           feasible=feasible)


def dual_waterfill_circuit(
    h: ArrayLike,
    p_t: float,
    p_c: float,
    beta: float,
    snr_weight: Optional[float] = None,
    raise_on_infeasible: bool = False
) -> WaterfillResult:
    """Water-filling under a sum-power budget and a harvested-power floor.

    Solves, for a fixed splitting ratio beta,

        max sum log(1 + s P_n h_n)
        s.t. sum P_n = p_t, (1 - beta) sum P_n h_n >= p_c, P_n >= 0

    where the SNR weight ``s`` defaults to beta. The optimum is
    P_n = 1/(lambda - mu (1 - beta) h_n) - 1/(s h_n) on the active set. mu = 0
    (plain water-filling) is tried first; otherwise mu is searched so that the
    harvest constraint holds with equality, with an inner search on lambda
    enforcing the sum-power budget.

    Args:
        h: Strictly positive channel gains
        p_t: Total power budget
        p_c: Circuit power (noise units)
        beta: Splitting ratio in [0, 1]
        snr_weight: Weight s multiplying P_n h_n inside the log
        raise_on_infeasible: Raise InfeasibleError instead of returning an
            infeasible result

    Returns:
        WaterfillResult with multipliers (lambda*, mu*) when they exist

    Raises:
        ValidationError: If arguments are out of range
        InfeasibleError: If infeasible and ``raise_on_infeasible`` is set
        SolverError: If a multiplier search fails to bracket its root
    """
    gains = _validate_gains(h, "h")
    p_t = _validate_budget(p_t, "p_t")
    p_c = _validate_budget(p_c, "p_c")
    if not 0.0 <= beta <= 1.0:
        raise ValidationError(
            f"beta must lie in [0, 1], got {beta}",
            field_name="beta", invalid_value=beta, expected="0 <= beta <= 1"
        )
    s = beta if snr_weight is None else float(snr_weight)
    if s < 0:
        raise ValidationError(
            f"snr_weight must be nonnegative, got {s}",
            field_name="snr_weight", invalid_value=s
        )

    h_max = float(np.max(gains))
    capacity = (1.0 - beta) * p_t * h_max
    if p_c > capacity:
        logger.info(f"Circuit constraint infeasible: p_c={p_c:.6g} > {capacity:.6g}")
        if raise_on_infeasible:
            raise InfeasibleError(
                "harvested power cannot reach the circuit power",
                required=p_c, available=capacity, beta=beta
            )
        sentinel = float(np.min(1.0 / gains)) if s == 0 else float(np.min(1.0 / (s * gains)))
        return WaterfillResult(powers=np.zeros(gains.size), water_level=sentinel,
                               active_set=(), feasible=False)

    if p_t == 0.0 or s == 0.0:
        # No information rate to gain; the strongest channel maximises harvest
        powers = _one_hot(gains, p_t) if p_t > 0 else np.zeros(gains.size)
        sentinel = float(np.min(1.0 / gains)) if s == 0 else float(np.min(1.0 / (s * gains)))
        return _result(powers, sentinel)

    plain = waterfill(s * gains, p_t)
    harvested = (1.0 - beta) * float(np.dot(plain.powers, gains))
    if harvested >= p_c:
        logger.debug(f"Harvest constraint slack ({harvested:.6g} >= {p_c:.6g}), mu*=0")
        return _result(plain.powers, plain.water_level, (1.0 / plain.water_level, 0.0))

    target = p_c / (1.0 - beta)
    if target >= p_t * h_max * (1.0 - 1e-12):
        logger.debug("Harvest constraint at its limit; all power on the strongest channel")
        return _result(_one_hot(gains, p_t), float("inf"))

    def harvest_excess(mu: float) -> float:
        lam = _solve_lambda(mu, gains, p_t, s, beta)
        return float(np.dot(_clipped_powers(lam, mu, gains, s, beta), gains)) - target

    lam0 = 1.0 / plain.water_level
    mu_hi = lam0 / ((1.0 - beta) * h_max)
    doublings = 0
    while harvest_excess(mu_hi) < 0:
        mu_hi *= 2.0
        doublings += 1
        if doublings > MAX_BRACKET_DOUBLINGS:
            raise SolverError(
                "could not bracket the circuit-power multiplier",
                solver="dual_waterfill_circuit.mu",
                iterations=doublings,
                residual=harvest_excess(mu_hi)
            )

    try:
        mu_star = float(brentq(harvest_excess, 0.0, mu_hi, xtol=BRENTQ_XTOL, rtol=BRENTQ_RTOL))
    except (ValueError, RuntimeError) as e:
        logger.error(f"Circuit-power multiplier search failed: {e}")
        raise SolverError(
            "circuit-power multiplier search failed",
            solver="dual_waterfill_circuit.mu",
            iterations=doublings
        ) from e

    lam_star = _solve_lambda(mu_star, gains, p_t, s, beta)
    powers = _repair(_clipped_powers(lam_star, mu_star, gains, s, beta), gains, p_t, target)
    logger.debug(f"Dual water-filling: lambda*={lam_star:.6g}, mu*={mu_star:.6g}, "
                 f"active={int(np.count_nonzero(powers))}")
    return _result(powers, 1.0 / lam_star, (lam_star, mu_star))


def kkt_residual(
    result: WaterfillResult,
    h: ArrayLike,
    p_c: float,
    beta: float,
    snr_weight: Optional[float] = None
) -> float:
    """Largest relative KKT violation of a dual water-filling result.

    Checks stationarity on the active set, dual feasibility off it and
    complementary slackness of the harvest constraint.
    """
    if result.multipliers is None:
        return 0.0
    gains = np.asarray(h, dtype=float)
    s = beta if snr_weight is None else float(snr_weight)
    lam, mu = result.multipliers
    marginal = s * gains / (1.0 + s * result.powers * gains)
    gradient = marginal - lam + mu * (1.0 - beta) * gains
    active = result.powers > 0
    stationarity = np.abs(gradient[active]) / lam if np.any(active) else np.zeros(1)
    dual = np.maximum(gradient[~active], 0.0) / lam if np.any(~active) else np.zeros(1)
    harvested = (1.0 - beta) * float(np.dot(result.powers, gains))
    slackness = mu * abs(harvested - p_c) / (lam * max(1.0, p_c))
    return float(max(np.max(stationarity), np.max(dual), slackness))


def greedy_inversion(
    required_powers: ArrayLike,
    budget: float
) -> GreedyInversionResult:
    """Serve the longest affordable prefix of an ascending cost sequence.

    Args:
        required_powers: Positive costs sorted ascending (infinite costs allowed
            at the end)
        budget: Power available

    Returns:
        GreedyInversionResult with the prefix count and prefix powers;
        powers[i] > 0 exactly when i < count

    Raises:
        ValidationError: If the costs are unsorted, non-positive or NaN
    """
    costs = np.asarray(required_powers, dtype=float).reshape(-1)
    budget = _validate_budget(budget)
    if np.any(np.isnan(costs)) or np.any(costs <= 0):
        raise ValidationError(
            "required powers must be positive",
            field_name="required_powers",
            invalid_value=costs.tolist(),
            expected="> 0"
        )
    if np.any(costs[1:] < costs[:-1]):
        raise ValidationError(
            "required powers must be sorted ascending",
            field_name="required_powers",
            invalid_value=costs.tolist(),
            expected="ascending order"
        )
    prefix = np.cumsum(costs)
    count = int(np.count_nonzero(prefix <= budget))
    powers = np.zeros(costs.size)
    powers[:count] = costs[:count]
    return GreedyInversionResult(count=count, powers=powers)

