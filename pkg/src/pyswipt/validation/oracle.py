"""
PySWIPT Brute-Force Oracle

Independent reference solutions for small instances of every scenario type,
used to certify the policies.

This module provides:
- grid_search_allocation: exhaustive search over the power simplex (and the
  splitting ratio) for variable rates, subset enumeration for fixed rates
- random_instance / random_batch: random noise-normalised test instances
- verify: policy against oracle with constraint checks, one report per instance
- compare_scheduling: sequential scheduling against exhaustive scheduling on
  drawn multi-user uplink channels
- reports_frame: verification reports as a pandas DataFrame
"""

from typing import List, Optional, Sequence, Tuple, Dict, Any, Iterable
from dataclasses import dataclass, field
from itertools import combinations
import logging

import numpy as np
import pandas as pd
from scipy.optimize import brentq

from ..utils.types import (
    ScenarioParams,
    ChannelRealization,
    Allocation,
    SolveDiagnostics,
    UserMode,
    ITDirection,
    RateMode,
    CONSTRAINT_TOL,
    create_scenario,
    create_downlink_channels,
    create_uplink_channels
)
from ..channels.channel_model import ChannelModel, GeometryTable, trial_seed, DEFAULT_NOISE_DBM
from ..policies.base_policy import create_policy
from ..policies.su_downlink import parse_bound_choice
from ..policies.mu_downlink import MU_DL_BOUNDS
from ..policies.mu_uplink import solve_mu_ul_variable, exhaustive_schedule_mu_ul_variable, MAX_EXHAUSTIVE_K
from ..policies.throughput import evaluate_throughput
from ..exceptions import ValidationError, OracleSizeError, PySwiptError


logger = logging.getLogger(__name__)

MAX_GRID_K = 3
DEFAULT_POWER_RESOLUTION = 0.002
DEFAULT_BETA_RESOLUTION = 0.005
GAIN_RANGE = (0.1, 10.0)
DISCRETE_RTOL = 1e-12


@dataclass(frozen=True)
class OracleSolution:
    """Best point found by the oracle.

    Attributes:
        objective: Exact sum throughput of the best point
        allocation: Allocation achieving it
        evaluated: Number of candidate points examined
    """
    objective: float
    allocation: Allocation
    evaluated: int


@dataclass(frozen=True)
class OracleInstance:
    """One verification instance."""
    instance: str
    scenario: ScenarioParams
    channels: ChannelRealization


@dataclass(frozen=True)
class OracleReport:
    """Outcome of verifying one instance.

    Attributes:
        instance: Instance identifier
        scenario: Scenario label
        oracle_objective: Oracle sum throughput
        policy_objective: Policy sum throughput (exact evaluator)
        gap: oracle_objective - policy_objective
        violations: Constraint violations found in the policy allocation
        passed: Whether the instance passed
        oracle_streams: Streams served by the oracle
        policy_streams: Streams served by the policy
    """
    instance: str
    scenario: str
    oracle_objective: float
    policy_objective: float
    gap: float
    violations: Tuple[str, ...] = ()
    passed: bool = True
    oracle_streams: int = 0
    policy_streams: int = 0

    def to_dict(self) -> Dict[str, Any]:
        """Row representation used for CSV export."""
        return {
            "instance": self.instance,
            "scenario": self.scenario,
            "oracle_objective": self.oracle_objective,
            "policy_objective": self.policy_objective,
            "gap": self.gap,
            "passed": self.passed,
            "violations": ";".join(self.violations),
        }


@dataclass(frozen=True)
class SchedulingGap:
    """Relative gaps of sequential scheduling to exhaustive scheduling."""
    gaps: np.ndarray = field(repr=False)

    @property
    def mean_gap(self) -> float:
        return float(np.mean(self.gaps)) if self.gaps.size else 0.0

    @property
    def max_gap(self) -> float:
        return float(np.max(self.gaps)) if self.gaps.size else 0.0

    @property
    def trials(self) -> int:
        return int(self.gaps.size)


def _steps(resolution: float, field_name: str) -> int:
    if not 0 < resolution <= 1:
        raise ValidationError(
            f"{field_name} must be in (0, 1], got {resolution}",
            field_name=field_name, invalid_value=resolution, expected="0 < resolution <= 1"
        )
    return max(1, int(round(1.0 / resolution)))


def simplex_grid(K: int, steps: int) -> np.ndarray:
    """All splits of one unit into K shares that are multiples of 1/steps.

    Returns:
        Array of shape (M, K); every row sums to 1
    """
    if K == 1:
        return np.ones((1, 1))
    bars = np.array(list(combinations(range(steps + K - 1), K - 1)), dtype=int)
    edges = np.hstack([
        np.full((bars.shape[0], 1), -1),
        bars,
        np.full((bars.shape[0], 1), steps + K - 1)
    ])
    return (np.diff(edges, axis=1) - 1) / steps


def _check_grid_size(p: ScenarioParams) -> None:
    if p.K > MAX_GRID_K:
        raise OracleSizeError(
            f"continuous grid search supports at most {MAX_GRID_K} sub-channels, got {p.K}",
            field_name="K", invalid_value=p.K, expected=f"<= {MAX_GRID_K}"
        )


def _check_subset_size(p: ScenarioParams) -> None:
    if p.K > MAX_EXHAUSTIVE_K:
        raise OracleSizeError(
            f"subset enumeration supports at most {MAX_EXHAUSTIVE_K} sub-channels, got {p.K}",
            field_name="K", invalid_value=p.K, expected=f"<= {MAX_EXHAUSTIVE_K}"
        )


def harvest_split(p: ScenarioParams, streams: int) -> float:
    """Largest splitting ratio at which ``streams`` streams at SNR theta still feed p_c.

    Solved numerically on (1 - beta) k theta (beta sigma_a^2 + sigma_b^2) / beta = p_c.
    Returns 0 when no positive ratio works.
    """
    if p.p_c == 0:
        return 1.0

    def surplus(beta: float) -> float:
        return (1.0 - beta) * streams * p.theta * (beta * p.sigma_a2 + p.sigma_b2) / beta - p.p_c

    lo = 1e-12
    if surplus(lo) < 0:
        return 0.0
    return float(brentq(surplus, lo, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps))


def _best_subset(costs: np.ndarray, budget: float) -> Tuple[int, ...]:
    """Largest index subset whose costs fit the budget; cheapest such subset on ties."""
    for size in range(costs.size, 0, -1):
        affordable = [(float(np.sum(costs[list(s)])), s) for s in combinations(range(costs.size), size)]
        affordable = [a for a in affordable if a[0] <= budget]
        if affordable:
            return min(affordable)[1]
    return ()


def _served(K: int, subset: Sequence[int], values: np.ndarray) -> np.ndarray:
    out = np.zeros(K)
    idx = list(subset)
    out[idx] = values[idx]
    return out


def _grid_su_dl(p: ScenarioParams, h: np.ndarray, steps: int, beta_steps: int) -> OracleSolution:
    shares = simplex_grid(p.K, steps)
    received = shares * (p.p_t * h)
    total = received.sum(axis=1)
    best = (-1.0, 0, 0.0)
    for beta in np.linspace(0.0, 1.0, beta_steps + 1):
        ok = (1.0 - beta) * total >= p.p_c - CONSTRAINT_TOL * max(1.0, p.p_c)
        if not np.any(ok):
            continue
        weight = beta / (beta * p.sigma_a2 + p.sigma_b2)
        values = np.where(ok, np.log2(1.0 + weight * received).sum(axis=1), -1.0)
        i = int(np.argmax(values))
        if values[i] > best[0]:
            best = (float(values[i]), i, float(beta))
    evaluated = shares.shape[0] * (beta_steps + 1)
    if best[0] < 0:
        return OracleSolution(0.0, Allocation(np.zeros(p.K), beta=0.0, feasible=False), evaluated)
    value, i, beta = best
    alloc = Allocation(shares[i] * p.p_t, beta=beta, feasible=True,
                       diagnostics=SolveDiagnostics(stream_count=int(np.count_nonzero(shares[i]))))
    return OracleSolution(value, alloc, evaluated)


def _grid_mu_dl(p: ScenarioParams, h: np.ndarray, steps: int) -> OracleSolution:
    shares = simplex_grid(p.K, steps)
    received = shares * (p.p_t * h)
    on = (received > 0) & (received >= p.p_c - CONSTRAINT_TOL * max(1.0, p.p_c))
    with np.errstate(divide="ignore", invalid="ignore"):
        betas = np.where(on, np.clip(1.0 - p.p_c / received, 0.0, 1.0), 0.0)
        snr = np.where(on, betas * received / (betas * p.sigma_a2 + p.sigma_b2), 0.0)
    values = np.log2(1.0 + snr).sum(axis=1)
    i = int(np.argmax(values))
    if values[i] <= 0:
        alloc = Allocation(np.zeros(p.K), beta=np.zeros(p.K), feasible=False)
        return OracleSolution(0.0, alloc, shares.shape[0])
    alloc = Allocation(shares[i] * p.p_t, beta=betas[i], feasible=True,
                       diagnostics=SolveDiagnostics(stream_count=int(np.count_nonzero(on[i]))))
    return OracleSolution(float(values[i]), alloc, shares.shape[0])


def _grid_su_ul(p: ScenarioParams, g_prime: np.ndarray, g_up: np.ndarray, steps: int) -> OracleSolution:
    # harvest is linear in P, so only the vertices of the downlink simplex matter
    shares = simplex_grid(p.K, steps)
    best: Optional[OracleSolution] = None
    for tone in range(p.K):
        budget = p.p_t * float(g_prime[tone]) - p.p_c
        if budget < 0:
            continue
        values = np.log2(1.0 + shares * budget * g_up).sum(axis=1)
        i = int(np.argmax(values))
        if best is None or values[i] > best.objective:
            downlink = np.zeros(p.K)
            downlink[tone] = p.p_t
            alloc = Allocation(downlink, uplink_powers=shares[i] * budget, feasible=True,
                               diagnostics=SolveDiagnostics(stream_count=int(np.count_nonzero(shares[i]))))
            best = OracleSolution(float(values[i]), alloc, 0)
    evaluated = shares.shape[0] * p.K
    if best is None:
        alloc = Allocation(np.zeros(p.K), uplink_powers=np.zeros(p.K), feasible=False)
        return OracleSolution(0.0, alloc, evaluated)
    return OracleSolution(best.objective, best.allocation, evaluated)


def _grid_mu_ul(p: ScenarioParams, g_prime: np.ndarray, g_up: np.ndarray, steps: int) -> OracleSolution:
    shares = simplex_grid(p.K, steps)
    harvested = shares * (p.p_t * g_prime)
    on = (shares > 0) & (harvested >= p.p_c - CONSTRAINT_TOL * max(1.0, p.p_c))
    uplink = np.where(on, np.maximum(harvested - p.p_c, 0.0), 0.0)
    values = np.log2(1.0 + uplink * g_up).sum(axis=1)
    i = int(np.argmax(values))
    if values[i] <= 0:
        alloc = Allocation(np.zeros(p.K), uplink_powers=np.zeros(p.K), feasible=False)
        return OracleSolution(0.0, alloc, shares.shape[0])
    alloc = Allocation(shares[i] * p.p_t, uplink_powers=uplink[i], feasible=True,
                       diagnostics=SolveDiagnostics(stream_count=int(np.count_nonzero(on[i]))))
    return OracleSolution(float(values[i]), alloc, shares.shape[0])


def _discrete(p: ScenarioParams, ch: ChannelRealization) -> OracleSolution:
    """Subset enumeration for the fixed-rate scenarios."""
    _check_subset_size(p)
    K = p.K
    evaluated = 2 ** K
    if p.is_downlink:
        h = ch.downlink_gains()
        if p.is_single_user:
            # the splitting ratio depends only on the number of streams
            for size in range(K, 0, -1):
                beta = harvest_split(p, size)
                if beta <= 0:
                    continue
                with np.errstate(divide="ignore"):
                    costs = p.theta * (beta * p.sigma_a2 + p.sigma_b2) / (beta * h)
                subsets = [s for s in combinations(range(K), size)
                           if float(np.sum(costs[list(s)])) <= p.p_t]
                if subsets:
                    subset = min(subsets, key=lambda s: (float(np.sum(costs[list(s)])), s))
                    alloc = Allocation(_served(K, subset, costs), beta=beta, feasible=True,
                                       diagnostics=SolveDiagnostics(stream_count=size))
                    return OracleSolution(size * p.fixed_rate, alloc, evaluated)
            alloc = Allocation(np.zeros(K), beta=harvest_split(p, 1), feasible=False)
            return OracleSolution(0.0, alloc, evaluated)

        beta = harvest_split(p, 1)
        with np.errstate(divide="ignore"):
            costs = (p.theta * (beta * p.sigma_a2 + p.sigma_b2) / (beta * h)
                     if beta > 0 else np.full(K, np.inf))
        subset = _best_subset(costs, p.p_t)
        alloc = Allocation(_served(K, subset, costs), beta=np.full(K, beta), feasible=bool(subset),
                           diagnostics=SolveDiagnostics(stream_count=len(subset)))
        return OracleSolution(len(subset) * p.fixed_rate, alloc, evaluated)

    g_prime, g_up = ch.uplink_gains()
    with np.errstate(divide="ignore"):
        snr_cost = np.where(g_up > 0, p.theta / np.where(g_up > 0, g_up, 1.0), np.inf)
    if p.is_single_user:
        tone = int(np.argmax(g_prime))
        budget = p.p_t * float(g_prime[tone]) - p.p_c
        downlink = np.zeros(K)
        if budget < 0:
            return OracleSolution(0.0, Allocation(downlink, uplink_powers=np.zeros(K), feasible=False),
                                  evaluated)
        downlink[tone] = p.p_t
        subset = _best_subset(snr_cost, budget)
        alloc = Allocation(downlink, uplink_powers=_served(K, subset, snr_cost), feasible=True,
                           diagnostics=SolveDiagnostics(stream_count=len(subset)))
        return OracleSolution(len(subset) * p.fixed_rate, alloc, evaluated)

    with np.errstate(divide="ignore", invalid="ignore"):
        costs = np.where(g_prime > 0, (snr_cost + p.p_c) / np.where(g_prime > 0, g_prime, 1.0), np.inf)
    subset = _best_subset(costs, p.p_t)
    alloc = Allocation(_served(K, subset, costs), uplink_powers=_served(K, subset, snr_cost),
                       feasible=bool(subset), diagnostics=SolveDiagnostics(stream_count=len(subset)))
    return OracleSolution(len(subset) * p.fixed_rate, alloc, evaluated)


def grid_search_allocation(
    scenario: ScenarioParams,
    ch: ChannelRealization,
    resolution: float = DEFAULT_POWER_RESOLUTION,
    beta_resolution: Optional[float] = None
) -> OracleSolution:
    """Brute-force the best allocation of one instance.

    Variable-rate scenarios evaluate the exact throughput on every point of a
    power grid with step p_t * resolution (single-user downlink also scans the
    splitting ratio with step beta_resolution). Fixed-rate scenarios enumerate
    served subsets, which is exact.

    Args:
        scenario: Scenario of the instance
        ch: Channel realization
        resolution: Power step as a fraction of the budget
        beta_resolution: Splitting-ratio step; defaults to ``resolution``

    Returns:
        OracleSolution with the best objective and its allocation

    Raises:
        OracleSizeError: If K is too large for the search
        ValidationError: If a resolution is outside (0, 1]
    """
    if ch.K != scenario.K:
        raise ValidationError(
            f"channel has {ch.K} sub-channels, scenario K={scenario.K}",
            field_name="K", invalid_value=(ch.K, scenario.K)
        )
    if scenario.is_fixed_rate:
        solution = _discrete(scenario, ch)
    else:
        _check_grid_size(scenario)
        steps = _steps(resolution, "resolution")
        if scenario.is_downlink:
            h = ch.downlink_gains()
            if scenario.is_single_user:
                beta_steps = _steps(beta_resolution or resolution, "beta_resolution")
                solution = _grid_su_dl(scenario, h, steps, beta_steps)
            else:
                solution = _grid_mu_dl(scenario, h, steps)
        else:
            g_prime, g_up = ch.uplink_gains()
            grid = _grid_su_ul if scenario.is_single_user else _grid_mu_ul
            solution = grid(scenario, g_prime, g_up, steps)
    logger.debug(f"Oracle {scenario.label}: objective={solution.objective:.6g}, "
                 f"points={solution.evaluated}")
    return solution


def random_instance(
    scenario: ScenarioParams,
    rng: np.random.Generator,
    instance: str = ""
) -> OracleInstance:
    """Random instance for ``scenario``.

    Gains are log-uniform over [0.1, 10] and p_c is uniform over
    [0, p_t * max power-transfer gain], which straddles the feasibility edge.
    """
    lo, hi = np.log10(GAIN_RANGE[0]), np.log10(GAIN_RANGE[1])
    if scenario.is_downlink:
        h = 10.0 ** rng.uniform(lo, hi, size=scenario.K)
        ch = create_downlink_channels(h=h)
        power_gain = float(np.max(h))
    else:
        g_prime = 10.0 ** rng.uniform(lo, hi, size=scenario.K)
        g_up = 10.0 ** rng.uniform(lo, hi, size=scenario.K)
        ch = create_uplink_channels(g_prime, g_up)
        power_gain = float(np.max(g_prime))
    p_c = float(rng.uniform(0.0, scenario.p_t * power_gain))
    return OracleInstance(instance=instance, scenario=scenario.replace(p_c=p_c), channels=ch)


def random_batch(scenario: ScenarioParams, count: int, seed: int = 0) -> List[OracleInstance]:
    """``count`` reproducible random instances of one scenario type."""
    rng = np.random.default_rng(seed)
    return [random_instance(scenario, rng, f"{scenario.label}-{i}") for i in range(count)]


def oracle_scenarios(K: int = 3, p_t: float = 10.0, theta: float = 10.0) -> List[ScenarioParams]:
    """One template per scenario type, sized for the oracle."""
    return [
        create_scenario(user, direction, rate, K=K, p_t=p_t, theta=theta)
        for user in UserMode for direction in ITDirection for rate in RateMode
    ]


def constraint_violations(alloc: Allocation, ch: ChannelRealization, p: ScenarioParams) -> List[str]:
    """Constraint violations of an allocation beyond the 1e-9 tolerance."""
    violations = []
    tol = CONSTRAINT_TOL * max(1.0, p.p_t)
    if alloc.total_power > p.p_t + tol:
        violations.append(f"sum P = {alloc.total_power:.12g} > p_t = {p.p_t:.12g}")
    if alloc.beta is not None:
        betas = alloc.betas()
        if np.any(betas < -CONSTRAINT_TOL) or np.any(betas > 1.0 + CONSTRAINT_TOL):
            violations.append("beta outside [0, 1]")
    if not p.is_downlink and alloc.uplink_powers is not None:
        g_prime, _ = ch.uplink_gains()
        harvested = alloc.downlink_powers * g_prime
        if p.is_single_user:
            surplus = np.array([float(np.sum(harvested)) - p.p_c])
            uplink = np.array([float(np.sum(alloc.uplink_powers))])
        else:
            surplus = harvested - p.p_c
            uplink = alloc.uplink_powers
        excess = uplink - np.maximum(surplus, 0.0)
        if np.any(excess > CONSTRAINT_TOL * np.maximum(1.0, np.abs(surplus))):
            violations.append(f"uplink exceeds harvested surplus by {float(np.max(excess)):.6g}")
    return violations


def policy_options_for(p: ScenarioParams, options: Dict[str, Any]) -> Dict[str, Any]:
    """Policy options that apply to the optimal policy of scenario ``p``.

    Single-user downlink takes every option; multi-user downlink takes
    ``bound_choice`` when it is one it supports; uplink policies take none.
    """
    if not p.is_downlink:
        return {}
    if p.is_single_user:
        return dict(options)
    bound = options.get("bound_choice")
    if bound is not None and parse_bound_choice(bound) in MU_DL_BOUNDS:
        return {"bound_choice": bound}
    return {}


def verify(
    batch: Iterable[OracleInstance],
    tolerance: float = 5e-3,
    resolution: float = DEFAULT_POWER_RESOLUTION,
    beta_resolution: float = DEFAULT_BETA_RESOLUTION,
    **policy_options: Any
) -> List[OracleReport]:
    """Check the optimal policy against the oracle on every instance.

    Fixed-rate instances pass when the policy serves as many streams as the
    oracle; variable-rate instances pass when the gap is at most
    ``tolerance`` times the oracle objective. Any constraint violation fails.

    Args:
        batch: Instances to verify
        tolerance: Relative gap allowed for variable rates
        resolution: Power grid step of the oracle
        beta_resolution: Splitting-ratio grid step of the oracle
        **policy_options: Passed to create_policy (e.g. ``bound_choice``)

    Returns:
        One OracleReport per instance
    """
    reports = []
    for item in batch:
        p, ch = item.scenario, item.channels
        options = policy_options_for(p, policy_options)
        alloc = create_policy(p, **options).solve(ch)
        violations = constraint_violations(alloc, ch, p)
        try:
            report = evaluate_throughput(alloc, ch, p)
            policy_objective = report.sum_throughput
            policy_streams = int(np.count_nonzero(np.asarray(report.per_stream) > 0))
        except PySwiptError as e:
            logger.error(f"Instance {item.instance}: policy allocation rejected: {e.message}")
            violations.append(e.message)
            policy_objective, policy_streams = 0.0, 0

        oracle = grid_search_allocation(p, ch, resolution, beta_resolution)
        oracle_streams = oracle.allocation.diagnostics.stream_count or 0
        gap = oracle.objective - policy_objective
        if p.is_fixed_rate:
            passed = (oracle_streams == policy_streams
                      and abs(gap) <= DISCRETE_RTOL * max(1.0, oracle.objective))
        else:
            passed = gap <= tolerance * max(oracle.objective, DISCRETE_RTOL)
        passed = passed and not violations
        if not passed:
            logger.warning(f"Instance {item.instance} failed: gap={gap:.6g}, violations={violations}")
        reports.append(OracleReport(
            instance=item.instance,
            scenario=p.label,
            oracle_objective=oracle.objective,
            policy_objective=policy_objective,
            gap=gap,
            violations=tuple(violations),
            passed=passed,
            oracle_streams=oracle_streams,
            policy_streams=policy_streams
        ))
    failed = sum(not r.passed for r in reports)
    logger.info(f"Verified {len(reports)} instances, {failed} failed")
    return reports


def compare_scheduling(
    trials: int = 1000,
    master_seed: int = 0,
    scenario: Optional[ScenarioParams] = None,
    geometries: Optional[GeometryTable] = None,
    noise_dbm: float = DEFAULT_NOISE_DBM
) -> SchedulingGap:
    """Relative gap of sequential to exhaustive multi-user uplink scheduling.

    Each trial draws a channel from the propagation model and a circuit power
    uniform over [0, p_t * max g'].

    Args:
        trials: Number of drawn instances
        master_seed: Seed of the per-trial streams
        scenario: Multi-user uplink variable-rate template (K = 5, p_t = 20 W by default)
        geometries: Geometry table; defaults to the multi-user layout
        noise_dbm: Noise floor in dBm

    Returns:
        SchedulingGap with one relative gap per trial (0 when nothing is feasible)
    """
    p = scenario or create_scenario("multi", "uplink", "variable", K=5, p_t=20.0)
    if p.is_single_user or p.is_downlink or p.is_fixed_rate:
        raise ValidationError(
            f"scheduling comparison needs a multi-user uplink variable-rate scenario, got {p.label}",
            field_name="scenario", invalid_value=p.label
        )
    model = ChannelModel(p, geometries, noise_dbm)
    gaps = np.zeros(trials)
    for trial in range(trials):
        rng = np.random.default_rng(trial_seed(master_seed, trial))
        ch = model.draw(rng)
        g_prime, _ = ch.uplink_gains()
        instance = p.replace(p_c=float(rng.uniform(0.0, p.p_t * float(np.max(g_prime)))))
        best = exhaustive_schedule_mu_ul_variable(ch, instance).diagnostics.objective or 0.0
        greedy = solve_mu_ul_variable(ch, instance).diagnostics.objective or 0.0
        gaps[trial] = (best - greedy) / best if best > 0 else 0.0
    result = SchedulingGap(gaps=gaps)
    logger.info(f"Scheduling gap over {trials} trials: mean={result.mean_gap:.4g}, max={result.max_gap:.4g}")
    return result


def reports_frame(reports: Sequence[OracleReport]) -> pd.DataFrame:
    """Verification reports as a DataFrame in report column order."""
    columns = ["instance", "scenario", "oracle_objective", "policy_objective",
               "gap", "passed", "violations"]
    return pd.DataFrame([r.to_dict() for r in reports], columns=columns)
