"""
PySWIPT Base Policy

Abstract base class and registry for power-control policies.

This module provides:
- BasePolicy, the common interface (solve, throughput, evaluate)
- A registry mapping (user mode, IT direction) to the optimal policy class
- A registry of named baselines (equal_power, tdipt, exhaustive)
- create_policy, the factory the simulator, oracle and CLI dispatch through
- Shared checks used by the throughput evaluators
"""

from abc import ABC, abstractmethod
from typing import Dict, Tuple, Type, Any, Callable, List
import importlib
import logging

import numpy as np

from ..utils.types import (
    ScenarioParams,
    ChannelRealization,
    Allocation,
    ThroughputReport,
    UserMode,
    ITDirection,
    CONSTRAINT_TOL
)
from ..exceptions import ValidationError, AllocationError


logger = logging.getLogger(__name__)

OPTIMAL = "optimal"

_POLICY_REGISTRY: Dict[Tuple[UserMode, ITDirection], Type["BasePolicy"]] = {}
_BASELINE_REGISTRY: Dict[str, Type["BasePolicy"]] = {}

_BUILTIN_MODULES = (
    ".su_downlink",
    ".su_uplink",
    ".mu_downlink",
    ".mu_uplink",
    "..simulation.baselines",
)


class BasePolicy(ABC):
    """Abstract base class for power-control policies.

    A policy is bound to one scenario and maps channel realizations to
    allocations. Throughput is always evaluated with the scenario's exact
    throughput expression, whatever objective the policy optimised.

    Attributes:
        name: Registry name of the policy
        scenario: Scenario the policy solves
        options: Policy-specific keyword options
    """

    name: str = OPTIMAL

    def __init__(self, scenario: ScenarioParams, **options: Any):
        """Initialize the policy.

        Args:
            scenario: Scenario to solve
            **options: Policy-specific options

        Raises:
            ValidationError: If the policy does not support the scenario
        """
        if not isinstance(scenario, ScenarioParams):
            raise ValidationError(
                f"scenario must be ScenarioParams, got {type(scenario)}",
                field_name="scenario", invalid_value=scenario
            )
        self.scenario = scenario
        self.options = options
        if not self.supports(scenario):
            raise ValidationError(
                f"policy '{self.name}' does not support scenario {scenario.label}",
                field_name="scenario", invalid_value=scenario.label
            )
        logger.debug(f"Policy {self.name} ready for {scenario.label}")

    @classmethod
    def supports(cls, scenario: ScenarioParams) -> bool:
        """Check if the policy can solve the scenario."""
        return True

    @abstractmethod
    def solve(self, ch: ChannelRealization) -> Allocation:
        """Compute the allocation for one channel realization."""
        pass

    def throughput(self, alloc: Allocation, ch: ChannelRealization) -> ThroughputReport:
        """Evaluate the scenario's exact throughput for an allocation."""
        from .throughput import evaluate_throughput
        return evaluate_throughput(alloc, ch, self.scenario)

    def evaluate(self, ch: ChannelRealization) -> Tuple[Allocation, ThroughputReport]:
        """Solve and evaluate in one call."""
        alloc = self.solve(ch)
        return alloc, self.throughput(alloc, ch)

    def spectral_efficiency(self, ch: ChannelRealization) -> float:
        """Spectral efficiency (sum throughput / K) achieved on ``ch``."""
        return self.evaluate(ch)[1].spectral_efficiency

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}({self.scenario})"


def register_policy(
    user_mode: UserMode,
    it_direction: ITDirection
) -> Callable[[Type[BasePolicy]], Type[BasePolicy]]:
    """Class decorator registering the optimal policy of a system type."""
    def decorator(cls: Type[BasePolicy]) -> Type[BasePolicy]:
        _POLICY_REGISTRY[(user_mode, it_direction)] = cls
        return cls
    return decorator


def register_baseline(name: str) -> Callable[[Type[BasePolicy]], Type[BasePolicy]]:
    """Class decorator registering a named baseline policy."""
    def decorator(cls: Type[BasePolicy]) -> Type[BasePolicy]:
        cls.name = name
        _BASELINE_REGISTRY[name] = cls
        return cls
    return decorator


def _load_builtin_policies() -> None:
    for module in _BUILTIN_MODULES:
        importlib.import_module(module, __package__)


def available_policies() -> List[str]:
    """Names accepted by create_policy."""
    _load_builtin_policies()
    return [OPTIMAL] + sorted(_BASELINE_REGISTRY)


def create_policy(
    scenario: ScenarioParams,
    name: str = OPTIMAL,
    **options: Any
) -> BasePolicy:
    """Factory function to create the policy for a scenario.

    Args:
        scenario: Scenario to solve
        name: "optimal" or a registered baseline name
        **options: Policy-specific options (e.g. ``bound_choice``)

    Returns:
        Policy instance bound to the scenario

    Raises:
        ValidationError: If the name is unknown or unsupported for the scenario
    """
    _load_builtin_policies()
    if name == OPTIMAL:
        policy_class = _POLICY_REGISTRY.get((scenario.user_mode, scenario.it_direction))
    else:
        policy_class = _BASELINE_REGISTRY.get(name)
    if policy_class is None:
        raise ValidationError(
            f"Unknown policy: {name}",
            field_name="policy",
            invalid_value=name,
            expected=", ".join(available_policies())
        )
    return policy_class(scenario, **options)


def check_dimensions(alloc: Allocation, ch: ChannelRealization, p: ScenarioParams) -> None:
    """Reject allocations whose length differs from the channel or scenario."""
    if alloc.K != ch.K or ch.K != p.K:
        raise ValidationError(
            f"dimension mismatch: allocation {alloc.K}, channels {ch.K}, scenario K={p.K}",
            field_name="K",
            invalid_value=(alloc.K, ch.K, p.K)
        )


def check_power_budget(alloc: Allocation, p: ScenarioParams) -> None:
    """Raise AllocationError if the downlink powers exceed p_t."""
    excess = alloc.total_power - p.p_t
    if excess > CONSTRAINT_TOL * max(1.0, p.p_t):
        raise AllocationError(
            f"downlink powers exceed the budget by {excess:.6g}",
            constraint="sum P_n <= p_t",
            excess=excess
        )


def check_uplink_budget(uplink: np.ndarray, available: np.ndarray) -> None:
    """Raise AllocationError if uplink powers exceed the harvested surplus."""
    surplus = np.maximum(np.asarray(available, dtype=float), 0.0)
    excess = np.asarray(uplink, dtype=float) - surplus
    limit = CONSTRAINT_TOL * np.maximum(1.0, surplus)
    if np.any(excess > limit):
        raise AllocationError(
            f"uplink powers exceed the harvested surplus by {float(np.max(excess)):.6g}",
            constraint="Q <= harvested - p_c",
            excess=float(np.max(excess))
        )


def keep_better(
    primary: Allocation,
    fallback: Allocation,
    score: Callable[[Allocation], float]
) -> Allocation:
    """Return ``fallback`` when it scores strictly higher than ``primary``.

    Both allocations are scored with the exact throughput ``score``; ties
    keep ``primary``. A replaced allocation keeps the solver's ``extra``
    entries and adds ``fallback`` and ``solver_throughput``.
    """
    kept, other = score(primary), score(fallback)
    if other > kept + CONSTRAINT_TOL * max(1.0, abs(kept)):
        logger.debug(f"Equal power beats the solver: {other:.9g} > {kept:.9g}")
        fallback.diagnostics.extra = {
            **primary.diagnostics.extra,
            **fallback.diagnostics.extra,
            "fallback": "equal_power",
            "solver_throughput": kept,
        }
        return fallback
    return primary


def meets(values: Any, threshold: float) -> np.ndarray:
    """Elementwise ``values >= threshold`` up to the constraint tolerance."""
    arr = np.asarray(values, dtype=float)
    return arr >= threshold - CONSTRAINT_TOL * max(1.0, abs(threshold))


def require_beta(alloc: Allocation) -> np.ndarray:
    """Per-sub-channel splitting ratios of a downlink-IT allocation."""
    if alloc.beta is None:
        raise ValidationError(
            "downlink-IT allocations need a splitting ratio",
            field_name="beta"
        )
    return alloc.betas()


def snr_after_split(
    powers: np.ndarray,
    gains: np.ndarray,
    beta: np.ndarray,
    p: ScenarioParams
) -> np.ndarray:
    """Decoder SNR beta P h / (beta sigma_a^2 + sigma_b^2); zero when beta = 0."""
    denom = beta * p.sigma_a2 + p.sigma_b2
    safe = np.where(denom > 0, denom, 1.0)
    return np.where(denom > 0, beta * powers * gains / safe, 0.0)

