"""
PySWIPT Type Definitions

Core data structures shared by the channel model, the policy solvers, the
oracle and the simulator. Solver inputs and outputs live in the
noise-normalised domain: channel gains are divided by the noise variance and
``ScenarioParams.p_c`` is expressed in the same noise units, while transmit
powers stay in watts.
"""

from typing import Union, Optional, Dict, Any, Tuple, Sequence
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from ..exceptions import ValidationError


# Tolerance used for constraint checks throughout the package
CONSTRAINT_TOL = 1e-9


class UserMode(Enum):
    """Single mobile on all sub-channels, or one mobile per sub-channel."""
    SINGLE = "single"
    MULTI = "multi"


class ITDirection(Enum):
    """Direction of information transfer; power always flows downlink."""
    DOWNLINK = "downlink"
    UPLINK = "uplink"


class RateMode(Enum):
    """Coding-rate mode of every stream."""
    VARIABLE = "variable"
    FIXED = "fixed"


class BoundChoice(Enum):
    """Objective used by the single-user downlink β search."""
    LOWER = "lower"
    UPPER = "upper"
    EXACT = "exact"


ArrayLike = Union[Sequence[float], np.ndarray]


def _as_gain_array(values: ArrayLike, field_name: str) -> np.ndarray:
    """Convert a gain sequence to a float array and validate it."""
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.size == 0:
        raise ValidationError(
            f"{field_name} must not be empty",
            field_name=field_name,
            expected="non-empty sequence of nonnegative gains"
        )
    if not np.all(np.isfinite(arr)):
        raise ValidationError(
            f"{field_name} must be finite",
            field_name=field_name,
            invalid_value=arr.tolist()
        )
    if np.any(arr < 0):
        raise ValidationError(
            f"{field_name} must be nonnegative",
            field_name=field_name,
            invalid_value=arr.tolist(),
            expected="gains >= 0"
        )
    return arr


@dataclass(frozen=True)
class ScenarioParams:
    """System configuration for one power-control problem.

    Attributes:
        user_mode: Single-user or multi-user system
        it_direction: Direction of information transfer
        rate_mode: Variable or fixed coding rates
        p_t: Total base-station transmit power budget (W)
        p_c: Circuit power in noise units (watts divided by the noise variance)
        theta: Linear SNR threshold for fixed coding rates
        sigma_a2: Noise share accumulated before the power splitter
        sigma_b2: Noise share accumulated after the power splitter
        K: Number of sub-channels
    """
    user_mode: UserMode = UserMode.SINGLE
    it_direction: ITDirection = ITDirection.DOWNLINK
    rate_mode: RateMode = RateMode.VARIABLE
    p_t: float = 10.0
    p_c: float = 0.0
    theta: float = 1000.0
    sigma_a2: float = 0.9
    sigma_b2: float = 0.1
    K: int = 5

    def __post_init__(self) -> None:
        """Validate scenario invariants."""
        for name, enum_type in (
            ("user_mode", UserMode),
            ("it_direction", ITDirection),
            ("rate_mode", RateMode),
        ):
            if not isinstance(getattr(self, name), enum_type):
                raise ValidationError(
                    f"{name} must be {enum_type.__name__}, got {type(getattr(self, name))}",
                    field_name=name,
                    invalid_value=getattr(self, name)
                )
        if not self.p_t > 0:
            raise ValidationError(
                f"p_t must be positive, got {self.p_t}",
                field_name="p_t", invalid_value=self.p_t, expected="p_t > 0"
            )
        if not self.p_c >= 0:
            raise ValidationError(
                f"p_c must be nonnegative, got {self.p_c}",
                field_name="p_c", invalid_value=self.p_c, expected="p_c >= 0"
            )
        if self.sigma_a2 < 0 or self.sigma_b2 < 0:
            raise ValidationError(
                "noise shares must be nonnegative",
                field_name="sigma_a2/sigma_b2",
                invalid_value=(self.sigma_a2, self.sigma_b2)
            )
        if abs(self.sigma_a2 + self.sigma_b2 - 1.0) > CONSTRAINT_TOL:
            raise ValidationError(
                f"sigma_a2 + sigma_b2 must equal 1, got {self.sigma_a2 + self.sigma_b2}",
                field_name="sigma_a2+sigma_b2",
                invalid_value=self.sigma_a2 + self.sigma_b2,
                expected="sigma_a2 + sigma_b2 = 1"
            )
        if self.theta < 0 or (self.rate_mode is RateMode.FIXED and not self.theta > 0):
            raise ValidationError(
                f"theta must be positive for fixed coding rates, got {self.theta}",
                field_name="theta", invalid_value=self.theta, expected="theta > 0"
            )
        if not isinstance(self.K, (int, np.integer)) or self.K < 1:
            raise ValidationError(
                f"K must be a positive integer, got {self.K}",
                field_name="K", invalid_value=self.K, expected="K >= 1"
            )

    @property
    def is_single_user(self) -> bool:
        """Check if all sub-channels serve one mobile."""
        return self.user_mode is UserMode.SINGLE

    @property
    def is_downlink(self) -> bool:
        """Check if information flows downlink."""
        return self.it_direction is ITDirection.DOWNLINK

    @property
    def is_fixed_rate(self) -> bool:
        """Check if streams use fixed coding rates."""
        return self.rate_mode is RateMode.FIXED

    @property
    def fixed_rate(self) -> float:
        """Rate of one successfully decoded fixed-rate stream (bit/s/Hz)."""
        return float(np.log2(1.0 + self.theta))

    @property
    def label(self) -> str:
        """Short scenario label such as ``su-dl-variable``."""
        user = "su" if self.is_single_user else "mu"
        direction = "dl" if self.is_downlink else "ul"
        return f"{user}-{direction}-{self.rate_mode.value}"

    def replace(self, **changes: Any) -> "ScenarioParams":
        """Return a copy with the given fields replaced."""
        return replace(self, **changes)

    def __str__(self) -> str:
        """String representation of the scenario."""
        return (f"ScenarioParams({self.label}, K={self.K}, p_t={self.p_t}, "
                f"p_c={self.p_c:.6g}, theta={self.theta:.6g})")


@dataclass(frozen=True)
class ChannelRealization:
    """Noise-normalised effective sub-channel gains of one slot.

    Downlink-IT realizations carry ``h`` together with its per-antenna
    components; uplink-IT realizations carry ``g_prime`` (downlink power
    transfer) and ``g_up`` (uplink information transfer).

    Attributes:
        h: Combined downlink gains, ``h = h_dot + h_ddot``
        h_dot: Gains towards mobile antenna 1
        h_ddot: Gains towards mobile antenna 2
        g_prime: Downlink power-transfer gains
        g_up: Uplink information-transfer gains
        noise_variance_used: Noise variance the gains were divided by (W)
    """
    h: Optional[np.ndarray] = None
    h_dot: Optional[np.ndarray] = None
    h_ddot: Optional[np.ndarray] = None
    g_prime: Optional[np.ndarray] = None
    g_up: Optional[np.ndarray] = None
    noise_variance_used: float = 1.0

    def __post_init__(self) -> None:
        """Validate gains and fill in derived downlink components."""
        if self.h is None and self.h_dot is None and self.g_prime is None:
            raise ValidationError(
                "realization needs downlink gains or uplink gains",
                field_name="h/g_prime"
            )
        if self.h_dot is not None or self.h_ddot is not None or self.h is not None:
            if self.h_dot is not None:
                h_dot = _as_gain_array(self.h_dot, "h_dot")
                h_ddot = (np.zeros_like(h_dot) if self.h_ddot is None
                          else _as_gain_array(self.h_ddot, "h_ddot"))
            else:
                h_dot = _as_gain_array(self.h, "h")
                h_ddot = np.zeros_like(h_dot)
            if h_dot.shape != h_ddot.shape:
                raise ValidationError(
                    "h_dot and h_ddot must have the same length",
                    field_name="h_ddot",
                    invalid_value=(h_dot.size, h_ddot.size)
                )
            combined = h_dot + h_ddot
            if self.h is not None and self.h_dot is not None:
                given = _as_gain_array(self.h, "h")
                if given.shape != combined.shape or np.any(given != combined):
                    raise ValidationError(
                        "h must equal h_dot + h_ddot exactly",
                        field_name="h"
                    )
            object.__setattr__(self, "h_dot", h_dot)
            object.__setattr__(self, "h_ddot", h_ddot)
            object.__setattr__(self, "h", combined)
        if self.g_prime is not None or self.g_up is not None:
            if self.g_prime is None or self.g_up is None:
                raise ValidationError(
                    "uplink realizations need both g_prime and g_up",
                    field_name="g_prime/g_up"
                )
            g_prime = _as_gain_array(self.g_prime, "g_prime")
            g_up = _as_gain_array(self.g_up, "g_up")
            if g_prime.shape != g_up.shape:
                raise ValidationError(
                    "g_prime and g_up must have the same length",
                    field_name="g_up",
                    invalid_value=(g_prime.size, g_up.size)
                )
            if self.h is not None and self.h.shape != g_prime.shape:
                raise ValidationError(
                    "downlink and uplink gains must have the same length",
                    field_name="g_prime"
                )
            object.__setattr__(self, "g_prime", g_prime)
            object.__setattr__(self, "g_up", g_up)
        if not self.noise_variance_used > 0:
            raise ValidationError(
                "noise variance must be positive",
                field_name="noise_variance_used",
                invalid_value=self.noise_variance_used
            )

    @property
    def K(self) -> int:
        """Number of sub-channels."""
        gains = self.h if self.h is not None else self.g_prime
        assert gains is not None
        return int(gains.size)

    @property
    def has_downlink(self) -> bool:
        """Check if downlink-IT gains are present."""
        return self.h is not None

    @property
    def has_uplink(self) -> bool:
        """Check if uplink-IT gains are present."""
        return self.g_prime is not None

    def downlink_gains(self) -> np.ndarray:
        """Return ``h`` or raise if this is an uplink-only realization."""
        if self.h is None:
            raise ValidationError(
                "realization has no downlink-IT gains",
                field_name="h"
            )
        return self.h

    def uplink_gains(self) -> Tuple[np.ndarray, np.ndarray]:
        """Return ``(g_prime, g_up)`` or raise if absent."""
        if self.g_prime is None or self.g_up is None:
            raise ValidationError(
                "realization has no uplink-IT gains",
                field_name="g_prime"
            )
        return self.g_prime, self.g_up

    def scaled(self, factor: float) -> "ChannelRealization":
        """Return a realization whose every gain is multiplied by ``factor``."""
        return ChannelRealization(
            h_dot=None if self.h_dot is None else self.h_dot * factor,
            h_ddot=None if self.h_ddot is None else self.h_ddot * factor,
            g_prime=None if self.g_prime is None else self.g_prime * factor,
            g_up=None if self.g_up is None else self.g_up * factor,
            noise_variance_used=self.noise_variance_used
        )

    def __str__(self) -> str:
        """String representation of the realization."""
        kind = "downlink" if self.has_downlink else "uplink"
        return f"ChannelRealization({kind}, K={self.K})"


@dataclass
class SolveDiagnostics:
    """Solver internals reported alongside an allocation.

    Attributes:
        lambda_star: Sum-power multiplier
        mu_star: Circuit-power multiplier
        water_level: Water level of the final water-filling step
        stream_count: k*, L*, m_max, z_max or q_max depending on the policy
        permutation: Sort order used by the policy (sorted position -> index)
        objective: Value of the objective the solver optimised
        extra: Policy-specific values (chosen bound, search counts, ...)
    """
    lambda_star: Optional[float] = None
    mu_star: Optional[float] = None
    water_level: Optional[float] = None
    stream_count: Optional[int] = None
    permutation: Optional[Tuple[int, ...]] = None
    objective: Optional[float] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        """Validate the permutation."""
        if self.permutation is not None:
            perm = tuple(int(i) for i in self.permutation)
            if sorted(perm) != list(range(len(perm))):
                raise ValidationError(
                    "permutation must be a bijection on the sub-channel indices",
                    field_name="permutation",
                    invalid_value=perm
                )
            self.permutation = perm


@dataclass
class Allocation:
    """Output of a power-control policy.

    Attributes:
        downlink_powers: Base-station powers P_n (W)
        beta: Splitting ratio, scalar (single user) or per mobile
        uplink_powers: Mobile uplink powers Q_n (uplink IT only)
        feasible: False when the circuit-power constraint cannot be met
        diagnostics: Solver internals
    """
    downlink_powers: np.ndarray
    beta: Union[float, np.ndarray, None] = None
    uplink_powers: Optional[np.ndarray] = None
    feasible: bool = True
    diagnostics: SolveDiagnostics = field(default_factory=SolveDiagnostics)

    def __post_init__(self) -> None:
        """Validate allocation invariants."""
        self.downlink_powers = np.asarray(self.downlink_powers, dtype=float).reshape(-1)
        if np.any(self.downlink_powers < 0) or not np.all(np.isfinite(self.downlink_powers)):
            raise ValidationError(
                "downlink powers must be finite and nonnegative",
                field_name="downlink_powers",
                invalid_value=self.downlink_powers.tolist()
            )
        if self.uplink_powers is not None:
            self.uplink_powers = np.asarray(self.uplink_powers, dtype=float).reshape(-1)
            if self.uplink_powers.shape != self.downlink_powers.shape:
                raise ValidationError(
                    "uplink and downlink powers must have the same length",
                    field_name="uplink_powers"
                )
            if np.any(self.uplink_powers < 0) or not np.all(np.isfinite(self.uplink_powers)):
                raise ValidationError(
                    "uplink powers must be finite and nonnegative",
                    field_name="uplink_powers",
                    invalid_value=self.uplink_powers.tolist()
                )
        if self.beta is not None:
            if np.ndim(self.beta) == 0:
                self.beta = float(self.beta)
            else:
                self.beta = np.asarray(self.beta, dtype=float).reshape(-1)
            values = np.atleast_1d(self.beta)
            if np.any(values < 0) or np.any(values > 1):
                raise ValidationError(
                    "splitting ratios must lie in [0, 1]",
                    field_name="beta",
                    invalid_value=values.tolist()
                )

    @property
    def K(self) -> int:
        """Number of sub-channels."""
        return int(self.downlink_powers.size)

    @property
    def total_power(self) -> float:
        """Total base-station transmit power."""
        return float(np.sum(self.downlink_powers))

    @property
    def active(self) -> np.ndarray:
        """Indices of sub-channels that carry information."""
        carrier = self.uplink_powers if self.uplink_powers is not None else self.downlink_powers
        return np.flatnonzero(carrier > 0)

    def betas(self) -> np.ndarray:
        """Splitting ratios broadcast to one value per sub-channel."""
        if self.beta is None:
            return np.ones(self.K)
        return np.broadcast_to(np.asarray(self.beta, dtype=float), (self.K,)).copy()

    def __str__(self) -> str:
        """String representation of the allocation."""
        return (f"Allocation(feasible={self.feasible}, P={np.round(self.downlink_powers, 6).tolist()}, "
                f"streams={self.diagnostics.stream_count})")


@dataclass(frozen=True)
class ThroughputReport:
    """Throughput achieved by an allocation.

    Attributes:
        sum_throughput: Sum over streams (bit/s/Hz aggregated)
        per_stream: Rate of each stream
        spectral_efficiency: ``sum_throughput / K``
        circuit_ok: Whether the circuit-power indicators allowed any throughput
    """
    sum_throughput: float
    per_stream: Tuple[float, ...]
    spectral_efficiency: float
    circuit_ok: bool = True

    @property
    def K(self) -> int:
        """Number of sub-channels."""
        return len(self.per_stream)

    def __str__(self) -> str:
        """String representation of the report."""
        return (f"ThroughputReport(sum={self.sum_throughput:.6g}, "
                f"se={self.spectral_efficiency:.6g})")


def zero_allocation(
    K: int,
    uplink: bool = False,
    beta: Union[float, np.ndarray, None] = None,
    diagnostics: Optional[SolveDiagnostics] = None
) -> Allocation:
    """Create the all-zero allocation reported for infeasible scenarios.

    Args:
        K: Number of sub-channels
        uplink: Whether to include an all-zero uplink power vector
        beta: Splitting ratio to report
        diagnostics: Optional diagnostics to attach

    Returns:
        Allocation flagged infeasible
    """
    return Allocation(
        downlink_powers=np.zeros(K),
        beta=beta,
        uplink_powers=np.zeros(K) if uplink else None,
        feasible=False,
        diagnostics=diagnostics or SolveDiagnostics(stream_count=0)
    )


def make_report(rates: ArrayLike, K: int, circuit_ok: bool = True) -> ThroughputReport:
    """Build a throughput report from per-stream rates.

    Args:
        rates: Per-stream rates in bit/s/Hz
        K: Number of sub-channels used for the spectral efficiency
        circuit_ok: Whether the circuit indicators held

    Returns:
        ThroughputReport with spectral efficiency ``sum / K``
    """
    per_stream = np.asarray(rates, dtype=float).reshape(-1)
    total = float(np.sum(per_stream))
    return ThroughputReport(
        sum_throughput=total,
        per_stream=tuple(float(r) for r in per_stream),
        spectral_efficiency=total / K,
        circuit_ok=circuit_ok
    )


def create_scenario(
    user_mode: Union[str, UserMode] = UserMode.SINGLE,
    it_direction: Union[str, ITDirection] = ITDirection.DOWNLINK,
    rate_mode: Union[str, RateMode] = RateMode.VARIABLE,
    **kwargs: Any
) -> ScenarioParams:
    """Factory function to create ScenarioParams objects.

    Args:
        user_mode: "single" or "multi"
        it_direction: "downlink" or "uplink"
        rate_mode: "variable" or "fixed"
        **kwargs: Remaining ScenarioParams fields

    Returns:
        ScenarioParams object
    """
    if isinstance(user_mode, str):
        user_mode = UserMode(user_mode)
    if isinstance(it_direction, str):
        it_direction = ITDirection(it_direction)
    if isinstance(rate_mode, str):
        rate_mode = RateMode(rate_mode)
    return ScenarioParams(
        user_mode=user_mode,
        it_direction=it_direction,
        rate_mode=rate_mode,
        **kwargs
    )


def create_downlink_channels(
    h: Optional[ArrayLike] = None,
    h_dot: Optional[ArrayLike] = None,
    h_ddot: Optional[ArrayLike] = None,
    noise_variance: float = 1.0
) -> ChannelRealization:
    """Factory function for downlink-IT realizations.

    Either ``h`` alone (components become ``h`` and zeros) or both components.
    """
    return ChannelRealization(
        h=None if h is None else np.asarray(h, dtype=float),
        h_dot=None if h_dot is None else np.asarray(h_dot, dtype=float),
        h_ddot=None if h_ddot is None else np.asarray(h_ddot, dtype=float),
        noise_variance_used=noise_variance
    )


def create_uplink_channels(
    g_prime: ArrayLike,
    g_up: ArrayLike,
    noise_variance: float = 1.0
) -> ChannelRealization:
    """Factory function for uplink-IT realizations."""
    return ChannelRealization(
        g_prime=np.asarray(g_prime, dtype=float),
        g_up=np.asarray(g_up, dtype=float),
        noise_variance_used=noise_variance
    )
