"""
PySWIPT Channel Model

Generates random channel realizations from a free-space aperture model with
line-of-sight Gaussian fading and normalises them for the policy solvers.

This module provides:
- LinkGeometry / GeometryTable describing antennas and distances
- CN(1, 0.2) fading samples drawn from explicit numpy generators
- The aperture link gain A_t * A_r * |Z|^2 / (lambda^2 * r^2)
- draw_realization producing noise-normalised ChannelRealization objects
- ChannelModel, a manager bundling a geometry table with a noise floor

Normalisation convention: every power-transfer or downlink-IT gain is divided
by the noise variance, so harvested powers and circuit powers share noise
units. Uplink-IT gains are kept raw because uplink powers are already in noise
units; the round-trip product g' * g is therefore divided by the noise
variance exactly once.
"""

from typing import Union, Optional, Tuple, Sequence, Iterator, Any
from dataclasses import dataclass, replace
import logging

import numpy as np

from ..utils.types import ScenarioParams, ChannelRealization, UserMode, ITDirection
from ..utils.units import wavelength_from_frequency, dbm_to_watts
from ..exceptions import ValidationError, ChannelError


# Setup logging for channel generation
logger = logging.getLogger(__name__)

# Per-component variance of the complex fading (total variance 0.2)
FADING_MEAN = 1.0
FADING_COMPONENT_VARIANCE = 0.1

DEFAULT_CARRIER_HZ = 5.8e9
DEFAULT_NOISE_DBM = -30.0
SU_DISTANCES = (100.0,)
MU_DISTANCES = (50.0, 80.0, 100.0, 150.0, 200.0)

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator, None]


@dataclass(frozen=True)
class LinkGeometry:
    """Geometry of one point-to-point link.

    Attributes:
        wavelength: Carrier wavelength (m)
        aperture_tx: Transmit aperture A_t (m^2)
        aperture_rx: Receive aperture A_r (m^2)
        distance: Link distance r (m)
    """
    wavelength: float
    aperture_tx: float
    aperture_rx: float
    distance: float

    def __post_init__(self) -> None:
        """Validate that every geometry field is strictly positive."""
        for name in ("wavelength", "aperture_tx", "aperture_rx", "distance"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValidationError(
                    f"{name} must be strictly positive, got {value}",
                    field_name=name,
                    invalid_value=value,
                    expected="> 0"
                )

    @property
    def deterministic_gain(self) -> float:
        """Link gain without fading (|Z|^2 = 1)."""
        return (self.aperture_tx * self.aperture_rx
                / (self.wavelength ** 2 * self.distance ** 2))


@dataclass(frozen=True)
class FadingSample:
    """One complex fading coefficient Z."""
    z: complex

    @property
    def power(self) -> float:
        """|Z|^2."""
        return float(abs(self.z) ** 2)


@dataclass(frozen=True)
class GeometryTable:
    """Per-mobile geometry for a scenario.

    Single-user systems carry one distance; multi-user systems carry one
    distance per mobile (one sub-channel per mobile).

    Attributes:
        wavelength: Carrier wavelength (m)
        distances: Base-station to mobile distances (m)
        bs_aperture: Full base-station array aperture used for downlink IT (m^2)
        mobile_aperture: Aperture of each mobile antenna (m^2)
        subarray_aperture: Aperture of each base-station sub-array in uplink IT (m^2)
    """
    wavelength: float
    distances: Tuple[float, ...]
    bs_aperture: float = 1.0
    mobile_aperture: float = 0.05
    subarray_aperture: float = 0.5

    def __post_init__(self) -> None:
        """Validate the table."""
        object.__setattr__(self, "distances", tuple(float(d) for d in self.distances))
        if len(self.distances) == 0:
            raise ValidationError(
                "geometry table needs at least one distance",
                field_name="distances",
                expected="non-empty list of distances in meters"
            )
        for name in ("wavelength", "bs_aperture", "mobile_aperture", "subarray_aperture"):
            value = getattr(self, name)
            if not value > 0:
                raise ValidationError(
                    f"{name} must be strictly positive, got {value}",
                    field_name=name, invalid_value=value, expected="> 0"
                )
        if any(not d > 0 for d in self.distances):
            raise ValidationError(
                "distances must be strictly positive",
                field_name="distances",
                invalid_value=list(self.distances),
                expected="> 0"
            )

    def __len__(self) -> int:
        return len(self.distances)

    def downlink_link(self, index: int) -> LinkGeometry:
        """Full array to one mobile antenna (downlink IT)."""
        return LinkGeometry(self.wavelength, self.bs_aperture,
                            self.mobile_aperture, self.distances[index])

    def mpt_link(self, index: int) -> LinkGeometry:
        """Power-transfer sub-array to the mobile (uplink-IT scenarios)."""
        return LinkGeometry(self.wavelength, self.subarray_aperture,
                            self.mobile_aperture, self.distances[index])

    def uplink_link(self, index: int) -> LinkGeometry:
        """Mobile antenna to the receiving sub-array."""
        return LinkGeometry(self.wavelength, self.mobile_aperture,
                            self.subarray_aperture, self.distances[index])

    def scaled(self, distance_scale: float) -> "GeometryTable":
        """Return a table whose distances are divided by ``distance_scale``."""
        if not distance_scale > 0:
            raise ValidationError(
                f"distance scale must be positive, got {distance_scale}",
                field_name="distance_scale", invalid_value=distance_scale
            )
        return replace(self, distances=tuple(d / distance_scale for d in self.distances))


def sample_fading(rng_stream: np.random.Generator) -> FadingSample:
    """Draw one CN(1, 0.2) fading coefficient.

    Args:
        rng_stream: Seeded numpy generator

    Returns:
        FadingSample with real part N(1, 0.1) and imaginary part N(0, 0.1)
    """
    return FadingSample(complex(sample_fading_array(rng_stream, None)))


def sample_fading_array(rng_stream: np.random.Generator, size: Any) -> np.ndarray:
    """Draw an array of independent CN(1, 0.2) fading coefficients."""
    scale = np.sqrt(FADING_COMPONENT_VARIANCE)
    real = rng_stream.normal(FADING_MEAN, scale, size=size)
    imag = rng_stream.normal(0.0, scale, size=size)
    return real + 1j * imag


def link_gain(geom: LinkGeometry, z: Union[FadingSample, complex, np.ndarray]) -> Any:
    """Linear power gain P_r / P_t of a link.

    Args:
        geom: Link geometry
        z: Fading sample, complex scalar or array of complex samples

    Returns:
        A_t * A_r * |Z|^2 / (lambda^2 * r^2), scalar or array matching ``z``
    """
    if not isinstance(geom, LinkGeometry):
        raise ValidationError(
            f"geometry must be LinkGeometry, got {type(geom)}",
            field_name="geom", invalid_value=geom
        )
    fading = z.z if isinstance(z, FadingSample) else z
    power = np.abs(fading) ** 2
    gain = geom.deterministic_gain * power
    return float(gain) if np.ndim(gain) == 0 else gain


def _rng_from_seed(seed: SeedLike) -> np.random.Generator:
    """Create a generator from an int, SeedSequence or existing generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _link_rows(scenario: ScenarioParams, geometries: GeometryTable) -> Sequence[int]:
    """Geometry index used by each sub-channel."""
    expected = 1 if scenario.user_mode is UserMode.SINGLE else scenario.K
    if len(geometries) != expected:
        raise ChannelError(
            f"{scenario.user_mode.value}-user scenario needs {expected} geometry "
            f"entries, got {len(geometries)}",
            expected_length=expected,
            actual_length=len(geometries)
        )
    if scenario.user_mode is UserMode.SINGLE:
        return [0] * scenario.K
    return list(range(scenario.K))


def draw_realization(
    scenario: ScenarioParams,
    geometries: GeometryTable,
    seed: SeedLike,
    noise_variance: float = 1e-6
) -> ChannelRealization:
    """Draw one noise-normalised channel realization.

    One independent fading sample is drawn per scalar gain: two per
    sub-channel (the two mobile antennas for downlink IT, or the power and
    information links for uplink IT).

    Args:
        scenario: Scenario whose user mode, IT direction and K are used
        geometries: Geometry table with one entry per mobile
        seed: Seed, SeedSequence or generator; equal seeds give equal draws
        noise_variance: Total noise variance in watts

    Returns:
        ChannelRealization in the solver domain

    Raises:
        ChannelError: If the table length does not match the user count
        ValidationError: If the noise variance is not positive
    """
    if not noise_variance > 0:
        raise ValidationError(
            f"noise variance must be positive, got {noise_variance}",
            field_name="noise_variance", invalid_value=noise_variance
        )
    rows = _link_rows(scenario, geometries)
    rng = _rng_from_seed(seed)
    fading = sample_fading_array(rng, (scenario.K, 2))

    if scenario.it_direction is ITDirection.DOWNLINK:
        deterministic = np.array([geometries.downlink_link(i).deterministic_gain for i in rows])
        power = np.abs(fading) ** 2
        h_dot = deterministic * power[:, 0] / noise_variance
        h_ddot = deterministic * power[:, 1] / noise_variance
        logger.debug(f"Drew downlink realization K={scenario.K}, mean h={np.mean(h_dot + h_ddot):.6g}")
        return ChannelRealization(h_dot=h_dot, h_ddot=h_ddot,
                                  noise_variance_used=noise_variance)

    mpt = np.array([geometries.mpt_link(i).deterministic_gain for i in rows])
    up = np.array([geometries.uplink_link(i).deterministic_gain for i in rows])
    power = np.abs(fading) ** 2
    g_prime = mpt * power[:, 0] / noise_variance
    g_up = up * power[:, 1]
    logger.debug(f"Drew uplink realization K={scenario.K}, max g'={np.max(g_prime):.6g}")
    return ChannelRealization(g_prime=g_prime, g_up=g_up,
                              noise_variance_used=noise_variance)


def default_geometry_table(
    user_mode: UserMode,
    carrier_hz: float = DEFAULT_CARRIER_HZ
) -> GeometryTable:
    """Default geometry: 100 m single user, or mobiles at 50 to 200 m."""
    distances = SU_DISTANCES if user_mode is UserMode.SINGLE else MU_DISTANCES
    return GeometryTable(
        wavelength=wavelength_from_frequency(carrier_hz),
        distances=distances
    )


def create_geometry_table(
    distances: Sequence[float],
    carrier_hz: float = DEFAULT_CARRIER_HZ,
    bs_aperture: float = 1.0,
    mobile_aperture: float = 0.05,
    subarray_aperture: float = 0.5
) -> GeometryTable:
    """Factory function to create GeometryTable objects.

    Args:
        distances: Mobile distances in meters
        carrier_hz: Carrier frequency in Hz
        bs_aperture: Base-station array aperture (m^2)
        mobile_aperture: Aperture of each mobile antenna (m^2)
        subarray_aperture: Aperture of each base-station sub-array (m^2)

    Returns:
        GeometryTable object
    """
    try:
        wavelength = wavelength_from_frequency(carrier_hz)
    except ValueError as e:
        raise ValidationError(
            str(e), field_name="carrier_hz", invalid_value=carrier_hz, expected="> 0"
        ) from e
    return GeometryTable(
        wavelength=wavelength,
        distances=tuple(distances),
        bs_aperture=bs_aperture,
        mobile_aperture=mobile_aperture,
        subarray_aperture=subarray_aperture
    )


class ChannelModel:
    """Draws channel realizations for one scenario and geometry.

    Attributes:
        scenario: Scenario template (user mode, IT direction, K)
        geometries: Geometry table matching the user mode
        noise_variance: Total noise variance (W)
    """

    def __init__(
        self,
        scenario: ScenarioParams,
        geometries: Optional[GeometryTable] = None,
        noise_dbm: float = DEFAULT_NOISE_DBM
    ):
        """Initialize the channel model.

        Args:
            scenario: Scenario template
            geometries: Geometry table; defaults depend on the user mode
            noise_dbm: Total noise power in dBm

        Raises:
            ChannelError: If the table length does not match the user count
        """
        self.scenario = scenario
        self.geometries = geometries or default_geometry_table(scenario.user_mode)
        self.noise_variance = float(dbm_to_watts(noise_dbm))
        _link_rows(scenario, self.geometries)
        logger.info(f"Channel model ready: {scenario.label}, K={scenario.K}, "
                    f"distances={list(self.geometries.distances)}")

    def draw(self, seed: SeedLike) -> ChannelRealization:
        """Draw one realization from ``seed``."""
        return draw_realization(self.scenario, self.geometries, seed, self.noise_variance)

    def iter_realizations(self, master_seed: int, trials: int) -> Iterator[ChannelRealization]:
        """Yield one realization per trial from per-trial child seeds."""
        for trial in range(trials):
            yield self.draw(trial_seed(master_seed, trial))


def trial_seed(master_seed: int, trial: int) -> np.random.SeedSequence:
    """Seed of one Monte Carlo trial.

    The seed depends only on the master seed and the trial index, so every
    circuit-power point of a sweep sees the same channel in a given trial.
    """
    return np.random.SeedSequence(master_seed, spawn_key=(trial,))
