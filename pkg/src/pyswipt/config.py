"""
PySWIPT Configuration Files

JSON configuration for the command-line interface. Files carry
``"schema_version": 1`` and up to four blocks (scenario, geometry, sim,
output); missing blocks and fields take the defaults of the reference
system, which depend on the user mode and the IT direction.

Unit conversions (dB, dBm, noise normalisation) happen here and nowhere else
on the way in.
"""

from dataclasses import dataclass, asdict, fields
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union
import json
import logging

from .utils.types import ScenarioParams, UserMode, ITDirection, RateMode, BoundChoice
from .utils.units import db_to_linear
from .channels.channel_model import (
    GeometryTable,
    create_geometry_table,
    DEFAULT_CARRIER_HZ,
    DEFAULT_NOISE_DBM,
    SU_DISTANCES,
    MU_DISTANCES
)
from .policies.base_policy import OPTIMAL
from .simulation.simulator import SimConfig
from .exceptions import ConfigError, ValidationError


logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
OUTPUT_FORMATS = ("csv", "svg")

DEFAULT_THETA_DB = {ITDirection.DOWNLINK: 30.0, ITDirection.UPLINK: 7.0}
DEFAULT_P_T_W = {UserMode.SINGLE: 10.0, UserMode.MULTI: 20.0}
DEFAULT_P_C_DBM = tuple(float(v) for v in range(-30, 21, 2))


@dataclass(frozen=True)
class ScenarioBlock:
    """Scenario block: p_t in watts, circuit powers in dBm, theta in dB."""
    user_mode: str = UserMode.SINGLE.value
    it_direction: str = ITDirection.DOWNLINK.value
    rate_mode: str = RateMode.VARIABLE.value
    p_t_w: Optional[float] = None
    p_c_dbm: Tuple[float, ...] = DEFAULT_P_C_DBM
    theta_db: Optional[float] = None
    sigma_a2: float = 0.9
    sigma_b2: float = 0.1
    K: int = 5
    noise_dbm: float = DEFAULT_NOISE_DBM


@dataclass(frozen=True)
class GeometryBlock:
    """Geometry block: carrier in Hz, apertures in m^2, distances in m."""
    carrier_hz: float = DEFAULT_CARRIER_HZ
    bs_aperture: float = 1.0
    mobile_aperture: float = 0.05
    subarray_aperture: float = 0.5
    distances: Optional[Tuple[float, ...]] = None
    distance_scale: float = 1.0


@dataclass(frozen=True)
class SimBlock:
    trials: int = 200
    seed: int = 0
    policies: Tuple[str, ...] = (OPTIMAL,)
    workers: int = 1
    bound_choice: str = BoundChoice.EXACT.value


@dataclass(frozen=True)
class OutputBlock:
    path: Optional[str] = None
    format: str = "csv"


_BLOCKS = {
    "scenario": ScenarioBlock,
    "geometry": GeometryBlock,
    "sim": SimBlock,
    "output": OutputBlock,
}
_TUPLE_FIELDS = {"p_c_dbm", "distances", "policies"}


@dataclass(frozen=True)
class CliConfigFile:
    """Fully resolved command-line configuration.

    Attributes:
        scenario: Scenario block
        geometry: Geometry block
        sim: Simulation block
        output: Output block
    """
    scenario: ScenarioBlock = ScenarioBlock()
    geometry: GeometryBlock = GeometryBlock()
    sim: SimBlock = SimBlock()
    output: OutputBlock = OutputBlock()

    def scenario_params(self, p_c: float = 0.0) -> ScenarioParams:
        """ScenarioParams in the solver domain; ``p_c`` is in noise units."""
        s = self.scenario
        return ScenarioParams(
            user_mode=UserMode(s.user_mode),
            it_direction=ITDirection(s.it_direction),
            rate_mode=RateMode(s.rate_mode),
            p_t=float(s.p_t_w),
            p_c=p_c,
            theta=float(db_to_linear(s.theta_db)),
            sigma_a2=s.sigma_a2,
            sigma_b2=s.sigma_b2,
            K=s.K
        )

    def geometry_table(self) -> GeometryTable:
        """Geometry table before distance scaling."""
        g = self.geometry
        return create_geometry_table(
            distances=g.distances,
            carrier_hz=g.carrier_hz,
            bs_aperture=g.bs_aperture,
            mobile_aperture=g.mobile_aperture,
            subarray_aperture=g.subarray_aperture
        )

    def sim_config(self) -> SimConfig:
        """SimConfig for the ``sweep`` subcommand."""
        return SimConfig(
            scenario=self.scenario_params(),
            p_c_dbm=self.scenario.p_c_dbm,
            trials=self.sim.trials,
            policies=self.sim.policies,
            seed=self.sim.seed,
            geometries=self.geometry_table(),
            noise_dbm=self.scenario.noise_dbm,
            distance_scale=self.geometry.distance_scale,
            workers=self.sim.workers,
            bound_choice=BoundChoice(self.sim.bound_choice)
        )

    def with_overrides(self, **changes: Dict[str, Any]) -> "CliConfigFile":
        """Copy with block fields replaced, e.g. ``with_overrides(sim={"seed": 3})``."""
        data = self.to_dict()
        for block, values in changes.items():
            data[block].update({k: v for k, v in values.items() if v is not None})
        return parse_config(data)

    def to_dict(self) -> Dict[str, Any]:
        """JSON-compatible representation including the schema version."""
        data: Dict[str, Any] = {"schema_version": SCHEMA_VERSION}
        for name in _BLOCKS:
            block = asdict(getattr(self, name))
            data[name] = {k: list(v) if isinstance(v, tuple) else v for k, v in block.items()}
        return data


def _block(name: str, raw: Any, path: Optional[str]) -> Any:
    cls = _BLOCKS[name]
    if raw is None:
        return cls()
    if not isinstance(raw, dict):
        raise ConfigError(f"block '{name}' must be an object", path=path,
                          field_name=name, invalid_value=type(raw).__name__)
    allowed = {f.name for f in fields(cls)}
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise ConfigError(f"unknown keys in block '{name}': {unknown}", path=path,
                          field_name=name, invalid_value=unknown, expected=", ".join(sorted(allowed)))
    values = {}
    for key, value in raw.items():
        if key in _TUPLE_FIELDS and value is not None:
            if not isinstance(value, (list, tuple)):
                raise ConfigError(f"'{name}.{key}' must be a list", path=path,
                                  field_name=f"{name}.{key}", invalid_value=value)
            value = tuple(value)
        values[key] = value
    return cls(**values)


def _resolve(cfg: CliConfigFile, path: Optional[str]) -> CliConfigFile:
    """Fill mode-dependent defaults and validate every block."""
    s = cfg.scenario
    try:
        user_mode = UserMode(s.user_mode)
        direction = ITDirection(s.it_direction)
        RateMode(s.rate_mode)
        BoundChoice(cfg.sim.bound_choice)
    except ValueError as e:
        raise ConfigError(str(e), path=path, field_name="mode") from e

    scenario = ScenarioBlock(**{
        **asdict(s),
        "p_c_dbm": tuple(float(v) for v in s.p_c_dbm),
        "p_t_w": float(s.p_t_w if s.p_t_w is not None else DEFAULT_P_T_W[user_mode]),
        "theta_db": float(s.theta_db if s.theta_db is not None else DEFAULT_THETA_DB[direction]),
    })
    distances = cfg.geometry.distances
    if distances is None:
        distances = SU_DISTANCES if user_mode is UserMode.SINGLE else MU_DISTANCES
        if user_mode is UserMode.MULTI and s.K != len(MU_DISTANCES):
            raise ConfigError(
                f"multi-user scenario with K={s.K} needs explicit geometry.distances",
                path=path, field_name="geometry.distances", expected=f"{s.K} distances"
            )
    geometry = GeometryBlock(**{**asdict(cfg.geometry), "distances": tuple(float(d) for d in distances)})
    if cfg.output.format not in OUTPUT_FORMATS:
        raise ConfigError(f"unknown output format: {cfg.output.format}", path=path,
                          field_name="output.format", invalid_value=cfg.output.format,
                          expected=", ".join(OUTPUT_FORMATS))

    resolved = CliConfigFile(scenario=scenario, geometry=geometry, sim=cfg.sim, output=cfg.output)
    try:
        resolved.sim_config()
    except ConfigError:
        raise
    except ValidationError as e:
        raise ConfigError(e.message, path=path, field_name=e.field_name,
                          invalid_value=e.invalid_value, expected=e.expected) from e
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid configuration value: {e}", path=path) from e
    return resolved


def parse_config(data: Dict[str, Any], path: Optional[str] = None) -> CliConfigFile:
    """Validate a decoded JSON document and resolve its defaults.

    Args:
        data: Decoded JSON object
        path: Source path, used in error context

    Returns:
        Fully resolved CliConfigFile

    Raises:
        ConfigError: On schema or invariant violations
    """
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object", path=path)
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version: {version}", path=path,
                          field_name="schema_version", invalid_value=version,
                          expected=str(SCHEMA_VERSION))
    unknown = sorted(set(data) - set(_BLOCKS) - {"schema_version"})
    if unknown:
        raise ConfigError(f"unknown configuration blocks: {unknown}", path=path,
                          field_name="blocks", invalid_value=unknown,
                          expected=", ".join(_BLOCKS))
    try:
        cfg = CliConfigFile(**{name: _block(name, data.get(name), path) for name in _BLOCKS})
    except TypeError as e:
        raise ConfigError(f"invalid configuration value: {e}", path=path) from e
    return _resolve(cfg, path)


def load_config(path: Union[str, Path]) -> CliConfigFile:
    """Load and validate a JSON configuration file.

    Raises:
        ConfigError: If the file cannot be read, decoded or validated
    """
    source = str(path)
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError(f"cannot read configuration: {e}", path=source) from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON: {e}", path=source) from e
    cfg = parse_config(data, source)
    logger.info(f"Loaded configuration {source}: {cfg.scenario_params().label}")
    return cfg


def default_config(
    user_mode: Union[str, UserMode] = UserMode.SINGLE,
    it_direction: Union[str, ITDirection] = ITDirection.DOWNLINK,
    rate_mode: Union[str, RateMode] = RateMode.VARIABLE
) -> CliConfigFile:
    """Reference-system configuration of one scenario type."""
    def value(v: Any) -> str:
        return v.value if hasattr(v, "value") else str(v)
    return parse_config({
        "schema_version": SCHEMA_VERSION,
        "scenario": {
            "user_mode": value(user_mode),
            "it_direction": value(it_direction),
            "rate_mode": value(rate_mode),
        },
    })


def dump_config(cfg: CliConfigFile) -> str:
    """Serialise a configuration as indented, key-sorted JSON."""
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n"
