"""
PySWIPT Monte Carlo Simulator

Spectral efficiency versus circuit power for the optimal policies and the
baselines, averaged over random channel realizations.

This module provides:
- SimConfig: validated sweep configuration
- CurveSet: per-policy curves (mean and standard deviation of the spectral
  efficiency per circuit-power point) backed by a pandas DataFrame
- run_sweep: serial or process-parallel sweep with common random numbers
- create_sim_config: factory accepting strings and plain sequences

Seeds are derived per (master seed, trial), not per (master seed, point,
trial): every circuit-power point of a trial reuses the same channel
realization.
"""

from typing import Optional, Tuple, Sequence, Dict, Any, List, Union
from dataclasses import dataclass, field
from concurrent.futures import ProcessPoolExecutor
import logging

import numpy as np
import pandas as pd

from ..utils.types import ScenarioParams, BoundChoice
from ..utils.units import dbm_to_watts, normalize_circuit_power
from ..channels.channel_model import (
    ChannelModel,
    GeometryTable,
    default_geometry_table,
    draw_realization,
    trial_seed,
    DEFAULT_NOISE_DBM
)
from ..policies.base_policy import BasePolicy, OPTIMAL, create_policy, available_policies
from ..policies.su_downlink import parse_bound_choice
from ..policies.mu_downlink import MU_DL_BOUNDS
from ..exceptions import ValidationError, SimulationError, PySwiptError


logger = logging.getLogger(__name__)

CURVE_COLUMNS = ["policy", "p_c_dBm", "mean_se", "std_se", "trials"]


@dataclass(frozen=True)
class SimConfig:
    """Configuration of one spectral-efficiency sweep.

    Attributes:
        scenario: Scenario template; its p_c is replaced at every sweep point
        p_c_dbm: Circuit powers of the sweep (dBm)
        trials: Channel realizations per point
        policies: Policy names ("optimal" or registered baselines)
        seed: Master seed
        geometries: Geometry table; defaults to the layout of the user mode
        noise_dbm: Total noise power (dBm)
        distance_scale: Every distance is divided by this factor
        workers: Worker processes; 1 runs serially
        bound_choice: Objective of the downlink variable-rate policies, "exact"
            by default (multi-user downlink takes only "lower" or "exact")
    """
    scenario: ScenarioParams
    p_c_dbm: Tuple[float, ...]
    trials: int = 200
    policies: Tuple[str, ...] = (OPTIMAL,)
    seed: int = 0
    geometries: Optional[GeometryTable] = None
    noise_dbm: float = DEFAULT_NOISE_DBM
    distance_scale: float = 1.0
    workers: int = 1
    bound_choice: BoundChoice = BoundChoice.EXACT

    def __post_init__(self) -> None:
        """Validate the sweep configuration."""
        if not isinstance(self.scenario, ScenarioParams):
            raise ValidationError(
                f"scenario must be ScenarioParams, got {type(self.scenario)}",
                field_name="scenario", invalid_value=self.scenario
            )
        object.__setattr__(self, "p_c_dbm", tuple(float(v) for v in self.p_c_dbm))
        object.__setattr__(self, "policies", tuple(self.policies))
        object.__setattr__(self, "bound_choice", parse_bound_choice(self.bound_choice))
        if not self.p_c_dbm:
            raise ValidationError("circuit-power sweep must not be empty",
                                  field_name="p_c_dbm", invalid_value=[])
        if not all(np.isfinite(self.p_c_dbm)):
            raise ValidationError("circuit powers must be finite",
                                  field_name="p_c_dbm", invalid_value=list(self.p_c_dbm))
        if not isinstance(self.trials, (int, np.integer)) or self.trials < 1:
            raise ValidationError(f"trials must be at least 1, got {self.trials}",
                                  field_name="trials", invalid_value=self.trials, expected=">= 1")
        if not isinstance(self.workers, (int, np.integer)) or self.workers < 1:
            raise ValidationError(f"workers must be at least 1, got {self.workers}",
                                  field_name="workers", invalid_value=self.workers, expected=">= 1")
        if not self.distance_scale > 0:
            raise ValidationError(f"distance_scale must be positive, got {self.distance_scale}",
                                  field_name="distance_scale", invalid_value=self.distance_scale)
        if not self.policies:
            raise ValidationError("at least one policy is required", field_name="policies")
        if len(set(self.policies)) != len(self.policies):
            raise ValidationError("policies must be unique", field_name="policies",
                                  invalid_value=list(self.policies))
        ChannelModel(self.scenario, self.geometry, self.noise_dbm)
        known = available_policies()
        for name in self.policies:
            if name not in known:
                raise ValidationError(f"Unknown policy: {name}", field_name="policies",
                                      invalid_value=name, expected=", ".join(known))
            # raises if the policy cannot solve this scenario type
            self.make_policy(name, self.scenario)

    @property
    def noise_variance(self) -> float:
        """Total noise variance (W)."""
        return float(dbm_to_watts(self.noise_dbm))

    @property
    def geometry(self) -> GeometryTable:
        """Geometry table after distance scaling."""
        table = self.geometries or default_geometry_table(self.scenario.user_mode)
        return table.scaled(self.distance_scale) if self.distance_scale != 1.0 else table

    def p_c_noise_units(self) -> np.ndarray:
        """Sweep circuit powers divided by the noise variance."""
        return np.array([normalize_circuit_power(float(dbm_to_watts(v)), self.noise_variance)
                         for v in self.p_c_dbm])

    def make_policy(self, name: str, scenario: ScenarioParams) -> BasePolicy:
        """Policy object for one sweep point."""
        options: Dict[str, Any] = {}
        if name == OPTIMAL and scenario.is_downlink and not scenario.is_fixed_rate:
            if scenario.is_single_user or self.bound_choice in MU_DL_BOUNDS:
                options["bound_choice"] = self.bound_choice
        return create_policy(scenario, name, **options)


@dataclass
class CurveSet:
    """Per-policy spectral-efficiency curves.

    Attributes:
        frame: One row per (policy, p_c point), sorted by policy then p_c
        samples: Per-policy spectral efficiencies of shape (trials, points)
    """
    frame: pd.DataFrame
    samples: Dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        missing = [c for c in CURVE_COLUMNS if c not in self.frame.columns]
        if missing:
            raise ValidationError(f"curve frame misses columns {missing}",
                                  field_name="frame", invalid_value=list(self.frame.columns))
        self.frame = (self.frame[CURVE_COLUMNS]
                      .sort_values(["policy", "p_c_dBm"], kind="mergesort")
                      .reset_index(drop=True))
        if (self.frame["mean_se"] < 0).any():
            raise ValidationError("mean spectral efficiency must be nonnegative", field_name="mean_se")

    @classmethod
    def empty(cls) -> "CurveSet":
        """CurveSet without rows."""
        return cls(pd.DataFrame(columns=CURVE_COLUMNS))

    @property
    def policies(self) -> List[str]:
        return sorted(self.frame["policy"].unique().tolist())

    def curve(self, policy: str) -> pd.DataFrame:
        """Rows of one policy in ascending p_c."""
        return self.frame[self.frame["policy"] == policy].reset_index(drop=True)

    def mean_se(self, policy: str) -> np.ndarray:
        return self.curve(policy)["mean_se"].to_numpy(dtype=float)

    def half_se_point(self, policy: str) -> Optional[float]:
        """Circuit power (dBm) where the mean SE first falls to half its value at the lowest p_c.

        Linear interpolation between sweep points; None if the curve never
        drops that far or starts at zero.
        """
        rows = self.curve(policy)
        x = rows["p_c_dBm"].to_numpy(dtype=float)
        y = rows["mean_se"].to_numpy(dtype=float)
        if y.size == 0 or y[0] <= 0:
            return None
        target = y[0] / 2.0
        below = np.flatnonzero(y <= target)
        if below.size == 0:
            return None
        i = int(below[0])
        if i == 0:
            return float(x[0])
        return float(x[i - 1] + (y[i - 1] - target) * (x[i] - x[i - 1]) / (y[i - 1] - y[i]))

    def __len__(self) -> int:
        return len(self.frame)


def _run_trial(cfg: SimConfig, trial: int) -> np.ndarray:
    """Spectral efficiencies of one trial, shape (policies, points)."""
    ch = draw_realization(cfg.scenario, cfg.geometry, trial_seed(cfg.seed, trial), cfg.noise_variance)
    p_c_values = cfg.p_c_noise_units()
    out = np.zeros((len(cfg.policies), p_c_values.size))
    for j, p_c in enumerate(p_c_values):
        point = cfg.scenario.replace(p_c=float(p_c))
        for i, name in enumerate(cfg.policies):
            try:
                out[i, j] = cfg.make_policy(name, point).spectral_efficiency(ch)
            except PySwiptError as e:
                logger.error(f"Policy {name} failed at point {j}, trial {trial}: {e}")
                raise SimulationError(
                    f"policy {name} failed: {e.message}",
                    point_index=j, trial_index=trial, cause=e, policy=name
                ) from e
    return out


def run_sweep(cfg: SimConfig) -> CurveSet:
    """Run a Monte Carlo sweep over circuit power.

    Every trial draws one channel from trial_seed(master seed, trial); the
    sweep point is not part of the seed, so all points and policies of a
    trial share the channel.
    Results do not depend on the number of workers.

    Args:
        cfg: Sweep configuration

    Returns:
        CurveSet with mean and standard deviation per policy and point

    Raises:
        SimulationError: If a policy fails on some realization
    """
    logger.info(f"Sweep {cfg.scenario.label}: {len(cfg.p_c_dbm)} points x {cfg.trials} trials, "
                f"policies={list(cfg.policies)}, workers={cfg.workers}")
    trials = range(cfg.trials)
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_trial, [cfg] * cfg.trials, trials))
    else:
        results = [_run_trial(cfg, t) for t in trials]
    stacked = np.stack(results)

    rows = []
    samples = {}
    for i, name in enumerate(cfg.policies):
        samples[name] = stacked[:, i, :]
        for j, p_c in enumerate(cfg.p_c_dbm):
            values = stacked[:, i, j]
            rows.append({
                "policy": name,
                "p_c_dBm": p_c,
                "mean_se": float(np.mean(values)),
                "std_se": float(np.std(values)),
                "trials": cfg.trials,
            })
    curves = CurveSet(pd.DataFrame(rows, columns=CURVE_COLUMNS), samples)
    logger.debug(f"Sweep done: {len(curves)} rows")
    return curves


def create_sim_config(
    scenario: ScenarioParams,
    p_c_dbm: Union[Sequence[float], np.ndarray],
    trials: int = 200,
    policies: Sequence[str] = (OPTIMAL,),
    seed: int = 0,
    geometries: Optional[GeometryTable] = None,
    noise_dbm: float = DEFAULT_NOISE_DBM,
    distance_scale: float = 1.0,
    workers: int = 1,
    bound_choice: Union[str, BoundChoice] = BoundChoice.EXACT
) -> SimConfig:
    """Factory function to create SimConfig objects.

    Args:
        scenario: Scenario template
        p_c_dbm: Circuit-power sweep in dBm
        trials: Trials per point
        policies: Policy names
        seed: Master seed
        geometries: Optional geometry table
        noise_dbm: Noise power in dBm
        distance_scale: Distance divisor
        workers: Worker processes
        bound_choice: "lower", "upper" or "exact" (default)

    Returns:
        SimConfig object
    """
    return SimConfig(
        scenario=scenario,
        p_c_dbm=tuple(float(v) for v in p_c_dbm),
        trials=int(trials),
        policies=tuple(policies),
        seed=int(seed),
        geometries=geometries,
        noise_dbm=float(noise_dbm),
        distance_scale=float(distance_scale),
        workers=int(workers),
        bound_choice=parse_bound_choice(bound_choice)
    )
