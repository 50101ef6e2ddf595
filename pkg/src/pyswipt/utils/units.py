"""
PySWIPT Unit Conversions

Conversions between logarithmic and linear power units, plus the
noise normalisation applied at the configuration boundary.
"""

from typing import Union

import numpy as np


SPEED_OF_LIGHT = 3.0e8  # m/s

Number = Union[float, np.ndarray]


def db_to_linear(value_db: Number) -> Number:
    """Convert a ratio in dB to linear scale."""
    result = np.power(10.0, np.asarray(value_db, dtype=float) / 10.0)
    return result if np.ndim(value_db) else float(result)


def linear_to_db(value: Number) -> Number:
    """Convert a linear ratio to dB.

    Zero maps to ``-inf``.
    """
    with np.errstate(divide="ignore"):
        result = 10.0 * np.log10(np.asarray(value, dtype=float))
    return result if np.ndim(value) else float(result)


def dbm_to_watts(value_dbm: Number) -> Number:
    """Convert a power in dBm to watts."""
    return db_to_linear(value_dbm) * 1e-3


def watts_to_dbm(value_w: Number) -> Number:
    """Convert a power in watts to dBm."""
    return linear_to_db(np.asarray(value_w, dtype=float) * 1e3 if np.ndim(value_w) else float(value_w) * 1e3)


def wavelength_from_frequency(frequency_hz: float) -> float:
    """Free-space wavelength of a carrier in meters."""
    if frequency_hz <= 0:
        raise ValueError(f"frequency must be positive, got {frequency_hz}")
    return SPEED_OF_LIGHT / frequency_hz


def normalize_circuit_power(p_c_watts: float, noise_variance: float) -> float:
    """Express a circuit power in noise units.

    Solvers work with gains divided by the noise variance, so harvested power
    ``P * h`` is also measured in multiples of the noise power.

    Args:
        p_c_watts: Circuit power in watts
        noise_variance: Total noise variance in watts

    Returns:
        Circuit power divided by the noise variance
    """
    if noise_variance <= 0:
        raise ValueError(f"noise variance must be positive, got {noise_variance}")
    return p_c_watts / noise_variance
