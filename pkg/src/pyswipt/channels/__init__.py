"""PySWIPT Channels Package

Propagation and fading model producing noise-normalised channel realizations.
"""

from .channel_model import (
    LinkGeometry,
    FadingSample,
    GeometryTable,
    ChannelModel,
    sample_fading,
    sample_fading_array,
    link_gain,
    draw_realization,
    default_geometry_table,
    create_geometry_table,
    trial_seed,
    DEFAULT_CARRIER_HZ,
    DEFAULT_NOISE_DBM,
    SU_DISTANCES,
    MU_DISTANCES
)

__all__ = [
    "LinkGeometry",
    "FadingSample",
    "GeometryTable",
    "ChannelModel",
    "sample_fading",
    "sample_fading_array",
    "link_gain",
    "draw_realization",
    "default_geometry_table",
    "create_geometry_table",
    "trial_seed",
    "DEFAULT_CARRIER_HZ",
    "DEFAULT_NOISE_DBM",
    "SU_DISTANCES",
    "MU_DISTANCES",
]
