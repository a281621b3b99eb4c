"""Max-min SINR optimization for multicast arrays with rotatable element
boresights: channel model, fractional-programming surrogate, conic subproblems,
alternating-optimization driver, benchmark schemes, and validation oracles."""

from .config import SystemConfig
from .geometry import (
    ScenarioGeometry,
    aligned_pointing,
    arc_user_layout,
    boresight_vector,
    upa_positions,
)
from .channel import ChannelMatrix, channel_matrix, element_gain, static_factor
from .objective import min_sinr, optimal_z, optimal_z_all, sinr, surrogate_gamma_tilde
from .driver import AoReport, initialize, run_ao, run_beamforming_ao
from .harness import (
    ExperimentSpec,
    SchemeVariant,
    dbm_to_watts,
    default_config,
    run_scheme,
    sweep,
    watts_to_dbm,
)

__all__ = [
    "SystemConfig", "ScenarioGeometry", "ChannelMatrix", "AoReport",
    "ExperimentSpec", "SchemeVariant",
    "aligned_pointing", "arc_user_layout", "boresight_vector", "upa_positions",
    "channel_matrix", "element_gain", "static_factor",
    "sinr", "min_sinr", "optimal_z", "optimal_z_all", "surrogate_gamma_tilde",
    "initialize", "run_ao", "run_beamforming_ao",
    "dbm_to_watts", "watts_to_dbm", "default_config", "run_scheme", "sweep",
]

__version__ = "0.1.0"
