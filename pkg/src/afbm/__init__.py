"""Affine filter-bank modulation: waveform, channel, receivers and metrics."""

from .channel import (
    ChannelBudget,
    DDChannel,
    PathParams,
    add_noise,
    build_channel,
    c1_recommendation,
    random_channel,
    random_offgrid_channel,
    validate_budget,
)
from .filters import (
    PrototypeFilter,
    hermite_filter,
    phydyas_filter,
    rectangular_filter,
)
from .gabp import GabpConfig, GabpResult, gabp_detect, hard_qpsk, lmmse_detect
from .harness import ConfigError, ExperimentConfig, NumericError, parse_config, run
from .metrics import (
    ambiguity_surface,
    ccdf,
    count_bit_errors,
    delay_cut,
    doppler_cut,
    matched_rmse,
    oob_floor_db,
    papr_db,
    peak_sidelobe,
    periodogram_psd,
)
from .modem import AfbmModem, AfdmModem, WaveformParams
from .sensing import (
    PdaConfig,
    PdaResult,
    RadarScale,
    SensingGrid,
    build_dictionary,
    pda_em_estimate,
    targets_from_estimate,
)
from .transforms import ChirpParams, daft_matrix, dft_matrix

__version__ = "0.1.0"

__all__ = [
    "AfbmModem",
    "AfdmModem",
    "ChannelBudget",
    "ChirpParams",
    "ConfigError",
    "DDChannel",
    "ExperimentConfig",
    "GabpConfig",
    "GabpResult",
    "NumericError",
    "PathParams",
    "PdaConfig",
    "PdaResult",
    "PrototypeFilter",
    "RadarScale",
    "SensingGrid",
    "WaveformParams",
    "add_noise",
    "ambiguity_surface",
    "build_channel",
    "build_dictionary",
    "c1_recommendation",
    "ccdf",
    "count_bit_errors",
    "daft_matrix",
    "delay_cut",
    "dft_matrix",
    "doppler_cut",
    "gabp_detect",
    "hard_qpsk",
    "hermite_filter",
    "lmmse_detect",
    "matched_rmse",
    "oob_floor_db",
    "papr_db",
    "parse_config",
    "pda_em_estimate",
    "peak_sidelobe",
    "periodogram_psd",
    "phydyas_filter",
    "random_channel",
    "random_offgrid_channel",
    "rectangular_filter",
    "run",
    "targets_from_estimate",
    "validate_budget",
]
