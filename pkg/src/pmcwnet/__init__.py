"""Deterministic baseband simulator for networks of PMCW radars.

Models M code-multiplexed continuous-wave radars whose independent PLLs
carry phase noise, the ridge that noise spreads across Doppler for paths
between different radars, and the line-of-sight-referenced slow-time
correction that removes it.
"""

from .codes import (
    CodeSequence,
    ApasReport,
    circular_shift,
    generate_p3,
    load_sequence,
    periodic_autocorrelation,
    radar_code_shift,
    save_sequence,
    search_apas,
    verify_almost_perfect,
)
from .compensation import (
    PnVector,
    apply_compensation,
    extract_pn_vector,
    locate_los_bin,
    mono_range_correlation_factor,
    predicted_attenuation,
    save_attenuation_csv,
    save_pn_vector_csv,
)
from .config import Diagnostic, ExperimentConfig, parse_config, validate
from .dsp import (
    RangeDopplerMap,
    RangeSlowTimeMatrix,
    doppler_dft,
    doppler_idft,
    load_matrix_binary,
    noise_floor,
    periodic_correlate,
    ridge_power,
    save_heatmap,
    save_matrix_binary,
    save_matrix_csv,
)
from .errors import (
    BadBandError,
    BadBinError,
    BadDurationError,
    ConfigError,
    EmptySectionError,
    IndivisibleCodeError,
    IoError,
    LOSNotFoundError,
    LengthMismatchError,
    OddLengthError,
    OverExcludedError,
    PmcwError,
    PnDurationTooShortError,
    SearchTooLargeError,
    TooFewSamplesError,
    WindowedMapError,
    ZeroRangeError,
)
from .experiment import RunResult, prepare_scenario, run
from .phasenoise import (
    PhaseNoiseProcess,
    PsdMask,
    default_pll_mask,
    estimate_psd,
    evaluate,
    evaluate_grid,
    load_mask,
    modulation,
    save_mask,
    synthesize,
)
from .scene import (
    SPEED_OF_LIGHT,
    AntennaPattern,
    PropagationPath,
    RadarNode,
    Scenario,
    Target,
    bistatic_rx_power,
    enumerate_paths,
    los_rx_power,
    los_to_mono_ratio,
    mono_rx_power,
)
from .txrx import BasebandFrame, load_raw_frame, save_raw_frame, synthesize_rx, tx_baseband

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # codes
    "CodeSequence",
    "ApasReport",
    "periodic_autocorrelation",
    "verify_almost_perfect",
    "generate_p3",
    "circular_shift",
    "radar_code_shift",
    "search_apas",
    "save_sequence",
    "load_sequence",
    # phase noise
    "PsdMask",
    "PhaseNoiseProcess",
    "default_pll_mask",
    "synthesize",
    "evaluate",
    "evaluate_grid",
    "modulation",
    "estimate_psd",
    "save_mask",
    "load_mask",
    # scene
    "SPEED_OF_LIGHT",
    "AntennaPattern",
    "RadarNode",
    "Target",
    "PropagationPath",
    "Scenario",
    "enumerate_paths",
    "mono_rx_power",
    "los_rx_power",
    "bistatic_rx_power",
    "los_to_mono_ratio",
    # tx/rx
    "BasebandFrame",
    "tx_baseband",
    "synthesize_rx",
    "save_raw_frame",
    "load_raw_frame",
    # dsp
    "RangeSlowTimeMatrix",
    "RangeDopplerMap",
    "periodic_correlate",
    "doppler_dft",
    "doppler_idft",
    "noise_floor",
    "ridge_power",
    "save_matrix_csv",
    "save_matrix_binary",
    "load_matrix_binary",
    "save_heatmap",
    # compensation
    "PnVector",
    "locate_los_bin",
    "extract_pn_vector",
    "apply_compensation",
    "predicted_attenuation",
    "mono_range_correlation_factor",
    "save_pn_vector_csv",
    "save_attenuation_csv",
    # config / experiment
    "Diagnostic",
    "ExperimentConfig",
    "parse_config",
    "validate",
    "RunResult",
    "prepare_scenario",
    "run",
    # errors
    "PmcwError",
    "OddLengthError",
    "IndivisibleCodeError",
    "SearchTooLargeError",
    "BadDurationError",
    "BadBandError",
    "TooFewSamplesError",
    "ZeroRangeError",
    "PnDurationTooShortError",
    "LengthMismatchError",
    "WindowedMapError",
    "OverExcludedError",
    "BadBinError",
    "EmptySectionError",
    "LOSNotFoundError",
    "ConfigError",
    "IoError",
]
