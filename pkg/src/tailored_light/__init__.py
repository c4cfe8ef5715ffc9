"""Tailored classical light: simulation and analysis toolkit.

Simulates coherent light whose phase and transmitted intensity are
randomly modulated by electronically driven modulators, detects it
classically or by binned photon counting, and estimates second-order
correlation functions and photon number distributions.  A theory module
provides the matching closed forms, including single-photon-added
states and a beamsplitter entanglement criterion; a config-driven CLI
reproduces each reference figure as CSV data plus rendered plots.
"""

__version__ = "0.1.0"

from .modulation import (
    DwellDistribution,
    IntensityLaw,
    ModulationTrace,
    PhaseJumpLaw,
    build_intensity_trace,
    build_phase_trace,
    sample_dwells,
)
from .optics import MziConfig, mzi_output_intensity, transfer_matrix
from .detection import (
    BinnedCounts,
    DetectorParams,
    sample_classical,
    simulate_counts,
    split_stream,
)
from .estimators import (
    CorrelationCurve,
    NumberDistribution,
    g2_auto,
    g2_cross,
    g2_from_samples,
    mandel_q,
    pnd_histogram,
)
from . import theory
from .experiments import (
    ComparisonReport,
    ConfigError,
    ExperimentConfig,
    compare,
    load_config,
    loads_config,
    parse_config,
    run_experiment,
)

__all__ = [
    "__version__",
    "BinnedCounts",
    "ComparisonReport",
    "ConfigError",
    "CorrelationCurve",
    "DetectorParams",
    "DwellDistribution",
    "ExperimentConfig",
    "IntensityLaw",
    "ModulationTrace",
    "MziConfig",
    "NumberDistribution",
    "PhaseJumpLaw",
    "build_intensity_trace",
    "build_phase_trace",
    "compare",
    "g2_auto",
    "g2_cross",
    "g2_from_samples",
    "load_config",
    "loads_config",
    "mandel_q",
    "mzi_output_intensity",
    "parse_config",
    "pnd_histogram",
    "run_experiment",
    "sample_classical",
    "sample_dwells",
    "simulate_counts",
    "split_stream",
    "theory",
    "transfer_matrix",
]
