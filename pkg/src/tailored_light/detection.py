"""Detector models: binned photon counting and classical sampling.

Photon counting is an inhomogeneous Poisson process integrated exactly
over fixed-width time bins (all observables of interest are bin-level,
so no per-photon time tags are generated).  Classical detection is
noiseless sampling of the intensity trace.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .modulation import INTENSITY, ModulationTrace

# Calibrated unit of trace intensities: expected photons (post-efficiency)
# per PND counting bin of 450 us.  Fixed once for all measurements.
REFERENCE_PND_BIN = 450e-6


@dataclass(frozen=True)
class DetectorParams:
    """Single-photon counting module parameters."""

    efficiency: float = 0.65
    dark_rate: float = 2.25e-2 / REFERENCE_PND_BIN  # counts per second
    count_bin: float = 30e-6
    max_rate: float = 94_000.0  # sanity cap, counts per second

    def __post_init__(self):
        if not 0.0 <= self.efficiency <= 1.0:
            raise ValueError(f"efficiency must be in [0, 1], got {self.efficiency}")
        if self.dark_rate < 0:
            raise ValueError(f"dark_rate must be >= 0, got {self.dark_rate}")
        if self.count_bin <= 0:
            raise ValueError(f"count_bin must be > 0, got {self.count_bin}")


@dataclass(frozen=True)
class BinnedCounts:
    """Photon counts per fixed-width time bin."""

    bin_width: float
    counts: np.ndarray
    origin_time: float = 0.0

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.dtype.kind not in "iu":
            counts = counts.astype(np.int64)
        object.__setattr__(self, "counts", counts)
        if self.bin_width <= 0:
            raise ValueError(f"bin_width must be > 0, got {self.bin_width}")
        if counts.ndim != 1:
            raise ValueError("counts must be one-dimensional")
        if counts.size and counts.min() < 0:
            raise ValueError("counts must be non-negative")

    def __len__(self) -> int:
        return self.counts.size


def simulate_counts(intensity: ModulationTrace, det: DetectorParams,
                    duration: float, seed: int) -> BinnedCounts:
    """Poisson photon counts from an intensity trace.

    Each bin draws from Poisson(mu) with
    ``mu = efficiency * integral(rate) + dark_rate * bin`` where the
    trace value I (photons per PND reference bin, post-efficiency)
    converts to ``rate = I / (efficiency * REFERENCE_PND_BIN)``.  Bins
    spanning segment boundaries integrate the trace exactly.
    """
    if intensity.kind != INTENSITY:
        raise ValueError("simulate_counts needs an intensity trace")
    if duration <= 0 or duration > intensity.duration + 1e-12:
        raise ValueError(
            f"duration must be in (0, {intensity.duration}], got {duration}"
        )
    n_bins = int(np.floor(duration / det.count_bin + 1e-9))
    if n_bins == 0:
        raise ValueError("duration shorter than one counting bin")
    edges = np.arange(n_bins + 1) * det.count_bin
    # efficiency cancels against the calibrated (post-efficiency) units,
    # but both factors are kept explicit
    cum = intensity.segment_integral(edges)
    rate_integral = np.diff(cum) / (det.efficiency * REFERENCE_PND_BIN)
    mu = det.efficiency * rate_integral + det.dark_rate * det.count_bin
    mean_rate = float(mu.sum()) / duration
    if mean_rate > det.max_rate:
        warnings.warn(
            f"mean count rate {mean_rate:.0f} cps exceeds the detector cap "
            f"{det.max_rate:.0f} cps; simulation proceeds",
            stacklevel=2,
        )
    rng = np.random.default_rng(seed)
    return BinnedCounts(det.count_bin, rng.poisson(mu))


def split_stream(counts: BinnedCounts, seed: int) -> tuple[BinnedCounts, BinnedCounts]:
    """Route each count independently to one of two outputs (50:50 splitter)."""
    rng = np.random.default_rng(seed)
    a = rng.binomial(counts.counts, 0.5)
    b = counts.counts - a
    return (
        BinnedCounts(counts.bin_width, a, counts.origin_time),
        BinnedCounts(counts.bin_width, b, counts.origin_time),
    )


def sample_classical(intensity: ModulationTrace, sample_period: float) -> np.ndarray:
    """Noiseless photodiode record: trace values at t = k * sample_period."""
    if sample_period <= 0:
        raise ValueError(f"sample_period must be > 0, got {sample_period}")
    n = int(np.floor(intensity.duration / sample_period + 1e-9))
    times = np.arange(n) * sample_period
    return intensity.value_at(times)
