"""Mach-Zehnder interferometer transfer algebra.

The interferometer is a 50:50 beamsplitter, one phase modulator per
arm, and a second 50:50 beamsplitter.  Its action on the scalar field
is the matrix product of the beamsplitter matrix, the diagonal phase
matrix, and the beamsplitter matrix again; with light entering one
input port only, the output intensities depend on the arm phase
difference alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .modulation import INTENSITY, PHASE, ModulationTrace

PORT_1_PRIME = "port1_prime"
PORT_2_PRIME = "port2_prime"

_BS = np.array([[1.0, 1.0], [-1.0, 1.0]]) / np.sqrt(2.0)


@dataclass(frozen=True)
class MziConfig:
    """Input intensity (expected photons per PND bin) and monitored port."""

    input_intensity: float
    port: str = PORT_2_PRIME

    def __post_init__(self):
        if self.input_intensity <= 0:
            raise ValueError(
                f"input_intensity must be > 0, got {self.input_intensity}"
            )
        if self.port not in (PORT_1_PRIME, PORT_2_PRIME):
            raise ValueError(f"unknown output port {self.port!r}")


def transfer_matrix(phi1: float, phi2: float) -> np.ndarray:
    """Full interferometer matrix for arm phases ``phi1``, ``phi2``."""
    phase = np.diag([np.exp(1j * phi1), np.exp(1j * phi2)])
    return _BS @ phase @ _BS


def mzi_output_intensity(phase1: ModulationTrace, phase2: ModulationTrace,
                         cfg: MziConfig, drift_rate: float = 0.0) -> ModulationTrace:
    """Output intensity trace at the configured port.

    Segment boundaries of the result are the union of both input
    boundaries.  ``drift_rate`` (rad/s) adds a slow linear phase ramp to
    arm 1, approximated as constant per merged segment, to model
    interferometer instability; it defaults to off (matched paths).
    """
    if phase1.kind != PHASE or phase2.kind != PHASE:
        raise ValueError("both inputs must be phase traces")
    if phase1.duration != phase2.duration:
        raise ValueError(
            f"trace durations differ: {phase1.duration} vs {phase2.duration}"
        )
    merged = np.union1d(phase1.start_times, phase2.start_times)
    dphi = phase1.value_at(merged) - phase2.value_at(merged)
    if drift_rate != 0.0:
        dphi = dphi + drift_rate * merged
    sign = 1.0 if cfg.port == PORT_2_PRIME else -1.0
    out = cfg.input_intensity / 2.0 * (1.0 + sign * np.cos(dphi))
    # guard against -0.0 and tiny negative round-off at exact nulls
    np.maximum(out, 0.0, out=out)
    return ModulationTrace(merged, out, phase1.duration, INTENSITY)
