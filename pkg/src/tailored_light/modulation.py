"""Stochastic piecewise-constant modulation traces.

This module generates the random phase and transmitted-intensity drive
signals that an rf-driven acousto-optic modulator would impose on a
coherent beam: dwell-time laws for how long a value is held, jump laws
for the phase imparted after each dwell, and intensity laws for the
transmitted intensity of each dwell segment.

Intensity values are expressed throughout in calibrated units of
expected photon counts per photon-number-distribution time bin
(post-detection-efficiency), so an ``exponential(nbar=2)`` law directly
yields a pseudo-thermal source with mean photon number 2 per PND bin.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

PHASE = "phase"
INTENSITY = "intensity"

# Dwell-law kinds
CONSTANT = "constant"
EXPONENTIAL = "exponential"
TRUNCATED_EXPONENTIAL = "truncated_exponential"

# Intensity-law kinds
DEGENERATE = "degenerate"
GAMMA_TWO = "gamma_two"
TABULATED = "tabulated"

_TABULATED_GRID_SIZE = 10_000


@dataclass(frozen=True)
class DwellDistribution:
    """Law for the random time intervals between modulation jumps."""

    kind: str
    tau_c: float
    t_min: float = 0.0
    t_max: float = math.inf

    def __post_init__(self):
        if self.tau_c <= 0:
            raise ValueError(f"dwell tau_c must be > 0, got {self.tau_c}")
        if self.kind == TRUNCATED_EXPONENTIAL:
            if not (0 < self.t_min < self.t_max):
                raise ValueError(
                    f"truncated exponential needs 0 < t_min < t_max, "
                    f"got t_min={self.t_min}, t_max={self.t_max}"
                )
        elif self.kind not in (CONSTANT, EXPONENTIAL):
            raise ValueError(f"unknown dwell kind {self.kind!r}")

    @classmethod
    def constant(cls, tau_c: float) -> "DwellDistribution":
        return cls(CONSTANT, tau_c)

    @classmethod
    def exponential(cls, tau_c: float) -> "DwellDistribution":
        return cls(EXPONENTIAL, tau_c)

    @classmethod
    def truncated_exponential(
        cls, tau_c: float, t_min: float = 1e-3, t_max: float = 100e-3
    ) -> "DwellDistribution":
        return cls(TRUNCATED_EXPONENTIAL, tau_c, t_min, t_max)

    def mean(self) -> float:
        """Mean dwell time of the law (renormalized for truncation)."""
        if self.kind in (CONSTANT, EXPONENTIAL):
            return self.tau_c
        # truncated exponential on [a, b]: closed form of the renormalized mean
        a, b, tau = self.t_min, self.t_max, self.tau_c
        z = math.exp(-a / tau) - math.exp(-b / tau)
        num = (a + tau) * math.exp(-a / tau) - (b + tau) * math.exp(-b / tau)
        return num / z

    def _sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.kind == CONSTANT:
            return np.full(n, self.tau_c)
        if self.kind == EXPONENTIAL:
            return rng.exponential(self.tau_c, n)
        # inverse CDF of the exponential restricted to [t_min, t_max]
        a, b, tau = self.t_min, self.t_max, self.tau_c
        ea, eb = math.exp(-a / tau), math.exp(-b / tau)
        u = rng.random(n)
        return -tau * np.log(ea - u * (ea - eb))


@dataclass(frozen=True)
class PhaseJumpLaw:
    """Law for the phase value taken after each jump."""

    kind: str  # "uniform" (full circle) or "frozen"
    phi: float = 0.0

    UNIFORM = "uniform"
    FROZEN = "frozen"

    def __post_init__(self):
        if self.kind not in (self.UNIFORM, self.FROZEN):
            raise ValueError(f"unknown phase jump kind {self.kind!r}")

    @classmethod
    def uniform_full_circle(cls) -> "PhaseJumpLaw":
        return cls(cls.UNIFORM)

    @classmethod
    def frozen(cls, phi: float = 0.0) -> "PhaseJumpLaw":
        wrapped = math.remainder(phi, 2 * math.pi)  # into (-pi, pi]
        return cls(cls.FROZEN, wrapped)


@dataclass(frozen=True)
class IntensityLaw:
    """Probability density over transmitted intensity I = |alpha|^2.

    All laws are normalized densities f(I) on I >= 0, expressed in
    expected photons per PND bin (post-efficiency).  ``i_max`` is the
    calibrated maximally transmitted intensity; samples above it are
    clipped (and counted) by the trace builder.
    """

    kind: str
    i0: float = 0.0
    nbar: float = 0.0
    zeta: float = 0.0
    grid: np.ndarray | None = None
    grid_density: np.ndarray | None = None
    i_max: float = 0.0
    _inv_cdf: tuple[np.ndarray, np.ndarray] | None = field(
        default=None, repr=False, compare=False
    )

    @classmethod
    def degenerate(cls, i0: float) -> "IntensityLaw":
        if i0 < 0:
            raise ValueError(f"degenerate intensity must be >= 0, got {i0}")
        return cls(DEGENERATE, i0=i0, i_max=i0)

    @classmethod
    def exponential(cls, nbar: float, i_max: float | None = None) -> "IntensityLaw":
        if nbar <= 0:
            raise ValueError(f"exponential law needs nbar > 0, got {nbar}")
        return cls(EXPONENTIAL, nbar=nbar, i_max=20 * nbar if i_max is None else i_max)

    @classmethod
    def gamma_two(
        cls,
        zeta: float | None = None,
        nbar: float | None = None,
        i_max: float | None = None,
    ) -> "IntensityLaw":
        if (zeta is None) == (nbar is None):
            raise ValueError("give exactly one of zeta or nbar")
        if zeta is None:
            zeta = 2.0 / nbar
        if zeta <= 0:
            raise ValueError(f"gamma-two law needs zeta > 0, got {zeta}")
        mean = 2.0 / zeta
        return cls(GAMMA_TWO, nbar=mean, zeta=zeta,
                   i_max=20 * mean if i_max is None else i_max)

    @classmethod
    def tabulated(cls, grid, density, i_max: float | None = None) -> "IntensityLaw":
        grid = np.asarray(grid, dtype=float)
        density = np.asarray(density, dtype=float)
        if grid.ndim != 1 or grid.shape != density.shape or grid.size < 2:
            raise ValueError("tabulated law needs matching 1-d grid and density")
        if np.any(np.diff(grid) <= 0) or grid[0] < 0:
            raise ValueError("tabulated grid must be increasing and non-negative")
        if np.any(density < 0):
            raise ValueError("tabulated density must be non-negative")
        norm = np.trapezoid(density, grid)
        if abs(norm - 1.0) > 1e-6:
            raise ValueError(f"tabulated density integrates to {norm}, not 1")
        # linear-interpolated inverse CDF on a dense grid
        xs = np.linspace(grid[0], grid[-1], _TABULATED_GRID_SIZE)
        fs = np.interp(xs, grid, density)
        cdf = np.concatenate([[0.0], np.cumsum((fs[1:] + fs[:-1]) / 2 * np.diff(xs))])
        cdf /= cdf[-1]
        return cls(TABULATED, grid=grid, grid_density=density,
                   i_max=grid[-1] if i_max is None else i_max,
                   _inv_cdf=(cdf, xs))

    def mean(self) -> float:
        if self.kind == DEGENERATE:
            return self.i0
        if self.kind in (EXPONENTIAL, GAMMA_TWO):
            return self.nbar
        return float(np.trapezoid(self.grid * self.grid_density, self.grid))

    def second_moment(self) -> float:
        if self.kind == DEGENERATE:
            return self.i0 ** 2
        if self.kind == EXPONENTIAL:
            return 2 * self.nbar ** 2
        if self.kind == GAMMA_TWO:
            return 6.0 / self.zeta ** 2
        return float(np.trapezoid(self.grid ** 2 * self.grid_density, self.grid))

    def g2_zero(self) -> float:
        """Zero-delay second-order correlation <I^2>/<I>^2 of the law."""
        m = self.mean()
        if m <= 0:
            raise ValueError("zero-mean intensity law has undefined g2")
        return self.second_moment() / m ** 2

    def density(self, intensity) -> np.ndarray:
        """Probability density f(I), vectorized over ``intensity``."""
        x = np.asarray(intensity, dtype=float)
        if self.kind == DEGENERATE:
            raise ValueError("degenerate law has no density; handle as a point mass")
        if self.kind == EXPONENTIAL:
            out = np.exp(-x / self.nbar) / self.nbar
        elif self.kind == GAMMA_TWO:
            out = self.zeta ** 2 * x * np.exp(-self.zeta * x)
        else:
            out = np.interp(x, self.grid, self.grid_density, left=0.0, right=0.0)
        return np.where(x < 0, 0.0, out)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.kind == DEGENERATE:
            return np.full(n, self.i0)
        if self.kind == EXPONENTIAL:
            # inverse CDF of 1 - exp(-I/nbar)
            return -self.nbar * np.log1p(-rng.random(n))
        if self.kind == GAMMA_TWO:
            # sum of two iid exponential(zeta) draws is exact for shape 2
            u = rng.random((2, n))
            return -np.log1p(-u).sum(axis=0) / self.zeta
        cdf, xs = self._inv_cdf
        return np.interp(rng.random(n), cdf, xs)


@dataclass(frozen=True)
class ModulationTrace:
    """Piecewise-constant time series of phase or intensity.

    ``start_times[j]`` opens segment j with value ``values[j]``; the
    last segment runs to ``duration``.  Lookup is right-continuous.
    """

    start_times: np.ndarray
    values: np.ndarray
    duration: float
    kind: str
    clipped: int = 0

    def __post_init__(self):
        starts = np.asarray(self.start_times, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "start_times", starts)
        object.__setattr__(self, "values", vals)
        if starts.size == 0 or starts.size != vals.size:
            raise ValueError("trace needs matching, non-empty start_times and values")
        if starts[0] != 0.0:
            raise ValueError("first segment must start at t=0")
        if np.any(np.diff(starts) <= 0):
            raise ValueError("segment start times must be strictly increasing")
        if self.duration <= 0 or starts[-1] >= self.duration:
            raise ValueError("all segment starts must lie before the trace duration")
        if self.kind == PHASE:
            if np.any(vals < -np.pi) or np.any(vals > np.pi):
                raise ValueError("phase values must lie in (-pi, pi]")
        elif self.kind == INTENSITY:
            if np.any(vals < 0):
                raise ValueError("intensity values must be >= 0")
        else:
            raise ValueError(f"unknown trace kind {self.kind!r}")

    def __len__(self) -> int:
        return self.start_times.size

    def value_at(self, t) -> np.ndarray:
        """Right-continuous segment lookup, vectorized over ``t``."""
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.start_times, t, side="right") - 1
        return self.values[np.clip(idx, 0, len(self) - 1)]

    def segment_integral(self, t) -> np.ndarray:
        """Cumulative integral of the trace from 0 to each ``t``."""
        ends = np.append(self.start_times[1:], self.duration)
        seg_area = self.values * (ends - self.start_times)
        cum = np.concatenate([[0.0], np.cumsum(seg_area)[:-1]])
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(self.start_times, t, side="right") - 1,
                      0, len(self) - 1)
        return cum[idx] + self.values[idx] * (t - self.start_times[idx])


def _spawn_rngs(seed, n: int) -> list[np.random.Generator]:
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return [np.random.default_rng(child) for child in ss.spawn(n)]


def _draw_dwells(dist: DwellDistribution, duration: float,
                 rng: np.random.Generator) -> np.ndarray:
    """Draw iid dwells until they cover ``duration`` (last one may overhang)."""
    chunks = []
    total = 0.0
    batch = max(16, int(duration / dist.mean() * 1.1) + 8)
    while total < duration:
        draw = dist._sample(rng, batch)
        chunks.append(draw)
        total += draw.sum()
        batch = max(16, batch // 4)
    dwells = np.concatenate(chunks)
    stop = int(np.searchsorted(np.cumsum(dwells), duration, side="left"))
    return dwells[: stop + 1]


def sample_dwells(dist: DwellDistribution, duration: float, seed: int) -> np.ndarray:
    """Sample dwell lengths covering ``duration``; deterministic per seed."""
    if duration <= 0:
        raise ValueError(f"duration must be > 0, got {duration}")
    return _draw_dwells(dist, duration, np.random.default_rng(seed))


def _starts_from_dwells(dwells: np.ndarray) -> np.ndarray:
    return np.concatenate([[0.0], np.cumsum(dwells)[:-1]])


def build_phase_trace(dwell: DwellDistribution, jumps: PhaseJumpLaw,
                      duration: float, seed: int) -> ModulationTrace:
    """Piecewise-constant phase trace with one independent jump per dwell."""
    if duration <= 0:
        raise ValueError(f"duration must be > 0, got {duration}")
    if jumps.kind == PhaseJumpLaw.FROZEN:
        return ModulationTrace(np.array([0.0]), np.array([jumps.phi]),
                               duration, PHASE)
    dwell_rng, value_rng = _spawn_rngs(seed, 2)
    starts = _starts_from_dwells(_draw_dwells(dwell, duration, dwell_rng))
    phases = value_rng.uniform(-np.pi, np.pi, starts.size)
    return ModulationTrace(starts, phases, duration, PHASE)


def build_intensity_trace(law: IntensityLaw, dwell: DwellDistribution,
                          duration: float, seed: int) -> ModulationTrace:
    """Piecewise-constant intensity trace with iid segment values from ``law``.

    Values above the law's calibrated ``i_max`` are clipped; the number of
    clipped segments is reported on the trace and as a warning.
    """
    if duration <= 0:
        raise ValueError(f"duration must be > 0, got {duration}")
    dwell_rng, value_rng = _spawn_rngs(seed, 2)
    starts = _starts_from_dwells(_draw_dwells(dwell, duration, dwell_rng))
    values = law.sample(value_rng, starts.size)
    clipped = int(np.count_nonzero(values > law.i_max))
    if clipped:
        warnings.warn(
            f"{clipped} of {values.size} intensity segments exceeded "
            f"i_max={law.i_max:g} and were clipped",
            stacklevel=2,
        )
        values = np.minimum(values, law.i_max)
    return ModulationTrace(starts, values, duration, INTENSITY, clipped=clipped)
