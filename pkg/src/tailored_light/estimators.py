"""Empirical estimators: G2 correlation curves, PND histograms, Mandel Q.

G2 estimators use global means (the modulation processes are
stationary) and truncated, unpadded overlap ranges at each lag.  Error
bars come from a moving-block bootstrap because neighbouring bins are
strongly correlated within one coherence time; pass ``coherence_time``
so the block length can be set to ten times it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .detection import BinnedCounts

DEFAULT_BOOTSTRAP_RESAMPLES = 200

EMPIRICAL = "empirical"
ANALYTIC = "analytic"


@dataclass(frozen=True)
class CorrelationCurve:
    """G2 estimates (or theory values) indexed by lag."""

    lags: np.ndarray
    values: np.ndarray
    stderr: np.ndarray

    def __post_init__(self):
        lags = np.asarray(self.lags, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        errs = np.asarray(self.stderr, dtype=float)
        object.__setattr__(self, "lags", lags)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "stderr", errs)
        if not (lags.size == vals.size == errs.size) or lags.size == 0:
            raise ValueError("lags, values and stderr must have equal, non-zero size")
        if lags[0] < 0 or np.any(np.diff(lags) <= 0):
            raise ValueError("lags must be non-negative and strictly increasing")
        if np.any(vals < 0):
            raise ValueError("G2 values must be non-negative")


@dataclass(frozen=True)
class NumberDistribution:
    """Probabilities p(n) over n = 0..n_max with provenance."""

    probs: np.ndarray
    source: str
    mean: float = field(default=None)  # derived, see __post_init__

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "probs", probs)
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("probs must be a non-empty 1-d array")
        if np.any(probs < 0):
            raise ValueError("probabilities must be non-negative")
        total = probs.sum()
        if self.source == EMPIRICAL:
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"empirical p(n) must sum to 1, got {total}")
        elif self.source == ANALYTIC:
            if total > 1.0 + 1e-9 or total < 1.0 - 1e-6:
                raise ValueError(
                    f"analytic p(n) sums to {total}; truncation insufficient"
                )
        else:
            raise ValueError(f"unknown source {self.source!r}")
        object.__setattr__(self, "mean", float(probs @ np.arange(probs.size)))

    @property
    def n_max(self) -> int:
        return self.probs.size - 1

    def moment(self, order: int) -> float:
        return float(self.probs @ np.arange(self.probs.size, dtype=float) ** order)


def _lag_bins(bin_width: float, max_lag: float, lag_step: float | None) -> np.ndarray:
    if max_lag < 0:
        raise ValueError(f"max_lag must be >= 0, got {max_lag}")
    k_max = int(np.floor(max_lag / bin_width + 1e-9))
    step = 1 if lag_step is None else max(1, int(round(lag_step / bin_width)))
    return np.arange(0, k_max + 1, step)


def _ratio_curve(x: np.ndarray, y: np.ndarray, ks: np.ndarray, bin_width: float,
                 block_bins: int, n_boot: int, boot_seed: int,
                 factorial_zero: bool, symmetrize: bool) -> CorrelationCurve:
    """Normalized lagged-product curve with moving-block bootstrap errors.

    For each lag k the estimate is sum(x_i * y_{i+k}) * n_k / (S_x * S_y)
    with all sums over the truncated overlap range of length n_k = N - k.
    """
    n_total = x.size
    rng = np.random.default_rng(boot_seed)
    values = np.empty(ks.size)
    stderr = np.empty(ks.size)
    for j, k in enumerate(ks):
        n_k = n_total - int(k)
        if n_k < 2:
            raise ValueError(f"lag {k} bins leaves fewer than 2 overlapping terms")
        length = min(block_bins, max(1, n_k // 8))
        n_blocks = n_k // length
        m = n_blocks * length
        offsets = np.arange(n_blocks) * length
        if n_boot > 0 and n_blocks >= 2:
            w = rng.multinomial(n_blocks, np.full(n_blocks, 1.0 / n_blocks),
                                size=n_boot).astype(float)
        else:
            w = None
        directions = [(x, y)] if (k == 0 or not symmetrize) else [(x, y), (y, x)]
        estimates = []
        replicates = []
        for u, v in directions:
            head, tail = u[:n_k], v[int(k):]
            if factorial_zero and k == 0:
                prods = head * (tail - 1.0)
            else:
                prods = head * tail
            s_u, s_v = head.sum(), tail.sum()
            if s_u <= 0 or s_v <= 0:
                raise ValueError("zero-mean stream: G2 normalization undefined")
            estimates.append(prods.sum() * n_k / (s_u * s_v))
            if w is not None:
                b_num = np.add.reduceat(prods[:m], offsets)
                b_u = np.add.reduceat(head[:m], offsets)
                b_v = np.add.reduceat(tail[:m], offsets)
                with np.errstate(divide="ignore", invalid="ignore"):
                    replicates.append((w @ b_num) * m / ((w @ b_u) * (w @ b_v)))
        values[j] = np.mean(estimates)
        if replicates:
            pooled = np.mean(replicates, axis=0)
            stderr[j] = float(np.nanstd(pooled[np.isfinite(pooled)]))
        else:
            stderr[j] = np.nan
    return CorrelationCurve(ks * bin_width, values, stderr)


def _block_bins(coherence_time: float | None, max_lag: float,
                bin_width: float) -> int:
    span = 10.0 * coherence_time if coherence_time else 2.0 * max(max_lag, bin_width)
    return max(1, int(round(span / bin_width)))


def g2_from_samples(samples, sample_period: float, max_lag: float, *,
                    lag_step: float | None = None,
                    coherence_time: float | None = None,
                    n_boot: int = DEFAULT_BOOTSTRAP_RESAMPLES,
                    boot_seed: int = 0) -> CorrelationCurve:
    """G2(tau) from a regularly sampled classical intensity record."""
    samples = np.asarray(samples, dtype=float)
    if sample_period <= 0:
        raise ValueError(f"sample_period must be > 0, got {sample_period}")
    if samples.size < 2 * max_lag / sample_period:
        raise ValueError("need at least 2 * max_lag / sample_period samples")
    if not np.any(samples):
        raise ValueError("all-zero samples: G2 normalization undefined")
    ks = _lag_bins(sample_period, max_lag, lag_step)
    return _ratio_curve(samples, samples, ks, sample_period,
                        _block_bins(coherence_time, max_lag, sample_period),
                        n_boot, boot_seed, factorial_zero=False, symmetrize=False)


def g2_cross(a: BinnedCounts, b: BinnedCounts, max_lag: float, *,
             lag_step: float | None = None,
             coherence_time: float | None = None,
             n_boot: int = DEFAULT_BOOTSTRAP_RESAMPLES,
             boot_seed: int = 0) -> CorrelationCurve:
    """Cross-correlation G2 between two detector streams, symmetrized in lag.

    Valid at zero delay without self-pairing bias because the two
    streams are independent thinnings of the input.
    """
    if a.bin_width != b.bin_width:
        raise ValueError(f"bin widths differ: {a.bin_width} vs {b.bin_width}")
    if len(a) != len(b):
        raise ValueError(f"stream lengths differ: {len(a)} vs {len(b)}")
    if len(a) == 0:
        raise ValueError("empty streams")
    ks = _lag_bins(a.bin_width, max_lag, lag_step)
    return _ratio_curve(a.counts.astype(float), b.counts.astype(float), ks,
                        a.bin_width,
                        _block_bins(coherence_time, max_lag, a.bin_width),
                        n_boot, boot_seed, factorial_zero=False, symmetrize=True)


def g2_auto(counts: BinnedCounts, max_lag: float, *,
            lag_step: float | None = None,
            coherence_time: float | None = None,
            n_boot: int = DEFAULT_BOOTSTRAP_RESAMPLES,
            boot_seed: int = 0) -> CorrelationCurve:
    """Single-stream G2; zero delay uses the factorial moment <n(n-1)>/<n>^2."""
    if len(counts) == 0:
        raise ValueError("empty stream")
    ks = _lag_bins(counts.bin_width, max_lag, lag_step)
    x = counts.counts.astype(float)
    return _ratio_curve(x, x, ks, counts.bin_width,
                        _block_bins(coherence_time, max_lag, counts.bin_width),
                        n_boot, boot_seed, factorial_zero=True, symmetrize=False)


def pnd_histogram(counts: BinnedCounts, pnd_bin: float) -> NumberDistribution:
    """Photon number distribution from re-binned counter records."""
    factor = pnd_bin / counts.bin_width
    m = int(round(factor))
    if m < 1 or abs(factor - m) > 1e-6 * factor:
        raise ValueError(
            f"pnd_bin {pnd_bin} is not an integer multiple of "
            f"bin_width {counts.bin_width}"
        )
    usable = (len(counts) // m) * m
    if usable == 0:
        raise ValueError("fewer counter bins than one PND bin")
    occupancy = counts.counts[:usable].reshape(-1, m).sum(axis=1)
    probs = np.bincount(occupancy) / occupancy.size
    return NumberDistribution(probs, EMPIRICAL)


def mandel_q(dist: NumberDistribution) -> float:
    """Mandel Q = (<n^2> - <n> - <n>^2) / <n>; negative is nonclassical."""
    if dist.mean <= 0:
        raise ValueError("Mandel Q undefined for zero-mean distribution")
    return (dist.moment(2) - dist.mean - dist.mean ** 2) / dist.mean
