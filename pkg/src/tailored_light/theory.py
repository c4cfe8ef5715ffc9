"""Closed-form and quadrature results for the tailored-light models.

Everything here is an analytic oracle for the simulation side: the
temporal overlap envelope xi(tau) of jump processes, G2 curves for
phase- and intensity-modulated light, tailored photon number
distributions, single-photon-added states (their diagonal P functions
and Mandel Q), and the beamsplitter entanglement criterion.

Intensity-domain convention: every P(|alpha|) is handled as a
normalized density f(I) over I = |alpha|^2, which reproduces all the
closed-form PNDs exactly under Poisson mixing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import gammaln

from .estimators import ANALYTIC, NumberDistribution
from .modulation import (
    CONSTANT,
    DEGENERATE,
    EXPONENTIAL,
    TABULATED,
    DwellDistribution,
    IntensityLaw,
    PhaseJumpLaw,
)

THERMAL = "thermal"
ZETA = "zeta"

_TAIL_MASS_LIMIT = 1e-10
_QUAD_ABS_TOL = 1e-12


@dataclass(frozen=True)
class PhotonAddedState:
    """A thermal or zeta-type base state with 0 or 1 photons added."""

    base: str
    nbar: float
    added_photons: int = 1

    def __post_init__(self):
        if self.base not in (THERMAL, ZETA):
            raise ValueError(f"unknown base state {self.base!r}")
        if self.nbar <= 0:
            raise ValueError(f"nbar must be > 0, got {self.nbar}")
        if self.added_photons not in (0, 1):
            raise ValueError("added_photons must be 0 or 1")


@dataclass(frozen=True)
class SqueezingSpec:
    """Single-mode squeezed state with variance matrix diag(e^mu, e^-mu)/2."""

    mu: float

    def __post_init__(self):
        if self.mu < 0:
            raise ValueError(f"squeezing parameter must be >= 0, got {self.mu}")


def _overlap_factor(dist, tau: float) -> float:
    """Per-arm probability that no jump falls in an interval of length tau."""
    if dist is None or (isinstance(dist, PhaseJumpLaw)
                        and dist.kind == PhaseJumpLaw.FROZEN):
        return 1.0
    if not isinstance(dist, DwellDistribution):
        raise TypeError(
            "each arm must be a DwellDistribution, a frozen PhaseJumpLaw, or None"
        )
    if dist.kind == CONSTANT:
        return max(0.0, 1.0 - tau / dist.tau_c)
    if dist.kind == EXPONENTIAL:
        return math.exp(-tau / dist.tau_c)
    # truncated exponential: quadrature of the renewal overlap integrals
    a, b, tau_c = dist.t_min, dist.t_max, dist.tau_c
    if tau >= b:
        return 0.0
    num, _ = quad(lambda t: (t - tau) * math.exp(-t / tau_c), max(tau, a), b,
                  epsabs=_QUAD_ABS_TOL)
    den, _ = quad(lambda t: t * math.exp(-t / tau_c), a, b, epsabs=_QUAD_ABS_TOL)
    return min(1.0, max(0.0, num / den))


def xi_overlap(p1, p2, tau: float) -> float:
    """Probability of temporal overlap of the phase difference at t and t+tau.

    Each arm contributes one overlap factor; an arm held constant
    (``None`` or a frozen jump law) contributes 1.
    """
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    return _overlap_factor(p1, tau) * _overlap_factor(p2, tau)


def xi_curve(p1, p2, taus) -> np.ndarray:
    """``xi_overlap`` evaluated on an array of delays."""
    return np.array([xi_overlap(p1, p2, float(t)) for t in np.asarray(taus)])


def g2_phase_noise(xi_value: float) -> float:
    """G2 under complete phase noise: 1 + xi/2."""
    if not 0.0 <= xi_value <= 1.0:
        raise ValueError(f"xi must lie in [0, 1], got {xi_value}")
    return 1.0 + 0.5 * xi_value


def g2_intensity_modulated(law: IntensityLaw, xi_value: float) -> float:
    """G2 for transmittivity-modulated light: 1 + (G2(0) - 1) * xi."""
    if not 0.0 <= xi_value <= 1.0:
        raise ValueError(f"xi must lie in [0, 1], got {xi_value}")
    return 1.0 + (law.g2_zero() - 1.0) * xi_value


def pnd_thermal(nbar: float, n_max: int) -> NumberDistribution:
    """Thermal (geometric) PND with mean ``nbar``."""
    if nbar <= 0:
        raise ValueError(f"nbar must be > 0, got {nbar}")
    q = nbar / (nbar + 1.0)  # e^-lambda
    n = np.arange(n_max + 1)
    return NumberDistribution((1.0 - q) * q ** n, ANALYTIC)


def pnd_zeta(nbar: float, n_max: int) -> NumberDistribution:
    """PND of the non-Gaussian zeta state, zeta = 2/nbar."""
    if nbar <= 0:
        raise ValueError(f"nbar must be > 0, got {nbar}")
    zeta = 2.0 / nbar
    n = np.arange(n_max + 1)
    probs = (zeta / (zeta + 1.0)) ** 2 * (n + 1) / (zeta + 1.0) ** n
    return NumberDistribution(probs, ANALYTIC)


def _poisson_weight(n: int, intensity: float) -> float:
    if intensity <= 0.0:
        return 1.0 if n == 0 else 0.0
    return math.exp(n * math.log(intensity) - intensity - gammaln(n + 1))


def pnd_from_intensity_law(law: IntensityLaw, n_max: int) -> NumberDistribution:
    """PND by Poisson-mixing an intensity density: p(n) = integral f(I) e^-I I^n/n!."""
    if law.kind == DEGENERATE:
        n = np.arange(n_max + 1)
        if law.i0 == 0.0:
            probs = np.where(n == 0, 1.0, 0.0)
        else:
            probs = np.exp(n * math.log(law.i0) - law.i0 - gammaln(n + 1))
        return NumberDistribution(probs, ANALYTIC)
    mean = law.mean()
    probs = np.empty(n_max + 1)
    for n in range(n_max + 1):
        upper = max(40.0 * mean, n + 12.0 * math.sqrt(n + 1.0) + 30.0)
        if law.kind == TABULATED:
            upper = min(upper, law.grid[-1])
        peak = min(max(n / (1.0 + 1.0 / mean), 1e-6), upper * 0.999)
        val, err = quad(lambda I: float(law.density(I)) * _poisson_weight(n, I),
                        0.0, upper, points=[peak], limit=200,
                        epsabs=_QUAD_ABS_TOL, epsrel=1e-10)
        if err > 1e-8:
            raise RuntimeError(
                f"PND quadrature did not converge at n={n} (error {err:.2e})"
            )
        probs[n] = max(val, 0.0)
    return NumberDistribution(probs, ANALYTIC)


def add_photon(dist: NumberDistribution) -> NumberDistribution:
    """Single photon addition on a diagonal state: p1(m) = m p(m-1)/(<n>+1)."""
    p = dist.probs
    out = np.zeros(p.size + 1)
    out[1:] = np.arange(1, p.size + 1) * p / (dist.mean + 1.0)
    return NumberDistribution(out, dist.source)


def p_function_added(state: PhotonAddedState, x) -> np.ndarray | float:
    """Diagonal P function of a photon-added state at intensity x = |alpha|^2.

    May be negative; pointwise negativity certifies nonclassicality.
    """
    if state.added_photons != 1:
        raise ValueError("P function given here only for one added photon; "
                         "use the base intensity law for added_photons=0")
    xs = np.asarray(x, dtype=float)
    if np.any(xs < 0):
        raise ValueError("intensity must be >= 0")
    nbar = state.nbar
    if state.base == THERMAL:
        out = (xs * (1.0 + nbar) - nbar) * np.exp(-xs / nbar) / (math.pi * nbar ** 3)
    else:
        poly = (nbar ** 2 - 3.0 * nbar * (nbar + 2.0) * xs
                + (nbar + 2.0) ** 2 * xs ** 2)
        out = 4.0 * poly * np.exp(-2.0 * xs / nbar) / (math.pi * nbar ** 4 * (nbar + 1.0))
    return out if xs.ndim else float(out)


def added_p_negative_interval(state: PhotonAddedState) -> tuple[float, float]:
    """Interval of intensities where the photon-added P function is negative."""
    nbar = state.nbar
    if state.base == THERMAL:
        return 0.0, nbar / (1.0 + nbar)
    lo = nbar * (3.0 - math.sqrt(5.0)) / (2.0 * (nbar + 2.0))
    hi = nbar * (3.0 + math.sqrt(5.0)) / (2.0 * (nbar + 2.0))
    return lo, hi


def added_p_normalization(state: PhotonAddedState) -> float:
    """Integral of pi * P1(x) dx under the intensity-density convention."""
    upper = 40.0 * state.nbar + 40.0
    roots = [x for x in added_p_negative_interval(state) if 0.0 < x < upper]
    val, err = quad(lambda x: math.pi * p_function_added(state, x), 0.0, upper,
                    points=roots, epsabs=_QUAD_ABS_TOL, limit=300)
    # err is quadpack's conservative estimate; the lobes cancel, so gate loosely
    if err > 1e-7:
        raise RuntimeError(f"P-function normalization quadrature error {err:.2e}")
    return val


def _base_pnd(base: str, nbar: float, n_max: int) -> NumberDistribution:
    return pnd_thermal(nbar, n_max) if base == THERMAL else pnd_zeta(nbar, n_max)


def _certified_base_pnd(base: str, nbar: float) -> NumberDistribution:
    """Base PND truncated so the missing tail mass is below 1e-10."""
    n_max = int(50 * nbar + 100)
    while True:
        dist = _base_pnd(base, nbar, n_max)
        if 1.0 - dist.probs.sum() <= _TAIL_MASS_LIMIT:
            return dist
        if n_max > 1_000_000:
            raise RuntimeError(f"tail mass above {_TAIL_MASS_LIMIT} at n_max={n_max}")
        n_max *= 2


def photon_added_pnd(base: str, nbar: float) -> NumberDistribution:
    """PND of the single-photon-added thermal or zeta state."""
    return add_photon(_certified_base_pnd(base, nbar))


def _q_of(dist: NumberDistribution) -> float:
    return (dist.moment(2) - dist.mean - dist.mean ** 2) / dist.mean


def mandel_q_curve(base: str, nbar_grid) -> list[tuple[float, float]]:
    """Mandel Q of the photon-added state over a grid of base-state nbar."""
    if base not in (THERMAL, ZETA):
        raise ValueError(f"unknown base state {base!r}")
    grid = np.asarray(nbar_grid, dtype=float)
    if np.any(grid <= 0):
        raise ValueError("nbar grid must be positive")
    return [(float(nb), _q_of(photon_added_pnd(base, nb))) for nb in grid]


def thermal_added_q(nbar: float) -> float:
    """Closed-form Mandel Q of the photon-added thermal state."""
    return (2.0 * nbar ** 2 - 1.0) / (2.0 * nbar + 1.0)


def thermal_added_q_crossover() -> float:
    """Base nbar where the photon-added thermal state's Q changes sign.

    Found from the truncated-Fock moment sums, not the closed form, so
    the two routes can be compared.
    """
    return brentq(lambda nb: _q_of(photon_added_pnd(THERMAL, nb)), 0.3, 1.2,
                  xtol=1e-12)


def entanglement_criterion(nbar: float, sq: SqueezingSpec) -> bool:
    """Sufficient beamsplitter entanglement condition 2 nbar + 1 < e^mu."""
    if nbar < 0:
        raise ValueError(f"nbar must be >= 0, got {nbar}")
    return 2.0 * nbar + 1.0 < math.exp(sq.mu)
