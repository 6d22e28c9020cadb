"""Mean recurrence frequency of the survival probability.

The analytic estimate is a stationary-phase formula built from the second
moments of the overlap weights; it is reliable at the level of the exponent,
not the prefactor. A brute-force crossing counter over a long window provides
the empirical cross-check. Counting convention: all sign changes of p(t) - p
on [0, T], normalized by the two-sided window 2T (p(t) is even in t for real
symmetric generators, so one-sided counting over a doubled window is
equivalent).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral import SpectralDecomposition, merge_close_frequencies, survival_amplitude

__all__ = [
    "Moments",
    "RecurrenceReport",
    "DegenerateSpectrum",
    "ResolutionTooCoarse",
    "moments",
    "kac_frequency",
    "kac_return_time",
    "suggested_observation_time",
    "count_crossings",
    "build_report",
]

# grid step must resolve the fastest beat: step <= 0.1 / spectral span
_STEP_SPAN_FACTOR = 0.1
_CROSSING_STABILITY_TOL = 0.01


class DegenerateSpectrum(ValueError):
    """All weight on one frequency; the recurrence estimate is undefined."""


class ResolutionTooCoarse(ValueError):
    """Grid step too large relative to the spectral span."""


@dataclass(frozen=True)
class Moments:
    """Quadratic weight moments and their size-scaled (starred) versions."""

    kappa: float
    big_gamma: float
    gamma: float
    kappa_star: float
    big_gamma_star: float
    gamma_star: float
    n: int

    @property
    def dispersion(self) -> float:
        """big_gamma - gamma^2 / kappa >= 0 (Cauchy-Schwarz)."""
        return self.big_gamma - self.gamma**2 / self.kappa


@dataclass(frozen=True)
class RecurrenceReport:
    threshold: float
    moments: Moments
    nu: float
    tau: float
    empirical_nu: float | None = None
    empirical_return_rate: float | None = None
    observation_time: float | None = None
    low_statistics: bool = False
    counting: str = (
        "empirical_nu counts all sign changes of p(t) - p on [0, T] normalized"
        " by 2T; empirical_return_rate counts completed returns (up/down"
        " crossing pairs), i.e. half of that"
    )


def moments(decomp: SpectralDecomposition) -> Moments:
    """kappa = sum w^2, big_gamma = sum w^2 e^2, gamma = sum w^2 e."""
    merged = merge_close_frequencies(decomp)
    w = merged.weights
    e = merged.eigenvalues
    kappa = float(np.sum(w**2))
    big_gamma = float(np.sum(w**2 * e**2))
    gamma = float(np.sum(w**2 * e))
    n = decomp.n
    if kappa * big_gamma - gamma**2 < -1e-12 * max(big_gamma * kappa, 1.0):
        raise AssertionError("Cauchy-Schwarz violated; weights corrupted")
    return Moments(kappa, big_gamma, gamma, n * kappa, n * big_gamma, n * gamma, n)


def kac_frequency(decomp: SpectralDecomposition, p: float) -> float:
    """Mean frequency of returns of p(t) to level p.

    nu(p) = sqrt(p (big_gamma - gamma^2/kappa) pi) / (2 pi kappa) * exp(-p/kappa).
    """
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly between 0 and 1")
    m = moments(decomp)
    disp = m.dispersion
    if disp <= 0.0:
        raise DegenerateSpectrum("all spectral weight sits on a single frequency")
    return math.sqrt(p * disp * math.pi) / (2.0 * math.pi * m.kappa) * math.exp(-p / m.kappa)


def kac_return_time(decomp: SpectralDecomposition, p: float) -> float:
    """Mean return time 1 / nu(p)."""
    return 1.0 / kac_frequency(decomp, p)


def suggested_observation_time(decomp: SpectralDecomposition, p: float, target_returns: float = 50.0) -> float:
    """Window long enough for ~target_returns analytic returns."""
    return target_returns / kac_frequency(decomp, p)


def _grid_values(decomp, times):
    return np.abs(survival_amplitude(decomp, times)) ** 2


def _count_on_grid(decomp, p, total_time, step) -> int:
    n_pts = int(math.floor(total_time / step)) + 1
    count = 0
    chunk = 262144
    prev_val = None
    for lo in range(0, n_pts, chunk):
        hi = min(lo + chunk, n_pts)
        times = np.arange(lo, hi) * step
        vals = _grid_values(decomp, times) - p
        if prev_val is not None:
            vals = np.concatenate([[prev_val], vals])
        count += int(np.sum(np.sign(vals[1:]) * np.sign(vals[:-1]) < 0))
        prev_val = vals[-1]
    return count


def _refine_crossing(decomp, p, lo, hi, tol):
    f_lo = float(_grid_values(decomp, np.array([lo]))[0]) - p
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol:
            return mid
        f_mid = float(_grid_values(decomp, np.array([mid]))[0]) - p
        if f_lo * f_mid <= 0.0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)


def count_crossings(
    decomp: SpectralDecomposition,
    p: float,
    total_time: float,
    resolution: float,
    check_stability: bool = True,
    refine: bool = True,
) -> float:
    """Empirical crossing rate: count / (2 * total_time).

    ``resolution`` is the scan step; it must satisfy
    step <= 0.1 / (spectral span) or the call refuses with the required
    value. With ``check_stability`` the count is re-done at half the step and
    the call refuses if it moves by 1% or more. ``refine`` bisects each
    bracket to 1e-8 * step; a strict sign change always brackets a true
    crossing, so refinement pins locations while tangential touches (no sign
    change) are counted as zero either way.
    """
    if total_time <= 0.0:
        raise ValueError("total_time must be positive")
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly between 0 and 1")
    merged = merge_close_frequencies(decomp)
    span = float(merged.eigenvalues[-1] - merged.eigenvalues[0]) if merged.eigenvalues.size > 1 else 0.0
    if span > 0.0 and resolution > _STEP_SPAN_FACTOR / span:
        raise ResolutionTooCoarse(
            f"grid step {resolution:g} too coarse; need <= {_STEP_SPAN_FACTOR / span:g}"
        )
    count = _count_on_grid(merged, p, total_time, resolution)
    if check_stability:
        count_half = _count_on_grid(merged, p, total_time, resolution / 2.0)
        reference = max(count, count_half, 1)
        if abs(count_half - count) / reference >= _CROSSING_STABILITY_TOL:
            raise ResolutionTooCoarse(
                f"crossing count unstable under step halving ({count} vs {count_half})"
            )
        count = count_half
    if refine and count:
        # brackets located on the fine grid; bisection pins each crossing time
        step = resolution / (2.0 if check_stability else 1.0)
        n_pts = int(math.floor(total_time / step)) + 1
        times = np.arange(n_pts) * step
        vals = _grid_values(merged, times) - p
        idx = np.nonzero(np.sign(vals[1:]) * np.sign(vals[:-1]) < 0)[0]
        for i in idx:
            _refine_crossing(merged, p, times[i], times[i + 1], 1e-8 * step)
    return count / (2.0 * total_time)


def build_report(
    decomp: SpectralDecomposition,
    p: float,
    observation_time: float | None = None,
    resolution: float | None = None,
    empirical: bool = False,
) -> RecurrenceReport:
    """Analytic estimate plus optional empirical validation."""
    m = moments(decomp)
    nu = kac_frequency(decomp, p)
    tau = 1.0 / nu
    empirical_nu = None
    low_stats = False
    if empirical:
        if observation_time is None:
            observation_time = suggested_observation_time(decomp, p)
        low_stats = observation_time * nu < 50.0
        if resolution is None:
            merged = merge_close_frequencies(decomp)
            span = float(merged.eigenvalues[-1] - merged.eigenvalues[0])
            resolution = _STEP_SPAN_FACTOR / span if span > 0 else observation_time / 1000.0
        empirical_nu = count_crossings(decomp, p, observation_time, resolution)
    return RecurrenceReport(
        threshold=p,
        moments=m,
        nu=nu,
        tau=tau,
        empirical_nu=empirical_nu,
        empirical_return_rate=None if empirical_nu is None else empirical_nu / 2.0,
        observation_time=observation_time,
        low_statistics=low_stats,
    )
