"""Diffusion estimators from ensemble statistics: Green–Kubo and MSD slope."""

from __future__ import annotations

import logging

import numpy as np
from scipy import integrate

from src.errors import CertificationError, DomainError
from src.schemas.kmc import EnsembleStats
from src.schemas.spectral import DiffusionRoute, DiffusionTensor

logger = logging.getLogger(__name__)

_CUTOFF_SIGMAS = 2.0
_MIN_CUTOFF_POINTS = 3


def _integrate(values: np.ndarray, dt: float, rule: str) -> np.ndarray:
    if rule == "trapezoid":
        return integrate.trapezoid(values, dx=dt, axis=0)  # type: ignore[no-any-return]
    return integrate.simpson(values, dx=dt, axis=0)  # type: ignore[no-any-return]


def vacf_cutoff(stats: EnsembleStats) -> int:
    """First lag index where every |C_ii| is below two standard errors.

    Raises:
        CertificationError: the VACF has not decayed within the recorded lags.
    """
    d = stats.vacf.shape[1]
    diagonal = np.arange(d)
    signal = np.abs(stats.vacf[:, diagonal, diagonal])
    noise = _CUTOFF_SIGMAS * stats.vacf_stderr[:, diagonal, diagonal]
    below = np.nonzero(np.all(signal < noise, axis=1))[0]
    below = below[below >= _MIN_CUTOFF_POINTS - 1]
    if below.size == 0:
        raise CertificationError(
            f"VACF has not decayed below {_CUTOFF_SIGMAS:g} standard errors by lag {stats.vacf_lags[-1]:g}; "
            f"C_ii(end)={signal[-1].tolist()}, stderr={stats.vacf_stderr[-1, diagonal, diagonal].tolist()}"
        )
    return int(below[0])


def green_kubo(stats: EnsembleStats, rule: str = "simpson") -> DiffusionTensor:
    """D_ij = ∫_R C_ij(t) dt = ∫_0^{t_cut} (C_ij + C_ji) dt, batch-means uncertainty.

    Raises:
        CertificationError: VACF not decayed at the largest recorded lag.
    """
    cut = vacf_cutoff(stats)
    dt = float(stats.vacf_lags[1] - stats.vacf_lags[0])

    def estimate(vacf: np.ndarray) -> np.ndarray:
        window = vacf[: cut + 1]
        half = _integrate(window, dt, rule)
        return half + half.T  # type: ignore[no-any-return]

    D = estimate(stats.vacf)
    per_batch = np.stack([estimate(v) for v in stats.batch_vacf])
    uncertainty = per_batch.std(axis=0, ddof=1) / np.sqrt(per_batch.shape[0])
    logger.info("Green-Kubo D=%s (t_cut=%g)", D.tolist(), stats.vacf_lags[cut])
    return DiffusionTensor(D=D, route=DiffusionRoute.GREEN_KUBO, uncertainty=uncertainty)


def _slope(times: np.ndarray, values: np.ndarray, weights: np.ndarray) -> float:
    """Weighted least-squares slope of values against times (with intercept)."""
    design = np.stack([times, np.ones_like(times)], axis=1) * weights[:, None]
    coef, *_ = np.linalg.lstsq(design, values * weights, rcond=None)
    return float(coef[0])


def msd_diffusion(stats: EnsembleStats, window: tuple[float, float] | None = None) -> DiffusionTensor:
    """Slope of ⟨Δx_i Δx_j⟩(t) on a late-time window (default [t_max/2, t_max]).

    Ballistic transients of length ~1/gap are discarded by the window.
    """
    times = stats.times
    lo, hi = window or (0.5 * times[-1], times[-1])
    mask = (times >= lo - 1e-12) & (times <= hi + 1e-12)
    if np.count_nonzero(mask) < 3:
        raise DomainError(f"MSD window [{lo}, {hi}] holds fewer than 3 samples")

    d = stats.second_moment.shape[1]
    t = times[mask]
    # weights ∝ 1/stderr, floored so a zero stderr cannot dominate
    stderr = np.maximum(stats.msd_stderr[mask].mean(axis=1), 1e-300)
    weights = 1.0 / stderr

    D = np.empty((d, d))
    batch_slopes = np.empty((stats.batch_second_moment.shape[0], d, d))
    for i in range(d):
        for j in range(d):
            D[i, j] = _slope(t, stats.second_moment[mask, i, j], weights)
            for b, moment in enumerate(stats.batch_second_moment):
                batch_slopes[b, i, j] = _slope(t, moment[mask, i, j], weights)
    uncertainty = batch_slopes.std(axis=0, ddof=1) / np.sqrt(batch_slopes.shape[0])
    D = 0.5 * (D + D.T)
    logger.info("MSD-slope D=%s on [%g, %g]", D.tolist(), lo, hi)
    return DiffusionTensor(D=D, route=DiffusionRoute.MSD, uncertainty=uncertainty)


def vacf_decay_rate(
    lags: np.ndarray, vacf: np.ndarray, stderr: np.ndarray, sigmas: float = 5.0, tail: float = 0.5
) -> float:
    """Fitted exponential rate of |C_11(t)| on the late part of its resolved range.

    The resolved range is the run of lags t > 0 where |C_11| exceeds `sigmas` standard errors,
    stopping at the first unresolved lag. Only its last `tail` fraction enters the log-linear
    fit; early lags mix in the faster relaxation modes and overstate the rate.

    Raises:
        CertificationError: fewer than 3 resolved points in the fit window.
    """
    if not 0 < tail <= 1:
        raise DomainError(f"tail must be in (0, 1], got {tail}")
    signal = np.abs(vacf[:, 0, 0])
    resolved = (signal > sigmas * stderr[:, 0, 0]) & (lags > 0)
    start = int(np.argmax(lags > 0))
    unresolved = np.nonzero(~resolved[start:])[0]
    stop = start + (int(unresolved[0]) if unresolved.size else resolved.size - start)
    first = stop - max(int(round(tail * (stop - start))), 3)
    if first < start:
        raise CertificationError(f"Too few resolved VACF points to fit a decay rate ({stop - start} resolved)")
    window = slice(first, stop)
    slope, _ = np.polyfit(lags[window], np.log(signal[window]), 1)
    logger.debug("VACF decay fit on [%g, %g]: rate %.6g", lags[first], lags[stop - 1], -slope)
    return float(-slope)


def total_variation(histogram: np.ndarray, reference: np.ndarray) -> float:
    return float(0.5 * np.abs(histogram - reference).sum())
