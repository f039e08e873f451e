"""Ensemble statistics over independent jump-process paths.

Paths are simulated in fixed-size blocks; block b draws from its own PCG64 stream
SeedSequence(seed, spawn_key=(b,)). Blocks run on a thread pool and are reduced in block
order, so results do not depend on the thread count. Blocks are grouped into contiguous
batches for batch-means standard errors.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from src.config import settings
from src.kmc.alias import build_jump_tables
from src.kmc.trajectory import make_generator, simulate_block
from src.schemas.boltzmann import RateKernel
from src.schemas.kmc import AliasTables, EnsembleConfig, EnsembleStats

logger = logging.getLogger(__name__)


@dataclass
class _BlockSums:
    count: int
    second_moment: np.ndarray  # Σ_b Δx_i Δx_j, (n_t, d, d)
    displacement: np.ndarray  # Σ_b Δx, (n_t, d)
    histograms: np.ndarray  # (n_h, n_states) counts at the histogram sample indices
    vacf: np.ndarray  # Σ_b time-origin-averaged v_i(t)v_j(t+τ), (n_lag, d, d)


def _sample_grid(config: EnsembleConfig) -> tuple[np.ndarray, int]:
    steps = int(math.floor(config.t_max / config.sample_dt + 1e-9))
    times = config.sample_dt * np.arange(steps + 1)
    n_lag = min(int(round(config.vacf_max_lag / config.sample_dt)) + 1, times.size)
    return times, n_lag


def _histogram_indices(n_times: int, samples: int) -> np.ndarray:
    """Evenly spaced sample indices from 0 to the last one, without repeats."""
    return np.unique(np.linspace(0, n_times - 1, min(samples, n_times)).round().astype(np.int64))


def _count_states(occupied: np.ndarray, n_states: int) -> np.ndarray:
    """Per-row state counts of an (n_rows, paths) array."""
    rows = occupied.shape[0]
    flat = occupied + n_states * np.arange(rows)[:, None]
    return np.bincount(flat.ravel(), minlength=rows * n_states).reshape(rows, n_states)


def _block_sizes(config: EnsembleConfig) -> list[int]:
    """Equal blocks (the last one shorter), at least n_batches of them."""
    size = max(1, min(config.batch_size, config.n_traj // config.n_batches))
    full, rest = divmod(config.n_traj, size)
    return [size] * full + ([rest] if rest else [])


def _correlate(velocities: np.ndarray, n_lag: int) -> np.ndarray:
    """Σ over paths of (1/(n_t−τ)) Σ_t v_i(t) v_j(t+τ) via FFT cross-spectra."""
    n_t = velocities.shape[0]
    n_fft = 1 << int(math.ceil(math.log2(2 * n_t)))
    spectrum = np.fft.rfft(velocities, n=n_fft, axis=0)  # (n_f, paths, d)
    cross = np.einsum("fbi,fbj->fij", np.conj(spectrum), spectrum)
    correlation = np.fft.irfft(cross, n=n_fft, axis=0)[:n_lag]
    return correlation / (n_t - np.arange(n_lag))[:, None, None]  # type: ignore[no-any-return]


def _run_block(
    kernel: RateKernel,
    tables: AliasTables,
    config: EnsembleConfig,
    times: np.ndarray,
    n_lag: int,
    histogram_at: np.ndarray,
    block: int,
    count: int,
) -> _BlockSums:
    rng = make_generator(config.seed, stream=block)
    positions, occupied = simulate_block(kernel, tables, config.init, times, count, rng)
    velocities = kernel.dispersion.gradient[occupied]  # (n_t, count, d)
    return _BlockSums(
        count=count,
        second_moment=np.einsum("tbi,tbj->tij", positions, positions),
        displacement=positions.sum(axis=1),
        histograms=_count_states(occupied[histogram_at], kernel.grid.size),
        vacf=_correlate(velocities, n_lag),
    )


def _batch_means(blocks: list[_BlockSums], n_batches: int) -> list[_BlockSums]:
    edges = np.linspace(0, len(blocks), n_batches + 1).round().astype(int)
    batches = []
    for lo, hi in zip(edges[:-1], edges[1:], strict=True):
        group = blocks[lo:hi]
        count = sum(b.count for b in group)
        batches.append(
            _BlockSums(
                count=count,
                second_moment=sum(b.second_moment for b in group) / count,
                displacement=sum(b.displacement for b in group) / count,
                histograms=sum(b.histograms for b in group),
                vacf=sum(b.vacf for b in group) / count,
            )
        )
    return batches


def _stderr(samples: np.ndarray) -> np.ndarray:
    return samples.std(axis=0, ddof=1) / math.sqrt(samples.shape[0])  # type: ignore[no-any-return]


def ensemble_stats(kernel: RateKernel, config: EnsembleConfig, threads: int | None = None) -> EnsembleStats:
    """Simulate config.n_traj paths and aggregate MSD, momentum histogram and VACF.

    Args:
        kernel: Rate kernel.
        config: Ensemble parameters (validated by the schema, n_traj ≥ 100).
        threads: Worker threads; defaults to the process settings.
    """
    times, n_lag = _sample_grid(config)
    histogram_at = _histogram_indices(times.size, config.histogram_samples)
    tables = build_jump_tables(kernel)
    sizes = _block_sizes(config)
    workers = threads or settings.threads
    logger.info(
        "Simulating %d paths in %d blocks on %d threads (t_max=%g, dt=%g)",
        config.n_traj,
        len(sizes),
        workers,
        config.t_max,
        config.sample_dt,
    )

    with ThreadPoolExecutor(max_workers=workers) as pool:
        blocks = list(
            pool.map(
                lambda item: _run_block(kernel, tables, config, times, n_lag, histogram_at, item[0], item[1]),
                enumerate(sizes),
            )
        )

    batches = _batch_means(blocks, config.n_batches)
    total = sum(b.count for b in blocks)
    second_moment = sum(b.second_moment for b in blocks) / total
    displacement = sum(b.displacement for b in blocks) / total
    histograms = sum(b.histograms for b in blocks) / total
    vacf = sum(b.vacf for b in blocks) / total

    batch_second = np.stack([b.second_moment for b in batches])
    batch_mean = np.stack([b.displacement for b in batches])
    batch_vacf = np.stack([b.vacf for b in batches])
    diagonal = np.arange(kernel.grid.d)

    return EnsembleStats(
        times=times,
        msd=second_moment[:, diagonal, diagonal],
        msd_stderr=_stderr(batch_second)[:, diagonal, diagonal],
        second_moment=second_moment,
        mean_displacement=displacement,
        mean_stderr=_stderr(batch_mean),
        histogram_times=times[histogram_at],
        histograms=histograms,
        vacf_lags=times[:n_lag],
        vacf=vacf,
        vacf_stderr=_stderr(batch_vacf),
        batch_second_moment=batch_second,
        batch_vacf=batch_vacf,
        n_traj=total,
        init=config.init,
        seed=config.seed,
    )
