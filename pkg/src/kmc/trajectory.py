"""Continuous-time jump process on the momentum grid with free flight at ∇ε.

The momentum holds for an Exponential(R(k)) time, then jumps to k' with probability
w·r(k,k')/R(k) (k' = k allowed); meanwhile x advances by ∇ε(k)·(holding time).
Both a single-path sampler and a vectorized block engine are provided.
"""

from __future__ import annotations

import logging
from typing import Literal

import numpy as np

from src.boltzmann.fiber import gibbs_from_energy
from src.errors import DomainError
from src.kmc.alias import build_jump_tables, draw_targets
from src.schemas.boltzmann import RateKernel
from src.schemas.kmc import AliasTables, Trajectory

logger = logging.getLogger(__name__)

Init = int | Literal["gibbs"]


def make_generator(seed: int, stream: int | None = None) -> np.random.Generator:
    """PCG64 generator for a seed, optionally on an independent child stream."""
    if stream is None:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))


def holding_times(kernel: RateKernel, states: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Exponential(R(k)) draws; infinite where R(k) = 0."""
    with np.errstate(divide="ignore"):
        return rng.standard_exponential(states.shape) / kernel.total_rate[states]  # type: ignore[no-any-return]


def initial_states(kernel: RateKernel, init: Init, count: int, rng: np.random.Generator) -> np.ndarray:
    n = kernel.grid.size
    if init == "gibbs":
        gibbs = gibbs_from_energy(kernel.dispersion.energy, kernel.grid.weight, kernel.spec.beta)
        probabilities = kernel.grid.weight * gibbs.values
        return rng.choice(n, size=count, p=probabilities / probabilities.sum())
    if not 0 <= int(init) < n:
        raise DomainError(f"Initial state {init} outside the grid of {n} states")
    return np.full(count, int(init), dtype=np.int64)


def sample_trajectory(
    kernel: RateKernel,
    init: Init,
    t_max: float,
    seed: int,
    *,
    sample_dt: float | None = None,
    tables: AliasTables | None = None,
) -> Trajectory:
    """Simulate one path on [0, t_max]; identical seeds give bit-identical paths.

    Args:
        kernel: Rate kernel (scaled to 0 for ballistic motion).
        init: Starting grid index or "gibbs".
        t_max: Horizon, > 0.
        seed: 64-bit seed.
        sample_dt: Spacing of recorded positions; defaults to t_max/100.
        tables: Precomputed alias tables.
    """
    if t_max <= 0:
        raise DomainError(f"t_max must be positive, got {t_max}")
    tables = tables or build_jump_tables(kernel)
    rng = make_generator(seed)
    velocity = kernel.dispersion.gradient
    dt = sample_dt or t_max / 100.0
    sample_times = dt * np.arange(int(np.floor(t_max / dt + 1e-9)) + 1)

    state = int(initial_states(kernel, init, 1, rng)[0])
    jump_times = [0.0]
    states = [state]
    now = 0.0
    position = np.zeros(kernel.grid.d)
    positions = np.empty((sample_times.size, kernel.grid.d))
    next_jump = now + float(holding_times(kernel, np.array([state]), rng)[0])

    for m, s in enumerate(sample_times):
        while next_jump <= s:
            position = position + velocity[state] * (next_jump - now)
            now = next_jump
            state = int(draw_targets(tables, np.array([state]), rng.random(1))[0])
            jump_times.append(now)
            states.append(state)
            next_jump = now + float(holding_times(kernel, np.array([state]), rng)[0])
        positions[m] = position + velocity[state] * (s - now)

    return Trajectory(
        jump_times=np.array(jump_times),
        states=np.array(states, dtype=np.int64),
        sample_times=sample_times,
        positions=positions,
        seed=seed,
    )


def simulate_block(
    kernel: RateKernel,
    tables: AliasTables,
    init: Init,
    sample_times: np.ndarray,
    count: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Advance `count` independent paths together.

    Returns:
        positions (n_t, count, d) and occupied states (n_t, count) at the sample times.
    """
    velocity = kernel.dispersion.gradient
    state = initial_states(kernel, init, count, rng)
    now = np.zeros(count)
    position = np.zeros((count, kernel.grid.d))
    next_jump = holding_times(kernel, state, rng)

    positions = np.empty((sample_times.size, count, kernel.grid.d))
    occupied = np.empty((sample_times.size, count), dtype=np.int64)
    for m, s in enumerate(sample_times):
        due = np.nonzero(next_jump <= s)[0]
        while due.size:
            position[due] += velocity[state[due]] * (next_jump[due] - now[due])[:, None]
            now[due] = next_jump[due]
            state[due] = draw_targets(tables, state[due], rng.random(due.size))
            next_jump[due] = now[due] + holding_times(kernel, state[due], rng)
            due = due[next_jump[due] <= s]
        positions[m] = position + velocity[state] * (s - now)[:, None]
        occupied[m] = state
    return positions, occupied
