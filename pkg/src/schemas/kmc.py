"""Pydantic schemas for kinetic Monte Carlo runs."""

from __future__ import annotations

from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

RNG_ALGORITHM = "PCG64 streams from SeedSequence(seed, spawn_key=(block,))"


class AliasTables(BaseModel):
    """Per-state Vose alias tables for the jump distribution w·r(k,·)/R(k)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    probability: np.ndarray  # (n_states, n_states) acceptance thresholds
    alias: np.ndarray  # (n_states, n_states) alias targets


class Trajectory(BaseModel):
    """One jump path: states[m] is occupied on [jump_times[m], jump_times[m+1])."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    jump_times: np.ndarray  # jump_times[0] = 0
    states: np.ndarray
    sample_times: np.ndarray
    positions: np.ndarray  # (n_samples, d), x(0) = 0
    seed: int


class EnsembleConfig(BaseModel):
    """Ensemble run parameters; `init` is a grid index or "gibbs"."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_traj: int = Field(default=10_000, ge=100)
    t_max: float = Field(default=200.0, gt=0)
    sample_dt: float = Field(default=0.1, gt=0)
    vacf_max_lag: float = Field(default=10.0, gt=0)
    init: int | Literal["gibbs"] = "gibbs"
    seed: int = Field(default=0, ge=0, lt=2**64)
    batch_size: int = Field(default=500, ge=1)
    n_batches: int = Field(default=20, ge=2)
    histogram_samples: int = Field(default=11, ge=2, description="Evenly spaced sample times with a momentum histogram")


class EnsembleStats(BaseModel):
    """Ensemble observables with batch-means standard errors."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    times: np.ndarray  # (n_t,)
    msd: np.ndarray  # (n_t, d)
    msd_stderr: np.ndarray  # (n_t, d)
    second_moment: np.ndarray  # (n_t, d, d) ⟨Δx_i Δx_j⟩
    mean_displacement: np.ndarray  # (n_t, d)
    mean_stderr: np.ndarray  # (n_t, d)
    histogram_times: np.ndarray  # (n_h,) subset of times ending at the final sample
    histograms: np.ndarray  # (n_h, n_states), each row sums to 1
    vacf_lags: np.ndarray  # (n_lag,)
    vacf: np.ndarray  # (n_lag, d, d)
    vacf_stderr: np.ndarray  # (n_lag, d, d)
    batch_second_moment: np.ndarray  # (n_batches, n_t, d, d)
    batch_vacf: np.ndarray  # (n_batches, n_lag, d, d)
    n_traj: int
    init: int | str
    seed: int
    rng: str = RNG_ALGORITHM

    @property
    def histogram(self) -> np.ndarray:
        """Momentum distribution at the final sample time."""
        return self.histograms[-1]  # type: ignore[no-any-return]
