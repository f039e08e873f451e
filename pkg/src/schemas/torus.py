"""Pydantic schemas for the momentum torus and the dispersion law.

Pure data classes, no numerics. Built by `src.torus` and consumed everywhere else.
Arrays are stored read-only so records can be shared across threads.
"""

from __future__ import annotations

from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict


class DispersionKind(str, Enum):
    """How the dispersion law was specified."""

    COSINE = "cosine"
    TRIGONOMETRIC = "trigonometric"


class TorusGrid(BaseModel):
    """Uniform discretization of the d-torus [−π, π)^d."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    d: int
    n: int  # points per axis
    points: np.ndarray  # (n**d, d) momentum vectors
    weight: float  # quadrature weight (2π/n)^d
    offsets: np.ndarray  # (n**d, d) integer offsets m − n/2, so k = 2π·offset/n
    negation: np.ndarray  # (n**d,) flat index of −k mod 2π

    @property
    def size(self) -> int:
        return int(self.points.shape[0])


class DispersionLaw(BaseModel):
    """Cosine series ε(k) = Σ_n a_n cos(n·k) over integer multi-indices n.

    A pure cosine series is inversion symmetric and entire, so both properties
    hold by construction.
    """

    model_config = ConfigDict(frozen=True)

    kind: DispersionKind
    d: int
    coefficients: dict[tuple[int, ...], float]


class DispersionValues(BaseModel):
    """ε and ∇ε sampled on a grid."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    energy: np.ndarray  # (n_states,)
    gradient: np.ndarray  # (n_states, d)


class AnalyticityConstants(BaseModel):
    """Strip constants c_ε(δ) and lattice sum b_d(γ)."""

    delta: float
    gamma: float
    c_eps: float  # Richardson-corrected supremum
    c_eps_sample: float  # raw sample maximum at the finest sampling
    safety_factor: float  # c_eps / c_eps_sample
    b_d: float
    b_d_tail_bound: float
    b_d_radius: int
