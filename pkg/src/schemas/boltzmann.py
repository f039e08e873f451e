"""Pydantic schemas for rate kernels and fiber operators."""

from __future__ import annotations

from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.schemas.reservoir import SpectralDensity
from src.schemas.torus import DispersionLaw, DispersionValues, TorusGrid


class FiberKind(str, Enum):
    BOLTZMANN = "boltzmann"  # M^κ
    ONE_LOOP = "one-loop"  # (L(z))_p


class RateKernel(BaseModel):
    """Jump rates r(k_i, k_j) = scale·ψ(ε(k_j) − ε(k_i)) on a grid.

    `rates` holds raw rates (no quadrature weight); the generator folds the weight in.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    grid: TorusGrid
    law: DispersionLaw
    spec: SpectralDensity
    dispersion: DispersionValues
    rates: np.ndarray  # (n_states, n_states)
    total_rate: np.ndarray  # R(k_i) = weight · Σ_j r(k_i, k_j)
    scale: float = 1.0


class FiberOperator(BaseModel):
    """Dense complex operator on grid functions."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    grid: TorusGrid
    kind: FiberKind
    matrix: np.ndarray  # (n_states, n_states) complex
    kappa: np.ndarray  # (d,) complex tilt; zero for one-loop operators
    energy: np.ndarray  # ε on the grid, carried for symmetrization
    beta: float
    z: complex | None = None
    p: np.ndarray | None = None


class GibbsState(BaseModel):
    """ζ(k) = e^{−βε(k)} / ∫ e^{−βε}, normalized in grid quadrature."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray
    beta: float


class SymmetrizedGenerator(BaseModel):
    """M̃ = W M⁰ W^{−1} with W = diag e^{βε/2}, and ζ̃ = Wζ."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    matrix: np.ndarray  # real, symmetric up to rounding
    zeta_tilde: np.ndarray
    conjugation: np.ndarray  # diagonal of W
