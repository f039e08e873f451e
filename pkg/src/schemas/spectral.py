"""Pydantic schemas for spectral data, diffusion tensors and CLT comparisons."""

from __future__ import annotations

from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict


class DiffusionRoute(str, Enum):
    HESSIAN = "hessian"
    RESOLVENT = "resolvent"
    GREEN_KUBO = "green-kubo"
    MSD = "msd"


class SpectralData(BaseModel):
    """Leading eigenpair of M^κ with its rank-one spectral projector.

    Normalization: ⟨1, ζ_κ⟩ = 1 and ⟨l_κ, ζ_κ⟩ = 1 (bilinear grid quadrature), so
    P_κ θ = ⟨l_κ, θ⟩ ζ_κ.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kappa: np.ndarray
    f: complex
    right: np.ndarray  # ζ_κ
    left: np.ndarray  # l_κ
    projector: np.ndarray | None = None  # dense P_κ, omitted for large grids
    gap: float
    runner_up: complex  # next eigenvalue by real part


class DiffusionTensor(BaseModel):
    """Symmetric positive-definite diffusion tensor with per-entry uncertainty."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    D: np.ndarray
    route: DiffusionRoute
    uncertainty: np.ndarray
    converged: bool = True


class CltComparison(BaseModel):
    """⟨1, e^{tM^{q/√t}} ζ⟩ against e^{−½(q, D q)}."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    q: np.ndarray
    t: float
    lhs: complex
    rhs: float

    @property
    def error(self) -> float:
        return abs(self.lhs - self.rhs)
