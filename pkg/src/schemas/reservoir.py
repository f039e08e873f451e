"""Pydantic schemas for the reservoir spectral density and its correlation profile."""

from __future__ import annotations

from collections.abc import Callable
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class DensityFamily(str, Enum):
    """Supported spectral-density families."""

    OHMIC_GAUSSIAN = "ohmic-gaussian"
    FORM_FACTOR = "form-factor"
    TABULATED = "tabulated"


class RadialDispersion(str, Enum):
    """Named reservoir dispersions ω(r) with closed-form inverses."""

    LINEAR = "linear"  # ω = r
    QUADRATIC = "quadratic"  # ω = r²


class FormFactorShape(str, Enum):
    """Named radial form factors φ(r) with width w."""

    EXPONENTIAL = "exponential"  # e^{−r/(2w)}
    GAUSSIAN = "gaussian"  # e^{−(r/w)²/2}
    BOX = "box"  # 1 on r ≤ w


RadialFunction = Callable[[np.ndarray], np.ndarray]


class SpectralDensity(BaseModel):
    """Effective reservoir function ψ(ξ) at inverse temperature β.

    KMS orientation: ψ(−ξ) = e^{βξ} ψ(ξ).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    beta: float = Field(gt=0)
    family: DensityFamily = DensityFamily.OHMIC_GAUSSIAN

    # ohmic-gaussian
    coupling: float = Field(default=1.0, gt=0)
    exponent: float = Field(default=1.0, ge=1)  # d_R
    cutoff: float = Field(default=4.0, gt=0)  # Λ

    # form-factor
    reservoir_dim: int = Field(default=3, ge=1)
    omega: RadialFunction | None = None
    omega_inverse: RadialFunction | None = None
    omega_derivative: RadialFunction | None = None
    phi: RadialFunction | None = None
    label: str = ""  # human-readable description of omega/phi for reports

    # tabulated, on ξ ≥ 0 starting at 0
    table_xi: tuple[float, ...] = ()
    table_psi: tuple[float, ...] = ()

    @model_validator(mode="after")
    def check_family_fields(self) -> SpectralDensity:
        if self.family == DensityFamily.FORM_FACTOR and (self.omega is None or self.phi is None):
            raise ValueError("form-factor family needs omega and phi")
        if self.family == DensityFamily.TABULATED:
            if len(self.table_xi) < 2 or len(self.table_xi) != len(self.table_psi):
                raise ValueError("tabulated family needs matching xi/psi tables with at least 2 nodes")
            xi = np.asarray(self.table_xi)
            if xi[0] != 0.0 or np.any(np.diff(xi) <= 0):
                raise ValueError("tabulated xi must start at 0 and be strictly increasing")
            if any(v < 0 for v in self.table_psi):
                raise ValueError("tabulated psi must be nonnegative")
        return self


class CorrelationProfile(BaseModel):
    """Sampled ψ̂(t) with the fitted exponential decay rate."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    times: np.ndarray  # symmetric about 0
    values: np.ndarray  # complex ψ̂(t_j)
    t_max: float
    g_hat: float  # fitted decay rate g_R_hat
    intercept: float
    residual: float  # RMS of the log-linear fit
    fit_points: int
    certified: bool
    reason: str = ""
