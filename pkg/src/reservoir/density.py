"""Effective spectral densities ψ(ξ).

Three families share one evaluation entry point:
- ohmic-gaussian: c·|ξ|^{d_R−1}·ξ/(e^{βξ}−1)·e^{−(ξ/Λ)²}
- form-factor: r^{d−1}·(dr/dξ)^{−1}·|φ(r(|ξ|))|² times the Bose factor
- tabulated: PCHIP through (ξ, ψ) on ξ ≥ 0, zero beyond the table

Negative energies are always obtained from the KMS relation ψ(−ξ) = e^{βξ}ψ(ξ), so the
relation holds to rounding for every family.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from functools import lru_cache

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from src.errors import DomainError
from src.schemas.reservoir import (
    DensityFamily,
    FormFactorShape,
    RadialDispersion,
    RadialFunction,
    SpectralDensity,
)

logger = logging.getLogger(__name__)

_SMALL_ARGUMENT = 1e-8
_MONOTONE_SAMPLES = 2048
_MONOTONE_RANGE = 50.0
_ORIGIN_PROBES = (1e-8, 1e-4)
_ORIGIN_GROWTH_LIMIT = 10.0


def _bose_weight(xi: np.ndarray, beta: float) -> np.ndarray:
    """ξ/(e^{βξ}−1), continuous at 0 with value 1/β."""
    out = np.empty_like(xi)
    small = np.abs(beta * xi) < _SMALL_ARGUMENT
    out[small] = 1.0 / beta - 0.5 * xi[small]
    big = ~small
    with np.errstate(over="ignore"):
        out[big] = xi[big] / np.expm1(beta * xi[big])
    return out


def _ohmic_gaussian(xi: np.ndarray, spec: SpectralDensity) -> np.ndarray:
    values = spec.coupling * _bose_weight(xi, spec.beta) * np.exp(-((xi / spec.cutoff) ** 2))
    if spec.exponent != 1.0:
        values = values * np.abs(xi) ** (spec.exponent - 1.0)
    return values


@lru_cache(maxsize=32)
def _interpolant(table_xi: tuple[float, ...], table_psi: tuple[float, ...]) -> PchipInterpolator:
    return PchipInterpolator(np.asarray(table_xi), np.asarray(table_psi), extrapolate=False)


def _positive_side(xi: np.ndarray, spec: SpectralDensity) -> np.ndarray:
    """ψ on ξ ≥ 0 for the form-factor and tabulated families."""
    if spec.family == DensityFamily.TABULATED:
        values = _interpolant(spec.table_xi, spec.table_psi)(xi)
        return np.clip(np.nan_to_num(values, nan=0.0), 0.0, None)

    assert spec.omega_inverse is not None and spec.omega_derivative is not None and spec.phi is not None
    # The origin is the continuous extension from the right
    xi_eval = np.maximum(xi, _SMALL_ARGUMENT)
    r = spec.omega_inverse(xi_eval)
    jacobian = spec.omega_derivative(r)  # (dr/dξ)^{−1}
    radial = r ** (spec.reservoir_dim - 1) * jacobian * np.abs(spec.phi(r)) ** 2
    return radial * _bose_weight(xi_eval, spec.beta) / xi_eval  # type: ignore[no-any-return]


def spectral_density(xi: np.ndarray | float, spec: SpectralDensity) -> np.ndarray | float:
    """Evaluate ψ(ξ) ≥ 0 for real ξ (scalar or array)."""
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    if spec.family == DensityFamily.OHMIC_GAUSSIAN:
        values = _ohmic_gaussian(xi_arr, spec)
    else:
        magnitude = np.abs(xi_arr)
        values = _positive_side(magnitude, spec)
        negative = (xi_arr < 0) & (values > 0)
        values[negative] *= np.exp(spec.beta * magnitude[negative])
    if np.ndim(xi) == 0:
        return float(values[0])
    return values


def check_kms(spec: SpectralDensity, xi: np.ndarray) -> float:
    """Max relative residual of ψ(−ξ) − e^{βξ}ψ(ξ) over the sample."""
    xi = np.asarray(xi, dtype=float)
    forward = spectral_density(xi, spec)
    backward = spectral_density(-xi, spec)
    expected = np.exp(spec.beta * xi) * forward
    scale = np.maximum(np.abs(backward), np.abs(expected))
    mask = scale > 0
    if not np.any(mask):
        return 0.0
    return float(np.max(np.abs(backward - expected)[mask] / scale[mask]))


def ohmic_gaussian_density(
    beta: float,
    coupling: float = 1.0,
    exponent: float = 1.0,
    cutoff: float = 4.0,
) -> SpectralDensity:
    """Default family with coupling c, exponent d_R and Gaussian cutoff Λ."""
    return SpectralDensity(beta=beta, coupling=coupling, exponent=exponent, cutoff=cutoff)


def tabulated_density(beta: float, xi: list[float], psi: list[float]) -> SpectralDensity:
    """Density interpolated through a table on ξ ≥ 0 and continued by KMS."""
    return SpectralDensity(
        beta=beta,
        family=DensityFamily.TABULATED,
        table_xi=tuple(float(x) for x in xi),
        table_psi=tuple(float(p) for p in psi),
    )


def _numeric_inverse(omega: RadialFunction) -> RadialFunction:
    def inverse(xi: np.ndarray) -> np.ndarray:
        xi = np.atleast_1d(xi)
        out = np.empty_like(xi, dtype=float)
        for idx, target in np.ndenumerate(xi):
            upper = 1.0
            while float(omega(np.array(upper))) < target:
                upper *= 2.0
                if upper > 1e12:
                    raise DomainError(f"omega never reaches {target}")
            out[idx] = brentq(lambda r, t=target: float(omega(np.array(r))) - t, 0.0, upper, xtol=1e-15, rtol=1e-14)
        return out

    return inverse


def _numeric_derivative(omega: RadialFunction) -> RadialFunction:
    def derivative(r: np.ndarray) -> np.ndarray:
        h = 1e-6 * np.maximum(np.abs(r), 1.0)
        lower = np.maximum(r - h, 0.0)
        return (omega(r + h) - omega(lower)) / (r + h - lower)  # type: ignore[no-any-return]

    return derivative


def effective_density_from_form_factor(
    omega: RadialFunction,
    phi: RadialFunction,
    beta: float,
    d_res: int,
    *,
    omega_inverse: RadialFunction | None = None,
    omega_derivative: RadialFunction | None = None,
    label: str = "",
) -> SpectralDensity:
    """Build ψ(ξ) = ‖φ^β_ξ‖² from a radial reservoir dispersion and form factor.

    For ξ > 0: ψ = r^{d−1}·(dr/dξ)^{−1}·|φ(r)|²/(e^{βξ}−1) with r = r(ξ) the inverse of ω;
    ξ < 0 follows by KMS.

    Args:
        omega: Reservoir dispersion ω(r), strictly increasing with ω(0) = 0.
        phi: Radial form factor φ(r).
        beta: Inverse temperature.
        d_res: Reservoir spatial dimension.
        omega_inverse: Closed-form r(ξ); brentq is used when omitted.
        omega_derivative: Closed-form ω'(r); a central difference is used when omitted.

    Raises:
        DomainError: ω not strictly increasing from 0, or ψ unbounded at ξ = 0.
    """
    r_samples = np.linspace(0.0, _MONOTONE_RANGE, _MONOTONE_SAMPLES)
    omega_samples = np.asarray(omega(r_samples), dtype=float)
    if abs(omega_samples[0]) > 1e-12:
        raise DomainError(f"omega(0) must vanish, got {omega_samples[0]}")
    if np.any(np.diff(omega_samples) <= 0):
        raise DomainError("omega must be strictly increasing")

    spec = SpectralDensity(
        beta=beta,
        family=DensityFamily.FORM_FACTOR,
        reservoir_dim=d_res,
        omega=omega,
        omega_inverse=omega_inverse or _numeric_inverse(omega),
        omega_derivative=omega_derivative or _numeric_derivative(omega),
        phi=phi,
        label=label,
    )

    near, far = spectral_density(np.array(_ORIGIN_PROBES), spec)
    if not (math.isfinite(near) and near <= _ORIGIN_GROWTH_LIMIT * max(far, 1e-300)):
        raise DomainError("Form-factor density is unbounded at zero energy")
    if near == 0.0 and far == 0.0 and not np.any(spectral_density(np.linspace(0.1, 10.0, 64), spec) > 0):
        raise DomainError("Form-factor density vanishes identically")

    logger.debug("Built form-factor density %s (d_res=%d, beta=%g)", label or "<custom>", d_res, beta)
    return spec


_OMEGAS: dict[RadialDispersion, tuple[RadialFunction, RadialFunction, RadialFunction]] = {
    RadialDispersion.LINEAR: (lambda r: r, lambda xi: xi, lambda r: np.ones_like(r)),
    RadialDispersion.QUADRATIC: (lambda r: r**2, np.sqrt, lambda r: 2.0 * r),
}


def _form_factor(shape: FormFactorShape, width: float) -> Callable[[np.ndarray], np.ndarray]:
    if shape == FormFactorShape.EXPONENTIAL:
        return lambda r: np.exp(-r / (2.0 * width))
    if shape == FormFactorShape.GAUSSIAN:
        return lambda r: np.exp(-0.5 * (r / width) ** 2)
    return lambda r: np.where(r <= width, 1.0, 0.0)


def named_form_factor_density(
    omega: RadialDispersion,
    phi: FormFactorShape,
    beta: float,
    d_res: int,
    width: float = 1.0,
) -> SpectralDensity:
    """Form-factor density from the named ω and φ choices used by run configs."""
    if width <= 0:
        raise DomainError(f"Form-factor width must be positive, got {width}")
    forward, inverse, derivative = _OMEGAS[omega]
    return effective_density_from_form_factor(
        forward,
        _form_factor(phi, width),
        beta,
        d_res,
        omega_inverse=inverse,
        omega_derivative=derivative,
        label=f"{omega.value}/{phi.value}(w={width:g})",
    )
