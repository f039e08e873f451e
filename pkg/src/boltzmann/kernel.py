"""Rate kernel r(k, k') = ψ(ε(k') − ε(k)) on a torus grid.

Detailed balance r(k, k') = r(k', k)·e^{−β(ε(k')−ε(k))} is inherited from the KMS property
of ψ. ψ is evaluated once per distinct energy difference.
"""

from __future__ import annotations

import logging

import numpy as np

from src.errors import ConfigurationError, DomainError
from src.reservoir.density import spectral_density
from src.schemas.boltzmann import RateKernel
from src.schemas.reservoir import SpectralDensity
from src.schemas.torus import DispersionLaw, TorusGrid
from src.torus.dispersion import eval_dispersion

logger = logging.getLogger(__name__)


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def rate_kernel(grid: TorusGrid, law: DispersionLaw, spec: SpectralDensity) -> RateKernel:
    """Tabulate r(k_i, k_j) = ψ(ε_j − ε_i) and the total rates R(k_i).

    Raises:
        ConfigurationError: law and grid dimensions differ.
    """
    if law.d != grid.d:
        raise ConfigurationError(f"Dispersion law has dimension {law.d}, grid has {grid.d}")

    dispersion = eval_dispersion(grid, law)
    energy = dispersion.energy
    differences = energy[None, :] - energy[:, None]
    distinct, inverse = np.unique(differences, return_inverse=True)
    psi = np.asarray(spectral_density(distinct, spec))
    rates = psi[inverse].reshape(differences.shape)
    total_rate = grid.weight * rates.sum(axis=1)

    logger.info(
        "Rate kernel on %d states: %d distinct energy differences, R in [%.4g, %.4g]",
        grid.size,
        distinct.size,
        float(total_rate.min()),
        float(total_rate.max()),
    )
    return RateKernel(
        grid=grid,
        law=law,
        spec=spec,
        dispersion=dispersion,
        rates=_readonly(rates),
        total_rate=_readonly(total_rate),
    )


def scale_kernel(kernel: RateKernel, factor: float) -> RateKernel:
    """Kernel with all rates multiplied by factor ≥ 0 (factor 0 freezes the momentum)."""
    if factor < 0:
        raise DomainError(f"Rate scale must be nonnegative, got {factor}")
    return kernel.model_copy(
        update={
            "rates": _readonly(kernel.rates * factor),
            "total_rate": _readonly(kernel.total_rate * factor),
            "scale": kernel.scale * factor,
        }
    )


def detailed_balance_residual(kernel: RateKernel) -> float:
    """Max relative residual of r(k,k') − r(k',k)·e^{−β(ε(k')−ε(k))}."""
    energy = kernel.dispersion.energy
    boltzmann = np.exp(-kernel.spec.beta * (energy[None, :] - energy[:, None]))
    lhs = kernel.rates
    rhs = kernel.rates.T * boltzmann
    scale = np.maximum(np.abs(lhs), np.abs(rhs))
    mask = scale > 0
    if not np.any(mask):
        return 0.0
    return float(np.max(np.abs(lhs - rhs)[mask] / scale[mask]))
