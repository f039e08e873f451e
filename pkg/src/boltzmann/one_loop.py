"""Explicit one-loop fiber kernel (L(z))_p.

Gain part:
    w·(ψ₊[ε(k−p/2) − ε(k'+p/2) + iz] + ψ₋[ε(k+p/2) − ε(k'−p/2) − iz])
Loss part (diagonal):
    −w·Σ_{k'} (ψ₊[ε(k'+p/2) − ε(k+p/2) + iz] + ψ₋[ε(k'−p/2) − ε(k−p/2) − iz])
The loss differences are oriented ε(k') − ε(k) so that (L(0))_0 = M⁰ and the constant
function is a left null vector of (L(z))_0 for real z.
"""

from __future__ import annotations

import logging
from collections.abc import Callable

import numpy as np

from src.boltzmann.fiber import as_tilt
from src.reservoir.correlation import psi_minus, psi_plus
from src.schemas.boltzmann import FiberKind, FiberOperator
from src.schemas.reservoir import SpectralDensity
from src.schemas.torus import DispersionLaw, TorusGrid
from src.torus.dispersion import dispersion_energy, eval_dispersion

logger = logging.getLogger(__name__)


def _memoized(
    transform: Callable[[np.ndarray, SpectralDensity], np.ndarray], arguments: np.ndarray, spec: SpectralDensity
) -> np.ndarray:
    """Evaluate a half transform once per distinct argument."""
    distinct, inverse = np.unique(arguments, return_inverse=True)
    return np.asarray(transform(distinct, spec))[inverse.reshape(-1)].reshape(arguments.shape)


def build_L_fiber(
    grid: TorusGrid,
    law: DispersionLaw,
    spec: SpectralDensity,
    z: complex,
    p: np.ndarray | list[complex] | None = None,
) -> FiberOperator:
    """Assemble (L(z))_p as a dense operator on grid functions.

    Raises:
        CertificationError: ψ̂ decay is not certified.
        StripViolationError: some ψ± argument leaves the certified strip.
    """
    shift = 0.5 * as_tilt(p, grid.d)
    z = complex(z)
    points = grid.points.astype(complex)
    minus = dispersion_energy(law, points - shift)  # ε(k − p/2)
    plus = dispersion_energy(law, points + shift)  # ε(k + p/2)

    forward = _memoized(psi_plus, minus[:, None] - plus[None, :] + 1j * z, spec)
    backward = _memoized(psi_minus, plus[:, None] - minus[None, :] - 1j * z, spec)
    matrix = grid.weight * (forward + backward)

    loss_plus = _memoized(psi_plus, plus[None, :] - plus[:, None] + 1j * z, spec)
    loss_minus = _memoized(psi_minus, minus[None, :] - minus[:, None] - 1j * z, spec)
    matrix[np.diag_indices_from(matrix)] -= grid.weight * (loss_plus + loss_minus).sum(axis=1)

    matrix.setflags(write=False)
    logger.debug("Built (L(z))_p with z=%s, |p|=%.3g on %d states", z, float(np.linalg.norm(2 * shift)), grid.size)
    return FiberOperator(
        grid=grid,
        kind=FiberKind.ONE_LOOP,
        matrix=matrix,
        kappa=np.zeros(grid.d, dtype=complex),
        energy=eval_dispersion(grid, law).energy,
        beta=spec.beta,
        z=z,
        p=2 * shift,
    )
