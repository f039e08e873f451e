"""Linear Boltzmann fiber generator M^κ, the Gibbs state and the symmetrized generator.

On grid functions θ:
    (M^κ θ)(k_i) = i(κ,∇ε)(k_i) θ(k_i) + w Σ_j [r(k_j,k_i) θ(k_j) − r(k_i,k_j) θ(k_i)]
with w the quadrature weight. The diagonal gain r(k,k) and its loss counterpart cancel,
so including k' = k in both sums changes nothing.
"""

from __future__ import annotations

import logging

import numpy as np

from src.errors import DomainError
from src.schemas.boltzmann import FiberKind, FiberOperator, GibbsState, RateKernel, SymmetrizedGenerator
from src.schemas.torus import DispersionLaw, TorusGrid
from src.torus.dispersion import eval_dispersion

logger = logging.getLogger(__name__)


def as_tilt(kappa: np.ndarray | list[complex] | None, d: int) -> np.ndarray:
    if kappa is None:
        return np.zeros(d, dtype=complex)
    arr = np.asarray(kappa, dtype=complex).reshape(-1)
    if arr.size != d:
        raise DomainError(f"Tilt vector has {arr.size} components, expected {d}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("Tilt vector must be finite")
    return arr


def transport_term(kernel: RateKernel, kappa: np.ndarray) -> np.ndarray:
    """(κ, ∇ε)(k_i), bilinear in complex κ."""
    return kernel.dispersion.gradient @ kappa  # type: ignore[no-any-return]


def build_M(kernel: RateKernel, kappa: np.ndarray | list[complex] | None = None) -> FiberOperator:
    """Assemble M^κ = w·rᵀ − diag(R) + i·diag((κ,∇ε)).

    Args:
        kernel: Rate kernel on the grid.
        kappa: Complex d-vector; None means κ = 0.
    """
    grid = kernel.grid
    tilt = as_tilt(kappa, grid.d)
    matrix = grid.weight * kernel.rates.T.astype(complex)
    matrix[np.diag_indices_from(matrix)] += 1j * transport_term(kernel, tilt) - kernel.total_rate
    matrix.setflags(write=False)
    return FiberOperator(
        grid=grid,
        kind=FiberKind.BOLTZMANN,
        matrix=matrix,
        kappa=tilt,
        energy=kernel.dispersion.energy,
        beta=kernel.spec.beta,
    )


def gibbs_from_energy(energy: np.ndarray, weight: float, beta: float) -> GibbsState:
    if beta < 0:
        raise DomainError(f"Inverse temperature must be nonnegative, got {beta}")
    boltzmann = np.exp(-beta * (energy - energy.min()))
    values = boltzmann / (weight * boltzmann.sum())
    values.setflags(write=False)
    return GibbsState(values=values, beta=beta)


def gibbs_state(grid: TorusGrid, law: DispersionLaw, beta: float) -> GibbsState:
    """ζ(k_i) = e^{−βε(k_i)} / (w Σ_j e^{−βε(k_j)})."""
    return gibbs_from_energy(eval_dispersion(grid, law).energy, grid.weight, beta)


def symmetrize(m0: FiberOperator) -> SymmetrizedGenerator:
    """Conjugate M⁰ by W = diag e^{βε/2}: M̃ = W M⁰ W^{−1}, ζ̃ = Wζ ∝ e^{−βε/2}.

    M̃_ij = w·ψ(ε_i − ε_j)·e^{β(ε_i−ε_j)/2}, symmetric by KMS, and M̃ζ̃ = 0.

    Raises:
        DomainError: operator carries a nonzero tilt.
    """
    if m0.kind != FiberKind.BOLTZMANN or np.any(m0.kappa != 0):
        raise DomainError("symmetrize needs the untilted generator M^0")

    shifted = m0.energy - m0.energy.min()
    half = 0.5 * m0.beta * shifted
    conjugation = np.exp(half)
    matrix = np.real(m0.matrix) * np.exp(half[:, None] - half[None, :])

    weight = m0.grid.weight
    gibbs = gibbs_from_energy(m0.energy, weight, m0.beta)
    zeta_tilde = conjugation * gibbs.values
    for arr in (matrix, zeta_tilde, conjugation):
        arr.setflags(write=False)
    return SymmetrizedGenerator(matrix=matrix, zeta_tilde=zeta_tilde, conjugation=conjugation)


def stationary_projector(grid: TorusGrid, gibbs: GibbsState) -> np.ndarray:
    """Rank-one projector P⁰θ = ⟨1, θ⟩ ζ as a matrix."""
    return grid.weight * np.outer(gibbs.values, np.ones(grid.size))  # type: ignore[no-any-return]


def kinetic_drift(kernel: RateKernel, gibbs: GibbsState) -> np.ndarray:
    """v_dr = ⟨∇ε, ζ⟩; vanishes for inversion-symmetric laws."""
    return kernel.grid.weight * (kernel.dispersion.gradient.T @ gibbs.values)  # type: ignore[no-any-return]


def first_order_residual(kernel: RateKernel, gibbs: GibbsState) -> np.ndarray:
    """‖P⁰ (∂_jε·) P⁰‖₂ per axis."""
    projector = stationary_projector(kernel.grid, gibbs)
    out = np.empty(kernel.grid.d)
    for axis in range(kernel.grid.d):
        sandwich = projector @ (kernel.dispersion.gradient[:, axis, None] * projector)
        out[axis] = np.linalg.norm(sandwich, 2)
    return out
