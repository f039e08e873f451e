"""Diffusion tensor D = −Hess f(0) by two deterministic routes, plus the exact stationary VACF.

Hessian route: central differences of the leading eigenvalue of W M^κ W^{−1} = M̃ + i(κ,∇ε)
(same spectrum as M^κ, better conditioned), Richardson-extrapolated over two steps.

Resolvent route: with ẑ the L²-normalized ζ̃ and u_j solving M̃u_j = (∂_jε)ẑ on ẑ^⊥,
    D_ij = −2 ⟨(∂_iε)ẑ, u_j⟩,
the constant fixed by matching D = −Hess f.
"""

from __future__ import annotations

import itertools
import logging

import numpy as np
import scipy.linalg

from src.boltzmann.fiber import build_M, symmetrize
from src.errors import SymmetryViolationError
from src.schemas.boltzmann import RateKernel, SymmetrizedGenerator
from src.schemas.spectral import DiffusionRoute, DiffusionTensor

logger = logging.getLogger(__name__)

_ORTHOGONALITY_TOL = 1e-10
_RICHARDSON_RTOL = 1e-4
_EPS = np.finfo(float).eps


def _symmetric_generator(kernel: RateKernel) -> tuple[SymmetrizedGenerator, np.ndarray]:
    sym = symmetrize(build_M(kernel))
    return sym, 0.5 * (sym.matrix + sym.matrix.T)


def _tilted_eigenvalue(matrix: np.ndarray, gradient: np.ndarray, kappa: np.ndarray) -> float:
    """Re of the leading eigenvalue of M̃ + i·diag(κ·∇ε) for real κ."""
    tilted = matrix.astype(complex)
    tilted[np.diag_indices_from(tilted)] += 1j * (gradient @ kappa)
    return float(np.max(scipy.linalg.eigvals(tilted).real))


def _hessian_at(matrix: np.ndarray, gradient: np.ndarray, step: float) -> np.ndarray:
    d = gradient.shape[1]
    eye = np.eye(d)
    f0 = _tilted_eigenvalue(matrix, gradient, np.zeros(d))
    hess = np.empty((d, d))
    for i in range(d):
        plus = _tilted_eigenvalue(matrix, gradient, step * eye[i])
        minus = _tilted_eigenvalue(matrix, gradient, -step * eye[i])
        hess[i, i] = (plus - 2.0 * f0 + minus) / step**2
    for i, j in itertools.combinations(range(d), 2):
        corners = [
            _tilted_eigenvalue(matrix, gradient, step * (si * eye[i] + sj * eye[j]))
            for si, sj in ((1, 1), (1, -1), (-1, 1), (-1, -1))
        ]
        hess[i, j] = hess[j, i] = (corners[0] - corners[1] - corners[2] + corners[3]) / (4.0 * step**2)
    return hess


def diffusion_hessian(kernel: RateKernel, step: float = 1e-3) -> DiffusionTensor:
    """D_ij = −∂_i∂_j f(0) by central differences at step and step/2, Richardson-extrapolated.

    Logs a warning with both estimates when they disagree beyond 1e−4 relative.
    """
    _, matrix = _symmetric_generator(kernel)
    gradient = kernel.dispersion.gradient

    coarse = -_hessian_at(matrix, gradient, step)
    fine = -_hessian_at(matrix, gradient, 0.5 * step)
    D = (4.0 * fine - coarse) / 3.0
    D = 0.5 * (D + D.T)
    uncertainty = np.abs(fine - coarse) / 3.0

    scale = max(float(np.max(np.abs(D))), _EPS)
    converged = bool(np.max(np.abs(fine - coarse)) <= _RICHARDSON_RTOL * scale)
    if not converged:
        logger.warning(
            "Hessian extrapolation not converged at step %.3g: D(h)=%s, D(h/2)=%s",
            step,
            coarse.tolist(),
            fine.tolist(),
        )
    logger.info("Hessian diffusion tensor %s", D.tolist())
    return DiffusionTensor(D=D, route=DiffusionRoute.HESSIAN, uncertainty=uncertainty, converged=converged)


def _normalized_zeta(sym: SymmetrizedGenerator, weight: float) -> np.ndarray:
    zeta = sym.zeta_tilde
    return zeta / np.sqrt(weight * (zeta @ zeta))  # type: ignore[no-any-return]


def resolvent_rhs(kernel: RateKernel) -> tuple[np.ndarray, np.ndarray]:
    """Return (ẑ, rhs) with rhs[:, j] = (∂_jε)ẑ."""
    sym, _ = _symmetric_generator(kernel)
    zeta_hat = _normalized_zeta(sym, kernel.grid.weight)
    return zeta_hat, kernel.dispersion.gradient * zeta_hat[:, None]


def diffusion_resolvent(kernel: RateKernel) -> DiffusionTensor:
    """D via the reduced inverse of M̃ on the ζ̃-orthogonal complement.

    Raises:
        SymmetryViolationError: ⟨ẑ, (∂_jε)ẑ⟩ exceeds 1e−10.
    """
    weight = kernel.grid.weight
    sym, matrix = _symmetric_generator(kernel)
    zeta_hat = _normalized_zeta(sym, weight)
    rhs = kernel.dispersion.gradient * zeta_hat[:, None]

    overlap = weight * (zeta_hat @ rhs)
    if np.max(np.abs(overlap)) > _ORTHOGONALITY_TOL:
        raise SymmetryViolationError(f"Resolvent right-hand side not orthogonal to the Gibbs mode: {overlap.tolist()}")

    # −M̃ ≥ 0 with kernel ẑ; adding the ẑ-projector fills the kernel without touching ẑ^⊥
    shift = float(np.mean(np.abs(np.diag(matrix))))
    positive = -matrix + shift * weight * np.outer(zeta_hat, zeta_hat)
    factor = scipy.linalg.cho_factor(positive)
    solutions = scipy.linalg.cho_solve(factor, rhs)  # = −u_j

    D = 2.0 * weight * (rhs.T @ solutions)
    D = 0.5 * (D + D.T)
    condition = float(np.linalg.cond(positive))
    uncertainty = np.abs(D) * condition * _EPS
    logger.info("Resolvent diffusion tensor %s (cond %.3g)", D.tolist(), condition)
    return DiffusionTensor(D=D, route=DiffusionRoute.RESOLVENT, uncertainty=uncertainty)


def _vacf_modes(kernel: RateKernel) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Eigenvalues λ_m of M̃ with observable and source overlaps.

    e^{tM⁰} = W^{−1} e^{tM̃} W, so C_ij(t) = w Σ_m a_mi e^{tλ_m} b_mj with
    a = Vᵀ(W^{−1}∂ε) and b = Vᵀ(W ∂ε ζ) = Vᵀ(∂ε ζ̃).
    """
    sym, matrix = _symmetric_generator(kernel)
    eigenvalues, vectors = scipy.linalg.eigh(matrix)
    gradient = kernel.dispersion.gradient
    observe = vectors.T @ (gradient / sym.conjugation[:, None])
    source = vectors.T @ (gradient * sym.zeta_tilde[:, None])
    return eigenvalues, observe, source


def stationary_vacf(kernel: RateKernel, times: np.ndarray) -> np.ndarray:
    """Exact C_ij(t) = ⟨∂_iε, e^{tM⁰}(∂_jε ζ)⟩ for t ≥ 0, shape (len(times), d, d)."""
    eigenvalues, observe, source = _vacf_modes(kernel)
    decay = np.exp(np.outer(np.asarray(times, dtype=float), eigenvalues))  # (t, modes)
    return kernel.grid.weight * np.einsum("mi,tm,mj->tij", observe, decay, source)  # type: ignore[no-any-return]


def diffusion_green_kubo_exact(kernel: RateKernel) -> np.ndarray:
    """∫_R C(t) dt from the spectral representation of the stationary VACF."""
    eigenvalues, observe, source = _vacf_modes(kernel)
    # the stationary mode carries the squared drift, zero by inversion symmetry
    active = eigenvalues < eigenvalues.max()
    half = kernel.grid.weight * np.einsum(
        "mi,m,mj->ij", observe[active], -1.0 / eigenvalues[active], source[active]
    )
    return half + half.T  # type: ignore[no-any-return]
