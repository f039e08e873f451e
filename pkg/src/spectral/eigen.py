"""Leading eigenvalue f(κ), its eigenvectors and the spectral gap of a fiber operator."""

from __future__ import annotations

import logging

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import eigs

from src.boltzmann.fiber import build_M, symmetrize
from src.errors import AmbiguousEigenvalueError
from src.schemas.boltzmann import FiberOperator, RateKernel
from src.schemas.spectral import SpectralData

logger = logging.getLogger(__name__)

DENSE_LIMIT = 4096
_ARNOLDI_COUNT = 6
_GAP_TOL = 1e-9


def _dense_spectrum(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    values, left, right = scipy.linalg.eig(matrix, left=True, right=True)
    return values, left, right


def _arnoldi_spectrum(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    count = min(_ARNOLDI_COUNT, matrix.shape[0] - 2)
    values, right = eigs(matrix, k=count, which="LR")
    left_values, left = eigs(matrix.T, k=count, which="LR")
    # pair left vectors with right ones by eigenvalue
    order = [int(np.argmin(np.abs(left_values - v))) for v in values]
    return values, np.conj(left[:, order]), right


def leading_eigen(operator: FiberOperator, *, gap_tol: float = _GAP_TOL) -> SpectralData:
    """Select the eigenvalue of maximal real part and bi-normalize its eigenvectors.

    Raises:
        AmbiguousEigenvalueError: the runner-up is within gap_tol in real part.
    """
    matrix = operator.matrix
    n = matrix.shape[0]
    weight = operator.grid.weight
    if n <= DENSE_LIMIT:
        values, left, right = _dense_spectrum(matrix)
    else:
        logger.info("Using Arnoldi iteration for %d states", n)
        values, left, right = _arnoldi_spectrum(matrix)

    order = np.argsort(-values.real)
    lead, second = order[0], order[1]
    f = complex(values[lead])
    runner_up = complex(values[second])
    gap = float(f.real - runner_up.real)
    if gap < gap_tol * max(1.0, abs(f)):
        raise AmbiguousEigenvalueError("Leading eigenvalue is not separated", (f, runner_up))

    zeta = right[:, lead]
    zeta = zeta / (weight * zeta.sum())
    # scipy returns vl with vl^H M = f vl^H; the bilinear left vector is its conjugate
    ell = np.conj(left[:, lead])
    ell = ell / (weight * (ell @ zeta))

    projector = weight * np.outer(zeta, ell) if n <= DENSE_LIMIT else None
    logger.debug("Leading eigenvalue %s, gap %.6g", f, gap)
    return SpectralData(
        kappa=operator.kappa,
        f=f,
        right=zeta,
        left=ell,
        projector=projector,
        gap=gap,
        runner_up=runner_up,
    )


def spectral_gap(kernel: RateKernel) -> float:
    """g_kin: distance from 0 to the rest of the (real) spectrum of M⁰."""
    sym = symmetrize(build_M(kernel))
    matrix = 0.5 * (sym.matrix + sym.matrix.T)
    if matrix.shape[0] <= DENSE_LIMIT:
        eigenvalues = scipy.linalg.eigvalsh(matrix)
    else:
        eigenvalues = np.sort(eigs(matrix, k=_ARNOLDI_COUNT, which="LR", return_eigenvectors=False).real)
    return float(eigenvalues[-1] - eigenvalues[-2])


def certified_radius(kernel: RateKernel, gap: float | None = None) -> float:
    """κ radius gap/(2·max|∇ε|) within which the leading eigenvalue stays isolated."""
    gap = spectral_gap(kernel) if gap is None else gap
    speed = float(np.max(np.linalg.norm(kernel.dispersion.gradient, axis=1)))
    if speed == 0.0:
        return float("inf")
    return gap / (2.0 * speed)


def leading_eigenvalue(kernel: RateKernel, kappa: np.ndarray) -> complex:
    """f(κ) for a tilt given as a d-vector."""
    return leading_eigen(build_M(kernel, kappa)).f


def cauchy_mean(kernel: RateKernel, radius: float, direction: np.ndarray, n_points: int = 32) -> complex:
    """Mean of f(r·e^{iθ}·υ) over a circle; equals f(0) when f is analytic inside."""
    unit = np.asarray(direction, dtype=complex)
    unit = unit / np.linalg.norm(unit)
    angles = 2.0 * np.pi * np.arange(n_points) / n_points
    samples = [leading_eigenvalue(kernel, radius * np.exp(1j * a) * unit) for a in angles]
    return complex(np.mean(samples))
