"""Dispersion laws ε(k) = Σ_n a_n cos(n·k) on the d-torus.

Two evaluation paths:
- `eval_dispersion` on a TorusGrid uses integer phase tables, so ε(−k) = ε(k) and
  ∇ε(−k) = −∇ε(k) hold bit-exactly on the grid.
- `dispersion_energy` / `dispersion_gradient` accept arbitrary real or complex
  momenta (analytic continuation into the strip).
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping

import numpy as np

from src.errors import ConfigurationError
from src.schemas.torus import DispersionKind, DispersionLaw, DispersionValues, TorusGrid
from src.torus.grid import MAX_DIMENSION

logger = logging.getLogger(__name__)

_DEGENERACY_TOL = 1e-12


def _canonical(index: tuple[int, ...]) -> tuple[int, ...]:
    """cos(n·k) = cos(−n·k): fold n and −n onto the representative with a positive lead."""
    for component in index:
        if component != 0:
            return index if component > 0 else tuple(-c for c in index)
    return index


def trigonometric_law(d: int, coefficients: Mapping[tuple[int, ...], float]) -> DispersionLaw:
    """Build a user-coefficient cosine series.

    Args:
        d: Torus dimension.
        coefficients: Map from integer multi-index n to the real coefficient a_n.
            Entries for n and −n are merged.

    Raises:
        ConfigurationError: Wrong index length, non-finite coefficient or empty series.
    """
    if not 1 <= d <= MAX_DIMENSION:
        raise ConfigurationError(f"Dimension must be in 1..{MAX_DIMENSION}, got {d}")
    if not coefficients:
        raise ConfigurationError("Dispersion law needs at least one coefficient")

    merged: dict[tuple[int, ...], float] = {}
    for index, value in coefficients.items():
        key = tuple(int(c) for c in index)
        if len(key) != d:
            raise ConfigurationError(f"Multi-index {index} does not have length {d}")
        if not math.isfinite(value):
            raise ConfigurationError(f"Coefficient for {index} is not finite: {value}")
        canonical = _canonical(key)
        merged[canonical] = merged.get(canonical, 0.0) + float(value)

    return DispersionLaw(kind=DispersionKind.TRIGONOMETRIC, d=d, coefficients=dict(sorted(merged.items())))


def cosine_law(d: int) -> DispersionLaw:
    """Nearest-neighbour law ε(k) = Σ_j (2 − 2 cos k_j)."""
    coefficients: dict[tuple[int, ...], float] = {(0,) * d: 2.0 * d}
    for axis in range(d):
        unit = tuple(1 if j == axis else 0 for j in range(d))
        coefficients[unit] = -2.0
    law = trigonometric_law(d, coefficients)
    return law.model_copy(update={"kind": DispersionKind.COSINE})


def _index_matrix(law: DispersionLaw) -> tuple[np.ndarray, np.ndarray]:
    indices = np.array(list(law.coefficients.keys()), dtype=np.int64).reshape(-1, law.d)
    amplitudes = np.array(list(law.coefficients.values()), dtype=float)
    return indices, amplitudes


def dispersion_energy(law: DispersionLaw, k: np.ndarray) -> np.ndarray:
    """ε at momenta k of shape (..., d); complex k continues ε analytically."""
    indices, amplitudes = _index_matrix(law)
    phase = np.asarray(k) @ indices.T  # (..., n_terms)
    return np.cos(phase) @ amplitudes  # type: ignore[no-any-return]


def dispersion_gradient(law: DispersionLaw, k: np.ndarray) -> np.ndarray:
    """∇ε at momenta k of shape (..., d), returned with shape (..., d)."""
    indices, amplitudes = _index_matrix(law)
    phase = np.asarray(k) @ indices.T
    return -(np.sin(phase) * amplitudes) @ indices  # type: ignore[no-any-return]


def eval_dispersion(grid: TorusGrid, law: DispersionLaw) -> DispersionValues:
    """Sample ε and ∇ε on the grid with exact negation symmetry.

    The phase n·k = 2π·(n·offset)/N is reduced to an integer index modulo N, and the
    sine/cosine tables are symmetrized under j ↦ −j, so the values at k and −k are
    computed from identical floating-point numbers.
    """
    if law.d != grid.d:
        raise ConfigurationError(f"Dispersion law has dimension {law.d}, grid has {grid.d}")

    n = grid.n
    angles = 2.0 * np.pi * np.arange(n) / n
    flipped = (-np.arange(n)) % n
    cos_table = np.cos(angles)
    sin_table = np.sin(angles)
    cos_table = 0.5 * (cos_table + cos_table[flipped])
    sin_table = 0.5 * (sin_table - sin_table[flipped])

    energy = np.zeros(grid.size)
    gradient = np.zeros((grid.size, grid.d))
    for index, amplitude in law.coefficients.items():
        phase_index = (grid.offsets @ np.array(index, dtype=np.int64)) % n
        energy += amplitude * cos_table[phase_index]
        gradient -= amplitude * np.outer(sin_table[phase_index], np.array(index, dtype=float))

    energy.setflags(write=False)
    gradient.setflags(write=False)
    return DispersionValues(energy=energy, gradient=gradient)


def is_nondegenerate(values: DispersionValues) -> bool:
    """True iff (υ, ∇ε) is not identically zero on the grid for every unit vector υ.

    Equivalent to positive definiteness of the Gram matrix Σ_k ∇ε ∇εᵀ.
    """
    gram = values.gradient.T @ values.gradient
    eigenvalues = np.linalg.eigvalsh(gram)
    scale = max(float(np.max(np.abs(eigenvalues))), 1.0)
    nondegenerate = bool(eigenvalues[0] > _DEGENERACY_TOL * scale)
    if not nondegenerate:
        logger.warning(
            "Dispersion gradient is degenerate along some direction (min Gram eigenvalue %.3e)", eigenvalues[0]
        )
    return nondegenerate
