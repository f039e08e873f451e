"""Uniform discretization of the momentum torus.

Points are k = 2π·(m − N/2)/N per axis, so both k = 0 and k = −π ≡ π are grid
points and the grid is closed under negation modulo 2π.
"""

from __future__ import annotations

import numpy as np

from src.errors import ConfigurationError
from src.schemas.torus import TorusGrid

MAX_DIMENSION = 3


def build_grid(d: int, n: int) -> TorusGrid:
    """Build the product grid with n points per axis in dimension d.

    Raises:
        ConfigurationError: d outside 1..3, n odd or n < 4.
    """
    if not 1 <= d <= MAX_DIMENSION:
        raise ConfigurationError(f"Dimension must be in 1..{MAX_DIMENSION}, got {d}")
    if n < 4 or n % 2:
        raise ConfigurationError(f"Points per axis must be even and >= 4, got {n}")

    half = n // 2
    axes = np.indices((n,) * d).reshape(d, -1).T  # C order, (n**d, d)
    offsets = axes - half
    points = 2.0 * np.pi * offsets / n

    negated_axes = (-offsets + half) % n
    negation = np.ravel_multi_index(tuple(negated_axes.T), (n,) * d)

    for arr in (offsets, points, negation):
        arr.setflags(write=False)

    return TorusGrid(
        d=d,
        n=n,
        points=points,
        weight=float((2.0 * np.pi / n) ** d),
        offsets=offsets,
        negation=negation,
    )


def integrate(grid: TorusGrid, values: np.ndarray) -> complex | float:
    """Quadrature ⟨1, f⟩ = weight · Σ f(k_i) along the first axis."""
    return grid.weight * np.sum(values, axis=0)  # type: ignore[no-any-return]
