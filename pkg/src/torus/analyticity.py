"""Strip constants of the a-priori estimate.

c_ε(δ) = sup_k sup_{|Im κ| ≤ δ} |Im ε(k+κ)| is attained on the boundary |Im κ| = δ
(Im ε is harmonic), so it is estimated by sampling that boundary at two resolutions and
extrapolating once. b_d(γ) = Σ_{x ∈ Z^d} e^{−γ|x|} uses the Euclidean norm and a
truncated sum whose tail is bounded by a geometric series.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from src.errors import DomainError
from src.schemas.torus import AnalyticityConstants, DispersionLaw

logger = logging.getLogger(__name__)

_SAMPLES_PER_GRID_POINT = 64
_REFERENCE_N = 64
_MAX_BOUNDARY_POINTS = 2_000_000
_DIRECTIONS_2D = 64
_DIRECTIONS_3D = 128

_LATTICE_TOL = 1e-12
_MAX_LATTICE_POINTS = 20_000_000
_MAX_SINH_ARGUMENT = 700.0


def _boundary_directions(d: int) -> np.ndarray:
    """Unit vectors υ for Im κ = δυ."""
    if d == 1:
        return np.array([[1.0], [-1.0]])
    if d == 2:
        theta = 2.0 * np.pi * np.arange(_DIRECTIONS_2D) / _DIRECTIONS_2D
        return np.stack([np.cos(theta), np.sin(theta)], axis=1)
    # Fibonacci sphere
    i = np.arange(_DIRECTIONS_3D) + 0.5
    polar = np.arccos(1.0 - 2.0 * i / _DIRECTIONS_3D)
    azimuth = np.pi * (1.0 + math.sqrt(5.0)) * i
    return np.stack(
        [np.sin(polar) * np.cos(azimuth), np.sin(polar) * np.sin(azimuth), np.cos(polar)],
        axis=1,
    )


def _boundary_maximum(law: DispersionLaw, delta: float, per_axis: int) -> float:
    """max |Im ε(x + iδυ)| over a per_axis^d real mesh and all boundary directions.

    Im cos(n·x + i n·y) = −sin(n·x) sinh(n·y).
    """
    d = law.d
    indices = np.array(list(law.coefficients.keys()), dtype=float).reshape(-1, d)
    amplitudes = np.array(list(law.coefficients.values()), dtype=float)

    axis = -np.pi + 2.0 * np.pi * np.arange(per_axis) / per_axis
    mesh = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
    sin_phase = np.sin(mesh @ indices.T)  # (points, terms)

    best = 0.0
    for direction in _boundary_directions(d):
        weights = amplitudes * np.sinh(delta * (indices @ direction))
        best = max(best, float(np.max(np.abs(sin_phase @ weights))))
    return best


def _per_axis_samples(d: int) -> int:
    target = _SAMPLES_PER_GRID_POINT * _REFERENCE_N
    if d == 1:
        return target
    directions = len(_boundary_directions(d))
    per_axis = int((_MAX_BOUNDARY_POINTS / directions) ** (1.0 / d))
    # multiple of 4 keeps ±π/2 on the mesh
    return max(16, min(target, per_axis - per_axis % 4))


def _lattice_sum(d: int, gamma: float) -> tuple[float, float, int]:
    """Return (b_d, tail bound, truncation radius) for Σ_x e^{−γ|x|}.

    Points with |x|_∞ = s number at most 2d(2s+1)^{d−1} and satisfy |x| ≥ s, so the
    tail beyond radius R is bounded by Σ_{s>R} 2d(2s+1)^{d−1} e^{−γs}; successive terms
    shrink by at most q = ((2R+5)/(2R+3))^{d−1} e^{−γ}.
    """

    def shell(s: int) -> float:
        return 2.0 * d * (2.0 * s + 1.0) ** (d - 1) * math.exp(-gamma * s)

    radius = 1
    while True:
        ratio = ((2.0 * radius + 5.0) / (2.0 * radius + 3.0)) ** (d - 1) * math.exp(-gamma)
        if ratio < 1.0:
            tail = shell(radius + 1) / (1.0 - ratio)
            if tail < _LATTICE_TOL:
                break
        radius += 1
        if (2 * radius + 1) ** d > _MAX_LATTICE_POINTS:
            raise DomainError(f"b_d sum for gamma={gamma} needs more than {_MAX_LATTICE_POINTS} lattice points")

    axis = np.arange(-radius, radius + 1, dtype=float)
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    norms = np.sqrt(sum(component**2 for component in mesh))
    total = float(np.sum(np.exp(-gamma * norms)))
    return total, tail, radius


def analyticity_constants(law: DispersionLaw, delta: float, gamma: float) -> AnalyticityConstants:
    """Compute c_ε(δ) and b_d(γ).

    Args:
        law: Dispersion law (entire, so every finite δ is inside the strip).
        delta: Strip half-width δ > 0.
        gamma: Decay parameter γ > 0 of the lattice sum.

    Returns:
        AnalyticityConstants with the Richardson-corrected c_ε, the raw sample maximum
        and their ratio as safety factor.

    Raises:
        DomainError: δ or γ not positive and finite, or δ beyond the representable strip.
    """
    if not (math.isfinite(delta) and delta > 0):
        raise DomainError(f"Strip half-width must be positive and finite, got {delta}")
    if not (math.isfinite(gamma) and gamma > 0):
        raise DomainError(f"Decay parameter must be positive and finite, got {gamma}")
    max_frequency = max(math.sqrt(sum(c * c for c in index)) for index in law.coefficients)
    if delta * max_frequency > _MAX_SINH_ARGUMENT:
        raise DomainError(f"Strip half-width {delta} overflows the continuation of the dispersion law")

    per_axis = _per_axis_samples(law.d)
    coarse = _boundary_maximum(law, delta, per_axis // 2)
    fine = _boundary_maximum(law, delta, per_axis)
    c_eps = fine + (fine - coarse) / 3.0
    c_eps = max(c_eps, fine)

    b_d, tail, radius = _lattice_sum(law.d, gamma)
    logger.debug(
        "c_eps(%.3g)=%.12g (sample %.12g); b_%d(%.3g)=%.12g, R=%d", delta, c_eps, fine, law.d, gamma, b_d, radius
    )

    return AnalyticityConstants(
        delta=delta,
        gamma=gamma,
        c_eps=c_eps,
        c_eps_sample=fine,
        safety_factor=c_eps / fine if fine > 0 else 1.0,
        b_d=b_d,
        b_d_tail_bound=tail,
        b_d_radius=radius,
    )
