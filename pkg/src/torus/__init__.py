"""Momentum torus: grid, dispersion law and analyticity constants."""

from src.torus.analyticity import analyticity_constants
from src.torus.dispersion import (
    cosine_law,
    dispersion_energy,
    dispersion_gradient,
    eval_dispersion,
    is_nondegenerate,
    trigonometric_law,
)
from src.torus.grid import build_grid, integrate

__all__ = [
    "build_grid",
    "integrate",
    "cosine_law",
    "trigonometric_law",
    "eval_dispersion",
    "dispersion_energy",
    "dispersion_gradient",
    "is_nondegenerate",
    "analyticity_constants",
]
