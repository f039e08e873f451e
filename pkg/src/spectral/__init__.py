"""Spectral diffusion: leading eigenvalue and diffusion tensor of the fiber generator."""

from src.spectral.diffusion import (
    diffusion_green_kubo_exact,
    diffusion_hessian,
    diffusion_resolvent,
    stationary_vacf,
)
from src.spectral.eigen import (
    cauchy_mean,
    certified_radius,
    leading_eigen,
    leading_eigenvalue,
    spectral_gap,
)
from src.spectral.evolution import EvolutionMethod, clt_check, evolve_fiber

__all__ = [
    "leading_eigen",
    "leading_eigenvalue",
    "spectral_gap",
    "certified_radius",
    "cauchy_mean",
    "diffusion_hessian",
    "diffusion_resolvent",
    "stationary_vacf",
    "diffusion_green_kubo_exact",
    "evolve_fiber",
    "EvolutionMethod",
    "clt_check",
]
