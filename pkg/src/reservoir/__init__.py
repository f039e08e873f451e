"""Reservoir spectral densities, correlation functions and half transforms."""

from src.reservoir.correlation import (
    certified_strip,
    certify_decay,
    correlation_function,
    half_transforms,
    psi_minus,
    psi_plus,
)
from src.reservoir.density import (
    check_kms,
    effective_density_from_form_factor,
    named_form_factor_density,
    ohmic_gaussian_density,
    spectral_density,
    tabulated_density,
)

__all__ = [
    "spectral_density",
    "check_kms",
    "ohmic_gaussian_density",
    "tabulated_density",
    "effective_density_from_form_factor",
    "named_form_factor_density",
    "correlation_function",
    "certify_decay",
    "certified_strip",
    "half_transforms",
    "psi_plus",
    "psi_minus",
]
