"""Shared kernels at desk scale: d=1, cosine law, β=1, default density (c=1, Λ=4)."""

from __future__ import annotations

import pytest

from src.boltzmann.kernel import rate_kernel
from src.reservoir.density import ohmic_gaussian_density
from src.schemas.boltzmann import RateKernel
from src.schemas.reservoir import SpectralDensity
from src.torus.dispersion import cosine_law
from src.torus.grid import build_grid


@pytest.fixture(scope="session")
def default_spec() -> SpectralDensity:
    return ohmic_gaussian_density(beta=1.0)


@pytest.fixture(scope="session")
def desk_kernel(default_spec: SpectralDensity) -> RateKernel:
    return rate_kernel(build_grid(1, 64), cosine_law(1), default_spec)


@pytest.fixture(scope="session")
def small_kernel(default_spec: SpectralDensity) -> RateKernel:
    return rate_kernel(build_grid(1, 16), cosine_law(1), default_spec)


@pytest.fixture(scope="session")
def planar_kernel(default_spec: SpectralDensity) -> RateKernel:
    return rate_kernel(build_grid(2, 8), cosine_law(2), default_spec)
