"""Tests for the rate kernel, the fiber generator M^κ and the one-loop kernel."""

from __future__ import annotations

import numpy as np
import pytest

from src.boltzmann.fiber import (
    build_M,
    first_order_residual,
    gibbs_state,
    kinetic_drift,
    stationary_projector,
    symmetrize,
)
from src.boltzmann.kernel import detailed_balance_residual, rate_kernel, scale_kernel
from src.boltzmann.one_loop import build_L_fiber
from src.errors import ConfigurationError, DomainError, StripViolationError
from src.reservoir.correlation import certified_strip
from src.schemas.boltzmann import FiberKind, RateKernel
from src.schemas.reservoir import SpectralDensity
from src.torus.dispersion import cosine_law
from src.torus.grid import build_grid

# ── Rate kernel ──────────────────────────────────────────────────────


class TestRateKernel:
    def test_detailed_balance(self, desk_kernel: RateKernel) -> None:
        assert detailed_balance_residual(desk_kernel) <= 1e-13

    def test_detailed_balance_in_two_dimensions(self, planar_kernel: RateKernel) -> None:
        assert detailed_balance_residual(planar_kernel) <= 1e-13

    def test_total_rate_is_weighted_row_sum(self, small_kernel: RateKernel) -> None:
        expected = small_kernel.grid.weight * small_kernel.rates.sum(axis=1)
        np.testing.assert_allclose(small_kernel.total_rate, expected)
        assert np.all(small_kernel.total_rate > 0)

    def test_dimension_mismatch_rejected(self, default_spec: SpectralDensity) -> None:
        with pytest.raises(ConfigurationError):
            rate_kernel(build_grid(2, 4), cosine_law(1), default_spec)

    def test_scaling_multiplies_rates(self, small_kernel: RateKernel) -> None:
        doubled = scale_kernel(small_kernel, 2.0)
        np.testing.assert_allclose(doubled.rates, 2.0 * small_kernel.rates)
        np.testing.assert_allclose(doubled.total_rate, 2.0 * small_kernel.total_rate)
        assert doubled.scale == 2.0

    def test_zero_scale_freezes(self, small_kernel: RateKernel) -> None:
        frozen = scale_kernel(small_kernel, 0.0)
        assert np.all(build_M(frozen).matrix == 0)

    def test_negative_scale_rejected(self, small_kernel: RateKernel) -> None:
        with pytest.raises(DomainError):
            scale_kernel(small_kernel, -1.0)


# ── Gibbs state and M⁰ ───────────────────────────────────────────────


class TestGenerator:
    def test_gibbs_state_normalized(self, desk_kernel: RateKernel) -> None:
        grid = desk_kernel.grid
        zeta = gibbs_state(grid, desk_kernel.law, 1.0).values
        assert grid.weight * zeta.sum() == pytest.approx(1.0, rel=1e-14)
        assert np.all(zeta > 0)

    def test_infinite_temperature_is_uniform(self, small_kernel: RateKernel) -> None:
        grid = small_kernel.grid
        zeta = gibbs_state(grid, small_kernel.law, 0.0).values
        np.testing.assert_allclose(zeta, 1.0 / (2 * np.pi))

    def test_negative_beta_rejected(self, small_kernel: RateKernel) -> None:
        with pytest.raises(DomainError):
            gibbs_state(small_kernel.grid, small_kernel.law, -1.0)

    def test_gibbs_state_is_stationary(self, desk_kernel: RateKernel) -> None:
        zeta = gibbs_state(desk_kernel.grid, desk_kernel.law, 1.0).values
        residual = build_M(desk_kernel).matrix @ zeta
        assert np.linalg.norm(residual) <= 1e-10 * np.linalg.norm(zeta)

    def test_mass_conservation(self, desk_kernel: RateKernel) -> None:
        rng = np.random.default_rng(0)
        matrix = build_M(desk_kernel).matrix
        weight = desk_kernel.grid.weight
        for theta in rng.standard_normal((100, desk_kernel.grid.size)):
            assert abs(weight * (matrix @ theta).sum()) <= 1e-12 * np.linalg.norm(theta)

    def test_tilt_only_changes_diagonal(self, small_kernel: RateKernel) -> None:
        kappa = np.array([0.3 - 0.1j])
        untilted = build_M(small_kernel).matrix
        tilted = build_M(small_kernel, kappa).matrix
        difference = tilted - untilted
        np.testing.assert_allclose(difference - np.diag(np.diag(difference)), 0.0, atol=1e-14)
        np.testing.assert_allclose(np.diag(difference), 1j * small_kernel.dispersion.gradient @ kappa, atol=1e-14)

    def test_wrong_tilt_length_rejected(self, small_kernel: RateKernel) -> None:
        with pytest.raises(DomainError):
            build_M(small_kernel, [0.1, 0.2])

    def test_kind_and_tilt_recorded(self, small_kernel: RateKernel) -> None:
        operator = build_M(small_kernel, [0.2])
        assert operator.kind == FiberKind.BOLTZMANN
        assert operator.kappa[0] == 0.2


class TestSymmetrize:
    def test_symmetric(self, desk_kernel: RateKernel) -> None:
        matrix = symmetrize(build_M(desk_kernel)).matrix
        assert np.linalg.norm(matrix - matrix.T) <= 1e-12 * np.linalg.norm(matrix)

    def test_symmetric_in_two_dimensions(self, planar_kernel: RateKernel) -> None:
        matrix = symmetrize(build_M(planar_kernel)).matrix
        assert np.linalg.norm(matrix - matrix.T) <= 1e-12 * np.linalg.norm(matrix)

    def test_spectrum_nonpositive_with_simple_top(self, desk_kernel: RateKernel) -> None:
        matrix = symmetrize(build_M(desk_kernel)).matrix
        eigenvalues = np.linalg.eigvalsh(0.5 * (matrix + matrix.T))
        scale = np.max(np.abs(eigenvalues))
        assert abs(eigenvalues[-1]) <= 1e-12 * scale
        assert eigenvalues[-2] < -1e-6

    def test_conjugated_gibbs_is_null_vector(self, desk_kernel: RateKernel) -> None:
        sym = symmetrize(build_M(desk_kernel))
        residual = sym.matrix @ sym.zeta_tilde
        assert np.linalg.norm(residual) <= 1e-10 * np.linalg.norm(sym.zeta_tilde)

    def test_tilted_operator_rejected(self, small_kernel: RateKernel) -> None:
        with pytest.raises(DomainError):
            symmetrize(build_M(small_kernel, [0.1]))


class TestFirstOrder:
    def test_projector_is_idempotent(self, small_kernel: RateKernel) -> None:
        gibbs = gibbs_state(small_kernel.grid, small_kernel.law, 1.0)
        projector = stationary_projector(small_kernel.grid, gibbs)
        np.testing.assert_allclose(projector @ projector, projector, atol=1e-14)

    def test_drift_vanishes(self, planar_kernel: RateKernel) -> None:
        gibbs = gibbs_state(planar_kernel.grid, planar_kernel.law, 1.0)
        np.testing.assert_allclose(kinetic_drift(planar_kernel, gibbs), 0.0, atol=1e-14)

    def test_first_order_term_vanishes(self, desk_kernel: RateKernel) -> None:
        gibbs = gibbs_state(desk_kernel.grid, desk_kernel.law, 1.0)
        assert np.all(first_order_residual(desk_kernel, gibbs) <= 1e-12)


# ── One-loop kernel ──────────────────────────────────────────────────


class TestOneLoop:
    def test_reduces_to_boltzmann_generator(self, desk_kernel: RateKernel) -> None:
        operator = build_L_fiber(desk_kernel.grid, desk_kernel.law, desk_kernel.spec, z=0.0)
        assert operator.kind == FiberKind.ONE_LOOP
        difference = operator.matrix - build_M(desk_kernel).matrix
        assert np.linalg.norm(difference, 2) <= 1e-8

    def test_constant_is_left_null_vector_for_real_z(self, small_kernel: RateKernel) -> None:
        operator = build_L_fiber(small_kernel.grid, small_kernel.law, small_kernel.spec, z=0.5)
        column_sums = operator.matrix.sum(axis=0)
        assert np.max(np.abs(column_sums)) <= 1e-10

    def test_momentum_transfer_recorded(self, small_kernel: RateKernel) -> None:
        operator = build_L_fiber(small_kernel.grid, small_kernel.law, small_kernel.spec, z=0.2, p=[0.4])
        assert operator.p is not None
        assert operator.p[0] == pytest.approx(0.4)
        assert np.all(np.isfinite(operator.matrix))

    def test_z_outside_strip_rejected(self, small_kernel: RateKernel) -> None:
        strip = certified_strip(small_kernel.spec)
        with pytest.raises(StripViolationError):
            build_L_fiber(small_kernel.grid, small_kernel.law, small_kernel.spec, z=-(strip + 1.0))
