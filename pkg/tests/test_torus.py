"""Tests for the torus grid, dispersion laws and analyticity constants."""

from __future__ import annotations

import math

import numpy as np
import pytest

from src.errors import ConfigurationError, DomainError
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

# ── Grid ─────────────────────────────────────────────────────────────


class TestBuildGrid:
    def test_four_points_in_one_dimension(self) -> None:
        grid = build_grid(1, 4)
        np.testing.assert_allclose(grid.points[:, 0], [-math.pi, -math.pi / 2, 0.0, math.pi / 2])
        assert grid.weight == pytest.approx(math.pi / 2)

    def test_product_grid(self) -> None:
        grid = build_grid(2, 4)
        assert grid.size == 16
        assert grid.weight == pytest.approx((math.pi / 2) ** 2)

    def test_weight_times_size_is_torus_volume(self) -> None:
        for d, n in [(1, 10), (2, 6), (3, 4)]:
            grid = build_grid(d, n)
            assert grid.weight * grid.size == pytest.approx((2 * math.pi) ** d)

    def test_odd_n_rejected(self) -> None:
        with pytest.raises(ConfigurationError):
            build_grid(1, 3)

    def test_too_few_points_rejected(self) -> None:
        with pytest.raises(ConfigurationError):
            build_grid(1, 2)

    def test_dimension_four_rejected(self) -> None:
        with pytest.raises(ConfigurationError):
            build_grid(4, 4)

    def test_closed_under_negation(self) -> None:
        grid = build_grid(2, 6)
        total = grid.points[grid.negation] + grid.points
        # −k ≡ k' mod 2π
        wrapped = np.mod(total + math.pi, 2 * math.pi) - math.pi
        np.testing.assert_allclose(wrapped, 0.0, atol=1e-12)

    def test_zero_and_pi_on_grid(self) -> None:
        points = build_grid(1, 8).points[:, 0]
        assert 0.0 in points
        assert -math.pi in points

    def test_arrays_are_read_only(self) -> None:
        grid = build_grid(1, 8)
        with pytest.raises(ValueError):
            grid.points[0, 0] = 1.0


class TestQuadrature:
    def test_exact_for_trigonometric_polynomials_1d(self) -> None:
        rng = np.random.default_rng(1)
        grid = build_grid(1, 8)
        degrees = np.arange(-7, 8)
        coefficients = rng.standard_normal(degrees.size) + 1j * rng.standard_normal(degrees.size)
        values = np.exp(1j * np.outer(grid.points[:, 0], degrees)) @ coefficients
        exact = 2 * math.pi * coefficients[degrees == 0][0]
        assert abs(integrate(grid, values) - exact) <= 1e-12 * abs(exact)

    def test_exact_for_trigonometric_polynomials_2d(self) -> None:
        rng = np.random.default_rng(2)
        grid = build_grid(2, 6)
        indices = np.array([(a, b) for a in range(-5, 6) for b in range(-5, 6)])
        coefficients = rng.standard_normal(len(indices))
        values = np.cos(grid.points @ indices.T) @ coefficients
        exact = (2 * math.pi) ** 2 * coefficients[np.all(indices == 0, axis=1)][0]
        assert integrate(grid, values) == pytest.approx(exact, rel=1e-12)


# ── Dispersion ───────────────────────────────────────────────────────


class TestDispersion:
    def test_cosine_values_at_special_points(self) -> None:
        grid = build_grid(1, 8)
        values = eval_dispersion(grid, cosine_law(1))
        k = grid.points[:, 0]
        zero = int(np.argmin(np.abs(k)))
        half_pi = int(np.argmin(np.abs(k - math.pi / 2)))
        minus_pi = int(np.argmin(np.abs(k + math.pi)))
        assert values.energy[zero] == pytest.approx(0.0, abs=1e-15)
        assert values.gradient[zero, 0] == pytest.approx(0.0, abs=1e-15)
        assert values.energy[minus_pi] == pytest.approx(4.0)  # 2 − 2cos π
        assert values.gradient[half_pi, 0] == pytest.approx(2.0)  # 2 sin(π/2)

    def test_cosine_energy_nonnegative(self) -> None:
        values = eval_dispersion(build_grid(3, 6), cosine_law(3))
        assert np.all(values.energy >= -1e-15)

    def test_exact_parity_on_grid(self) -> None:
        grid = build_grid(2, 6)
        law = trigonometric_law(2, {(0, 0): 1.0, (1, 0): -0.7, (1, 1): 0.3, (2, -1): 0.11})
        values = eval_dispersion(grid, law)
        assert np.array_equal(values.energy[grid.negation], values.energy)
        assert np.array_equal(values.gradient[grid.negation], -values.gradient)

    def test_grid_and_pointwise_evaluation_agree(self) -> None:
        grid = build_grid(2, 8)
        law = trigonometric_law(2, {(1, 0): -1.0, (1, 2): 0.25})
        values = eval_dispersion(grid, law)
        np.testing.assert_allclose(values.energy, dispersion_energy(law, grid.points), atol=1e-13)
        np.testing.assert_allclose(values.gradient, dispersion_gradient(law, grid.points), atol=1e-13)

    def test_gradient_matches_centered_difference_to_second_order(self) -> None:
        law = trigonometric_law(1, {(1,): -2.0, (3,): 0.4})
        k = np.linspace(-3.0, 3.0, 41)[:, None]
        exact = dispersion_gradient(law, k)[:, 0]

        def error(h: float) -> float:
            difference = (dispersion_energy(law, k + h) - dispersion_energy(law, k - h)) / (2 * h)
            return float(np.max(np.abs(difference - exact)))

        # halving h divides the error by ~4
        assert error(0.1) / error(0.05) == pytest.approx(4.0, rel=0.05)

    def test_complex_momenta_continue_analytically(self) -> None:
        law = cosine_law(1)
        value = dispersion_energy(law, np.array([[0.3 + 0.2j]]))[0]
        assert value == pytest.approx(2 - 2 * np.cos(0.3 + 0.2j))

    def test_opposite_indices_merge(self) -> None:
        law = trigonometric_law(1, {(1,): 1.0, (-1,): 0.5})
        assert law.coefficients == {(1,): 1.5}

    def test_wrong_index_length_rejected(self) -> None:
        with pytest.raises(ConfigurationError):
            trigonometric_law(2, {(1,): 1.0})

    def test_empty_series_rejected(self) -> None:
        with pytest.raises(ConfigurationError):
            trigonometric_law(1, {})

    def test_grid_dimension_mismatch_rejected(self) -> None:
        with pytest.raises(ConfigurationError):
            eval_dispersion(build_grid(2, 4), cosine_law(1))


class TestNondegeneracy:
    def test_cosine_law_is_nondegenerate(self) -> None:
        assert is_nondegenerate(eval_dispersion(build_grid(2, 6), cosine_law(2)))

    def test_law_flat_along_an_axis_is_degenerate(self) -> None:
        law = trigonometric_law(2, {(0, 0): 1.0, (1, 0): -2.0})
        assert not is_nondegenerate(eval_dispersion(build_grid(2, 6), law))


# ── Analyticity constants ────────────────────────────────────────────


class TestAnalyticityConstants:
    def test_cosine_strip_constant(self) -> None:
        # |Im(2 − 2cos(k + iy))| = 2|sin k| sinh|y|
        constants = analyticity_constants(cosine_law(1), delta=0.5, gamma=1.0)
        assert constants.c_eps == pytest.approx(2 * math.sinh(0.5), rel=1e-9)
        assert constants.safety_factor >= 1.0

    def test_one_dimensional_lattice_sum(self) -> None:
        constants = analyticity_constants(cosine_law(1), delta=0.5, gamma=0.7)
        assert constants.b_d == pytest.approx(1.0 / math.tanh(0.35), rel=1e-10)
        assert constants.b_d_tail_bound < 1e-12

    def test_lattice_sum_tends_to_one(self) -> None:
        constants = analyticity_constants(cosine_law(2), delta=0.5, gamma=40.0)
        assert constants.b_d == pytest.approx(1.0, abs=1e-15)

    def test_monotone_in_delta_and_gamma(self) -> None:
        law = cosine_law(2)
        small = analyticity_constants(law, delta=0.3, gamma=1.0)
        large = analyticity_constants(law, delta=0.6, gamma=2.0)
        assert small.c_eps < large.c_eps
        assert small.b_d > large.b_d

    def test_invalid_parameters_rejected(self) -> None:
        law = cosine_law(1)
        with pytest.raises(DomainError):
            analyticity_constants(law, delta=0.0, gamma=1.0)
        with pytest.raises(DomainError):
            analyticity_constants(law, delta=0.5, gamma=-1.0)
        with pytest.raises(DomainError):
            analyticity_constants(law, delta=1000.0, gamma=1.0)
