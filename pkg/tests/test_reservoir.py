"""Tests for spectral densities, the correlation function and the half-line transforms."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from src.errors import CertificationError, DomainError, StripViolationError
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
from src.schemas.reservoir import FormFactorShape, RadialDispersion, SpectralDensity

DEFAULT = ohmic_gaussian_density(beta=1.0)


@pytest.fixture(scope="module")
def step_table() -> SpectralDensity:
    """Density with a jump at ξ = 1: ψ̂ decays only like 1/t."""
    return tabulated_density(1.0, [0.0, 1.0, 1.000001, 5.0], [1.0, 1.0, 0.0, 0.0])


# ── Spectral densities ───────────────────────────────────────────────


class TestOhmicGaussian:
    def test_value_at_zero_is_coupling_over_beta(self) -> None:
        spec = ohmic_gaussian_density(beta=2.0, coupling=3.0)
        assert spectral_density(0.0, spec) == pytest.approx(1.5)  # c/β

    def test_kms_ratio(self) -> None:
        ratio = spectral_density(1.0, DEFAULT) / spectral_density(-1.0, DEFAULT)
        assert ratio == pytest.approx(math.exp(-1.0), rel=1e-12)

    def test_exponent_multiplies_by_power(self) -> None:
        spec = ohmic_gaussian_density(beta=1.0, exponent=3.0)
        expected = 4.0 * 2.0 / math.expm1(2.0) * math.exp(-0.25)  # |ξ|²·ξ/(e^ξ−1)·e^{−(ξ/4)²}
        assert spectral_density(2.0, spec) == pytest.approx(expected, rel=1e-12)

    def test_array_in_array_out(self) -> None:
        values = spectral_density(np.linspace(-3.0, 3.0, 7), DEFAULT)
        assert isinstance(values, np.ndarray)
        assert values.shape == (7,)

    def test_nonpositive_beta_rejected(self) -> None:
        with pytest.raises(ValueError):
            ohmic_gaussian_density(beta=0.0)

    @given(st.floats(min_value=-30.0, max_value=30.0))
    @settings(max_examples=200, deadline=None)
    def test_kms_holds_to_rounding(self, xi: float) -> None:
        assert check_kms(DEFAULT, np.array([xi])) <= 1e-12

    @given(st.floats(min_value=-50.0, max_value=50.0))
    @settings(max_examples=200, deadline=None)
    def test_nonnegative(self, xi: float) -> None:
        assert spectral_density(xi, DEFAULT) >= 0.0


class TestFormFactor:
    def test_linear_dispersion_exponential_form_factor(self) -> None:
        spec = named_form_factor_density(RadialDispersion.LINEAR, FormFactorShape.EXPONENTIAL, beta=1.0, d_res=3)
        for xi in (0.5, 1.0, 2.0):
            expected = xi**2 * math.exp(-xi) / math.expm1(xi)  # ξ²e^{−ξ}/(e^{βξ}−1)
            assert spectral_density(xi, spec) == pytest.approx(expected, rel=1e-10)

    def test_negative_side_follows_kms(self) -> None:
        spec = named_form_factor_density(RadialDispersion.LINEAR, FormFactorShape.GAUSSIAN, beta=2.0, d_res=3)
        assert spectral_density(-1.5, spec) == pytest.approx(math.exp(3.0) * spectral_density(1.5, spec), rel=1e-12)

    def test_quadratic_dispersion_box_form_factor(self) -> None:
        spec = named_form_factor_density(RadialDispersion.QUADRATIC, FormFactorShape.BOX, beta=1.0, d_res=3, width=2.0)
        # r = √ξ, ω'(r) = 2√ξ: ψ = 2ξ^{3/2}/(e^ξ−1) inside the box
        assert spectral_density(1.0, spec) == pytest.approx(2.0 / math.expm1(1.0), rel=1e-10)
        assert spectral_density(5.0, spec) == 0.0  # r = √5 > 2

    def test_numeric_inverse_matches_closed_form(self) -> None:
        closed = named_form_factor_density(RadialDispersion.QUADRATIC, FormFactorShape.GAUSSIAN, beta=1.0, d_res=3)
        numeric = effective_density_from_form_factor(
            lambda r: r**2, lambda r: np.exp(-0.5 * r**2), beta=1.0, d_res=3
        )
        xi = np.array([0.3, 1.0, 2.5])
        np.testing.assert_allclose(spectral_density(xi, numeric), spectral_density(xi, closed), rtol=1e-6)

    def test_non_monotone_dispersion_rejected(self) -> None:
        with pytest.raises(DomainError):
            effective_density_from_form_factor(np.sin, lambda r: np.exp(-r), beta=1.0, d_res=3)

    def test_dispersion_must_vanish_at_origin(self) -> None:
        with pytest.raises(DomainError):
            effective_density_from_form_factor(lambda r: r + 1.0, lambda r: np.exp(-r), beta=1.0, d_res=3)

    def test_unbounded_at_zero_rejected(self) -> None:
        # d_res = 1 leaves ψ ~ 1/ξ near the origin
        with pytest.raises(DomainError):
            named_form_factor_density(RadialDispersion.LINEAR, FormFactorShape.GAUSSIAN, beta=1.0, d_res=1)

    def test_nonpositive_width_rejected(self) -> None:
        with pytest.raises(DomainError):
            named_form_factor_density(RadialDispersion.LINEAR, FormFactorShape.BOX, beta=1.0, d_res=3, width=0.0)


class TestTabulated:
    def test_interpolates_nodes_and_vanishes_beyond(self) -> None:
        spec = tabulated_density(1.0, [0.0, 1.0, 2.0, 3.0], [1.0, 0.5, 0.25, 0.0])
        assert spectral_density(1.0, spec) == pytest.approx(0.5)
        assert spectral_density(5.0, spec) == 0.0
        assert spectral_density(-1.0, spec) == pytest.approx(math.e * 0.5)

    def test_table_must_start_at_zero(self) -> None:
        with pytest.raises(ValueError):
            tabulated_density(1.0, [0.5, 1.0], [1.0, 0.0])

    def test_negative_values_rejected(self) -> None:
        with pytest.raises(ValueError):
            tabulated_density(1.0, [0.0, 1.0], [1.0, -0.1])


# ── Correlation function ─────────────────────────────────────────────


class TestCorrelationFunction:
    def test_hermitian(self) -> None:
        t = np.array([0.5, 1.0, 2.0])
        forward = correlation_function(t, DEFAULT)
        backward = correlation_function(-t, DEFAULT)
        np.testing.assert_allclose(backward, np.conj(forward), atol=1e-12)

    def test_value_at_zero_is_total_weight(self) -> None:
        value = correlation_function(0.0, DEFAULT)
        integral, _ = quad(
            lambda x: spectral_density(x, DEFAULT), -60.0, 60.0, limit=200, epsabs=0.0, epsrel=1e-12
        )
        assert value.imag == 0.0
        assert value.real == pytest.approx(integral / math.sqrt(2 * math.pi), rel=1e-8)

    def test_step_refinement_is_stable(self) -> None:
        t = np.linspace(0.0, 4.0, 9)
        coarse = correlation_function(t, DEFAULT)
        fine = correlation_function(t, DEFAULT, step=0.01)
        np.testing.assert_allclose(coarse, fine, atol=1e-9)

    def test_scalar_in_scalar_out(self) -> None:
        assert isinstance(correlation_function(1.0, DEFAULT), complex)


class TestCertifyDecay:
    def test_default_density_certified(self) -> None:
        profile = certify_decay(DEFAULT)
        assert profile.certified
        assert profile.g_hat > 0
        assert profile.residual <= 0.5

    def test_samples_symmetric_in_time(self) -> None:
        profile = certify_decay(DEFAULT, t_max=4.0, n_samples=32)
        assert profile.times.size == 63
        np.testing.assert_allclose(profile.times, -profile.times[::-1])

    def test_jump_in_density_fails_certification(self, step_table: SpectralDensity) -> None:
        profile = certify_decay(step_table)
        assert not profile.certified
        assert profile.reason

    def test_invalid_window_rejected(self) -> None:
        with pytest.raises(DomainError):
            certify_decay(DEFAULT, t_max=0.0)
        with pytest.raises(DomainError):
            certify_decay(DEFAULT, n_samples=8)


# ── Half-line transforms ─────────────────────────────────────────────


class TestHalfTransforms:
    def test_sum_recovers_density(self) -> None:
        x = np.array([0.0, 1.0, -1.5, 3.0])
        plus, minus = half_transforms(x, DEFAULT)
        np.testing.assert_allclose(plus + minus, spectral_density(x, DEFAULT), atol=1e-8)

    def test_conjugate_on_real_line(self) -> None:
        x = np.array([-2.0, 0.25, 1.0])
        plus, minus = half_transforms(x, DEFAULT)
        np.testing.assert_allclose(plus, np.conj(minus), atol=1e-14)

    def test_inside_strip_is_finite(self) -> None:
        strip = certified_strip(DEFAULT)
        values = psi_plus(np.array([0.5 - 0.9j * strip, 1.0 + 2.0j]), DEFAULT)
        assert np.all(np.isfinite(values))

    def test_psi_plus_below_strip_rejected(self) -> None:
        strip = certified_strip(DEFAULT)
        with pytest.raises(StripViolationError):
            psi_plus(-1j * (strip + 0.5), DEFAULT)

    def test_psi_minus_above_strip_rejected(self) -> None:
        strip = certified_strip(DEFAULT)
        with pytest.raises(StripViolationError):
            psi_minus(1j * (strip + 0.5), DEFAULT)

    def test_uncertified_density_refused(self, step_table: SpectralDensity) -> None:
        with pytest.raises(CertificationError):
            half_transforms(np.array([0.0]), step_table)
