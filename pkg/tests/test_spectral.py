"""Tests for the leading eigenvalue, the diffusion tensor and the CLT comparison."""

from __future__ import annotations

import numpy as np
import pytest
from scipy.integrate import simpson

from src.boltzmann.fiber import build_M, gibbs_state
from src.boltzmann.kernel import rate_kernel, scale_kernel
from src.errors import AmbiguousEigenvalueError, DomainError
from src.schemas.boltzmann import RateKernel
from src.schemas.reservoir import SpectralDensity
from src.schemas.spectral import DiffusionRoute
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
from src.torus.dispersion import cosine_law
from src.torus.grid import build_grid

# ── Leading eigenvalue ───────────────────────────────────────────────


class TestLeadingEigen:
    def test_untilted_eigenpair_is_gibbs(self, desk_kernel: RateKernel) -> None:
        data = leading_eigen(build_M(desk_kernel))
        zeta = gibbs_state(desk_kernel.grid, desk_kernel.law, 1.0).values
        assert abs(data.f) <= 1e-10
        np.testing.assert_allclose(data.right, zeta, rtol=1e-8)
        # left eigenvector of M⁰ is the constant function
        np.testing.assert_allclose(data.left, np.ones_like(data.left), rtol=1e-8)

    def test_bi_normalization(self, desk_kernel: RateKernel) -> None:
        data = leading_eigen(build_M(desk_kernel, [0.1 + 0.05j]))
        weight = desk_kernel.grid.weight
        assert weight * data.right.sum() == pytest.approx(1.0, abs=1e-12)
        assert weight * (data.left @ data.right) == pytest.approx(1.0, abs=1e-12)

    def test_projector_is_idempotent(self, small_kernel: RateKernel) -> None:
        data = leading_eigen(build_M(small_kernel, [0.2]))
        assert data.projector is not None
        np.testing.assert_allclose(data.projector @ data.projector, data.projector, atol=1e-10)

    def test_gap_matches_symmetrized_spectrum(self, desk_kernel: RateKernel) -> None:
        data = leading_eigen(build_M(desk_kernel))
        assert data.gap == pytest.approx(spectral_gap(desk_kernel), rel=1e-8)
        assert data.gap > 0

    def test_gap_stable_under_grid_refinement(self, desk_kernel: RateKernel, default_spec: SpectralDensity) -> None:
        fine = rate_kernel(build_grid(1, 128), cosine_law(1), default_spec)
        assert spectral_gap(fine) == pytest.approx(spectral_gap(desk_kernel), rel=1e-2)

    def test_small_tilt_is_quadratic(self, desk_kernel: RateKernel) -> None:
        D = diffusion_resolvent(desk_kernel).D[0, 0]
        f = leading_eigenvalue(desk_kernel, np.array([0.01]))
        assert f.real == pytest.approx(-0.5 * D * 1e-4, rel=1e-2)  # f(κ) ≈ −½Dκ²
        assert abs(f.imag) <= 1e-12

    def test_conjugation_symmetry(self, desk_kernel: RateKernel) -> None:
        radius = certified_radius(desk_kernel)
        rng = np.random.default_rng(19)
        for _ in range(5):
            kappa = 0.8 * radius * rng.random() * np.exp(2j * np.pi * rng.random())
            f = leading_eigenvalue(desk_kernel, np.array([kappa]))
            mirrored = leading_eigenvalue(desk_kernel, np.array([-np.conj(kappa)]))
            assert mirrored == pytest.approx(np.conj(f), abs=1e-10)

    @pytest.mark.parametrize("kappa", [0.1, 0.5, 1.0, -0.5])
    def test_real_tilt_strictly_decays(self, desk_kernel: RateKernel, kappa: float) -> None:
        assert leading_eigenvalue(desk_kernel, np.array([kappa])).real < 0

    def test_frozen_kernel_is_ambiguous(self, small_kernel: RateKernel) -> None:
        with pytest.raises(AmbiguousEigenvalueError) as excinfo:
            leading_eigen(build_M(scale_kernel(small_kernel, 0.0)))
        assert excinfo.value.candidates[0] == excinfo.value.candidates[1]


class TestAnalyticity:
    def test_radius_positive(self, desk_kernel: RateKernel) -> None:
        radius = certified_radius(desk_kernel)
        assert 0 < radius < float("inf")

    def test_radius_is_gap_over_twice_max_speed(self, desk_kernel: RateKernel) -> None:
        # max|∇ε| = 2 for the cosine law
        assert certified_radius(desk_kernel, gap=1.0) == pytest.approx(0.25, rel=1e-3)

    def test_cauchy_mean_recovers_centre(self, desk_kernel: RateKernel) -> None:
        radius = certified_radius(desk_kernel)
        mean = cauchy_mean(desk_kernel, 0.5 * radius, np.array([1.0]))
        assert abs(mean - leading_eigenvalue(desk_kernel, np.array([0.0]))) <= 1e-7


# ── Diffusion tensor ─────────────────────────────────────────────────


class TestDiffusion:
    def test_hessian_and_resolvent_agree(self, desk_kernel: RateKernel) -> None:
        hessian = diffusion_hessian(desk_kernel)
        resolvent = diffusion_resolvent(desk_kernel)
        assert hessian.route == DiffusionRoute.HESSIAN
        assert resolvent.route == DiffusionRoute.RESOLVENT
        assert hessian.converged
        np.testing.assert_allclose(hessian.D, resolvent.D, rtol=1e-6)
        assert resolvent.D[0, 0] > 0

    def test_rate_scaling(self, desk_kernel: RateKernel) -> None:
        doubled = scale_kernel(desk_kernel, 2.0)
        resolvent = diffusion_resolvent(doubled).D
        np.testing.assert_allclose(diffusion_hessian(doubled).D, resolvent, rtol=1e-6)
        # D(s) = D/s
        np.testing.assert_allclose(resolvent, 0.5 * diffusion_resolvent(desk_kernel).D, rtol=1e-10)

    def test_planar_tensor_is_isotropic(self, planar_kernel: RateKernel) -> None:
        D = diffusion_resolvent(planar_kernel).D
        assert D[0, 0] == pytest.approx(D[1, 1], rel=1e-10)
        assert abs(D[0, 1]) <= 1e-10 * D[0, 0]
        assert np.all(np.linalg.eigvalsh(D) > 0)

    def test_exact_green_kubo_matches_resolvent(self, desk_kernel: RateKernel) -> None:
        exact = diffusion_green_kubo_exact(desk_kernel)
        resolvent = diffusion_resolvent(desk_kernel).D
        np.testing.assert_allclose(exact, resolvent, rtol=1e-8)

    def test_vacf_at_zero_is_mean_square_velocity(self, desk_kernel: RateKernel) -> None:
        zeta = gibbs_state(desk_kernel.grid, desk_kernel.law, 1.0).values
        gradient = desk_kernel.dispersion.gradient[:, 0]
        expected = desk_kernel.grid.weight * np.sum(gradient**2 * zeta)
        assert stationary_vacf(desk_kernel, np.array([0.0]))[0, 0, 0] == pytest.approx(expected, rel=1e-10)

    def test_vacf_integral_matches_exact_green_kubo(self, desk_kernel: RateKernel) -> None:
        times = np.linspace(0.0, 60.0, 6001)
        vacf = stationary_vacf(desk_kernel, times)[:, 0, 0]
        integral = 2.0 * simpson(vacf, x=times)
        assert integral == pytest.approx(diffusion_green_kubo_exact(desk_kernel)[0, 0], rel=1e-6)


# ── Evolution and CLT ────────────────────────────────────────────────


class TestEvolution:
    def test_zero_time_is_identity(self, small_kernel: RateKernel) -> None:
        theta = np.arange(small_kernel.grid.size, dtype=float)
        np.testing.assert_array_equal(evolve_fiber(build_M(small_kernel), theta, 0.0), theta)

    def test_dense_and_taylor_agree(self, desk_kernel: RateKernel) -> None:
        operator = build_M(desk_kernel, [0.3])
        theta = gibbs_state(desk_kernel.grid, desk_kernel.law, 1.0).values
        dense = evolve_fiber(operator, theta, 5.0, EvolutionMethod.DENSE)
        taylor = evolve_fiber(operator, theta, 5.0, EvolutionMethod.TAYLOR)
        np.testing.assert_allclose(taylor, dense, atol=1e-10 * np.max(np.abs(dense)))

    def test_mass_is_conserved(self, desk_kernel: RateKernel) -> None:
        weight = desk_kernel.grid.weight
        theta = np.random.default_rng(3).random(desk_kernel.grid.size)
        evolved = evolve_fiber(build_M(desk_kernel), theta, 2.0)
        assert weight * evolved.sum() == pytest.approx(weight * theta.sum(), rel=1e-12)

    def test_semigroup_law(self, desk_kernel: RateKernel) -> None:
        operator = build_M(desk_kernel, [0.2 + 0.1j])
        theta = gibbs_state(desk_kernel.grid, desk_kernel.law, 1.0).values
        stepped = evolve_fiber(operator, evolve_fiber(operator, theta, 1.5), 2.5)
        direct = evolve_fiber(operator, theta, 4.0)
        np.testing.assert_allclose(stepped, direct, rtol=1e-10, atol=1e-12 * np.max(np.abs(direct)))

    def test_relaxes_at_the_gap(self, desk_kernel: RateKernel) -> None:
        weight = desk_kernel.grid.weight
        zeta = gibbs_state(desk_kernel.grid, desk_kernel.law, 1.0).values
        theta = np.random.default_rng(23).random(desk_kernel.grid.size)
        operator = build_M(desk_kernel)

        def distance(t: float) -> float:
            # L² norm weighted by 1/ζ, in which M⁰ is self-adjoint
            deviation = evolve_fiber(operator, theta, t) - weight * theta.sum() * zeta
            return float(np.linalg.norm(deviation / np.sqrt(zeta)))

        assert distance(5.0) / distance(4.0) <= np.exp(-0.9 * spectral_gap(desk_kernel))

    def test_negative_time_rejected(self, small_kernel: RateKernel) -> None:
        with pytest.raises(DomainError):
            evolve_fiber(build_M(small_kernel), np.ones(small_kernel.grid.size), -1.0)


class TestCltCheck:
    def test_zero_wave_vector_gives_one(self, desk_kernel: RateKernel) -> None:
        comparison = clt_check(desk_kernel, [0.0], 100.0)
        assert comparison.lhs == pytest.approx(1.0, abs=1e-10)
        assert comparison.rhs == 1.0

    def test_error_small_and_shrinking(self, desk_kernel: RateKernel) -> None:
        diffusion = diffusion_resolvent(desk_kernel)
        early = clt_check(desk_kernel, [1.0], 400.0, diffusion)
        late = clt_check(desk_kernel, [1.0], 1600.0, diffusion)
        assert early.error <= 1e-2
        assert late.error < early.error

    def test_reflected_wave_vector_conjugates(self, desk_kernel: RateKernel) -> None:
        diffusion = diffusion_resolvent(desk_kernel)
        forward = clt_check(desk_kernel, [1.0], 400.0, diffusion)
        backward = clt_check(desk_kernel, [-1.0], 400.0, diffusion)
        assert backward.lhs == pytest.approx(np.conj(forward.lhs), abs=1e-12)
        assert backward.rhs == forward.rhs

    def test_nonpositive_time_rejected(self, desk_kernel: RateKernel) -> None:
        with pytest.raises(DomainError):
            clt_check(desk_kernel, [1.0], 0.0)

    def test_tilt_beyond_radius_rejected(self, desk_kernel: RateKernel) -> None:
        with pytest.raises(DomainError):
            clt_check(desk_kernel, [1000.0], 1.0)
