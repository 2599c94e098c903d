"""测试问题：GMM 去噪、一维分布、反卷积"""
import math

import numpy as np
import pytest
from scipy.integrate import trapezoid
from scipy.special import gamma

from infrastructure.exceptions import DomainViolationException, UndefinedMomentException, ValidationException
from src.models.checks import gradient_check_error
from src.problems.deconvolution import (
    DeconvModel,
    GaussianNoise,
    PoissonNoise,
    box_blur_kernel,
    bsnr_noise_variance,
    deconv_adjoint,
    deconv_apply,
    deconv_posterior,
    likelihood_lipschitz,
    likelihood_target,
    poisson_grad,
    poisson_potential,
    simulate_observation,
)
from src.problems.gmm import (
    GmmModel,
    gmm_curvature_bounds,
    gmm_exact_sample,
    gmm_grad,
    gmm_logpdf,
    gmm_pixel_cdf,
    gmm_pixel_logpdf,
    gmm_pixel_moments,
    gmm_pixel_quantile,
    gmm_target,
)
from src.problems.onedim import onedim_density, onedim_exact_sd, onedim_target
from src.problems.phantoms import scale_to_mean_intensity, shepp_like_phantom
from src.theory.contraction import delta_star


class TestGmm:

    def test_step_constants(self):
        target = gmm_target(GmmModel(y=np.array([0.5])))
        assert target.L == pytest.approx(1025.0, rel=1e-3)
        assert target.m == pytest.approx(637.3, rel=1e-3)
        assert delta_star(target.m, target.L, 0.5) == pytest.approx(2.47e-3, rel=1e-2)

    def test_gradient_matches_finite_differences(self):
        model = GmmModel(y=np.array([0.2, 0.5, 1.0, -0.3]))
        x = model.y + np.array([0.01, -0.02, 0.03, 0.0])
        assert gradient_check_error(gmm_target(model), x, h=1e-7) < 1e-5
        np.testing.assert_allclose(gmm_grad(model, x), -gmm_target(model).gradient(x))

    def test_pixel_density_is_normalised(self):
        model = GmmModel(y=np.array([0.5]))
        grid = np.linspace(-2.0, 3.0, 200001)
        density = np.exp(gmm_pixel_logpdf(model, grid[:, None]))[:, 0]
        assert trapezoid(density, grid) == pytest.approx(1.0, abs=1e-6)

    def test_logpdf_sums_pixels(self):
        model = GmmModel(y=np.array([0.1, 0.9]))
        x = np.array([0.05, 0.8])
        assert gmm_logpdf(model, x) == pytest.approx(float(np.sum(gmm_pixel_logpdf(model, x))))

    def test_log_concave_away_from_zero(self):
        curv_min, curv_max = gmm_curvature_bounds(GmmModel(y=np.array([0.5, 1.0])))
        assert np.all(curv_min > 0)
        assert np.all(curv_max <= 1025.0 * (1 + 1e-9))

    def test_exact_sampler_moments(self, rng):
        model = GmmModel(y=np.array([0.0, 0.2, 0.7]))
        samples = gmm_exact_sample(model, rng, 200000)
        mean, var = gmm_pixel_moments(model)
        assert samples.shape == (200000, 3)
        np.testing.assert_allclose(samples.mean(axis=0), mean, atol=5 * np.sqrt(var / 200000).max())
        np.testing.assert_allclose(samples.var(axis=0), var, rtol=0.03)

    def test_quantile_inverts_cdf(self):
        model = GmmModel(y=np.array([0.05, 0.6]))
        probs = np.array([0.001, 0.1, 0.5, 0.9, 0.999])
        for pixel in range(2):
            q = gmm_pixel_quantile(model, pixel, probs)
            np.testing.assert_allclose(gmm_pixel_cdf(model, pixel, q), probs, atol=1e-8)
        with pytest.raises(ValidationException):
            gmm_pixel_quantile(model, 0, np.array([0.0, 0.5]))

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValidationException):
            GmmModel(y=np.array([0.1]), s0sq=0.0)
        with pytest.raises(ValidationException):
            GmmModel(y=np.array([0.1]), w_tilde=1.5)
        with pytest.raises(ValidationException):
            GmmModel(y=np.array([]))


class TestOneDim:

    def test_exact_standard_deviations(self):
        assert onedim_exact_sd("laplace") == pytest.approx(math.sqrt(2.0))
        assert onedim_exact_sd("uniform") == pytest.approx(1.0 / math.sqrt(12.0))
        assert onedim_exact_sd("quartic") == pytest.approx(math.sqrt(gamma(0.75) / gamma(0.25)))
        assert onedim_exact_sd("quartic") == pytest.approx(0.5813, abs=1e-4)

    def test_cauchy_has_no_moments(self):
        with pytest.raises(UndefinedMomentException):
            onedim_exact_sd("cauchy")

    def test_unknown_kind(self):
        with pytest.raises(ValidationException):
            onedim_target("gumbel")

    @pytest.mark.parametrize("kind", ["laplace", "quartic", "cauchy"])
    def test_densities_are_normalised(self, kind):
        grid = np.linspace(-2000.0, 2000.0, 4000001) if kind == "cauchy" else np.linspace(-40.0, 40.0, 400001)
        tol = 1e-3 if kind == "cauchy" else 1e-6
        assert trapezoid(onedim_density(kind, grid), grid) == pytest.approx(1.0, abs=tol)

    def test_exact_sd_matches_density(self):
        grid = np.linspace(-5.0, 5.0, 200001)
        var = trapezoid(grid**2 * onedim_density("quartic", grid), grid)
        assert math.sqrt(var) == pytest.approx(onedim_exact_sd("quartic"), rel=1e-6)

    def test_operators(self):
        assert onedim_target("uniform").potential(np.array([1.5])) == math.inf
        np.testing.assert_allclose(onedim_target("uniform").prox(np.array([-0.2]), 0.1), [0.0])
        np.testing.assert_allclose(onedim_target("cauchy").gradient(np.array([1.0])), [1.0])


class TestDeconvolution:

    @pytest.fixture
    def gaussian_model(self, rng):
        truth = rng.uniform(0.0, 1.0, (12, 12))
        model = DeconvModel(box_blur_kernel(3), truth.shape, GaussianNoise(0.01))
        return model.with_observation(deconv_apply(model, truth) + 0.1 * rng.standard_normal(truth.shape))

    @pytest.fixture
    def poisson_model(self, rng):
        truth = rng.uniform(1.0, 2.0, (8, 8))
        model = DeconvModel(box_blur_kernel(3), truth.shape, PoissonNoise(0.1))
        return model.with_observation(rng.poisson(deconv_apply(model, truth) + 0.1).astype(float))

    def test_adjoint_identity(self, gaussian_model, rng):
        x, y = rng.standard_normal((2, 12, 12))
        lhs = np.sum(deconv_apply(gaussian_model, x) * y)
        rhs = np.sum(x * deconv_adjoint(gaussian_model, y))
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)

    def test_blur_preserves_constants(self, gaussian_model):
        np.testing.assert_allclose(deconv_apply(gaussian_model, np.full((12, 12), 3.0)), 3.0, atol=1e-12)
        assert gaussian_model.operator_norm_sq == pytest.approx(1.0)

    def test_flat_vectors_accepted(self, gaussian_model, rng):
        x = rng.standard_normal(144)
        np.testing.assert_allclose(deconv_apply(gaussian_model, x), deconv_apply(gaussian_model, x.reshape(12, 12)))
        with pytest.raises(ValidationException):
            deconv_apply(gaussian_model, np.zeros(10))

    def test_gaussian_gradient(self, gaussian_model, rng):
        target = likelihood_target(gaussian_model)
        assert gradient_check_error(target, rng.uniform(0.0, 1.0, 144)) < 1e-5
        assert target.L == pytest.approx(1.0 / 0.01)

    def test_poisson_gradient(self, poisson_model, rng):
        target = likelihood_target(poisson_model)
        assert gradient_check_error(target, rng.uniform(1.0, 2.0, 64)) < 1e-5

    def test_poisson_gradient_vanishes_at_exact_fit(self, rng):
        x = rng.uniform(1.0, 2.0, (8, 8))
        model = DeconvModel(box_blur_kernel(3), x.shape, PoissonNoise(0.1))
        model = model.with_observation(deconv_apply(model, x) + 0.1)
        np.testing.assert_allclose(poisson_grad(model, x), 0.0, atol=1e-10)

    def test_poisson_domain(self, poisson_model):
        with pytest.raises(DomainViolationException):
            poisson_potential(poisson_model, np.full((8, 8), -10.0))

    def test_poisson_lipschitz_estimate(self, poisson_model):
        expected = poisson_model.operator_norm_sq * max(poisson_model.y.max(), 1.0) / 0.1**2
        assert likelihood_lipschitz(poisson_model) == pytest.approx(expected)

    def test_posterior_default_smoothing(self, gaussian_model):
        posterior = deconv_posterior(gaussian_model)
        L_f = likelihood_lipschitz(gaussian_model)
        assert posterior.lam == pytest.approx(1.0 / L_f)
        assert posterior.L == pytest.approx(2.0 * L_f)
        assert posterior.dim == 144

    def test_kernel_must_be_normalised(self):
        with pytest.raises(ValidationException):
            DeconvModel(np.ones((3, 3)), (8, 8), GaussianNoise(1.0))

    def test_simulated_gaussian_observation(self, rng):
        clean = shepp_like_phantom(32)
        model, truth = simulate_observation(clean, "gaussian", rng, bsnr_db=30.0)
        blurred = deconv_apply(model, clean)
        assert model.noise.variance == pytest.approx(bsnr_noise_variance(blurred, 30.0))
        assert model.noise.variance == pytest.approx(np.var(blurred) / 1000.0)
        np.testing.assert_array_equal(truth, clean)

    def test_simulated_poisson_observation(self, rng):
        model, truth = simulate_observation(shepp_like_phantom(32), "poisson", rng, mean_intensity=10.0)
        assert truth.mean() == pytest.approx(10.0)
        assert model.noise.beta == pytest.approx(0.1)
        assert np.all(model.y >= 0) and np.all(model.y == np.round(model.y))

    def test_unknown_noise(self, rng):
        with pytest.raises(ValidationException):
            simulate_observation(shepp_like_phantom(16), "laplace", rng)


class TestPhantom:

    def test_range_and_shape(self):
        img = shepp_like_phantom(48)
        assert img.shape == (48, 48)
        assert img.min() == 0.0 and img.max() == 1.0

    def test_mean_intensity_scaling(self):
        assert scale_to_mean_intensity(shepp_like_phantom(32), 7.5).mean() == pytest.approx(7.5)
        with pytest.raises(ValidationException):
            scale_to_mean_intensity(np.zeros((4, 4)), 1.0)
