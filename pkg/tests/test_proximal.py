"""近端算子、Moreau-Yosida 包络与 TV"""
import logging

import numpy as np
import pytest

from infrastructure.exceptions import UnsupportedModelException, ValidationException
from src.models.checks import finite_difference_gradient, grid_prox, prox_optimality_residual
from src.models.moreau_yosida import my_envelope, my_gradient
from src.models.proximal import prox_box, prox_cauchy, prox_cauchy_scalar, prox_l1, prox_quartic
from src.models.total_variation import image_divergence, image_gradient, prox_tv, tv_norm
from src.models.types import TargetModel
from src.problems.onedim import onedim_target


class TestClosedFormProx:

    def test_soft_threshold(self):
        x = np.array([-3.0, -0.5, 0.0, 0.5, 3.0])
        np.testing.assert_allclose(prox_l1(x, 1.0), [-2.0, 0.0, 0.0, 0.0, 2.0])

    def test_soft_threshold_rejects_negative_lambda(self):
        with pytest.raises(ValidationException):
            prox_l1(np.ones(3), -0.1)

    def test_box_projection(self):
        np.testing.assert_allclose(prox_box(np.array([-1.0, 0.3, 2.0]), 0.0, 1.0), [0.0, 0.3, 1.0])

    def test_box_requires_ordered_bounds(self):
        with pytest.raises(ValidationException):
            prox_box(np.zeros(2), 1.0, 1.0)

    @pytest.mark.parametrize("lam", [0.01, 1.0, 100.0])
    def test_quartic_solves_cubic(self, lam):
        x = np.linspace(-5.0, 5.0, 21)
        p = prox_quartic(x, lam)
        residual = prox_optimality_residual(lambda u: 4.0 * u**3, x, p, lam)
        assert residual < 1e-8 * (1.0 + 1.0 / lam)

    @pytest.mark.parametrize("x", [-4.0, -0.7, 0.0, 0.4, 1.5, 6.0])
    def test_quartic_matches_grid(self, x):
        expected = grid_prox(lambda u: u**4, x, 0.5)
        assert float(prox_quartic(np.array(x), 0.5)) == pytest.approx(expected, abs=1e-6)

    @pytest.mark.parametrize("lam", [0.1, 1.0, 5.0])
    @pytest.mark.parametrize("x", [-4.0, -0.7, 0.0, 0.4, 1.5, 6.0])
    def test_cauchy_matches_grid(self, x, lam):
        expected = grid_prox(lambda u: np.log1p(u**2), x, lam)
        assert prox_cauchy_scalar(x, lam) == pytest.approx(expected, abs=1e-5)

    def test_cauchy_picks_global_minimiser(self):
        # x = 6, λ = 5 时三次方程的根为 1, 2, 3，全局最小在 1
        assert prox_cauchy_scalar(6.0, 5.0) == pytest.approx(1.0, abs=1e-10)

    def test_cauchy_is_odd_and_shape_preserving(self):
        x = np.array([[-2.0, 0.5], [3.0, -0.1]])
        p = prox_cauchy(x, 0.8)
        assert p.shape == x.shape
        np.testing.assert_allclose(prox_cauchy(-x, 0.8), -p, atol=1e-12)


class TestMoreauYosida:

    def test_laplace_envelope_is_huber(self):
        g = onedim_target("laplace")
        lam = 0.5
        for x in (-2.0, -0.3, 0.0, 0.2, 1.7):
            point = np.array([x])
            huber = x**2 / (2 * lam) if abs(x) <= lam else abs(x) - lam / 2
            assert my_envelope(g, lam, point) == pytest.approx(huber, abs=1e-12)
            np.testing.assert_allclose(my_gradient(g, lam, point), [np.clip(x / lam, -1.0, 1.0)], atol=1e-12)

    def test_gradient_matches_finite_differences(self):
        g = onedim_target("quartic")
        x = np.array([0.8])
        numeric = finite_difference_gradient(lambda v: my_envelope(g, 0.3, v), x)
        np.testing.assert_allclose(my_gradient(g, 0.3, x), numeric, atol=1e-5)

    def test_requires_prox(self):
        smooth_only = TargetModel(dim=1, potential_fn=lambda x: float(x @ x), gradient_fn=lambda x: 2 * x)
        with pytest.raises(UnsupportedModelException):
            my_gradient(smooth_only, 0.1, np.zeros(1))

    def test_requires_positive_lambda(self):
        with pytest.raises(ValidationException):
            my_gradient(onedim_target("laplace"), 0.0, np.zeros(1))


class TestTotalVariation:

    def test_divergence_is_negative_adjoint(self, rng):
        u = rng.standard_normal((9, 7))
        px, py = rng.standard_normal((2, 9, 7))
        dx, dy = image_gradient(u)
        lhs = np.sum(dx * px) + np.sum(dy * py)
        rhs = -np.sum(u * image_divergence(px, py))
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)

    def test_tv_of_vertical_edge(self):
        u = np.zeros((8, 8))
        u[:, 4:] = 1.0
        assert tv_norm(u) == pytest.approx(8.0)

    def test_zero_lambda_returns_copy(self, rng):
        x = rng.standard_normal((6, 6))
        p = prox_tv(x, 0.0)
        np.testing.assert_array_equal(p, x)
        assert p is not x

    def test_constant_image_is_fixed_point(self):
        x = np.full((10, 10), 0.7)
        np.testing.assert_allclose(prox_tv(x, 2.0), x, atol=1e-12)

    def test_prox_decreases_objective(self, rng):
        x = np.zeros((16, 16))
        x[4:12, 4:12] = 1.0
        x += 0.2 * rng.standard_normal(x.shape)
        lam = 0.3
        p = prox_tv(x, lam, dual_iters=500, tol=1e-7)
        objective = tv_norm(p) + np.sum((p - x) ** 2) / (2 * lam)
        assert objective < tv_norm(x)
        assert tv_norm(p) < tv_norm(x)

    def test_rejects_non_image(self):
        with pytest.raises(ValidationException):
            prox_tv(np.zeros(5), 1.0)

    def test_warns_when_iteration_cap_is_hit(self, rng, caplog):
        x = 2.0 + rng.uniform(size=(16, 16))
        with caplog.at_level(logging.WARNING, logger="src.models.total_variation"):
            prox_tv(x, 2.0, dual_iters=5)
        assert "迭代上限" in caplog.text


def _step_image() -> np.ndarray:
    x = np.full((8, 8), 2.0)
    x[:, 4:] = 3.0
    return x


class TestTotalVariationAccuracy:
    """缺省参数下的 prox_tv 与长时间对偶迭代的参照解比较"""

    def test_step_image_against_long_run(self):
        x = _step_image()
        reference = prox_tv(x, 0.1, dual_iters=10000, tol=0.0)
        out = prox_tv(x, 0.1)
        assert np.linalg.norm(out - reference) / np.linalg.norm(reference) <= 1e-3

    @pytest.mark.parametrize("lam", [0.05, 0.5, 2.0])
    def test_random_image_against_long_run(self, lam):
        x = 1.0 + np.random.default_rng(7).uniform(size=(16, 16))
        reference = prox_tv(x, lam, dual_iters=50000, tol=0.0)
        out = prox_tv(x, lam)
        assert np.linalg.norm(out - reference) / np.linalg.norm(reference) <= 1e-3

    def test_mean_is_preserved(self):
        x = 1.0 + np.random.default_rng(8).uniform(size=(12, 12))
        assert prox_tv(x, 1.0).mean() == pytest.approx(x.mean(), rel=1e-10)


def _log_uniform(rng: np.random.Generator, lo: float, hi: float, size=None):
    return np.exp(rng.uniform(np.log(lo), np.log(hi), size))


CONVEX_PROXES = {
    "l1": prox_l1,
    "box": lambda x, lam: prox_box(x, -0.5, 0.5),
    "quartic": prox_quartic,
}


class TestProxProperties:

    @pytest.mark.parametrize("name", sorted(CONVEX_PROXES))
    def test_firmly_nonexpansive(self, name):
        prox = CONVEX_PROXES[name]
        rng = np.random.default_rng(21)
        for _ in range(500):
            x, y = 3.0 * rng.standard_normal((2, 6))
            lam = float(_log_uniform(rng, 1e-2, 10.0))
            diff = prox(x, lam) - prox(y, lam)
            assert diff @ diff <= diff @ (x - y) + 1e-9

    def test_tv_prox_is_nonexpansive(self):
        rng = np.random.default_rng(22)
        for _ in range(10):
            x, y = 1.0 + rng.uniform(size=(2, 8, 8))
            lam = float(_log_uniform(rng, 1e-2, 1.0))
            diff = prox_tv(x, lam, tol=1e-10) - prox_tv(y, lam, tol=1e-10)
            assert np.linalg.norm(diff) <= np.linalg.norm(x - y) + 1e-4

    @pytest.mark.parametrize("kind", ["laplace", "uniform", "quartic", "cauchy"])
    def test_envelope_non_increasing_in_lambda(self, kind):
        g = onedim_target(kind)
        lams = np.geomspace(1e-3, 10.0, 15)
        rng = np.random.default_rng(23)
        for x in rng.uniform(-4.0, 4.0, 50):
            values = [my_envelope(g, lam, np.array([x])) for lam in lams]
            assert np.all(np.diff(values) <= 1e-12)

    @pytest.mark.parametrize("kind", ["laplace", "uniform", "quartic"])
    def test_envelope_gradient_is_lipschitz(self, kind):
        g = onedim_target(kind)
        rng = np.random.default_rng(24)
        for _ in range(500):
            x, y = rng.uniform(-4.0, 4.0, (2, 1))
            lam = float(_log_uniform(rng, 1e-2, 10.0))
            lhs = np.linalg.norm(my_gradient(g, lam, x) - my_gradient(g, lam, y))
            assert lhs <= np.linalg.norm(x - y) / lam * (1.0 + 1e-9) + 1e-12

    def test_cauchy_cubic_residual(self):
        rng = np.random.default_rng(25)
        xs = rng.uniform(-5.0, 5.0, 10**4)
        lams = _log_uniform(rng, 1e-2, 10.0, 10**4)
        worst = 0.0
        for x, lam in zip(xs, lams):
            y = prox_cauchy_scalar(x, lam)
            residual = ((y - x) * y + 1.0 + 2.0 * lam) * y - x
            worst = max(worst, abs(residual))
        assert worst <= 1e-12

    @pytest.mark.slow
    def test_cauchy_matches_grid_on_random_draws(self):
        rng = np.random.default_rng(26)
        xs = rng.uniform(-5.0, 5.0, 10**4)
        lams = _log_uniform(rng, 1e-2, 10.0, 10**4)
        for x, lam in zip(xs, lams):
            expected = grid_prox(lambda u: np.log1p(u**2), x, lam)
            assert prox_cauchy_scalar(x, lam) == pytest.approx(expected, abs=1e-6)
