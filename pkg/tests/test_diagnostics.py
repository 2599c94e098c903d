"""诊断：W₂、PSNR、ACF/ESS、慢快方向、序列工具"""
import math

import numpy as np
import pytest
from scipy.stats import norm

from infrastructure.exceptions import DegenerateVarianceException, ValidationException
from src.diagnostics import (
    MetricSeries,
    acf,
    ess,
    histogram,
    logpi_density,
    principal_directions,
    psnr,
    running_mean,
    slow_fast_components,
    stationarity_check,
    summed_pixel_w2,
    thinned_trace,
    thinning_index,
    w2_1d_empirical,
)


def _ar1(rng, rho: float, n: int) -> np.ndarray:
    x = np.empty(n)
    x[0] = rng.standard_normal() / math.sqrt(1 - rho**2)
    noise = rng.standard_normal(n)
    for t in range(1, n):
        x[t] = rho * x[t - 1] + noise[t]
    return x


def _alternating(n: int) -> np.ndarray:
    return np.where(np.arange(n) % 2 == 0, 1.0, -1.0)


class TestMetrics:

    def test_psnr_values(self):
        ref = np.zeros((4, 4))
        assert psnr(ref, np.full((4, 4), 0.1)) == pytest.approx(20.0)
        assert psnr(ref, np.ones((4, 4))) == pytest.approx(0.0)
        assert psnr(ref, ref) == math.inf
        assert psnr(ref, np.full((4, 4), 1.0), peak=10.0) == pytest.approx(20.0)

    def test_psnr_shape_mismatch(self):
        with pytest.raises(ValidationException):
            psnr(np.zeros((4, 4)), np.zeros((4, 5)))

    def test_w2_of_shifted_quantiles(self):
        n = 1000
        samples = norm.ppf((np.arange(1, n + 1) - 0.5) / n) + 0.3
        assert w2_1d_empirical(samples[::-1], norm.ppf) == pytest.approx(0.3, abs=1e-12)

    def test_summed_pixel_w2(self):
        n = 500
        base = norm.ppf((np.arange(1, n + 1) - 0.5) / n)
        samples = np.column_stack([base + 0.1, base - 0.2])
        assert summed_pixel_w2(samples, [norm.ppf, norm.ppf]) == pytest.approx(0.3, abs=1e-12)
        with pytest.raises(ValidationException):
            summed_pixel_w2(samples, [norm.ppf])

    def test_w2_needs_samples(self):
        with pytest.raises(ValidationException):
            w2_1d_empirical(np.array([]), norm.ppf)


class TestAutocorrelation:

    def test_acf_of_white_noise(self, rng):
        n = 10000
        rho = acf(rng.standard_normal(n), 20)
        assert rho[0] == pytest.approx(1.0)
        assert np.all(np.abs(rho[1:]) < 4.0 / math.sqrt(n))

    def test_acf_of_ar1(self, rng):
        rho = acf(_ar1(rng, 0.8, 50000), 3)
        np.testing.assert_allclose(rho, [1.0, 0.8, 0.64, 0.512], atol=0.04)

    def test_ess_of_ar1(self, rng):
        n = 20000
        assert ess(_ar1(rng, 0.5, n)) == pytest.approx(n / 3.0, rel=0.25)

    def test_ess_of_white_noise(self, rng):
        n = 20000
        assert ess(rng.standard_normal(n)) == pytest.approx(n, rel=0.2)

    def test_degenerate_inputs(self):
        with pytest.raises(DegenerateVarianceException):
            acf(np.full(100, 2.0), 5)
        with pytest.raises(DegenerateVarianceException):
            ess(np.full(100, 2.0))
        with pytest.raises(ValidationException):
            ess(np.array([1.0]))
        with pytest.raises(ValidationException):
            acf(np.arange(10.0), 10)


class TestComponents:

    def test_recovers_principal_axes(self, rng):
        samples = rng.standard_normal((5000, 3)) * np.array([3.0, 1.0, 0.2])
        slow, fast, fallback = principal_directions(samples)
        assert not fallback
        assert abs(slow[0]) >= 0.99
        assert abs(fast[2]) >= 0.99
        assert slow @ fast == pytest.approx(0.0, abs=1e-10)

    def test_components_are_projections(self, rng):
        samples = rng.standard_normal((2000, 3)) * np.array([3.0, 1.0, 0.2])
        slow_series, fast_series = slow_fast_components(samples)
        assert slow_series.shape == fast_series.shape == (2000,)
        assert np.var(slow_series) > 50 * np.var(fast_series)

    def test_rank_deficient_falls_back(self, rng):
        samples = rng.standard_normal((3, 5)) * np.arange(1.0, 6.0)
        slow, fast, fallback = principal_directions(samples)
        assert fallback
        assert np.count_nonzero(slow) == 1 and np.count_nonzero(fast) == 1

    def test_needs_two_samples(self):
        with pytest.raises(ValidationException):
            principal_directions(np.zeros((1, 3)))


class TestSeries:

    def test_metric_series(self):
        series = MetricSeries("psnr")
        series.append(10, 20.0)
        series.append(20, 21.5)
        with pytest.raises(ValidationException):
            series.append(20, 22.0)
        frame = series.to_frame()
        assert list(frame.columns) == ["iteration", "psnr"]
        assert len(series) == 2

    def test_running_mean(self):
        np.testing.assert_allclose(running_mean(np.array([1.0, 2.0, 3.0, 4.0])), [1.0, 1.5, 2.0, 2.5])
        np.testing.assert_allclose(running_mean(np.array([[0.0, 2.0], [2.0, 4.0]])), [[0.0, 2.0], [1.0, 3.0]])

    def test_histogram_is_a_density(self, rng):
        frame = histogram(rng.standard_normal(5000))
        widths = frame["bin_right"] - frame["bin_left"]
        assert float(np.sum(frame["density"] * widths)) == pytest.approx(1.0)
        assert histogram(np.array([np.inf])).empty

    def test_logpi_density(self, rng):
        frame = logpi_density(rng.standard_normal(500), points=50)
        assert len(frame) == 50 and np.all(frame["density"] >= 0)
        assert logpi_density(np.full(10, -3.0)).empty

    def test_stationary_trace_passes(self):
        passed, details = stationarity_check(_alternating(400))
        assert passed
        assert details["ess"] == pytest.approx(100.0)

    def test_level_shift_fails(self):
        trace = _alternating(400)
        trace[300:] += 10.0
        passed, _ = stationarity_check(trace)
        assert not passed

    def test_stationarity_needs_points(self):
        with pytest.raises(ValidationException):
            stationarity_check(np.arange(7.0))

    def test_thinned_trace(self):
        frame = thinned_trace(np.arange(10.0), points=4)
        assert frame["iteration"].tolist() == [1, 4, 7, 10]
        assert frame["logpi"].tolist() == [0.0, 3.0, 6.0, 9.0]
        assert thinning_index(0, 5).size == 0
        assert thinning_index(3, 10).tolist() == [0, 1, 2]
