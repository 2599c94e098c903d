"""链质量与精度诊断"""
from src.diagnostics.autocorrelation import acf, ess
from src.diagnostics.components import principal_directions, slow_fast_components
from src.diagnostics.metrics import psnr, summed_pixel_w2, w2_1d_empirical
from src.diagnostics.series import (
    MetricSeries,
    histogram,
    logpi_density,
    running_mean,
    stationarity_check,
    thinned_trace,
    thinning_index,
)

__all__ = [
    "w2_1d_empirical",
    "summed_pixel_w2",
    "psnr",
    "acf",
    "ess",
    "principal_directions",
    "slow_fast_components",
    "MetricSeries",
    "histogram",
    "logpi_density",
    "running_mean",
    "stationarity_check",
    "thinned_trace",
    "thinning_index",
]
