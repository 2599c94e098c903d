"""θ-方法的闭式理论：R₁/R₂、高斯 W₂、压缩常数、步数预测与非渐近界"""
from src.theory.contraction import contraction_C, delta_star
from src.theory.gaussian import (
    bias_theta1,
    explicit_scheme_search,
    gaussian_moments,
    invariant_bias,
    n_steps_gaussian,
    numerical_invariant_variance,
    r1,
    r2,
    smallest_n_below,
    w2_gaussian,
)
from src.theory.strongly_logconcave import (
    analysis_report,
    n_steps_strongly_logconcave,
    nonasymptotic_bound,
)
from src.theory.types import AnalysisReport, GaussianSpec

__all__ = [
    "GaussianSpec",
    "AnalysisReport",
    "r1",
    "r2",
    "w2_gaussian",
    "gaussian_moments",
    "numerical_invariant_variance",
    "invariant_bias",
    "bias_theta1",
    "n_steps_gaussian",
    "smallest_n_below",
    "explicit_scheme_search",
    "contraction_C",
    "delta_star",
    "nonasymptotic_bound",
    "n_steps_strongly_logconcave",
    "analysis_report",
]
