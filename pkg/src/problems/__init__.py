"""实验用的具体后验：高斯、高斯混合去噪、一维分布、图像反卷积"""
from src.problems.deconvolution import (
    DeconvModel,
    GaussianNoise,
    PoissonNoise,
    box_blur_kernel,
    deconv_adjoint,
    deconv_apply,
    deconv_posterior,
    poisson_grad,
    poisson_potential,
    simulate_observation,
)
from src.problems.gaussian import gaussian_target
from src.problems.gmm import (
    GmmModel,
    gmm_exact_sample,
    gmm_grad,
    gmm_logpdf,
    gmm_posterior_params,
    gmm_target,
)
from src.problems.onedim import onedim_exact_sd, onedim_smoothed_target, onedim_target
from src.problems.phantoms import shepp_like_phantom

__all__ = [
    "gaussian_target",
    "GmmModel",
    "gmm_posterior_params",
    "gmm_logpdf",
    "gmm_grad",
    "gmm_target",
    "gmm_exact_sample",
    "onedim_target",
    "onedim_smoothed_target",
    "onedim_exact_sd",
    "DeconvModel",
    "GaussianNoise",
    "PoissonNoise",
    "box_blur_kernel",
    "deconv_apply",
    "deconv_adjoint",
    "poisson_potential",
    "poisson_grad",
    "deconv_posterior",
    "simulate_observation",
    "shepp_like_phantom",
]
