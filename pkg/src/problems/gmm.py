"""
高斯混合先验去噪后验

观测 y = x + N(0, σ²I)，先验为逐像素独立的两分量高斯混合
(权重 ω̃ / 1-ω̃，均值 m_k，方差 σ_k²)。后验仍逐像素可分，每个像素是两分量高斯混合:
    δ_k²  = σ²σ_k² / (σ² + σ_k²)
    μ_k   = (y/σ² + m_k/σ_k²)·δ_k²
    C_k   = N(y; m_k, σ_k² + σ²)
    ω(y)  = ω̃C₀ / (ω̃C₀ + (1-ω̃)C₁)
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.stats import norm

from infrastructure.exceptions import ValidationException
from src.models.types import TargetModel

logger = logging.getLogger(__name__)

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class GmmModel:
    """两分量混合先验 + 高斯噪声的去噪模型，缺省参数即实验所用的一组"""
    y: np.ndarray
    m0: float = 0.0
    m1: float = 0.0
    s0sq: float = 0.0025
    s1sq: float = 0.0809
    noise_var: float = 0.0016
    w_tilde: float = 0.9

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).reshape(-1)
        if y.size == 0:
            raise ValidationException("观测 y 不能为空")
        if not (self.s0sq > 0 and self.s1sq > 0 and self.noise_var > 0):
            raise ValidationException(
                f"方差必须为正: s0sq={self.s0sq}, s1sq={self.s1sq}, noise_var={self.noise_var}"
            )
        if not 0.0 <= self.w_tilde <= 1.0:
            raise ValidationException(f"混合权重 ω̃ 必须位于 [0,1]: {self.w_tilde}")
        object.__setattr__(self, "y", y)

    @property
    def dim(self) -> int:
        return int(self.y.size)

    @property
    def component_variances(self) -> Tuple[float, float]:
        s2 = self.noise_var
        return s2 * self.s0sq / (s2 + self.s0sq), s2 * self.s1sq / (s2 + self.s1sq)


def gmm_posterior_params(model: GmmModel, y_i) -> Tuple:
    """
    像素观测 y_i 对应的后验混合参数

    Returns:
        (mu0, mu1, d0sq, d1sq, w)；y_i 为数组时 mu0/mu1/w 为同形数组
    """
    y_i = np.asarray(y_i, dtype=float)
    s2 = model.noise_var
    d0sq, d1sq = model.component_variances
    mu0 = (y_i / s2 + model.m0 / model.s0sq) * d0sq
    mu1 = (y_i / s2 + model.m1 / model.s1sq) * d1sq

    v0, v1 = model.s0sq + s2, model.s1sq + s2
    log_c0 = -0.5 * (_LOG_2PI + math.log(v0)) - (model.m0 - y_i) ** 2 / (2.0 * v0)
    log_c1 = -0.5 * (_LOG_2PI + math.log(v1)) - (model.m1 - y_i) ** 2 / (2.0 * v1)
    with np.errstate(divide="ignore"):
        a0 = math.log(model.w_tilde) if model.w_tilde > 0 else -math.inf
        a1 = math.log1p(-model.w_tilde) if model.w_tilde < 1 else -math.inf
    num = a0 + log_c0
    w = np.exp(num - np.logaddexp(num, a1 + log_c1))

    if w.ndim == 0:
        return float(mu0), float(mu1), d0sq, d1sq, float(w)
    return mu0, mu1, d0sq, d1sq, w


@dataclass(frozen=True)
class _PixelParams:
    mu0: np.ndarray
    mu1: np.ndarray
    d0sq: float
    d1sq: float
    log_w0: np.ndarray
    log_w1: np.ndarray


def _pixel_params(model: GmmModel) -> _PixelParams:
    mu0, mu1, d0sq, d1sq, w = gmm_posterior_params(model, model.y)
    with np.errstate(divide="ignore"):
        log_w0 = np.log(w)
        log_w1 = np.log1p(-w)
    return _PixelParams(np.atleast_1d(mu0), np.atleast_1d(mu1), d0sq, d1sq, np.atleast_1d(log_w0), np.atleast_1d(log_w1))


def _component_logs(p: _PixelParams, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    l0 = p.log_w0 - 0.5 * (_LOG_2PI + math.log(p.d0sq)) - (x - p.mu0) ** 2 / (2.0 * p.d0sq)
    l1 = p.log_w1 - 0.5 * (_LOG_2PI + math.log(p.d1sq)) - (x - p.mu1) ** 2 / (2.0 * p.d1sq)
    return l0, l1


def _responsibilities(p: _PixelParams, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    l0, l1 = _component_logs(p, x)
    total = np.logaddexp(l0, l1)
    return np.exp(l0 - total), np.exp(l1 - total), total


def gmm_pixel_logpdf(model: GmmModel, x: np.ndarray) -> np.ndarray:
    """逐像素的归一化对数密度"""
    p = _pixel_params(model)
    return np.logaddexp(*_component_logs(p, np.asarray(x, dtype=float)))


def gmm_logpdf(model: GmmModel, x: np.ndarray) -> float:
    """log π(x)（已归一化，逐像素求和）"""
    return float(np.sum(gmm_pixel_logpdf(model, x)))


def gmm_grad(model: GmmModel, x: np.ndarray) -> np.ndarray:
    """∇ log π(x) = -Σ_k r_k (x - μ_k)/δ_k²"""
    p = _pixel_params(model)
    x = np.asarray(x, dtype=float)
    r0, r1, _ = _responsibilities(p, x)
    return -(r0 * (x - p.mu0) / p.d0sq + r1 * (x - p.mu1) / p.d1sq)


def gmm_curvature(model: GmmModel, x: np.ndarray) -> np.ndarray:
    """U''(x) = -(log π)''(x) = Σ r_k/δ_k² - r₀r₁(a₀ - a₁)²，a_k = (x - μ_k)/δ_k²"""
    p = _pixel_params(model)
    x = np.asarray(x, dtype=float)
    r0, r1, _ = _responsibilities(p, x)
    a0 = (x - p.mu0) / p.d0sq
    a1 = (x - p.mu1) / p.d1sq
    return r0 / p.d0sq + r1 / p.d1sq - r0 * r1 * (a0 - a1) ** 2


def gmm_curvature_bounds(model: GmmModel, points: int = 2001, width: float = 8.0) -> Tuple[np.ndarray, np.ndarray]:
    """
    逐像素在 [min μ - width·δ_max, max μ + width·δ_max] 网格上的 U'' 最小/最大值

    最小值为正说明该像素在工作范围内强对数凹。
    """
    p = _pixel_params(model)
    spread = width * math.sqrt(max(p.d0sq, p.d1sq))
    lo = np.minimum(p.mu0, p.mu1) - spread
    hi = np.maximum(p.mu0, p.mu1) + spread
    t = np.linspace(0.0, 1.0, points)[:, None]
    grid = lo[None, :] + t * (hi - lo)[None, :]
    curv = gmm_curvature(model, grid)
    return curv.min(axis=0), curv.max(axis=0)


def gmm_target(model: GmmModel) -> TargetModel:
    """
    U = -log π 的 TargetModel

    m、L 取两个后验分量的精度 1/max δ_k²、1/min δ_k²，用于选步长。
    """
    p = _pixel_params(model)
    d0sq, d1sq = model.component_variances

    def potential(x):
        return -float(np.sum(np.logaddexp(*_component_logs(p, x))))

    def gradient(x):
        r0, r1, _ = _responsibilities(p, x)
        return r0 * (x - p.mu0) / p.d0sq + r1 * (x - p.mu1) / p.d1sq

    return TargetModel(
        dim=model.dim,
        potential_fn=potential,
        gradient_fn=gradient,
        m=1.0 / max(d0sq, d1sq),
        L=1.0 / min(d0sq, d1sq),
        name=f"gmm(d={model.dim})",
    )


def gmm_exact_sample(model: GmmModel, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
    """
    精确采样：逐像素以概率 (ω, 1-ω) 选分量，再从 N(μ_k, δ_k²) 抽样

    Returns:
        size 为 None 时形状 (d,)，否则 (size, d)
    """
    p = _pixel_params(model)
    shape = (model.dim,) if size is None else (int(size), model.dim)
    w = np.exp(p.log_w0)
    pick0 = rng.random(shape) < w
    z = rng.standard_normal(shape)
    return np.where(pick0, p.mu0 + math.sqrt(p.d0sq) * z, p.mu1 + math.sqrt(p.d1sq) * z)


def gmm_pixel_moments(model: GmmModel) -> Tuple[np.ndarray, np.ndarray]:
    """逐像素的精确均值与方差"""
    mu0, mu1, d0sq, d1sq, w = gmm_posterior_params(model, model.y)
    mean = w * mu0 + (1 - w) * mu1
    var = w * d0sq + (1 - w) * d1sq + w * (1 - w) * (mu0 - mu1) ** 2
    return mean, var


def gmm_pixel_cdf(model: GmmModel, index: int, x: np.ndarray) -> np.ndarray:
    mu0, mu1, d0sq, d1sq, w = gmm_posterior_params(model, model.y[index])
    return w * norm.cdf(x, mu0, math.sqrt(d0sq)) + (1 - w) * norm.cdf(x, mu1, math.sqrt(d1sq))


def gmm_pixel_quantile(model: GmmModel, index: int, probs: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """第 index 个像素边缘分布的分位数（在混合 CDF 上二分）"""
    probs = np.asarray(probs, dtype=float)
    if np.any((probs <= 0) | (probs >= 1)):
        raise ValidationException("分位数概率必须位于 (0,1)")
    mu0, mu1, d0sq, d1sq, _ = gmm_posterior_params(model, model.y[index])
    spread = 40.0 * math.sqrt(max(d0sq, d1sq))
    lo = np.full(probs.shape, min(mu0, mu1) - spread)
    hi = np.full(probs.shape, max(mu0, mu1) + spread)
    while np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        below = gmm_pixel_cdf(model, index, mid) < probs
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def synthetic_gmm_observation(clean: np.ndarray, noise_var: float, rng: np.random.Generator) -> np.ndarray:
    """y = x + N(0, σ²)"""
    clean = np.asarray(clean, dtype=float).reshape(-1)
    return clean + math.sqrt(noise_var) * rng.standard_normal(clean.shape)
