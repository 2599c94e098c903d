"""
非盲图像反卷积后验（高斯或 Poisson 噪声 + TV 先验）

A 为循环卷积（周期边界），通过 rfft2 对角化；TV 先验以 Moreau-Yosida 包络替代，
得到可用于 MYULA / IMLA 及其反射版本的 SmoothedTarget。采样器看到的是展平的向量。
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import numpy as np

from infrastructure.exceptions import DomainViolationException, ValidationException
from infrastructure.validators import validate_image, validate_positive
from src.models.total_variation import prox_tv, tv_norm
from src.models.types import SmoothedTarget, TargetModel
from src.problems.phantoms import scale_to_mean_intensity

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GaussianNoise:
    variance: float

    def __post_init__(self):
        validate_positive("噪声方差", self.variance)


@dataclass(frozen=True)
class PoissonNoise:
    beta: float                             # 已知背景强度 β

    def __post_init__(self):
        validate_positive("背景强度 β", self.beta)


NoiseModel = Union[GaussianNoise, PoissonNoise]


@dataclass(frozen=True)
class DeconvModel:
    """反卷积模型；kernel 必须归一化（元素和为 1）"""
    kernel: np.ndarray
    image_shape: Tuple[int, int]
    noise: NoiseModel
    reg_weight: float = 1.0                 # θ_TV
    my_lambda: Optional[float] = None       # TV 包络的 λ，None 表示取 1/L_f
    y: Optional[np.ndarray] = None          # 观测图像
    transfer: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        kernel = validate_image("卷积核", self.kernel)
        shape = tuple(int(s) for s in self.image_shape)
        if len(shape) != 2 or min(shape) < 1:
            raise ValidationException(f"图像形状非法: {self.image_shape}")
        if kernel.shape[0] > shape[0] or kernel.shape[1] > shape[1]:
            raise ValidationException(f"卷积核 {kernel.shape} 大于图像 {shape}")
        if abs(kernel.sum() - 1.0) > 1e-8:
            raise ValidationException(f"卷积核必须归一化，当前元素和 {kernel.sum():.6g}")
        validate_positive("θ_TV", self.reg_weight)
        if self.my_lambda is not None:
            validate_positive("λ", self.my_lambda)
        if self.y is not None:
            y = np.asarray(self.y, dtype=float)
            if y.shape != shape:
                raise ValidationException(f"观测形状 {y.shape} 与图像形状 {shape} 不一致")
            object.__setattr__(self, "y", y)

        # 核中心平移到原点后补零到图像大小
        padded = np.zeros(shape)
        padded[: kernel.shape[0], : kernel.shape[1]] = kernel
        padded = np.roll(padded, (-(kernel.shape[0] // 2), -(kernel.shape[1] // 2)), axis=(0, 1))
        object.__setattr__(self, "kernel", kernel)
        object.__setattr__(self, "image_shape", shape)
        object.__setattr__(self, "transfer", np.fft.rfft2(padded))

    @property
    def dim(self) -> int:
        return self.image_shape[0] * self.image_shape[1]

    @property
    def operator_norm_sq(self) -> float:
        """‖A‖² = max |H|²"""
        return float(np.max(np.abs(self.transfer) ** 2))

    def with_observation(self, y: np.ndarray) -> "DeconvModel":
        return DeconvModel(self.kernel, self.image_shape, self.noise, self.reg_weight, self.my_lambda, y)


def box_blur_kernel(size: int = 5) -> np.ndarray:
    """size×size 均匀模糊核"""
    if int(size) < 1:
        raise ValidationException(f"核大小必须 >= 1: {size}")
    return np.full((int(size), int(size)), 1.0 / int(size) ** 2)


def _as_image(model: DeconvModel, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape == model.image_shape:
        return x
    if x.size == model.dim and x.ndim == 1:
        return x.reshape(model.image_shape)
    raise ValidationException(f"输入形状 {x.shape} 与图像形状 {model.image_shape} 不一致")


def deconv_apply(model: DeconvModel, x: np.ndarray) -> np.ndarray:
    """Ax：循环卷积"""
    img = _as_image(model, x)
    return np.fft.irfft2(model.transfer * np.fft.rfft2(img), s=model.image_shape)


def deconv_adjoint(model: DeconvModel, x: np.ndarray) -> np.ndarray:
    """Aᵀx：循环相关"""
    img = _as_image(model, x)
    return np.fft.irfft2(np.conj(model.transfer) * np.fft.rfft2(img), s=model.image_shape)


def _require_observation(model: DeconvModel) -> np.ndarray:
    if model.y is None:
        raise ValidationException("模型缺少观测图像 y")
    return model.y


def gaussian_potential(model: DeconvModel, x: np.ndarray) -> float:
    """‖y - Ax‖² / (2σ²)"""
    y = _require_observation(model)
    r = deconv_apply(model, x) - y
    return float(np.sum(r**2)) / (2.0 * model.noise.variance)


def gaussian_grad(model: DeconvModel, x: np.ndarray) -> np.ndarray:
    y = _require_observation(model)
    return deconv_adjoint(model, deconv_apply(model, x) - y) / model.noise.variance


def _poisson_rate(model: DeconvModel, x: np.ndarray) -> np.ndarray:
    rate = deconv_apply(model, x) + model.noise.beta
    if np.any(rate <= 0):
        raise DomainViolationException(f"Poisson 强度 (Ax)+β 出现非正值: min={rate.min():.3e}")
    return rate


def poisson_potential(model: DeconvModel, x: np.ndarray) -> float:
    """Σ [(Ax)ᵢ + β - yᵢ log((Ax)ᵢ + β)]"""
    y = _require_observation(model)
    rate = _poisson_rate(model, x)
    return float(np.sum(rate - y * np.log(rate)))


def poisson_grad(model: DeconvModel, x: np.ndarray) -> np.ndarray:
    """Aᵀ(1 - y / (Ax + β))"""
    y = _require_observation(model)
    rate = _poisson_rate(model, x)
    return deconv_adjoint(model, 1.0 - y / rate)


def likelihood_lipschitz(model: DeconvModel) -> float:
    """
    似然梯度的 Lipschitz 常数 L_f

    高斯: ‖A‖²/σ²；Poisson: 在非负象限上的估计 ‖A‖²·max(y)/β²
    """
    if isinstance(model.noise, GaussianNoise):
        return model.operator_norm_sq / model.noise.variance
    y = _require_observation(model)
    return model.operator_norm_sq * max(float(y.max()), 1.0) / model.noise.beta**2


def likelihood_target(model: DeconvModel) -> TargetModel:
    """似然部分 f_y（展平向量上的 TargetModel）"""
    gaussian = isinstance(model.noise, GaussianNoise)
    potential = gaussian_potential if gaussian else poisson_potential
    grad = gaussian_grad if gaussian else poisson_grad
    return TargetModel(
        dim=model.dim,
        potential_fn=lambda x: potential(model, x),
        gradient_fn=lambda x: grad(model, x).ravel(),
        m=0.0,
        L=likelihood_lipschitz(model),
        name="gaussian-likelihood" if gaussian else "poisson-likelihood",
    )


def tv_prior_target(model: DeconvModel) -> TargetModel:
    """θ_TV·TV(x)，prox 为 prox_tv(x, θ_TV·λ)"""
    shape, weight = model.image_shape, model.reg_weight
    return TargetModel(
        dim=model.dim,
        potential_fn=lambda x: weight * tv_norm(np.reshape(x, shape)),
        prox_fn=lambda x, lam: prox_tv(np.reshape(x, shape), weight * lam).ravel(),
        name="tv-prior",
    )


def deconv_posterior(model: DeconvModel) -> SmoothedTarget:
    """π^λ ∝ exp(-f_y(x) - θ_TV·TV^λ(x))，λ 缺省为 1/L_f"""
    smooth = likelihood_target(model)
    lam = model.my_lambda if model.my_lambda is not None else 1.0 / smooth.L
    posterior = SmoothedTarget(base=tv_prior_target(model), smooth=smooth, lam=lam, name="deconv-posterior")
    logger.info(f"反卷积后验: L_f={smooth.L:.4g}, λ={lam:.4g}, L={posterior.L:.4g}")
    return posterior


def bsnr_noise_variance(blurred: np.ndarray, bsnr_db: float) -> float:
    """由模糊信噪比 BSNR = 10·log10(var(Ax)/σ²) 反推 σ²"""
    return float(np.var(blurred)) / 10.0 ** (bsnr_db / 10.0)


def simulate_observation(
    clean: np.ndarray,
    noise_kind: str,
    rng: np.random.Generator,
    kernel_size: int = 5,
    bsnr_db: float = 30.0,
    mean_intensity: float = 10.0,
    beta_fraction: float = 0.01,
    reg_weight: float = 1.0,
    my_lambda: Optional[float] = None,
) -> Tuple[DeconvModel, np.ndarray]:
    """
    生成合成观测并返回 (带观测的模型, 对应尺度下的真值图像)

    gaussian: y = Ax + N(0, σ²)，σ² 由 BSNR 决定
    poisson:  x 缩放到平均强度 mean_intensity，β = beta_fraction·mean_intensity，y ~ Poisson(Ax + β)
    """
    clean = validate_image("真值图像", clean)
    kernel = box_blur_kernel(kernel_size)
    if noise_kind == "gaussian":
        probe = DeconvModel(kernel, clean.shape, GaussianNoise(1.0), reg_weight, my_lambda)
        blurred = deconv_apply(probe, clean)
        variance = bsnr_noise_variance(blurred, bsnr_db)
        y = blurred + math.sqrt(variance) * rng.standard_normal(clean.shape)
        model = DeconvModel(kernel, clean.shape, GaussianNoise(variance), reg_weight, my_lambda, y)
        logger.info(f"高斯观测: BSNR={bsnr_db} dB, σ²={variance:.3e}")
        return model, clean
    if noise_kind == "poisson":
        truth = scale_to_mean_intensity(clean, mean_intensity)
        beta = beta_fraction * mean_intensity
        probe = DeconvModel(kernel, clean.shape, PoissonNoise(beta), reg_weight, my_lambda)
        rate = np.maximum(deconv_apply(probe, truth), 0.0) + beta
        y = rng.poisson(rate).astype(float)
        model = DeconvModel(kernel, clean.shape, PoissonNoise(beta), reg_weight, my_lambda, y)
        logger.info(f"Poisson 观测: MIV={mean_intensity}, β={beta:.3g}")
        return model, truth
    raise ValidationException(f"未知噪声类型: {noise_kind}，可选 gaussian / poisson")
