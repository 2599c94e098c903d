"""精度指标：一维经验 W₂、PSNR"""
import logging
import math
from typing import Callable, Sequence

import numpy as np

from infrastructure.exceptions import ValidationException
from infrastructure.validators import validate_positive

logger = logging.getLogger(__name__)

QuantileFn = Callable[[np.ndarray], np.ndarray]


def w2_1d_empirical(samples: np.ndarray, target_quantile: QuantileFn) -> float:
    """
    一维分位数耦合下的 W₂

    W₂² ≈ (1/N)·Σ_j (x_(j) - Q((j - 1/2)/N))²，x_(j) 为排序后的样本（内部会重新排序）。
    """
    x = np.sort(np.asarray(samples, dtype=float).reshape(-1))
    n = x.size
    if n == 0:
        raise ValidationException("样本为空，无法计算 W₂")
    probs = (np.arange(1, n + 1) - 0.5) / n
    q = np.asarray(target_quantile(probs), dtype=float)
    return float(math.sqrt(np.mean((x - q) ** 2)))


def summed_pixel_w2(samples: np.ndarray, quantile_fns: Sequence[QuantileFn]) -> float:
    """逐像素 W₂ 之和（不是 W₂² 之和）"""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[1] != len(quantile_fns):
        raise ValidationException(f"样本形状 {samples.shape} 与像素数 {len(quantile_fns)} 不一致")
    return float(sum(w2_1d_empirical(samples[:, i], q) for i, q in enumerate(quantile_fns)))


def psnr(reference: np.ndarray, estimate: np.ndarray, peak: float = 1.0) -> float:
    """10·log10(peak² / MSE)，两图相同时返回 inf"""
    reference = np.asarray(reference, dtype=float)
    estimate = np.asarray(estimate, dtype=float)
    if reference.shape != estimate.shape:
        raise ValidationException(f"图像形状不一致: {reference.shape} vs {estimate.shape}")
    peak = validate_positive("peak", peak)
    mse = float(np.mean((reference - estimate) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak**2 / mse)
