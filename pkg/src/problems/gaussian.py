"""对角高斯目标 N(μ, diag(σ²))"""
from typing import Optional, Sequence

import numpy as np

from infrastructure.exceptions import ValidationException
from src.models.types import TargetModel


def gaussian_target(sigmas: Sequence[float], mean: Optional[Sequence[float]] = None) -> TargetModel:
    """
    势函数 U(x) = Σ (xᵢ-μᵢ)² / (2σᵢ²)，带闭式 prox

    prox_U^λ(x) = (σ²x + λμ) / (σ² + λ)
    """
    sig = np.asarray(sigmas, dtype=float).reshape(-1)
    if sig.size == 0 or np.any(~(sig > 0)):
        raise ValidationException(f"σ 必须全部为正: {sigmas}")
    mu = np.zeros_like(sig) if mean is None else np.asarray(mean, dtype=float).reshape(-1)
    if mu.shape != sig.shape:
        raise ValidationException(f"均值维度 {mu.size} 与 σ 维度 {sig.size} 不一致")
    var = sig**2

    def potential(x):
        return float(np.sum((x - mu) ** 2 / (2.0 * var)))

    def gradient(x):
        return (x - mu) / var

    def prox(x, lam):
        return (var * x + lam * mu) / (var + lam)

    return TargetModel(
        dim=sig.size,
        potential_fn=potential,
        gradient_fn=gradient,
        prox_fn=prox,
        m=float(1.0 / var.max()),
        L=float(1.0 / var.min()),
        name=f"gaussian(d={sig.size})",
    )
