"""四个一维测试分布：Laplace、Uniform[0,1]、exp(-x⁴)、Cauchy"""
import math

import numpy as np
from scipy.special import gamma

from infrastructure.exceptions import UndefinedMomentException, ValidationException
from src.models.proximal import prox_box, prox_cauchy, prox_l1, prox_quartic
from src.models.types import SmoothedTarget, TargetModel

ONEDIM_KINDS = ("laplace", "uniform", "quartic", "cauchy")


def _check_kind(kind: str) -> str:
    kind = str(kind).lower()
    if kind not in ONEDIM_KINDS:
        raise ValidationException(f"未知一维分布: {kind}，可选 {ONEDIM_KINDS}")
    return kind


def _uniform_potential(x: np.ndarray) -> float:
    inside = np.all((x >= 0.0) & (x <= 1.0))
    return 0.0 if inside else math.inf


def onedim_target(kind: str) -> TargetModel:
    """按名称构造一维目标；Laplace/Uniform 只有 prox，quartic/Cauchy 同时有梯度和 prox"""
    kind = _check_kind(kind)
    if kind == "laplace":
        return TargetModel(
            dim=1,
            potential_fn=lambda x: float(np.sum(np.abs(x))),
            prox_fn=prox_l1,
            name="laplace",
        )
    if kind == "uniform":
        return TargetModel(
            dim=1,
            potential_fn=_uniform_potential,
            prox_fn=lambda x, lam: prox_box(x, 0.0, 1.0),
            name="uniform",
        )
    if kind == "quartic":
        return TargetModel(
            dim=1,
            potential_fn=lambda x: float(np.sum(x**4)),
            gradient_fn=lambda x: 4.0 * x**3,
            prox_fn=prox_quartic,
            name="quartic",
        )
    # Cauchy 势非凸，梯度有界且 2-Lipschitz
    return TargetModel(
        dim=1,
        potential_fn=lambda x: float(np.sum(np.log1p(x**2))),
        gradient_fn=lambda x: 2.0 * x / (1.0 + x**2),
        prox_fn=prox_cauchy,
        m=0.0,
        L=2.0,
        name="cauchy",
    )


def onedim_smoothed_target(kind: str, lam: float) -> SmoothedTarget:
    """MYULA 用的 Moreau-Yosida 平滑目标（整个势都被平滑）"""
    return SmoothedTarget(base=onedim_target(kind), smooth=None, lam=lam, name=f"{kind}-MY")


def onedim_exact_sd(kind: str) -> float:
    """精确标准差；Cauchy 没有矩"""
    kind = _check_kind(kind)
    if kind == "laplace":
        return math.sqrt(2.0)
    if kind == "uniform":
        return 1.0 / math.sqrt(12.0)
    if kind == "quartic":
        return math.sqrt(gamma(0.75) / gamma(0.25))
    raise UndefinedMomentException("Cauchy 分布的矩不存在，无法给出标准差")


def onedim_density(kind: str, x: np.ndarray) -> np.ndarray:
    """归一化密度，用于与直方图对比"""
    kind = _check_kind(kind)
    x = np.asarray(x, dtype=float)
    if kind == "laplace":
        return 0.5 * np.exp(-np.abs(x))
    if kind == "uniform":
        return ((x >= 0.0) & (x <= 1.0)).astype(float)
    if kind == "quartic":
        return np.exp(-(x**4)) / (2.0 * gamma(1.25))
    return 1.0 / (math.pi * (1.0 + x**2))
