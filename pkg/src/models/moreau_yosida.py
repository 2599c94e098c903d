"""Moreau-Yosida 包络及其梯度"""
from typing import TYPE_CHECKING

import numpy as np

from infrastructure.exceptions import UnsupportedModelException
from infrastructure.validators import validate_positive

if TYPE_CHECKING:
    from src.models.types import TargetModel


def _prox_point(g: "TargetModel", lam: float, x: np.ndarray) -> np.ndarray:
    if not g.has_prox:
        raise UnsupportedModelException(f"模型 {g.name} 没有近端算子，无法计算 Moreau-Yosida 包络")
    validate_positive("λ", lam)
    return g.prox(x, lam)


def my_envelope(g: "TargetModel", lam: float, x: np.ndarray) -> float:
    """
    g^λ(x) = g(p) + ‖x - p‖² / (2λ)，其中 p = prox_g^λ(x)

    Args:
        g: 提供 prox 的非光滑部分
        lam: 平滑参数 λ > 0
        x: 计算点

    Returns:
        包络值
    """
    x = np.asarray(x, dtype=float)
    p = _prox_point(g, lam, x)
    return float(g.potential(p) + np.sum((x - p) ** 2) / (2.0 * lam))


def my_gradient(g: "TargetModel", lam: float, x: np.ndarray) -> np.ndarray:
    """∇g^λ(x) = (x - prox_g^λ(x)) / λ，关于 x 是 1/λ-Lipschitz 的"""
    x = np.asarray(x, dtype=float)
    p = _prox_point(g, lam, x)
    return (x - p) / lam
