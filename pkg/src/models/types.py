"""目标分布类型定义"""
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from infrastructure.exceptions import UnsupportedModelException, ValidationException
from src.models.moreau_yosida import my_envelope, my_gradient

PotentialFn = Callable[[np.ndarray], float]
GradientFn = Callable[[np.ndarray], np.ndarray]
ProxFn = Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class TargetModel:
    """
    目标分布 π ∝ exp(-U)

    势函数、梯度、近端算子以可调用对象保存；构造后不可变，可在多条链之间共享。
    梯度与近端算子至少提供一个。
    """
    dim: int
    potential_fn: PotentialFn
    gradient_fn: Optional[GradientFn] = None
    prox_fn: Optional[ProxFn] = None
    m: float = 0.0                          # 强凸常数，0 表示弱凸
    L: float = math.inf                     # 梯度 Lipschitz 常数
    name: str = "target"

    def __post_init__(self):
        if int(self.dim) <= 0:
            raise ValidationException(f"维度必须为正整数: {self.dim}")
        if self.m < 0 or math.isnan(self.m):
            raise ValidationException(f"强凸常数 m 必须 >= 0: {self.m}")
        if not self.L > 0:
            raise ValidationException(f"Lipschitz 常数 L 必须 > 0: {self.L}")
        if math.isfinite(self.L) and self.m > self.L:
            raise ValidationException(f"要求 m <= L，实际 m={self.m}, L={self.L}")
        if self.gradient_fn is None and self.prox_fn is None:
            raise ValidationException(f"模型 {self.name} 至少需要提供梯度或近端算子")

    @property
    def has_gradient(self) -> bool:
        return self.gradient_fn is not None

    @property
    def has_prox(self) -> bool:
        return self.prox_fn is not None

    @property
    def condition_number(self) -> float:
        if self.m <= 0:
            return math.inf
        return self.L / self.m

    def potential(self, x: np.ndarray) -> float:
        return float(self.potential_fn(np.asarray(x, dtype=float)))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        if self.gradient_fn is None:
            raise UnsupportedModelException(f"模型 {self.name} 没有提供梯度")
        return np.asarray(self.gradient_fn(np.asarray(x, dtype=float)), dtype=float)

    def prox(self, x: np.ndarray, lam: float) -> np.ndarray:
        if self.prox_fn is None:
            raise UnsupportedModelException(f"模型 {self.name} 没有提供近端算子")
        return np.asarray(self.prox_fn(np.asarray(x, dtype=float), float(lam)), dtype=float)


@dataclass(frozen=True)
class SmoothedTarget:
    """
    Moreau-Yosida 平滑后的后验 π^λ ∝ exp(-f(x) - g^λ(x))

    base 为非光滑部分 g（必须有 prox），smooth 为光滑部分 f（可为 None）。
    对外暴露与 TargetModel 相同的 potential / gradient 接口，因此所有采样器都可直接使用。
    """
    base: TargetModel
    smooth: Optional[TargetModel]
    lam: float
    name: str = "smoothed"

    def __post_init__(self):
        if not self.lam > 0 or not math.isfinite(self.lam):
            raise ValidationException(f"平滑参数 λ 必须为正有限数: {self.lam}")
        if not self.base.has_prox:
            raise UnsupportedModelException(f"非光滑部分 {self.base.name} 必须提供近端算子")
        if self.smooth is not None:
            if self.smooth.dim != self.base.dim:
                raise ValidationException(
                    f"维度不一致: smooth={self.smooth.dim}, base={self.base.dim}"
                )
            if not self.smooth.has_gradient:
                raise UnsupportedModelException(f"光滑部分 {self.smooth.name} 必须提供梯度")

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def m(self) -> float:
        return self.smooth.m if self.smooth is not None else 0.0

    @property
    def L(self) -> float:
        # 复合 Lipschitz 常数 L <= L_f + 1/λ
        L_f = self.smooth.L if self.smooth is not None else 0.0
        return L_f + 1.0 / self.lam

    @property
    def has_gradient(self) -> bool:
        return True

    @property
    def has_prox(self) -> bool:
        return False

    @property
    def condition_number(self) -> float:
        return math.inf if self.m <= 0 else self.L / self.m

    def potential(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        value = my_envelope(self.base, self.lam, x)
        if self.smooth is not None:
            value += self.smooth.potential(x)
        return float(value)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        grad = my_gradient(self.base, self.lam, x)
        if self.smooth is not None:
            grad = grad + self.smooth.gradient(x)
        return grad

    def prox(self, x: np.ndarray, lam: float) -> np.ndarray:
        raise UnsupportedModelException(f"平滑后验 {self.name} 没有闭式近端算子")
