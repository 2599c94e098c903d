"""理论分析相关类型定义"""
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from infrastructure.exceptions import ValidationException
from src.models.types import TargetModel
from src.problems.gaussian import gaussian_target


@dataclass(frozen=True)
class GaussianSpec:
    """
    对角协方差高斯目标 N(0, diag(σ²)) 及确定的初始点 x0

    κ = σ²_max / σ²_min = L / m，m = 1/σ²_max，L = 1/σ²_min。
    """
    sigmas: np.ndarray
    x0: np.ndarray

    def __post_init__(self):
        sig = np.asarray(self.sigmas, dtype=float).reshape(-1)
        x0 = np.broadcast_to(np.asarray(self.x0, dtype=float), sig.shape).copy()
        if sig.size == 0 or np.any(~(sig > 0)) or np.any(~np.isfinite(sig)):
            raise ValidationException(f"σ 必须全部为正有限数: {self.sigmas}")
        object.__setattr__(self, "sigmas", sig)
        object.__setattr__(self, "x0", x0)

    @classmethod
    def geometric(cls, d: int, kappa: float, x0: Optional[float] = None) -> "GaussianSpec":
        """σ 在 [1/√κ, 1] 上几何分布；x0 缺省为 1/√d"""
        if d < 1 or kappa < 1:
            raise ValidationException(f"要求 d >= 1, κ >= 1: d={d}, κ={kappa}")
        sigmas = np.geomspace(1.0, 1.0 / math.sqrt(kappa), d) if d > 1 else np.array([1.0])
        start = 1.0 / math.sqrt(d) if x0 is None else x0
        return cls(sigmas=sigmas, x0=np.full(d, start))

    @property
    def dim(self) -> int:
        return int(self.sigmas.size)

    @property
    def sigma_min(self) -> float:
        return float(self.sigmas.min())

    @property
    def sigma_max(self) -> float:
        return float(self.sigmas.max())

    @property
    def m(self) -> float:
        return 1.0 / self.sigma_max**2

    @property
    def L(self) -> float:
        return 1.0 / self.sigma_min**2

    @property
    def kappa(self) -> float:
        return (self.sigma_max / self.sigma_min) ** 2

    def to_target(self) -> TargetModel:
        return gaussian_target(self.sigmas)


@dataclass
class AnalysisReport:
    """一组 (m, L, θ, δ, n) 下的理论量汇总"""
    theta: float
    delta: float
    n: int
    m: float
    L: float
    C: float                                # 压缩常数
    delta_star: float                       # 最优步长（θ=1 时为 inf）
    w2_exact: Optional[float]               # 高斯目标第 n 步的精确 W₂
    bias: Optional[float]                   # W₂(π, π̃)
    n_predicted: Optional[int]              # 达到 eps 所需步数
    bound_rhs: float                        # 非渐近界右端，inf 表示界无效
    eps: Optional[float] = None
    notes: Sequence[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "delta": self.delta,
            "n": self.n,
            "m": self.m,
            "L": self.L,
            "C": self.C,
            "delta_star": self.delta_star,
            "w2_exact": self.w2_exact,
            "bias": self.bias,
            "n_predicted": self.n_predicted,
            "bound_rhs": self.bound_rhs,
            "eps": self.eps,
            "notes": list(self.notes),
        }
