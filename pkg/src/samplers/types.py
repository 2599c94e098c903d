"""采样器相关类型定义"""
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from infrastructure.exceptions import ValidationException

INNER_METHODS = ("bb", "lbfgs")
STEP_SOLVERS = ("auto", "prox", "minimise")
FAILURE_POLICIES = ("flag", "raise")


@dataclass(frozen=True)
class SamplerConfig:
    """θ-方法采样器配置"""
    theta: float                            # θ ∈ [0,1]：0 = ULA/MYULA，1/2 = IMLA，1 = ILA
    delta: float                            # 时间步长 δ
    n_iters: int                            # 保留阶段的迭代次数
    inner_tol: float = 1e-4                 # 隐式步 ‖∇F‖ 的停止阈值 ε
    inner_max_iters: int = 200
    seed: int = 0
    thinning: int = 1
    burn_in: Optional[int] = None           # None 表示 n_iters 的 5%
    reflected: bool = False                 # 每步后取分量绝对值（R-IMLA / R-MYULA）
    inner_method: str = "bb"                # bb = Barzilai-Borwein 梯度法，lbfgs = 拟牛顿
    step_solver: str = "auto"               # auto: 有 prox 走 prox 形式，否则走最小化形式
    record_noise: bool = False              # 保留 ξ 序列（LM 一致性检查用）
    keep_samples: bool = True               # False 时只保留流式统计量
    record_logpi: bool = True
    on_inner_failure: str = "flag"          # flag: 记录并继续；raise: 抛 InnerSolveFailure

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ValidationException(f"θ 必须位于 [0,1]: {self.theta}")
        if not self.delta > 0 or not math.isfinite(self.delta):
            raise ValidationException(f"步长 δ 必须为正有限数: {self.delta}")
        if int(self.n_iters) < 0:
            raise ValidationException(f"迭代次数不能为负: {self.n_iters}")
        if not self.inner_tol > 0:
            raise ValidationException(f"内层容差必须为正: {self.inner_tol}")
        if int(self.inner_max_iters) < 1:
            raise ValidationException(f"内层迭代上限必须 >= 1: {self.inner_max_iters}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValidationException(f"种子必须是 64 位无符号整数: {self.seed}")
        if int(self.thinning) < 1:
            raise ValidationException(f"thinning 必须 >= 1: {self.thinning}")
        if self.burn_in is not None and int(self.burn_in) < 0:
            raise ValidationException(f"burn_in 不能为负: {self.burn_in}")
        if self.inner_method not in INNER_METHODS:
            raise ValidationException(f"未知内层求解器: {self.inner_method}，可选 {INNER_METHODS}")
        if self.step_solver not in STEP_SOLVERS:
            raise ValidationException(f"未知隐式步求解方式: {self.step_solver}，可选 {STEP_SOLVERS}")
        if self.on_inner_failure not in FAILURE_POLICIES:
            raise ValidationException(f"未知失败策略: {self.on_inner_failure}，可选 {FAILURE_POLICIES}")

    @property
    def effective_burn_in(self) -> int:
        if self.burn_in is None:
            return int(0.05 * int(self.n_iters))
        return int(self.burn_in)

    @property
    def is_explicit(self) -> bool:
        return self.theta == 0.0

    @property
    def scheme_name(self) -> str:
        prefix = "R-" if self.reflected else ""
        if self.theta == 0.0:
            return f"{prefix}ULA"
        if self.theta == 0.5:
            return f"{prefix}IMLA"
        if self.theta == 1.0:
            return f"{prefix}ILA"
        return f"{prefix}theta={self.theta:g}"


@dataclass
class InnerSolveReport:
    """单次隐式步的内层求解记录"""
    iterations: int
    grad_norm: float
    converged: bool
    method: str                             # closed_form / prox / bb / lbfgs / explicit


@dataclass
class ChainOutput:
    """
    链的输出

    samples 仅在 keep_samples=True 时保留（已 burn-in + thinning），
    running_mean / running_second_moment 始终按保留的样本流式累计。
    """
    x0: np.ndarray
    samples: Optional[np.ndarray]
    n_kept: int
    running_mean: np.ndarray
    running_second_moment: np.ndarray
    logpi_trace: np.ndarray
    inner_iterations: np.ndarray
    inner_grad_norms: np.ndarray
    flagged_steps: List[int] = field(default_factory=list)
    noise: Optional[np.ndarray] = None      # 形状 (burn_in + n_iters, dim)，第 k 行产生 X_{k+1}
    trajectory: Optional[np.ndarray] = None  # record_noise 时保留完整轨迹 X_0..X_n
    scheme: str = ""
    final_state: Optional[np.ndarray] = None

    @property
    def running_variance(self) -> np.ndarray:
        return np.maximum(self.running_second_moment - self.running_mean**2, 0.0)

