"""
IMLA 与 Leimkuhler-Matthews 格式的一致性检查

令 Y_k = X_k + √(δ/2)·ξ_k（ξ_k 是产生 X_{k+1} 的噪声），则对平滑势 U^{δ/2} 有
    Y_{k+1} = Y_k - δ∇U^{δ/2}(Y_k) + √(2δ)(ξ_k + ξ_{k+1})/2
其中 ∇U^{δ/2}(Y) = (Y - prox_U^{δ/2}(Y)) / (δ/2)。
"""
import logging
import math

import numpy as np

from infrastructure.exceptions import ValidationException
from src.samplers.inner_solver import ThetaObjective, inner_solve
from src.samplers.types import ChainOutput, SamplerConfig

logger = logging.getLogger(__name__)

_PROX_TOL = 1e-13
_PROX_MAX_ITERS = 20000


def _prox(model, y: np.ndarray, lam: float) -> np.ndarray:
    if getattr(model, "has_prox", False):
        return model.prox(y, lam)
    # 无闭式 prox 时精确求解 argmin U(p) + ‖p - y‖²/(2λ)（θ = 1、z = 0 的隐式步）
    objective = ThetaObjective(model, y, np.zeros_like(y), 1.0, lam)
    p, report = inner_solve(objective, y, _PROX_TOL, _PROX_MAX_ITERS, "bb")
    if not report.converged:
        logger.warning(f"LM 检查中的 prox 求解未完全收敛: ‖∇‖ = {report.grad_norm:.3e}")
    return p


def lm_consistency_check(model, cfg: SamplerConfig, output: ChainOutput) -> float:
    """
    返回整条轨迹上 LM 恒等式残差的最大值

    Args:
        model: 产生轨迹的目标模型
        cfg: θ 必须为 1/2
        output: record_noise=True 运行得到的 ChainOutput

    Returns:
        max_k ‖Y_{k+1} - [Y_k - δ∇U^{δ/2}(Y_k) + √(2δ)(ξ_k+ξ_{k+1})/2]‖，步数不足 2 时为 0
    """
    if cfg.theta != 0.5:
        raise ValidationException(f"LM 一致性只对 θ = 1/2 成立，当前 θ = {cfg.theta}")
    if output.noise is None or output.trajectory is None:
        raise ValidationException("轨迹未保留噪声序列，请以 record_noise=True 运行链")

    delta = cfg.delta
    half = delta / 2.0
    xs, xis = output.trajectory, output.noise
    n_steps = xis.shape[0]
    if n_steps < 2:
        return 0.0

    ys = xs[:n_steps] + math.sqrt(half) * xis
    worst = 0.0
    for k in range(n_steps - 1):
        y = ys[k]
        grad_env = (y - _prox(model, y, half)) / half
        predicted = y - delta * grad_env + math.sqrt(2.0 * delta) * (xis[k] + xis[k + 1]) / 2.0
        worst = max(worst, float(np.linalg.norm(ys[k + 1] - predicted)))

    logger.info(f"LM 一致性检查: {n_steps - 1} 步，最大残差 {worst:.3e}")
    return worst
