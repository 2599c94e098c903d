"""单步更新：ULA/MYULA、θ-方法（IMLA/ILA）、反射变体"""
import logging
import math
from typing import Optional, Tuple

import numpy as np

from infrastructure.exceptions import (
    InnerSolveFailure,
    NumericalFailureException,
    UnsupportedModelException,
)
from src.samplers.inner_solver import ThetaObjective, inner_solve
from src.samplers.types import InnerSolveReport, SamplerConfig

logger = logging.getLogger(__name__)


def ula_step(
    model, x: np.ndarray, delta: float, xi: np.ndarray, iteration: Optional[int] = None
) -> np.ndarray:
    """
    X₊ = x - δ∇U(x) + √(2δ)ξ

    model 为 SmoothedTarget 时即 MYULA。
    """
    grad = model.gradient(x)
    if not np.all(np.isfinite(grad)):
        raise NumericalFailureException("ULA 步梯度非有限", iteration=iteration)
    return x - delta * grad + math.sqrt(2.0 * delta) * xi


def _use_prox_path(model, cfg: SamplerConfig) -> bool:
    has_prox = getattr(model, "has_prox", False)
    if cfg.step_solver == "prox":
        if not has_prox:
            raise UnsupportedModelException(f"{getattr(model, 'name', '模型')} 没有近端算子，无法走 prox 形式")
        return True
    if cfg.step_solver == "minimise":
        if not model.has_gradient:
            raise UnsupportedModelException(f"{getattr(model, 'name', '模型')} 没有梯度，无法走最小化形式")
        return False
    return has_prox


def theta_step(
    model,
    x: np.ndarray,
    cfg: SamplerConfig,
    xi: np.ndarray,
    iteration: Optional[int] = None,
) -> Tuple[np.ndarray, InnerSolveReport]:
    """
    θ-方法的一步

    θ = 0 时与 ula_step 完全一致；θ > 0 时:
      - prox 形式: X₊ = (1 - 1/θ)x + (1/θ)·prox_U^{δθ}(x + θ√(2δ)ξ)
      - 最小化形式: X₊ = argmin F(·; x, ξ)，‖∇F(X₊)‖ <= ε

    Args:
        model: TargetModel 或 SmoothedTarget
        x: 当前状态
        cfg: 采样器配置
        xi: 标准正态噪声
        iteration: 迭代序号，仅用于报错

    Returns:
        (新状态, InnerSolveReport)

    Raises:
        InnerSolveFailure: 内层未收敛且 cfg.on_inner_failure == "raise"
        NumericalFailureException: 新状态出现非有限值
    """
    theta, delta = cfg.theta, cfg.delta
    if theta == 0.0:
        return ula_step(model, x, delta, xi, iteration), InnerSolveReport(0, 0.0, True, "explicit")

    if _use_prox_path(model, cfg):
        lam = delta * theta
        p = model.prox(x + theta * math.sqrt(2.0 * delta) * xi, lam)
        x_new = (1.0 - 1.0 / theta) * x + p / theta
        report = InnerSolveReport(0, 0.0, True, "prox")
    else:
        objective = ThetaObjective(model, x, xi, theta, delta)
        x_new, report = inner_solve(
            objective, objective.warm_start, cfg.inner_tol, cfg.inner_max_iters, cfg.inner_method
        )
        if not report.converged:
            if cfg.on_inner_failure == "raise":
                raise InnerSolveFailure(
                    f"隐式步未在 {report.iterations} 次迭代内达到容差 {cfg.inner_tol:g}"
                    f"（‖∇F‖ = {report.grad_norm:.3e}）",
                    best_iterate=x_new,
                    grad_norm=report.grad_norm,
                    iterations=report.iterations,
                    iteration=iteration,
                )
            logger.debug(f"第 {iteration} 步内层未收敛: ‖∇F‖ = {report.grad_norm:.3e}")

    if not np.all(np.isfinite(x_new)):
        raise NumericalFailureException("θ-方法步产生非有限值", iteration=iteration)
    return x_new, report


def reflect(x: np.ndarray) -> np.ndarray:
    """投影回非负象限：逐分量取绝对值"""
    return np.abs(x)


def reflected_step(
    model,
    x: np.ndarray,
    cfg: SamplerConfig,
    xi: np.ndarray,
    iteration: Optional[int] = None,
) -> Tuple[np.ndarray, InnerSolveReport]:
    """R-IMLA / R-MYULA：先做 θ-方法（θ=0 即 ULA）步，再逐分量取绝对值"""
    x_tilde, report = theta_step(model, x, cfg, xi, iteration)
    return reflect(x_tilde), report
