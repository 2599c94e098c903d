"""
隐式步的内层求解器

隐式步等价于最小化强凸函数
    F(X; u, z) = θ⁻¹·U(θX + (1-θ)u) + ‖X - u - √(2δ)z‖² / (2δ)
    ∇F(X)      = ∇U(θX + (1-θ)u) + (X - u - √(2δ)z) / δ
停止准则为 ‖∇F‖ <= tol。未收敛时返回梯度范数最小的迭代点并在报告中标记。
"""
import logging
import math
from typing import Tuple

import numpy as np
from scipy.optimize import minimize

from infrastructure.exceptions import (
    DomainViolationException,
    NumericalFailureException,
    ValidationException,
)
from src.samplers.types import InnerSolveReport

logger = logging.getLogger(__name__)

_MAX_HALVINGS = 60


class ThetaObjective:
    """θ-方法隐式步的目标函数 F(·; u, z)"""

    def __init__(self, model, u: np.ndarray, z: np.ndarray, theta: float, delta: float):
        if theta <= 0:
            raise ValidationException(f"隐式步要求 θ > 0: {theta}")
        self.model = model
        self.u = np.asarray(u, dtype=float)
        self.theta = float(theta)
        self.delta = float(delta)
        self.anchor = self.u + math.sqrt(2.0 * self.delta) * np.asarray(z, dtype=float)

    @property
    def warm_start(self) -> np.ndarray:
        """U ≡ 0 时的精确解 u + √(2δ)z"""
        return self.anchor.copy()

    @property
    def initial_step(self) -> float:
        # 1 / (1/δ + θL)：F 的梯度 Lipschitz 常数的倒数
        L = getattr(self.model, "L", math.inf)
        if not math.isfinite(L):
            return self.delta
        return 1.0 / (1.0 / self.delta + self.theta * L)

    def _point(self, x: np.ndarray) -> np.ndarray:
        return self.theta * x + (1.0 - self.theta) * self.u

    def value(self, x: np.ndarray) -> float:
        return self.model.potential(self._point(x)) / self.theta + float(
            np.sum((x - self.anchor) ** 2)
        ) / (2.0 * self.delta)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return self.model.gradient(self._point(x)) + (x - self.anchor) / self.delta

    def value_and_gradient(self, x: np.ndarray) -> Tuple[float, np.ndarray]:
        return self.value(x), self.gradient(x)


def _safe_gradient(objective: ThetaObjective, x: np.ndarray):
    try:
        g = objective.gradient(x)
    except (DomainViolationException, FloatingPointError):
        return None
    if not np.all(np.isfinite(g)):
        return None
    return g


def _barzilai_borwein(
    objective: ThetaObjective, x0: np.ndarray, tol: float, max_iters: int
) -> Tuple[np.ndarray, InnerSolveReport]:
    x = np.array(x0, dtype=float)
    g = _safe_gradient(objective, x)
    if g is None:
        # 热启动点落在定义域外时退回当前状态 u（此时 θX+(1-θ)u = u）
        x = objective.u.copy()
        g = _safe_gradient(objective, x)
    if g is None:
        raise NumericalFailureException("内层求解的初始点梯度非有限")
    gn = float(np.linalg.norm(g))
    best_x, best_gn = x.copy(), gn
    if gn <= tol:
        return x, InnerSolveReport(0, gn, True, "bb")

    step0 = objective.initial_step
    max_step = 4.0 * objective.delta
    step = step0
    for k in range(1, max_iters + 1):
        # 遇到定义域外或非有限值时步长减半回溯
        for _ in range(_MAX_HALVINGS):
            x_new = x - step * g
            g_new = _safe_gradient(objective, x_new)
            if g_new is not None:
                break
            step *= 0.5
        else:
            logger.debug("内层求解回溯失败，返回当前最优点")
            return best_x, InnerSolveReport(k, best_gn, False, "bb")

        s = x_new - x
        y = g_new - g
        sy = float(np.dot(s.ravel(), y.ravel()))
        step = float(np.dot(s.ravel(), s.ravel())) / sy if sy > 0 else step0
        step = min(step, max_step)

        x, g = x_new, g_new
        gn = float(np.linalg.norm(g))
        if gn < best_gn:
            best_x, best_gn = x.copy(), gn
        if gn <= tol:
            return x, InnerSolveReport(k, gn, True, "bb")

    return best_x, InnerSolveReport(max_iters, best_gn, False, "bb")


def _lbfgs(
    objective: ThetaObjective, x0: np.ndarray, tol: float, max_iters: int
) -> Tuple[np.ndarray, InnerSolveReport]:
    shape = np.shape(x0)
    dim = int(np.size(x0))

    def fun(flat: np.ndarray):
        x = flat.reshape(shape)
        try:
            value, grad = objective.value_and_gradient(x)
        except DomainViolationException:
            return math.inf, np.zeros(dim)
        return value, np.asarray(grad, dtype=float).ravel()

    result = minimize(
        fun,
        np.asarray(x0, dtype=float).ravel(),
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": max_iters, "gtol": tol / math.sqrt(dim), "ftol": 0.0},
    )
    x = result.x.reshape(shape)
    g = _safe_gradient(objective, x)
    gn = math.inf if g is None else float(np.linalg.norm(g))
    used = int(result.nit)
    if gn <= tol:
        return x, InnerSolveReport(used, gn, True, "lbfgs")

    # 拟牛顿线搜索异常终止时，用剩余预算接着跑 BB
    remaining = max(max_iters - used, 1)
    start = x if g is not None else np.asarray(x0, dtype=float)
    x_bb, report = _barzilai_borwein(objective, start, tol, remaining)
    return x_bb, InnerSolveReport(used + report.iterations, report.grad_norm, report.converged, "lbfgs")


def inner_solve(
    objective: ThetaObjective,
    x0: np.ndarray,
    tol: float,
    max_iters: int,
    method: str = "bb",
) -> Tuple[np.ndarray, InnerSolveReport]:
    """
    求解 argmin F，直到 ‖∇F‖ <= tol 或用完 max_iters

    只有当前状态本身也不可求值时才抛 NumericalFailureException。

    Args:
        objective: θ-方法目标函数
        x0: 初始点（一般取 objective.warm_start）
        tol: 梯度范数阈值 ε
        max_iters: 迭代上限
        method: "bb" 或 "lbfgs"

    Returns:
        (解, InnerSolveReport)；未收敛时返回最优迭代点，report.converged = False
    """
    if method == "lbfgs":
        return _lbfgs(objective, x0, tol, max_iters)
    return _barzilai_borwein(objective, x0, tol, max_iters)
