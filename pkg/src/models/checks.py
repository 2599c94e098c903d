"""模型自检：有限差分梯度、近端最优性"""
from typing import Callable, Optional

import numpy as np


def finite_difference_gradient(
    fn: Callable[[np.ndarray], float], x: np.ndarray, h: float = 1e-6
) -> np.ndarray:
    """中心差分梯度"""
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    flat = x.ravel()
    out = grad.ravel()
    for i in range(flat.size):
        step = h * max(1.0, abs(flat[i]))
        xp = flat.copy()
        xm = flat.copy()
        xp[i] += step
        xm[i] -= step
        out[i] = (fn(xp.reshape(x.shape)) - fn(xm.reshape(x.shape))) / (2.0 * step)
    return grad


def gradient_check_error(model, x: np.ndarray, h: float = 1e-6) -> float:
    """
    ‖∇U(x) - FD(U, x)‖ / (1 + ‖∇U(x)‖)

    模型需要同时提供 potential 与 gradient。
    """
    analytic = model.gradient(x)
    numeric = finite_difference_gradient(model.potential, x, h)
    return float(np.linalg.norm(analytic - numeric) / (1.0 + np.linalg.norm(analytic)))


def prox_optimality_residual(
    grad_g: Callable[[np.ndarray], np.ndarray], x: np.ndarray, p: np.ndarray, lam: float
) -> float:
    """光滑 g 的近端最优性残差 ‖∇g(p) + (p - x)/λ‖"""
    return float(np.linalg.norm(grad_g(p) + (np.asarray(p) - np.asarray(x)) / lam))


def grid_prox(
    g: Callable[[np.ndarray], np.ndarray],
    x: float,
    lam: float,
    lo: Optional[float] = None,
    hi: Optional[float] = None,
    points: int = 20001,
    rounds: int = 6,
) -> float:
    """一维暴力网格 + 逐层加密求 argmin_u g(u) + (x-u)²/(2λ)，用作闭式近端算子的参照"""
    lo = x - 10.0 - abs(x) if lo is None else lo
    hi = x + 10.0 + abs(x) if hi is None else hi
    best = 0.5 * (lo + hi)
    for _ in range(rounds):
        grid = np.linspace(lo, hi, points)
        values = g(grid) + (x - grid) ** 2 / (2.0 * lam)
        k = int(np.argmin(values))
        best = float(grid[k])
        width = (hi - lo) / (points - 1)
        lo, hi = best - 2.0 * width, best + 2.0 * width
    return best
