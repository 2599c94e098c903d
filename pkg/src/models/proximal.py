"""
闭式/半闭式近端算子

所有算子都按分量作用，接受标量或数组，返回 float 数组（标量输入返回 0 维数组）。
"""
import logging
import math

import numpy as np

from infrastructure.exceptions import ValidationException
from infrastructure.validators import validate_nonnegative, validate_positive

logger = logging.getLogger(__name__)

_NEWTON_TOL = 1e-14
_NEWTON_MAX_ITERS = 100
_BISECTION_MAX_ITERS = 200


def prox_l1(x: np.ndarray, lam: float) -> np.ndarray:
    """软阈值: sign(x)·max(|x| - λ, 0)"""
    lam = validate_nonnegative("λ", lam)
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.maximum(np.abs(x) - lam, 0.0)


def prox_box(x: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """投影到 [lo, hi]，与 λ 无关"""
    if not lo < hi:
        raise ValidationException(f"区间端点必须满足 lo < hi: lo={lo}, hi={hi}")
    return np.clip(np.asarray(x, dtype=float), lo, hi)


def _quartic_residual(p: np.ndarray, x: np.ndarray, lam: float) -> np.ndarray:
    return 4.0 * lam * p**3 + p - x


def prox_quartic(x: np.ndarray, lam: float) -> np.ndarray:
    """
    g(u) = u⁴ 的近端算子

    求单调三次方程 4λp³ + p - x = 0 的唯一实根。Newton 迭代从 p0 = x / (1 + 4λx²) 出发，
    未收敛的分量退回到区间 [min(0,x), max(0,x)] 上的二分。

    Args:
        x: 输入点
        lam: λ > 0

    Returns:
        近端点，与 x 同形
    """
    lam = validate_positive("λ", lam)
    x = np.asarray(x, dtype=float)
    p = x / (1.0 + 4.0 * lam * x**2)
    converged = np.zeros(x.shape, dtype=bool)

    for _ in range(_NEWTON_MAX_ITERS):
        step = _quartic_residual(p, x, lam) / (12.0 * lam * p**2 + 1.0)
        p = np.where(converged, p, p - step)
        converged |= np.abs(step) <= _NEWTON_TOL * (1.0 + np.abs(p))
        if converged.all():
            break

    bad = ~converged | ~np.isfinite(p)
    if np.any(bad):
        logger.debug(f"prox_quartic: {int(bad.sum())} 个分量 Newton 未收敛，改用二分")
        p = np.where(bad, _quartic_bisection(x, lam), p)
    return p


def _quartic_bisection(x: np.ndarray, lam: float) -> np.ndarray:
    lo = np.minimum(0.0, x)
    hi = np.maximum(0.0, x)
    for _ in range(_BISECTION_MAX_ITERS):
        mid = 0.5 * (lo + hi)
        positive = _quartic_residual(mid, x, lam) > 0
        hi = np.where(positive, mid, hi)
        lo = np.where(positive, lo, mid)
    return 0.5 * (lo + hi)


def _cauchy_objective(y: float, x: float, lam: float) -> float:
    return math.log1p(y * y) + (x - y) ** 2 / (2.0 * lam)


def _cubic_real_roots(x: float, lam: float) -> list:
    """y³ - x·y² + (1+2λ)·y - x = 0 的全部实根（降阶后用三角/卡尔达诺公式）"""
    b, c, d = -x, 1.0 + 2.0 * lam, -x
    shift = -b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b**3 / 27.0 - b * c / 3.0 + d
    disc = 4.0 * p**3 + 27.0 * q * q

    if disc < 0:
        # 三个实根
        r = 2.0 * math.sqrt(-p / 3.0)
        arg = (3.0 * q / (2.0 * p)) * math.sqrt(-3.0 / p)
        phi = math.acos(max(-1.0, min(1.0, arg))) / 3.0
        roots = [r * math.cos(phi - 2.0 * math.pi * k / 3.0) + shift for k in range(3)]
    else:
        s = math.sqrt(q * q / 4.0 + p**3 / 27.0)
        roots = [float(np.cbrt(-q / 2.0 + s) + np.cbrt(-q / 2.0 - s)) + shift]

    polished = []
    for y in roots:
        for _ in range(8):
            f = ((y - x) * y + c) * y - x
            fp = (3.0 * y - 2.0 * x) * y + c
            if fp == 0.0:
                break
            step = f / fp
            y -= step
            if abs(step) <= _NEWTON_TOL * (1.0 + abs(y)):
                break
        polished.append(y)
    return polished


def prox_cauchy_scalar(x: float, lam: float) -> float:
    """标量版 Cauchy 近端算子：枚举实根，取 F(y) = log(1+y²) + (x-y)²/(2λ) 的全局最小者"""
    x = float(x)
    best_y, best_f = None, math.inf
    for y in _cubic_real_roots(x, lam):
        f = _cauchy_objective(y, x, lam)
        tie = abs(f - best_f) <= 1e-15 * (1.0 + abs(f))
        if f < best_f and not tie:
            best_y, best_f = y, f
        elif tie and abs(y) < abs(best_y):
            best_y = y
    return best_y


def prox_cauchy(x: np.ndarray, lam: float) -> np.ndarray:
    """g(u) = log(1+u²) 的近端算子（按分量）"""
    lam = validate_positive("λ", lam)
    x = np.asarray(x, dtype=float)
    out = np.fromiter((prox_cauchy_scalar(v, lam) for v in x.ravel()), dtype=float, count=x.size)
    return out.reshape(x.shape)
