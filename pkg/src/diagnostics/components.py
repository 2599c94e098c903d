"""后验协方差的慢/快方向（用于 ACF 对比）"""
import logging
from typing import Tuple

import numpy as np

from infrastructure.exceptions import ValidationException

logger = logging.getLogger(__name__)

_POWER_ITERS = 2000
_POWER_TOL = 1e-10
_ILL_CONDITIONED = 1e-12


def _cov_apply(centered: np.ndarray, v: np.ndarray) -> np.ndarray:
    # C v = Xcᵀ(Xc v)/(n-1)，不显式构造 d×d 协方差
    return centered.T @ (centered @ v) / (centered.shape[0] - 1)


def _power_iteration(apply, dim: int, rng: np.random.Generator) -> Tuple[np.ndarray, float]:
    v = rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    value = 0.0
    for _ in range(_POWER_ITERS):
        w = apply(v)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return v, 0.0
        w /= norm
        if w @ v < 0:
            w = -w
        converged = np.linalg.norm(w - v) <= _POWER_TOL
        v = w
        value = float(v @ apply(v))
        if converged:
            break
    return v, value


def principal_directions(samples: np.ndarray, seed: int = 0) -> Tuple[np.ndarray, np.ndarray, bool]:
    """
    经验协方差的最大/最小特征方向

    最大方向用幂迭代，最小方向对 λ_max·I - C 做幂迭代。
    样本数不足（n-1 < d）或协方差病态时退回到方差最大/最小的坐标轴。

    Returns:
        (slow_direction, fast_direction, used_fallback)
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n, d = x.shape
    if n < 2:
        raise ValidationException(f"至少需要 2 个样本，当前 {n}")
    centered = x - x.mean(axis=0)
    variances = centered.var(axis=0, ddof=1)

    def coordinate_fallback(reason: str) -> Tuple[np.ndarray, np.ndarray, bool]:
        logger.warning(f"⚠️  协方差{reason}，改用方差最大/最小的坐标方向")
        slow = np.zeros(d)
        fast = np.zeros(d)
        slow[int(np.argmax(variances))] = 1.0
        fast[int(np.argmin(variances))] = 1.0
        return slow, fast, True

    if n - 1 < d:
        return coordinate_fallback(f"秩亏（样本 {n} < 维度 {d} + 1）")

    rng = np.random.default_rng(seed)
    slow, lam_max = _power_iteration(lambda v: _cov_apply(centered, v), d, rng)
    if lam_max <= 0.0:
        return coordinate_fallback("为零")
    fast, shifted = _power_iteration(lambda v: lam_max * v - _cov_apply(centered, v), d, rng)
    lam_min = lam_max - shifted
    if lam_min <= _ILL_CONDITIONED * lam_max:
        return coordinate_fallback(f"病态（λ_min/λ_max = {lam_min / lam_max:.2e}）")

    # 使两个方向严格正交
    fast = fast - (fast @ slow) * slow
    fast /= np.linalg.norm(fast)
    return slow, fast, False


def slow_fast_components(samples: np.ndarray, seed: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """链在最慢/最快混合方向上的投影序列"""
    x = np.asarray(samples, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    slow, fast, _ = principal_directions(x, seed)
    return x @ slow, x @ fast
