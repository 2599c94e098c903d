"""
θ-方法在对角高斯目标上的精确分析

第 i 个坐标上一步更新为 X₊ = R₁(zᵢ)X + √(2δ)R₂(zᵢ)ξ，zᵢ = -δ/σᵢ²，
因此 n 步后的分布仍为高斯，W₂ 距离有闭式表达。
"""
import logging
import math
from typing import Tuple, Union

import numpy as np

from infrastructure.exceptions import ValidationException
from infrastructure.validators import validate_in_range, validate_positive
from src.theory.types import GaussianSpec

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# n 的搜索上限，超过即视为不可达
MAX_SEARCH_STEPS = 10**13


def _denominator(z: ArrayLike, theta: float) -> np.ndarray:
    den = 1.0 - theta * np.asarray(z, dtype=float)
    if np.any(den == 0.0):
        raise ValidationException(f"1 - θz = 0，R₁/R₂ 无定义: z={z}, θ={theta}")
    return den


def r1(z: ArrayLike, theta: float) -> ArrayLike:
    """R₁(z) = (1 + (1-θ)z) / (1 - θz)"""
    z_arr = np.asarray(z, dtype=float)
    out = (1.0 + (1.0 - theta) * z_arr) / _denominator(z_arr, theta)
    return float(out) if out.ndim == 0 else out


def r2(z: ArrayLike, theta: float) -> ArrayLike:
    """R₂(z) = 1 / (1 - θz)"""
    out = 1.0 / _denominator(z, theta)
    return float(out) if out.ndim == 0 else out


def _multipliers(spec: GaussianSpec, theta: float, delta: float) -> Tuple[np.ndarray, np.ndarray]:
    z = -delta / spec.sigmas**2
    return np.asarray(r1(z, theta), dtype=float), np.asarray(r2(z, theta), dtype=float)


def _geometric_sum(r1sq: np.ndarray, n: float) -> np.ndarray:
    """Σ_{k<n} R₁^{2k}；R₁² = 1 时取极限 n"""
    out = np.empty_like(r1sq)
    unit = np.abs(r1sq - 1.0) < 1e-15
    with np.errstate(over="ignore", invalid="ignore"):
        if math.isinf(n):
            out[~unit] = np.where(r1sq[~unit] < 1.0, 1.0 / (1.0 - r1sq[~unit]), math.inf)
        else:
            out[~unit] = (1.0 - r1sq[~unit] ** n) / (1.0 - r1sq[~unit])
    out[unit] = n
    return out


def _bias_terms(spec: GaussianSpec, theta: float, delta: float, n: float) -> Tuple[np.ndarray, np.ndarray]:
    R1, R2 = _multipliers(spec, theta, delta)
    r1sq = R1**2
    x0 = spec.x0
    with np.errstate(over="ignore", invalid="ignore"):
        if math.isinf(n):
            decay = np.where(r1sq < 1.0, 0.0, np.where(r1sq == 1.0, 1.0, math.inf))
        else:
            decay = r1sq**n
        d_terms = np.where(x0 == 0.0, 0.0, decay * x0**2)
        G = _geometric_sum(r1sq, n)
        b_terms = (spec.sigmas - math.sqrt(2.0 * delta) * R2 * np.sqrt(G)) ** 2
    return d_terms, b_terms


def w2_gaussian(spec: GaussianSpec, theta: float, delta: float, n: Union[int, float]) -> float:
    """
    从 δ_{x0} 出发运行 n 步后与目标 π 的 W₂ 距离

    W₂² = Σᵢ Dₙ + Bₙ，Dₙ = R₁^{2n}x₀²，Bₙ = [σ - √(2δ)R₂·√(Σ_{k<n}R₁^{2k})]²。
    n 可以取 math.inf（此时得到数值不变测度的偏差）；不稳定时返回 inf。
    """
    validate_in_range("θ", theta, 0.0, 1.0)
    validate_positive("δ", delta)
    if not (math.isinf(n) or (n >= 0 and float(n) == int(n))):
        raise ValidationException(f"n 必须是非负整数或 inf: {n}")
    d_terms, b_terms = _bias_terms(spec, theta, delta, float(n))
    total = float(np.sum(d_terms) + np.sum(b_terms))
    return math.sqrt(total) if math.isfinite(total) else math.inf


def gaussian_moments(spec: GaussianSpec, theta: float, delta: float, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """n 步后逐坐标的均值 R₁ⁿx₀ 与方差 2δR₂²·Σ_{k<n}R₁^{2k}"""
    R1, R2 = _multipliers(spec, theta, delta)
    with np.errstate(over="ignore"):
        mean = R1**n * spec.x0
        var = 2.0 * delta * R2**2 * _geometric_sum(R1**2, float(n))
    return mean, var


def numerical_invariant_variance(spec: GaussianSpec, theta: float, delta: float) -> np.ndarray:
    """数值不变测度 π̃ 的逐坐标方差 2δR₂²/(1-R₁²)；|R₁| >= 1 的坐标为 inf"""
    R1, R2 = _multipliers(spec, theta, delta)
    r1sq = R1**2
    with np.errstate(divide="ignore"):
        return np.where(r1sq < 1.0, 2.0 * delta * R2**2 / (1.0 - r1sq), math.inf)


def invariant_bias(spec: GaussianSpec, theta: float, delta: float) -> float:
    """W₂(π, π̃) = √Σ(σᵢ - σ̃ᵢ)²"""
    var = numerical_invariant_variance(spec, theta, delta)
    if not np.all(np.isfinite(var)):
        return math.inf
    return float(np.sqrt(np.sum((spec.sigmas - np.sqrt(var)) ** 2)))


def phi_theta1(sigma: ArrayLike, delta: float) -> ArrayLike:
    """φ(σ, δ) = σ(1 - 1/√(1 + δ/(2σ²)))：θ = 1 时单个坐标的标准差偏差"""
    sigma = np.asarray(sigma, dtype=float)
    return sigma * (1.0 - 1.0 / np.sqrt(1.0 + delta / (2.0 * sigma**2)))


def bias_theta1(spec: GaussianSpec, delta: float) -> Tuple[float, float]:
    """
    ILA（θ = 1）的偏差

    Returns:
        (exact, bound)，exact = √Σφ(σᵢ,δ)²，bound = min(√(dδ)/2, √d·δ/(4σ_min))
    """
    delta = validate_positive("δ", delta)
    d = spec.dim
    exact = float(np.sqrt(np.sum(phi_theta1(spec.sigmas, delta) ** 2)))
    bound = min(math.sqrt(d * delta) / 2.0, math.sqrt(d) * delta / (4.0 * spec.sigma_min))
    return exact, bound


def n_steps_gaussian(
    spec: GaussianSpec, theta: float, eps: float, w2_0: float = None
) -> Tuple[int, float]:
    """
    达到 W₂ <= eps 的步数估计（向上取整的公式值，不是保证）

    θ = 1/2: δ = 2σ_minσ_max，n = ⌈(√κ/2)(ln w2_0 - ln eps)⌉，与维度无关
    θ = 1:   δ = max(eps²/d, 2·eps·σ_min/√d)，
             n = ⌈min(dσ²_max/eps², √(dκ)σ_max/(2eps))·(ln w2_0 - ln(eps/2))⌉

    Args:
        spec: 高斯目标
        theta: 1/2 或 1
        eps: 目标精度
        w2_0: 初始距离，缺省为 W₂(π, δ_{x0})

    Returns:
        (n, δ)；eps >= w2_0 时 n = 0
    """
    eps = validate_positive("eps", eps)
    d, kappa = spec.dim, spec.kappa
    if w2_0 is None:
        w2_0 = w2_gaussian(spec, theta, 1.0, 0)

    if theta == 0.5:
        delta = 2.0 * spec.sigma_min * spec.sigma_max
        if eps >= w2_0:
            return 0, delta
        n = math.sqrt(kappa) / 2.0 * (math.log(w2_0) - math.log(eps))
    elif theta == 1.0:
        delta = max(eps**2 / d, 2.0 * eps * spec.sigma_min / math.sqrt(d))
        if eps >= w2_0:
            return 0, delta
        rate = min(d * spec.sigma_max**2 / eps**2, math.sqrt(d * kappa) * spec.sigma_max / (2.0 * eps))
        n = rate * (math.log(w2_0) - math.log(eps / 2.0))
    else:
        raise ValidationException(f"步数公式只对 θ ∈ {{1/2, 1}} 给出，当前 θ = {theta}")
    return max(int(math.ceil(n)), 0), delta


def smallest_n_below(spec: GaussianSpec, theta: float, delta: float, eps: float) -> int:
    """
    使 w2_gaussian <= eps 的最小 n（倍增 + 二分）

    不可达（数值不变测度偏差 > eps 或超过搜索上限）时返回 -1。
    二分假设 W₂ 在倍增区间内关于 n 单调。
    """
    if w2_gaussian(spec, theta, delta, 0) <= eps:
        return 0
    if not w2_gaussian(spec, theta, delta, math.inf) < eps:
        return -1
    hi = 1
    while w2_gaussian(spec, theta, delta, hi) > eps:
        hi *= 2
        if hi > MAX_SEARCH_STEPS:
            return -1
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if w2_gaussian(spec, theta, delta, mid) <= eps:
            hi = mid
        else:
            lo = mid
    return hi


def largest_delta_with_bias(spec: GaussianSpec, theta: float, target: float, upper: float) -> float:
    """在 (0, upper] 上二分求使 invariant_bias <= target 的最大 δ"""
    if invariant_bias(spec, theta, upper) <= target:
        return upper
    lo, hi = 0.0, upper
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if invariant_bias(spec, theta, mid) <= target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return lo


def explicit_scheme_search(spec: GaussianSpec, eps: float) -> Tuple[int, float, bool]:
    """
    θ = 0（ULA）没有闭式步数公式，数值搜索:
      δ = 稳定域 (0, 2/L) 内使不变测度偏差 <= eps/2 的最大步长（此时 C < 1），
      再取 W₂ <= eps 的最小 n

    Returns:
        (n, δ, feasible)
    """
    eps = validate_positive("eps", eps)
    stability = 2.0 / spec.L
    delta = largest_delta_with_bias(spec, 0.0, eps / 2.0, stability * (1.0 - 1e-12))
    if delta <= 0:
        logger.warning(f"θ=0: κ={spec.kappa:g}, eps={eps:g} 找不到可行步长")
        return -1, 0.0, False
    n = smallest_n_below(spec, 0.0, delta, eps)
    return n, delta, n >= 0
