"""θ-方法在 m-强凸、L-光滑势上的压缩常数与最优步长"""
import math

from infrastructure.exceptions import ValidationException


def _check_constants(m: float, L: float, theta: float) -> None:
    if not (m > 0 and math.isfinite(L) and m <= L):
        raise ValidationException(f"要求 0 < m <= L < ∞: m={m}, L={L}")
    if not 0.0 <= theta <= 1.0:
        raise ValidationException(f"θ 必须位于 [0,1]: {theta}")


def delta_star(m: float, L: float, theta: float) -> float:
    """
    使压缩常数最小的步长

    δ* 是 Aδ² - Bδ - 2 = 0 的正根，A = 2θ(1-θ)Lm，B = (2θ-1)(L+m)。
    θ = 1/2 时为 2/√(Lm)，θ = 0 时为 2/(L+m)，θ = 1 时 C 关于 δ 单调递减，返回 inf。
    """
    _check_constants(m, L, theta)
    if theta == 1.0:
        return math.inf
    if theta == 0.5:
        return 2.0 / math.sqrt(L * m)
    A = 2.0 * theta * (1.0 - theta) * L * m
    B = (2.0 * theta - 1.0) * (L + m)
    S = math.sqrt(B * B + 8.0 * A)
    if B > 0:
        return (B + S) / (2.0 * A)
    # 有理化形式，避免 B < 0 时的相消
    return 4.0 / (S - B)


def contraction_C(m: float, L: float, delta: float, theta: float) -> float:
    """
    C = max_{z ∈ [mδ, Lδ]} |R₁(-z)|

    R₁(-z) 关于 z 单调递减，最大值在端点处取得，分段形式:
      δ <= δ*: (1 - (1-θ)mδ) / (1 + θmδ)
      δ >  δ*: ((1-θ)Lδ - 1) / (θLδ + 1)
    """
    _check_constants(m, L, theta)
    if not delta > 0:
        raise ValidationException(f"步长 δ 必须为正: {delta}")
    if delta <= delta_star(m, L, theta):
        return (1.0 - (1.0 - theta) * m * delta) / (1.0 + theta * m * delta)
    return ((1.0 - theta) * L * delta - 1.0) / (theta * L * delta + 1.0)
