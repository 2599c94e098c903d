"""强对数凹目标上的非渐近界与步数预测"""
import logging
import math
from typing import Optional, Tuple

from infrastructure.exceptions import ValidationException
from infrastructure.validators import validate_nonnegative, validate_positive
from src.theory.contraction import contraction_C, delta_star
from src.theory.gaussian import (
    explicit_scheme_search,
    invariant_bias,
    n_steps_gaussian,
    smallest_n_below,
    w2_gaussian,
)
from src.theory.types import AnalysisReport, GaussianSpec

logger = logging.getLogger(__name__)

BOUND_FORMS = ("proof", "statement")


def nonasymptotic_bound(
    m: float,
    L: float,
    delta: float,
    theta: float,
    d: int,
    n: float,
    eps_inner: float,
    w2_0: float,
) -> float:
    """
    W₂(π, Qₙ) <= CⁿW₂₀ + (1 - C^{n+1})/(1 - C) · b

    b = (δ²L^{3/2}√d/2 + (2/3)Lδ^{3/2}√(2d) + εδ) / (1 + θδm)，ε 为内层求解容差。

    Returns:
        界的值；C >= 1 时界无效，返回 math.inf
    """
    validate_positive("δ", delta)
    validate_nonnegative("eps_inner", eps_inner)
    C = contraction_C(m, L, delta, theta)
    bias = (
        delta**2 * L**1.5 * math.sqrt(d) / 2.0
        + (2.0 / 3.0) * L * delta**1.5 * math.sqrt(2.0 * d)
        + eps_inner * delta
    ) / (1.0 + theta * delta * m)

    if C >= 1.0:
        # 包括 mδ 极小时 C 在浮点意义上等于 1 的情形
        return math.inf
    decay = 0.0 if math.isinf(n) else C**n
    geometric = (1.0 if math.isinf(n) else 1.0 - C ** (n + 1)) / (1.0 - C)
    return decay * w2_0 + geometric * bias


def n_steps_strongly_logconcave(
    m: float, L: float, d: int, eps: float, w2_0: float, form: str = "proof"
) -> Tuple[int, float]:
    """
    IMLA 在 m-强凸、L-光滑势上达到精度 eps 的步长与步数

    δ = min{2/√(Lm), eps/(2κ√(Ld)), (9/128)·eps²/(dκ)}
    proof:     n = ⌈(1/2m)·max{√(Lm)/2, 2κ√(Ld)/eps, (128/9)dκ/eps²}·(ln w2_0 - ln(eps/2))⌉
    statement: n = ⌈max{√κ/4, 2κ√(κd)/(2√m·eps), (64/9)dκ/(m·eps²)}·(ln w2_0 - ln(eps/2))⌉
    """
    if form not in BOUND_FORMS:
        raise ValidationException(f"未知公式形式: {form}，可选 {BOUND_FORMS}")
    for name, value in (("m", m), ("L", L), ("eps", eps), ("w2_0", w2_0)):
        validate_positive(name, value)
    if m > L:
        raise ValidationException(f"要求 m <= L: m={m}, L={L}")
    kappa = L / m

    delta = min(
        2.0 / math.sqrt(L * m),
        eps / (2.0 * kappa * math.sqrt(L * d)),
        (9.0 / 128.0) * eps**2 / (d * kappa),
    )
    if form == "proof":
        rate = max(
            math.sqrt(L * m) / 2.0,
            2.0 * kappa * math.sqrt(L * d) / eps,
            (128.0 / 9.0) * d * kappa / eps**2,
        ) / (2.0 * m)
    else:
        rate = max(
            math.sqrt(kappa) / 4.0,
            2.0 * kappa * math.sqrt(kappa * d) / (2.0 * math.sqrt(m) * eps),
            (64.0 / 9.0) * d * kappa / (m * eps**2),
        )
    n = rate * (math.log(w2_0) - math.log(eps / 2.0))
    return max(int(math.ceil(n)), 0), delta


def analysis_report(
    spec: GaussianSpec,
    theta: float,
    delta: Optional[float] = None,
    n: int = 0,
    eps: float = 0.1,
    eps_inner: float = 0.0,
) -> AnalysisReport:
    """
    汇总高斯目标在给定 (θ, δ, n) 下的全部理论量

    delta 缺省时: θ ∈ (0,1) 取 δ*，θ = 1 取步数公式给出的 δ，θ = 0 取数值搜索的 δ。
    """
    m, L = spec.m, spec.L
    d_star = delta_star(m, L, theta)
    notes = []

    if delta is None:
        if theta == 0.0:
            _, delta, _ = explicit_scheme_search(spec, eps)
        elif theta == 1.0:
            _, delta = n_steps_gaussian(spec, 1.0, eps)
        else:
            delta = d_star

    w2_0 = w2_gaussian(spec, theta, delta, 0)
    if theta in (0.5, 1.0):
        n_predicted, _ = n_steps_gaussian(spec, theta, eps, w2_0)
        notes.append("n_predicted 为闭式公式估计")
    else:
        n_predicted = smallest_n_below(spec, theta, delta, eps)
        notes.append("n_predicted 为数值搜索结果，-1 表示不可达")

    C = contraction_C(m, L, delta, theta)
    bound = nonasymptotic_bound(m, L, delta, theta, spec.dim, n, eps_inner, w2_0)
    if math.isinf(bound):
        notes.append("C >= 1，非渐近界无效")

    return AnalysisReport(
        theta=theta,
        delta=delta,
        n=n,
        m=m,
        L=L,
        C=C,
        delta_star=d_star,
        w2_exact=w2_gaussian(spec, theta, delta, n),
        bias=invariant_bias(spec, theta, delta),
        n_predicted=n_predicted,
        bound_rhs=bound,
        eps=eps,
        notes=notes,
    )
