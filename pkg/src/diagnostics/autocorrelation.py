"""自相关函数与有效样本量"""
import math

import numpy as np

from infrastructure.exceptions import DegenerateVarianceException, ValidationException


def _autocov(series: np.ndarray) -> np.ndarray:
    """基于 FFT 的有偏自协方差（除以 N）"""
    n = series.size
    centered = series - series.mean()
    size = 2 ** int(math.ceil(math.log2(2 * n)))
    spectrum = np.fft.rfft(centered, n=size)
    acov = np.fft.irfft(spectrum * np.conjugate(spectrum), n=size)[:n]
    return acov / n


def _validated(series: np.ndarray) -> np.ndarray:
    x = np.asarray(series, dtype=float).reshape(-1)
    if x.size < 2:
        raise ValidationException(f"序列长度至少为 2: {x.size}")
    if not np.all(np.isfinite(x)):
        raise ValidationException("序列包含非有限值")
    if np.ptp(x) == 0.0:
        raise DegenerateVarianceException("常数序列的方差为 0，无法计算自相关")
    return x


def acf(series: np.ndarray, max_lag: int) -> np.ndarray:
    """ρ(0..max_lag)，ρ(0) = 1"""
    x = _validated(series)
    if not 0 <= int(max_lag) < x.size:
        raise ValidationException(f"max_lag 必须位于 [0, {x.size - 1}]: {max_lag}")
    acov = _autocov(x)
    if acov[0] <= 0:
        raise DegenerateVarianceException("序列方差数值上为 0")
    return acov[: int(max_lag) + 1] / acov[0]


def ess(series: np.ndarray) -> float:
    """
    单链有效样本量 N / τ

    τ 用 Geyer 初始正序列截断并做单调化；τ 下限为 1/log10(N)，因此反相关序列的 ESS 可以超过 N。
    """
    x = _validated(series)
    n = x.size
    acov = _autocov(x)
    if acov[0] <= 0:
        raise DegenerateVarianceException("序列方差数值上为 0")
    mean_var = acov[0] * n / (n - 1.0)
    var_plus = mean_var * (n - 1.0) / n

    rho = np.zeros(n)
    rho[0] = 1.0
    rho_even = 1.0
    rho_odd = 1.0 - (mean_var - acov[1]) / var_plus
    rho[1] = rho_odd

    t = 1
    while t < n - 2 and rho_even + rho_odd >= 0.0:
        rho_even = 1.0 - (mean_var - acov[t + 1]) / var_plus
        rho_odd = 1.0 - (mean_var - acov[t + 2]) / var_plus
        rho[t + 1] = rho_even
        if rho_even + rho_odd >= 0.0:
            rho[t + 2] = rho_odd
        t += 2
    max_t = t

    t = 1
    while t <= max_t - 2:
        if rho[t + 1] + rho[t + 2] > rho[t - 1] + rho[t]:
            rho[t + 1] = (rho[t - 1] + rho[t]) / 2.0
            rho[t + 2] = rho[t + 1]
        t += 2

    tau = -1.0 + 2.0 * np.sum(rho[:max_t]) + np.sum(rho[max_t + 1 : max_t + 2])
    tau = max(tau, 1.0 / math.log10(n))
    return float(n / tau)
