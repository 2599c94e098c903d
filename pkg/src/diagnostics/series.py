"""指标序列、直方图、滑动均值、平稳性检查"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Tuple, Union

import numpy as np
import pandas as pd
from scipy.stats import gaussian_kde

from infrastructure.exceptions import ValidationException
from src.diagnostics.autocorrelation import ess

logger = logging.getLogger(__name__)


@dataclass
class MetricSeries:
    """按迭代记录的标量指标；迭代序号严格递增"""
    name: str
    iterations: List[int] = field(default_factory=list)
    values: List[float] = field(default_factory=list)

    def append(self, iteration: int, value: float) -> None:
        if self.iterations and iteration <= self.iterations[-1]:
            raise ValidationException(
                f"{self.name}: 迭代序号必须严格递增 ({iteration} <= {self.iterations[-1]})"
            )
        self.iterations.append(int(iteration))
        self.values.append(float(value))

    def __len__(self) -> int:
        return len(self.iterations)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"iteration": self.iterations, self.name: self.values})


def running_mean(series: np.ndarray) -> np.ndarray:
    """逐步累计均值（沿第 0 维）"""
    x = np.asarray(series, dtype=float)
    counts = np.arange(1, x.shape[0] + 1).reshape((-1,) + (1,) * (x.ndim - 1))
    return np.cumsum(x, axis=0) / counts


def histogram(samples: np.ndarray, bins: Union[str, int, np.ndarray] = "fd", value_range: Tuple[float, float] = None) -> pd.DataFrame:
    """密度归一化直方图，缺省 Freedman-Diaconis 分箱"""
    x = np.asarray(samples, dtype=float).reshape(-1)
    x = x[np.isfinite(x)]
    if x.size == 0:
        return pd.DataFrame({"bin_left": [], "bin_right": [], "density": []})
    density, edges = np.histogram(x, bins=bins, range=value_range, density=True)
    return pd.DataFrame({"bin_left": edges[:-1], "bin_right": edges[1:], "density": density})


def logpi_density(values: np.ndarray, points: int = 200) -> pd.DataFrame:
    """log-π 统计量的高斯核平滑密度"""
    x = np.asarray(values, dtype=float).reshape(-1)
    x = x[np.isfinite(x)]
    if x.size < 2 or np.ptp(x) == 0.0:
        logger.warning("log-π 样本不足或为常数，跳过核密度估计")
        return pd.DataFrame({"logpi": [], "density": []})
    grid = np.linspace(x.min(), x.max(), points)
    return pd.DataFrame({"logpi": grid, "density": gaussian_kde(x)(grid)})


def stationarity_check(trace: np.ndarray) -> Tuple[bool, dict]:
    """
    后半段均值是否落在第三个四分之一段均值的 2 个标准误之内

    标准误按第三段的 ESS 计算。
    """
    x = np.asarray(trace, dtype=float).reshape(-1)
    n = x.size
    if n < 8:
        raise ValidationException(f"平稳性检查至少需要 8 个点，当前 {n}")
    half = x[n // 2 :]
    third_quarter = x[n // 2 : (3 * n) // 4]
    n_eff = ess(third_quarter)
    stderr = float(third_quarter.std(ddof=1)) / math.sqrt(n_eff)
    diff = float(half.mean() - third_quarter.mean())
    passed = abs(diff) <= 2.0 * stderr
    details = {"second_half_mean": float(half.mean()), "third_quarter_mean": float(third_quarter.mean()),
               "stderr": stderr, "ess": n_eff, "passed": passed}
    return passed, details


def thinning_index(size: int, points: int) -> np.ndarray:
    """在 [0, size) 上均匀取至多 points 个下标"""
    if size <= 0:
        return np.empty(0, dtype=int)
    return np.unique(np.linspace(0, size - 1, max(min(int(points), size), 1)).astype(int))


def thinned_trace(values: np.ndarray, points: int = 2000, name: str = "logpi") -> pd.DataFrame:
    """均匀抽取至多 points 个点的轨迹，iteration 从 1 开始"""
    x = np.asarray(values, dtype=float).reshape(-1)
    index = thinning_index(x.size, points)
    return pd.DataFrame({"iteration": index + 1, name: x[index]})
