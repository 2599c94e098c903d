"""采样核统一接口"""
from abc import ABC, abstractmethod
from typing import Optional, Tuple

import numpy as np

from src.samplers.types import InnerSolveReport, SamplerConfig


class StepKernel(ABC):
    """马尔可夫链单步转移核 X_k -> X_{k+1}"""

    def __init__(self, model, cfg: SamplerConfig):
        self.model = model
        self.cfg = cfg

    @property
    def name(self) -> str:
        return self.cfg.scheme_name

    @abstractmethod
    def step(
        self, x: np.ndarray, xi: np.ndarray, iteration: Optional[int] = None
    ) -> Tuple[np.ndarray, InnerSolveReport]:
        """
        执行一步转移

        Args:
            x: 当前状态
            xi: 本步使用的标准正态噪声
            iteration: 迭代序号（报错时使用）

        Returns:
            (新状态, 内层求解报告)
        """
        pass
