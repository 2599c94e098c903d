"""采样核实现"""
from typing import Optional, Tuple

import numpy as np

from src.samplers.interface import StepKernel
from src.samplers.steps import reflected_step, theta_step, ula_step
from src.samplers.types import InnerSolveReport

_EXPLICIT_REPORT = InnerSolveReport(0, 0.0, True, "explicit")


class ExplicitKernel(StepKernel):
    """ULA / MYULA（θ = 0）"""

    def step(self, x: np.ndarray, xi: np.ndarray, iteration: Optional[int] = None) -> Tuple[np.ndarray, InnerSolveReport]:
        return ula_step(self.model, x, self.cfg.delta, xi, iteration), _EXPLICIT_REPORT


class ThetaKernel(StepKernel):
    """IMLA（θ = 1/2）、ILA（θ = 1）及一般 θ"""

    def step(self, x: np.ndarray, xi: np.ndarray, iteration: Optional[int] = None) -> Tuple[np.ndarray, InnerSolveReport]:
        return theta_step(self.model, x, self.cfg, xi, iteration)


class ReflectedKernel(StepKernel):
    """R-IMLA / R-MYULA"""

    def step(self, x: np.ndarray, xi: np.ndarray, iteration: Optional[int] = None) -> Tuple[np.ndarray, InnerSolveReport]:
        return reflected_step(self.model, x, self.cfg, xi, iteration)
