"""Langevin 采样器：ULA/MYULA、IMLA/ILA（θ-方法）及反射变体"""
from src.samplers.chain import run_chain
from src.samplers.factory import build_kernel
from src.samplers.inner_solver import ThetaObjective, inner_solve
from src.samplers.lm_check import lm_consistency_check
from src.samplers.steps import reflect, reflected_step, theta_step, ula_step
from src.samplers.types import ChainOutput, InnerSolveReport, SamplerConfig

__all__ = [
    "SamplerConfig",
    "ChainOutput",
    "InnerSolveReport",
    "ThetaObjective",
    "inner_solve",
    "ula_step",
    "theta_step",
    "reflect",
    "reflected_step",
    "build_kernel",
    "run_chain",
    "lm_consistency_check",
]
