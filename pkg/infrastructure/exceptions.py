"""异常系统"""
from typing import Optional

import numpy as np


class AppException(Exception):
    def __init__(self, message: str, code: str = "APP_ERROR"):
        self.message = message
        self.code = code
        super().__init__(self.message)


class ValidationException(AppException):
    """参数非法（形状、取值范围等）"""
    def __init__(self, message: str):
        super().__init__(message, "VALIDATION_ERROR")


class ConfigException(AppException):
    """配置文件缺失或配置项非法"""
    def __init__(self, message: str):
        super().__init__(message, "CONFIG_ERROR")


class UnsupportedModelException(AppException):
    """模型缺少所需的梯度或近端算子"""
    def __init__(self, message: str):
        super().__init__(message, "UNSUPPORTED_MODEL")


class UndefinedMomentException(AppException):
    def __init__(self, message: str):
        super().__init__(message, "UNDEFINED_MOMENT")


class DegenerateVarianceException(AppException):
    """常数序列无法计算自相关"""
    def __init__(self, message: str):
        super().__init__(message, "DEGENERATE_VARIANCE")


class NumericalFailureException(AppException):
    """数值失败（非有限值等），携带出错的迭代序号"""
    def __init__(self, message: str, iteration: Optional[int] = None, code: str = "NUMERICAL_FAILURE"):
        super().__init__(message, code)
        self.iteration = iteration

    def __str__(self) -> str:
        if self.iteration is None:
            return self.message
        return f"{self.message} (iteration {self.iteration})"


class InnerSolveFailure(NumericalFailureException):
    """隐式步内层求解未在迭代上限内达到容差"""
    def __init__(
        self,
        message: str,
        best_iterate: np.ndarray,
        grad_norm: float,
        iterations: int,
        iteration: Optional[int] = None,
    ):
        super().__init__(message, iteration=iteration, code="INNER_SOLVE_FAILURE")
        self.best_iterate = best_iterate
        self.grad_norm = grad_norm
        self.iterations = iterations


class DomainViolationException(NumericalFailureException):
    """似然在定义域之外被求值（如 Poisson 模型 (Ax)+β<=0）"""
    def __init__(self, message: str, iteration: Optional[int] = None):
        super().__init__(message, iteration=iteration, code="DOMAIN_VIOLATION")
