"""输入验证"""
import math
from pathlib import Path
from typing import Iterable

import numpy as np

from infrastructure.exceptions import ConfigException, ValidationException


def validate_file_path(file_path: str, suffixes: Iterable[str]) -> Path:
    path = Path(str(file_path).strip())
    if not path.exists():
        raise ConfigException(f"文件不存在: {file_path}")
    if not path.is_file():
        raise ConfigException(f"不是文件: {file_path}")
    allowed = {s.lower() for s in suffixes}
    if path.suffix.lower() not in allowed:
        raise ConfigException(f"不支持的格式: {path.suffix}（支持 {sorted(allowed)}）")
    return path.absolute()


def validate_positive(name: str, value: float, allow_inf: bool = False) -> float:
    value = float(value)
    if math.isnan(value) or value <= 0 or (math.isinf(value) and not allow_inf):
        raise ValidationException(f"{name} 必须为正数: {value}")
    return value


def validate_nonnegative(name: str, value: float) -> float:
    value = float(value)
    if math.isnan(value) or value < 0 or math.isinf(value):
        raise ValidationException(f"{name} 必须为非负有限数: {value}")
    return value


def validate_in_range(name: str, value: float, lo: float, hi: float) -> float:
    value = float(value)
    if not lo <= value <= hi:
        raise ValidationException(f"{name} 必须位于 [{lo}, {hi}]: {value}")
    return value


def validate_image(name: str, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ValidationException(f"{name} 必须是二维图像，实际形状 {x.shape}")
    return x
