"""测试公共夹具"""
import logging
from pathlib import Path

import numpy as np
import pytest

from src.models.types import TargetModel
from src.problems.gaussian import gaussian_target
from src.utils.experiment_config import ExperimentConfigLoader


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def gaussian_2d() -> TargetModel:
    return gaussian_target([1.0, 0.5])


@pytest.fixture
def logcosh_target() -> TargetModel:
    """U(x) = Σ log cosh(xᵢ) + xᵢ²/2：1-强凸、2-光滑，无闭式 prox"""
    return TargetModel(
        dim=2,
        potential_fn=lambda x: float(np.sum(np.log(np.cosh(x)) + 0.5 * x**2)),
        gradient_fn=lambda x: np.tanh(x) + x,
        m=1.0,
        L=2.0,
        name="logcosh",
    )


@pytest.fixture
def make_config(tmp_path: Path):
    """按实验名加载缺省配置，输出目录指向 tmp_path"""
    loader = ExperimentConfigLoader()

    def factory(experiment: str, overrides=None, config_file=None):
        merged = {"output_dir": str(tmp_path), "workers": 2}
        merged.update(overrides or {})
        return loader.load(experiment, config_file, merged)

    return factory


@pytest.fixture
def restore_root_logging():
    """setup_logging 会清空根日志的 handler，测试结束后恢复"""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    for handler in root.handlers:
        if handler not in handlers:
            handler.close()
    root.handlers[:] = handlers
    root.setLevel(level)
