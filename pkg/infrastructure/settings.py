"""运行时配置（.env）"""
import os
from pathlib import Path

from dotenv import load_dotenv

from infrastructure.exceptions import ConfigException

load_dotenv()


class RuntimeSettings:
    """运行时配置"""

    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
    LOG_DIR = os.getenv("LOG_DIR", "logs")
    OUTPUT_DIR = os.getenv("PROX_LANGEVIN_OUTPUT_DIR", "output")
    WORKERS = os.getenv("PROX_LANGEVIN_WORKERS", "1")

    PROJECT_ROOT = Path(__file__).resolve().parent.parent
    EXPERIMENT_CONFIG_DIR = PROJECT_ROOT / "config" / "experiments"

    @classmethod
    def workers(cls) -> int:
        """并发链数量"""
        try:
            value = int(cls.WORKERS)
        except ValueError:
            raise ConfigException(f"PROX_LANGEVIN_WORKERS 不是整数: {cls.WORKERS}")
        if value < 1:
            raise ConfigException(f"PROX_LANGEVIN_WORKERS 必须 >= 1: {value}")
        return value

    @classmethod
    def default_output_dir(cls) -> Path:
        return Path(cls.OUTPUT_DIR)
