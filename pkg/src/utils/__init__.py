"""工具类"""
from src.utils.experiment_config import ExperimentConfig, ExperimentConfigLoader, parse_override_tokens

__all__ = ["ExperimentConfig", "ExperimentConfigLoader", "parse_override_tokens"]
