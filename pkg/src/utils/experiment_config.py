"""
实验配置加载器

合并顺序（后者覆盖前者）:
    defaults.yaml 的 fallback -> defaults.yaml 中该实验的段 -> 用户 --config 文件 -> 命令行 --key value
"""
import copy
import dataclasses
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

import yaml

from infrastructure.exceptions import ConfigException
from infrastructure.settings import RuntimeSettings
from src.samplers.types import SamplerConfig

logger = logging.getLogger(__name__)

EXPERIMENTS = ("theory_table", "gauss_sweep", "gmm", "onedim", "deconv_gauss", "deconv_poisson", "sample")
TOP_LEVEL_KEYS = ("seed", "output_dir", "run_name", "workers")
SECTIONS = ("sampler", "problem")
_SAMPLER_FIELDS = {f.name for f in dataclasses.fields(SamplerConfig)}


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def parse_scalar(text: str) -> Any:
    """命令行取值按 YAML 标量解析；YAML 1.1 不认的 1e-4 之类再按浮点数解析"""
    try:
        value = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigException(f"无法解析取值 {text!r}: {e}")
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            return value
    return value


@dataclass
class ExperimentConfig:
    """合并后的实验配置"""
    experiment: str
    seed: int = 0
    output_dir: Path = field(default_factory=RuntimeSettings.default_output_dir)
    run_name: Optional[str] = None
    workers: int = 1
    sampler: Dict[str, Any] = field(default_factory=dict)
    problem: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigException(f"未知实验: {self.experiment}，可选 {EXPERIMENTS}")
        try:
            self.seed = int(self.seed)
            self.workers = int(self.workers)
        except (TypeError, ValueError):
            raise ConfigException(f"seed / workers 必须是整数: seed={self.seed}, workers={self.workers}")
        if not 0 <= self.seed < 2**64:
            raise ConfigException(f"seed 必须是 64 位无符号整数: {self.seed}")
        if self.workers < 1:
            raise ConfigException(f"workers 必须 >= 1: {self.workers}")
        self.output_dir = Path(self.output_dir)
        unknown = set(self.sampler) - _SAMPLER_FIELDS
        if unknown:
            raise ConfigException(f"sampler 段包含未知字段: {sorted(unknown)}")

    def get(self, key: str, default: Any = None) -> Any:
        """读取 problem 段的参数"""
        return self.problem.get(key, default)

    def require(self, key: str) -> Any:
        if self.problem.get(key) is None:
            raise ConfigException(f"{self.experiment}: 缺少必填参数 problem.{key}")
        return self.problem[key]

    def sampler_config(self, **overrides) -> SamplerConfig:
        """
        由 sampler 段构造 SamplerConfig

        overrides 中值为 None 的项忽略；delta 必须最终给出。
        """
        params = {k: v for k, v in self.sampler.items() if v is not None}
        params.update({k: v for k, v in overrides.items() if v is not None})
        params.setdefault("seed", self.seed)
        if "delta" not in params:
            raise ConfigException(f"{self.experiment}: 未给出步长 delta")
        for key in ("theta", "delta", "inner_tol"):
            params[key] = float(params[key])
        for key in ("n_iters", "inner_max_iters", "thinning", "seed"):
            if key in params:
                params[key] = int(params[key])
        if "burn_in" in params:
            params["burn_in"] = int(params["burn_in"])
        try:
            return SamplerConfig(**params)
        except TypeError as e:
            raise ConfigException(f"sampler 配置非法: {e}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "experiment": self.experiment,
            "seed": self.seed,
            "output_dir": str(self.output_dir),
            "run_name": self.run_name,
            "workers": self.workers,
            "sampler": copy.deepcopy(self.sampler),
            "problem": copy.deepcopy(self.problem),
        }


class ExperimentConfigLoader:
    """实验配置加载器"""

    def __init__(self, config_dir: Optional[Union[str, Path]] = None):
        self.config_dir = Path(config_dir) if config_dir is not None else RuntimeSettings.EXPERIMENT_CONFIG_DIR
        self._defaults: Optional[Dict[str, Any]] = None

    def _load_yaml(self, path: Path) -> Dict[str, Any]:
        if not path.exists():
            raise ConfigException(f"找不到配置文件: {path}")
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigException(f"解析配置文件 {path} 出错: {e}")
        if data is None:
            return {}
        if not isinstance(data, dict):
            raise ConfigException(f"配置文件顶层必须是映射: {path}")
        return data

    def _load_defaults(self) -> Dict[str, Any]:
        """加载 defaults.yaml，并缓存结果"""
        if self._defaults is None:
            path = self.config_dir / "defaults.yaml"
            logger.info(f"正在加载实验缺省配置: {path}")
            self._defaults = self._load_yaml(path)
        return self._defaults

    def defaults_for(self, experiment: str) -> Dict[str, Any]:
        """fallback 为基础，实验段覆盖"""
        if experiment not in EXPERIMENTS:
            raise ConfigException(f"未知实验: {experiment}，可选 {EXPERIMENTS}")
        defaults = self._load_defaults()
        section = defaults.get("experiments", {}).get(experiment, {}) or {}
        return _deep_merge(defaults.get("fallback", {}) or {}, section)

    @staticmethod
    def _route_key(merged: Dict[str, Any], key: str) -> Tuple[str, ...]:
        """点号路径直接使用；普通键优先顶层，其次 sampler，再次 problem"""
        if "." in key:
            path = tuple(key.split("."))
            if path[0] not in SECTIONS and path[0] not in TOP_LEVEL_KEYS:
                raise ConfigException(f"未知配置段: {path[0]}")
            return path
        if key in TOP_LEVEL_KEYS:
            return (key,)
        if key in _SAMPLER_FIELDS:
            return ("sampler", key)
        if key in merged.get("problem", {}):
            return ("problem", key)
        raise ConfigException(f"未知配置项: {key}（可使用 problem.{key} 显式指定）")

    @classmethod
    def apply_overrides(cls, merged: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
        result = copy.deepcopy(merged)
        for raw_key, raw_value in overrides.items():
            key = raw_key.lstrip("-").replace("-", "_")
            value = parse_scalar(raw_value) if isinstance(raw_value, str) else raw_value
            path = cls._route_key(result, key)
            node = result
            for part in path[:-1]:
                node = node.setdefault(part, {})
                if not isinstance(node, dict):
                    raise ConfigException(f"配置项 {key} 的上级不是映射")
            node[path[-1]] = value
            logger.debug(f"命令行覆盖: {'.'.join(path)} = {value!r}")
        return result

    def load(
        self,
        experiment: str,
        config_file: Optional[Union[str, Path]] = None,
        overrides: Optional[Dict[str, Any]] = None,
    ) -> ExperimentConfig:
        """
        加载并合并实验配置

        Args:
            experiment: 实验名（EXPERIMENTS 之一）
            config_file: 用户 YAML 文件；其中的 experiment 字段如存在必须与命令一致
            overrides: 命令行 --key value 覆盖项，值为字符串时按 YAML 标量解析

        Returns:
            ExperimentConfig
        """
        merged = self.defaults_for(experiment)
        if config_file is not None:
            user = self._load_yaml(Path(config_file))
            declared = user.pop("experiment", None)
            if declared is not None and declared != experiment:
                raise ConfigException(f"配置文件声明的实验 {declared} 与命令 {experiment} 不一致")
            unknown = set(user) - set(TOP_LEVEL_KEYS) - set(SECTIONS)
            if unknown:
                raise ConfigException(f"配置文件包含未知字段: {sorted(unknown)}")
            merged = _deep_merge(merged, user)
            logger.info(f"已合并用户配置: {config_file}")
        if overrides:
            merged = self.apply_overrides(merged, overrides)

        if merged.get("output_dir") is None:
            merged["output_dir"] = RuntimeSettings.default_output_dir()
        if merged.get("workers") is None:
            merged["workers"] = RuntimeSettings.workers()
        return ExperimentConfig(
            experiment=experiment,
            seed=merged.get("seed", 0),
            output_dir=merged["output_dir"],
            run_name=merged.get("run_name"),
            workers=merged["workers"],
            sampler=merged.get("sampler", {}) or {},
            problem=merged.get("problem", {}) or {},
        )


def parse_override_tokens(tokens: Iterable[str]) -> Dict[str, str]:
    """
    把 ['--delta', '0.1', '--problem.kind=laplace'] 解析为 {'delta': '0.1', 'problem.kind': 'laplace'}
    """
    result: Dict[str, str] = {}
    items: List[str] = list(tokens)
    i = 0
    while i < len(items):
        token = items[i]
        if not token.startswith("--") or len(token) <= 2:
            raise ConfigException(f"无法识别的参数: {token}")
        body = token[2:]
        if "=" in body:
            key, value = body.split("=", 1)
            i += 1
        else:
            if i + 1 >= len(items) or items[i + 1].startswith("--"):
                raise ConfigException(f"参数 {token} 缺少取值")
            key, value = body, items[i + 1]
            i += 2
        result[key] = value
    return result
