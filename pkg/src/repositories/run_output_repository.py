"""
实验运行目录

一次运行对应一个目录 <output_dir>/<experiment>_seed<seed>（或显式 run_name），
包含配置快照、CSV 表、PGM 图像与 summary.json。所有文件先写临时文件再原子替换。
"""
import json
import logging
import math
import os
import threading
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
import yaml

from infrastructure.exceptions import ValidationException
from src.repositories.image_repository import ImageRepository

logger = logging.getLogger(__name__)

# summary.json 的字段 -> 允许的类型
SUMMARY_SCHEMA: Dict[str, tuple] = {
    "experiment": (str,),
    "seed": (int,),
    "status": (str,),
    "files": (list,),
    "metrics": (dict,),
    "notes": (list,),
}
SUMMARY_STATUSES = ("ok", "partial", "failed")


def validate_summary(summary: Dict[str, Any]) -> None:
    """按 SUMMARY_SCHEMA 校验摘要，失败时抛 ValidationException"""
    if not isinstance(summary, dict):
        raise ValidationException(f"summary 必须是字典: {type(summary).__name__}")
    missing = [key for key in SUMMARY_SCHEMA if key not in summary]
    if missing:
        raise ValidationException(f"summary 缺少字段: {missing}")
    for key, types in SUMMARY_SCHEMA.items():
        value = summary[key]
        if isinstance(value, bool) or not isinstance(value, types):
            raise ValidationException(f"summary.{key} 类型错误: {type(value).__name__}")
    if summary["status"] not in SUMMARY_STATUSES:
        raise ValidationException(f"summary.status 非法: {summary['status']}，可选 {SUMMARY_STATUSES}")
    if not all(isinstance(f, str) for f in summary["files"]):
        raise ValidationException("summary.files 只能包含文件名字符串")
    if not all(isinstance(n, str) for n in summary["notes"]):
        raise ValidationException("summary.notes 只能包含字符串")


def to_jsonable(value: Any) -> Any:
    """numpy 标量/数组转为原生类型；非有限浮点数写成字符串 inf / -inf / nan"""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, Path):
        return str(value)
    return value


class RunOutputRepository:
    """单次运行的输出目录"""

    def __init__(self, output_dir: Union[str, Path], experiment: str, seed: int, run_name: Optional[str] = None):
        self.experiment = experiment
        self.seed = int(seed)
        self.run_dir = Path(output_dir) / (run_name or f"{experiment}_seed{self.seed}")
        self.run_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._written: List[str] = []
        logger.info(f"📁 输出目录: {self.run_dir}")

    @property
    def written_files(self) -> List[str]:
        with self._lock:
            return list(self._written)

    def _atomic_write(self, name: str, payload: bytes) -> Path:
        target = self.run_dir / name
        tmp = target.with_name(f".{target.name}.{threading.get_ident()}.tmp")
        with self._lock:
            tmp.write_bytes(payload)
            os.replace(tmp, target)
            if name not in self._written:
                self._written.append(name)
        logger.info(f"💾 写入 {target}")
        return target

    def write_csv(self, name: str, frame: pd.DataFrame) -> Path:
        """UTF-8、逗号分隔、带表头"""
        if not name.endswith(".csv"):
            name = f"{name}.csv"
        if frame.columns.empty:
            raise ValidationException(f"{name}: CSV 至少需要一列")
        text = frame.to_csv(index=False, lineterminator="\n")
        return self._atomic_write(name, text.encode("utf-8"))

    def write_json(self, name: str, data: Dict[str, Any]) -> Path:
        if not name.endswith(".json"):
            name = f"{name}.json"
        text = json.dumps(to_jsonable(data), indent=2, ensure_ascii=False, sort_keys=True)
        return self._atomic_write(name, (text + "\n").encode("utf-8"))

    def write_config_snapshot(self, config: Dict[str, Any]) -> Path:
        text = yaml.safe_dump(to_jsonable(config), allow_unicode=True, sort_keys=True)
        return self._atomic_write("config.yaml", text.encode("utf-8"))

    def write_image(
        self,
        name: str,
        image: np.ndarray,
        bit_depth: int = 16,
        value_range: Optional[Tuple[float, float]] = None,
    ) -> Path:
        if not name.endswith(".pgm"):
            name = f"{name}.pgm"
        return self._atomic_write(name, ImageRepository.encode_pgm(image, bit_depth, value_range))

    def write_summary(
        self,
        metrics: Dict[str, Any],
        notes: Optional[List[str]] = None,
        status: str = "ok",
    ) -> Path:
        """summary.json，files 字段列出本次运行已写入的全部文件"""
        summary = {
            "experiment": self.experiment,
            "seed": self.seed,
            "status": status,
            "files": sorted(set(self.written_files) | {"summary.json"}),
            "metrics": to_jsonable(metrics),
            "notes": list(notes or []),
        }
        validate_summary(summary)
        return self.write_json("summary.json", summary)
