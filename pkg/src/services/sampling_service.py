"""通用采样命令：在高斯或一维目标上运行任意 θ 的链"""
import logging
import math
from typing import Dict

import numpy as np
import pandas as pd

from infrastructure.exceptions import ConfigException
from src.diagnostics.autocorrelation import ess
from src.diagnostics.series import thinning_index
from src.problems.gaussian import gaussian_target
from src.problems.onedim import ONEDIM_KINDS, onedim_smoothed_target, onedim_target
from src.repositories.run_output_repository import RunOutputRepository
from src.samplers.chain import run_chain
from src.utils.experiment_config import ExperimentConfig

logger = logging.getLogger(__name__)

TARGETS = ("gaussian",) + ONEDIM_KINDS


class SamplingService:
    """按配置构造目标并运行一条链，输出逐坐标统计与抽稀后的样本"""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.target_kind = str(config.require("target")).lower()
        if self.target_kind not in TARGETS:
            raise ConfigException(f"sample: 未知目标 {self.target_kind}，可选 {TARGETS}")
        self.repository = RunOutputRepository(config.output_dir, config.experiment, config.seed, config.run_name)

    def build_target(self):
        if self.target_kind == "gaussian":
            return gaussian_target(self.config.require("sigmas"))
        lam = self.config.get("smoothing_lambda")
        if lam is not None:
            return onedim_smoothed_target(self.target_kind, float(lam))
        return onedim_target(self.target_kind)

    def run(self) -> Dict:
        target = self.build_target()
        cfg = self.config.sampler_config(keep_samples=True)
        x0 = self.config.get("x0")
        x0 = np.zeros(target.dim) if x0 is None else np.broadcast_to(np.asarray(x0, dtype=float), (target.dim,))
        logger.info(f"🚀 通用采样: 目标={target.name}, 格式={cfg.scheme_name}")
        self.repository.write_config_snapshot(self.config.to_dict())

        output = run_chain(target, cfg, x0)
        sd = np.sqrt(output.running_variance)
        n_eff = []
        for i in range(target.dim):
            column = output.samples[:, i]
            n_eff.append(ess(column) if column.size > 3 and np.ptp(column) > 0 else math.nan)
        stats = pd.DataFrame({"coord": np.arange(target.dim), "mean": output.running_mean, "sd": sd, "ess": n_eff})

        points = int(self.config.get("sample_points", 2000))
        index = thinning_index(output.samples.shape[0], points)
        samples = pd.DataFrame(output.samples[index], columns=[f"x{i}" for i in range(target.dim)])
        samples.insert(0, "iteration", cfg.effective_burn_in + (index + 1) * cfg.thinning)
        if cfg.record_logpi:
            samples["logpi"] = output.logpi_trace[index]

        self.repository.write_csv("stats.csv", stats)
        self.repository.write_csv("samples.csv", samples)
        metrics = {
            "scheme": cfg.scheme_name,
            "n_kept": output.n_kept,
            "flagged_steps": len(output.flagged_steps),
            "mean": output.running_mean,
            "sd": sd,
        }
        self.repository.write_summary(metrics)
        print(f"\n✅ 采样完成: {cfg.scheme_name}，保留 {output.n_kept} 个样本")
        for row in stats.itertuples():
            print(f"   x{row.coord}: 均值 {row.mean:.4f}, 标准差 {row.sd:.4f}, ESS {row.ess:.0f}")
        return {"run_dir": str(self.repository.run_dir), **metrics}
