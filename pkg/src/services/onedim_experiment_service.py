"""一维分布实验：MYULA / IMLA / ILA 的直方图、标准差与轨迹"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Tuple

import numpy as np
import pandas as pd

from infrastructure.exceptions import ConfigException, UndefinedMomentException
from infrastructure.random_streams import spawn_seeds
from src.diagnostics.series import histogram, thinned_trace
from src.problems.onedim import (
    ONEDIM_KINDS,
    onedim_density,
    onedim_exact_sd,
    onedim_smoothed_target,
    onedim_target,
)
from src.repositories.run_output_repository import RunOutputRepository
from src.samplers.chain import run_chain
from src.utils.experiment_config import ExperimentConfig

logger = logging.getLogger(__name__)

SCHEME_THETAS = {"MYULA": 0.0, "IMLA": 0.5, "ILA": 1.0}
SD_COLUMNS = ["kind", "scheme", "delta", "sd_est", "sd_exact", "rel_error"]


class OneDimExperimentService:
    """
    四个一维目标上的采样对比

    MYULA 的平滑参数取 λ = δ；IMLA / ILA 直接使用 prox 形式的 θ-步。
    """

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.kinds = [str(k).lower() for k in config.require("kinds")]
        bad = [k for k in self.kinds if k not in ONEDIM_KINDS]
        if bad:
            raise ConfigException(f"onedim: 未知分布 {bad}，可选 {ONEDIM_KINDS}")
        self.schemes = list(config.get("schemes", list(SCHEME_THETAS)))
        bad = [s for s in self.schemes if s not in SCHEME_THETAS]
        if bad:
            raise ConfigException(f"onedim: 未知采样器 {bad}，可选 {list(SCHEME_THETAS)}")
        self.deltas = {k: float(v) for k, v in (config.get("deltas") or {}).items()}
        missing = [k for k in self.kinds if k not in self.deltas]
        if missing:
            raise ConfigException(f"onedim: 缺少步长 problem.deltas.{missing[0]}")
        self.starts = {k: float(v) for k, v in (config.get("x0") or {}).items()}
        self.repository = RunOutputRepository(config.output_dir, config.experiment, config.seed, config.run_name)

    def _run_one(self, kind: str, scheme: str, seed: int) -> Tuple[str, str, np.ndarray]:
        delta = self.deltas[kind]
        if scheme == "MYULA":
            target = onedim_smoothed_target(kind, delta)
        else:
            target = onedim_target(kind)
        cfg = self.config.sampler_config(theta=SCHEME_THETAS[scheme], delta=delta, seed=seed, record_logpi=False)
        x0 = np.array([self.starts.get(kind, 0.0)])
        output = run_chain(target, cfg, x0)
        return kind, scheme, output.samples[:, 0]

    def _histogram(self, kind: str, scheme: str, samples: np.ndarray) -> pd.DataFrame:
        ranges = self.config.get("hist_range") or {}
        value_range = tuple(float(v) for v in ranges[kind]) if kind in ranges else None
        hist = histogram(samples, bins=self.config.get("hist_bins", "fd"), value_range=value_range)
        centers = 0.5 * (hist["bin_left"].to_numpy() + hist["bin_right"].to_numpy())
        return hist.assign(kind=kind, scheme=scheme, exact_density=onedim_density(kind, centers))

    def run(self) -> Dict:
        logger.info(f"🚀 一维实验: 分布={self.kinds}, 采样器={self.schemes}")
        self.repository.write_config_snapshot(self.config.to_dict())

        jobs = [(kind, scheme) for kind in self.kinds for scheme in self.schemes]
        seeds = spawn_seeds(self.config.seed, len(jobs))
        with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
            results = list(pool.map(lambda job: self._run_one(*job[0], job[1]), zip(jobs, seeds)))

        notes: List[str] = []
        sd_rows, hists, traces = [], [], []
        metrics: Dict = {"sd": {}}
        trace_points = int(self.config.get("trace_points", 2000))
        for kind, scheme, samples in results:
            hists.append(self._histogram(kind, scheme, samples))
            traces.append(thinned_trace(samples, trace_points, name="x").assign(kind=kind, scheme=scheme))
            if kind == "uniform":
                outside = float(np.mean((samples < -0.05) | (samples > 1.05)))
                metrics.setdefault("uniform_mass_outside", {})[scheme] = outside
            try:
                exact = onedim_exact_sd(kind)
            except UndefinedMomentException as e:
                logger.warning(f"⚠️  {kind}/{scheme}: {e.message}，跳过标准差")
                if e.message not in notes:
                    notes.append(e.message)
                continue
            sd = float(np.std(samples))
            sd_rows.append({
                "kind": kind,
                "scheme": scheme,
                "delta": self.deltas[kind],
                "sd_est": sd,
                "sd_exact": exact,
                "rel_error": abs(sd - exact) / exact,
            })
            metrics["sd"][f"{kind}/{scheme}"] = sd

        hist_frame = pd.concat(hists, ignore_index=True)[
            ["kind", "scheme", "bin_left", "bin_right", "density", "exact_density"]
        ]
        trace_frame = pd.concat(traces, ignore_index=True)[["kind", "scheme", "iteration", "x"]]
        sd_frame = pd.DataFrame(sd_rows, columns=SD_COLUMNS)
        self.repository.write_csv("sd.csv", sd_frame)
        self.repository.write_csv("histograms.csv", hist_frame)
        self.repository.write_csv("traces.csv", trace_frame)
        self.repository.write_summary(metrics, notes)

        print("\n✅ 一维实验完成")
        for row in sd_rows:
            print(f"   {row['kind']:>8} {row['scheme']:>6}: SD = {row['sd_est']:.4f}（精确 {row['sd_exact']:.4f}）")
        return {"run_dir": str(self.repository.run_dir), **metrics}
