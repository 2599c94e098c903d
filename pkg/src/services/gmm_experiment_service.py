"""
高斯混合先验去噪实验

在一块图像区域上比较精确采样、IMLA、ILA、ULA：逐像素 W₂（分位数耦合）、
log-π 统计量的直方图与核密度、log-π 轨迹。重复实验在线程池上并行。
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Tuple

import numpy as np
import pandas as pd

from infrastructure.exceptions import ConfigException
from infrastructure.random_streams import make_rng, spawn_seeds
from src.diagnostics.metrics import w2_1d_empirical
from src.diagnostics.series import histogram, logpi_density, thinned_trace
from src.problems.gmm import (
    GmmModel,
    gmm_curvature_bounds,
    gmm_exact_sample,
    gmm_pixel_logpdf,
    gmm_pixel_quantile,
    gmm_target,
    synthetic_gmm_observation,
)
from src.problems.phantoms import shepp_like_phantom
from src.repositories.image_repository import ImageRepository
from src.repositories.run_output_repository import RunOutputRepository
from src.samplers.chain import run_chain
from src.theory.contraction import delta_star
from src.utils.experiment_config import ExperimentConfig

logger = logging.getLogger(__name__)

SCHEME_THETAS = {"IMLA": 0.5, "ILA": 1.0, "ULA": 0.0}
W2_COLUMNS = ["repetition", "scheme", "pixel", "w2"]
HIST_COLUMNS = ["scheme", "bin_left", "bin_right", "density"]
TRACE_COLUMNS = ["scheme", "iteration", "logpi"]


class _QuantileTable:
    """逐像素分位数，按样本数缓存（同一 N 的概率网格相同）"""

    def __init__(self, model: GmmModel):
        self.model = model
        self._cache: Dict[Tuple[int, int], np.ndarray] = {}

    def function(self, pixel: int) -> Callable[[np.ndarray], np.ndarray]:
        def quantile(probs: np.ndarray) -> np.ndarray:
            key = (pixel, probs.size)
            if key not in self._cache:
                self._cache[key] = gmm_pixel_quantile(self.model, pixel, probs)
            return self._cache[key]

        return quantile


class GmmExperimentService:
    """GMM 去噪实验"""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.repetitions = int(config.get("repetitions", 1))
        self.schemes = list(config.get("schemes", ["exact", "IMLA", "ILA", "ULA"]))
        unknown = [s for s in self.schemes if s != "exact" and s not in SCHEME_THETAS]
        if unknown:
            raise ConfigException(f"gmm: 未知采样器 {unknown}，可选 exact / {list(SCHEME_THETAS)}")
        self.n_samples = int(config.sampler.get("n_iters", 0))
        self.repository = RunOutputRepository(config.output_dir, config.experiment, config.seed, config.run_name)

    def _clean_region(self) -> np.ndarray:
        image_path = self.config.get("image_path")
        if image_path:
            image = ImageRepository.read_pgm(image_path)
        else:
            image = shepp_like_phantom(int(self.config.get("phantom_size", 64)))
        r0, r1, c0, c1 = (int(v) for v in self.config.require("region"))
        region = image[r0:r1, c0:c1]
        if region.size == 0:
            raise ConfigException(f"gmm: 区域 {[r0, r1, c0, c1]} 为空（图像 {image.shape}）")
        return region.reshape(-1)

    def _build_model(self, seed: int) -> GmmModel:
        p = self.config.problem
        clean = self._clean_region()
        y = synthetic_gmm_observation(clean, float(p["noise_var"]), make_rng(seed))
        return GmmModel(
            y=y,
            m0=float(p["m0"]),
            m1=float(p["m1"]),
            s0sq=float(p["s0sq"]),
            s1sq=float(p["s1sq"]),
            noise_var=float(p["noise_var"]),
            w_tilde=float(p["w_tilde"]),
        )

    def _step_size(self, scheme: str, m: float, L: float) -> float:
        configured = self.config.get(f"delta_{scheme.lower()}")
        if configured is not None:
            return float(configured)
        if scheme == "ULA":
            return 1.0 / L
        return delta_star(m, L, 0.5)

    def _draw(self, model: GmmModel, scheme: str, seed: int) -> np.ndarray:
        if scheme == "exact":
            return gmm_exact_sample(model, make_rng(seed), self.n_samples)
        target = gmm_target(model)
        cfg = self.config.sampler_config(
            theta=SCHEME_THETAS[scheme],
            delta=self._step_size(scheme, target.m, target.L),
            seed=seed,
            record_logpi=False,
        )
        return run_chain(target, cfg, model.y).samples

    def _repetition(self, model: GmmModel, quantiles: _QuantileTable, repetition: int, seed: int) -> Tuple[List[Dict], Dict[str, np.ndarray]]:
        rows: List[Dict] = []
        logpi: Dict[str, np.ndarray] = {}
        for scheme, scheme_seed in zip(self.schemes, spawn_seeds(seed, len(self.schemes))):
            samples = self._draw(model, scheme, scheme_seed)
            for pixel in range(model.dim):
                w2 = w2_1d_empirical(samples[:, pixel], quantiles.function(pixel))
                rows.append({"repetition": repetition, "scheme": scheme, "pixel": pixel, "w2": w2})
            if repetition == 0:
                logpi[scheme] = gmm_pixel_logpdf(model, samples).sum(axis=1)
        logger.info(f"✅ 第 {repetition + 1}/{self.repetitions} 次重复完成")
        return rows, logpi

    def _write_empty(self, notes: List[str]) -> Dict:
        for name, columns in (("w2_pixels", W2_COLUMNS), ("w2_summary", ["scheme", "median_pixel_w2", "median_summed_w2"]),
                              ("logpi_histogram", HIST_COLUMNS), ("logpi_trace", TRACE_COLUMNS)):
            self.repository.write_csv(f"{name}.csv", pd.DataFrame(columns=columns))
        notes.append("n_iters = 0，未抽取样本，统计表为空")
        self.repository.write_summary({"n_samples": 0}, notes)
        print("\n⚠️  n_iters = 0，已写出空统计表")
        return {"run_dir": str(self.repository.run_dir), "n_samples": 0}

    def run(self) -> Dict:
        logger.info(f"🚀 GMM 实验: 采样器={self.schemes}, 样本数={self.n_samples}, 重复={self.repetitions}")
        self.repository.write_config_snapshot(self.config.to_dict())
        seeds = spawn_seeds(self.config.seed, 1 + self.repetitions)
        model = self._build_model(seeds[0])
        notes: List[str] = []

        curv_min, _ = gmm_curvature_bounds(model)
        if np.any(curv_min <= 0):
            notes.append(f"{int(np.sum(curv_min <= 0))} 个像素的后验不是对数凹的")
        if self.n_samples == 0:
            return self._write_empty(notes)

        quantiles = _QuantileTable(model)
        with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
            results = list(
                pool.map(lambda args: self._repetition(model, quantiles, *args), enumerate(seeds[1:]))
            )

        w2_table = pd.DataFrame([row for rows, _ in results for row in rows], columns=W2_COLUMNS)
        summed = w2_table.groupby(["scheme", "repetition"])["w2"].sum().groupby("scheme").median()
        summary = (
            w2_table.groupby("scheme")["w2"].median().rename("median_pixel_w2").to_frame()
            .join(summed.rename("median_summed_w2"))
            .reindex(self.schemes)
            .rename_axis("scheme")
            .reset_index()
        )

        logpi = results[0][1]
        edges = np.histogram_bin_edges(np.concatenate(list(logpi.values())), bins=self.config.get("hist_bins", "fd"))
        hist = pd.concat(
            [histogram(values, bins=edges).assign(scheme=scheme) for scheme, values in logpi.items()],
            ignore_index=True,
        )[HIST_COLUMNS]
        density = pd.concat(
            [logpi_density(values).assign(scheme=scheme) for scheme, values in logpi.items()],
            ignore_index=True,
        )
        trace = pd.concat(
            [thinned_trace(values, int(self.config.get("trace_points", 2000))).assign(scheme=scheme) for scheme, values in logpi.items()],
            ignore_index=True,
        )[TRACE_COLUMNS]

        self.repository.write_csv("w2_pixels.csv", w2_table)
        self.repository.write_csv("w2_summary.csv", summary)
        self.repository.write_csv("logpi_histogram.csv", hist)
        self.repository.write_csv("logpi_density.csv", density)
        self.repository.write_csv("logpi_trace.csv", trace)

        medians = dict(zip(summary["scheme"], summary["median_pixel_w2"]))
        metrics = {
            "n_samples": self.n_samples,
            "repetitions": self.repetitions,
            "pixels": model.dim,
            "median_pixel_w2": medians,
        }
        if "IMLA" in medians and "ULA" in medians:
            metrics["ula_over_imla"] = medians["ULA"] / medians["IMLA"]
        if "IMLA" in medians and "exact" in medians:
            metrics["imla_over_exact"] = medians["IMLA"] / medians["exact"]
        self.repository.write_summary(metrics, notes)

        print(f"\n✅ GMM 实验完成（{model.dim} 个像素，{self.repetitions} 次重复）")
        for scheme, value in medians.items():
            print(f"   {scheme:>6}: 逐像素 W₂ 中位数 = {value:.4e}")
        return {"run_dir": str(self.repository.run_dir), **metrics}
