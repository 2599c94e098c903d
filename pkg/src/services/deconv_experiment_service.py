"""
TV 先验图像反卷积实验（高斯或 Poisson 噪声）

运行 R-MYULA 与 R-IMLA，输出后验均值 / 标准差图像、滑动均值的 PSNR 曲线、
log-π 轨迹及慢/快方向的自相关。
"""
import logging
import math
from typing import Dict, List, Tuple

import numpy as np
import pandas as pd

from infrastructure.exceptions import ConfigException, DegenerateVarianceException
from infrastructure.random_streams import make_rng, spawn_seeds
from src.diagnostics.autocorrelation import acf, ess
from src.diagnostics.components import slow_fast_components
from src.diagnostics.metrics import psnr
from src.diagnostics.series import MetricSeries, stationarity_check, thinned_trace
from src.problems.deconvolution import deconv_posterior, simulate_observation
from src.problems.phantoms import shepp_like_phantom
from src.repositories.image_repository import ImageRepository
from src.repositories.run_output_repository import RunOutputRepository
from src.samplers.chain import run_chain
from src.samplers.types import ChainOutput, SamplerConfig
from src.utils.experiment_config import ExperimentConfig

logger = logging.getLogger(__name__)

SCHEME_THETAS = {"R-MYULA": 0.0, "R-IMLA": 0.5, "MYULA": 0.0, "IMLA": 0.5}


class _PsnrRecorder:
    """链回调：burn-in 之后累计滑动均值，每 every 步记录一次 PSNR"""

    def __init__(self, truth: np.ndarray, burn_in: int, every: int, peak: float):
        self.truth = truth
        self.burn_in = burn_in
        self.every = max(int(every), 1)
        self.peak = peak
        self.count = 0
        self.mean = np.zeros(truth.size)
        self.series = MetricSeries("psnr")

    def __call__(self, k: int, x: np.ndarray) -> None:
        if k <= self.burn_in:
            return
        self.count += 1
        self.mean += (x - self.mean) / self.count
        if self.count % self.every == 0:
            self.series.append(k, psnr(self.truth, self.mean.reshape(self.truth.shape), self.peak))


class DeconvExperimentService:
    """反卷积实验"""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.noise = str(config.require("noise")).lower()
        self.schemes = list(config.get("schemes", ["R-MYULA", "R-IMLA"]))
        bad = [s for s in self.schemes if s not in SCHEME_THETAS]
        if bad:
            raise ConfigException(f"deconv: 未知采样器 {bad}，可选 {list(SCHEME_THETAS)}")
        if self.noise == "poisson" and any(not s.startswith("R-") for s in self.schemes):
            raise ConfigException("deconv: Poisson 噪声必须使用反射采样器（R-MYULA / R-IMLA）")
        self.factor = int(config.get("myula_iter_factor", 1))
        if self.factor < 1:
            raise ConfigException(f"deconv: myula_iter_factor 必须 >= 1: {self.factor}")
        self.repository = RunOutputRepository(config.output_dir, config.experiment, config.seed, config.run_name)

    def _clean_image(self) -> np.ndarray:
        image_path = self.config.get("image_path")
        if image_path:
            return ImageRepository.read_pgm(image_path)
        return shepp_like_phantom(int(self.config.get("phantom_size", 64)))

    def _scheme_config(self, scheme: str, L: float, seed: int) -> SamplerConfig:
        theta = SCHEME_THETAS[scheme]
        base = self.config.sampler_config(delta=1.0)
        if theta == 0.0:
            delta = self.config.get("delta_myula")
            delta = float(delta) if delta is not None else 1.0 / L
            scale = self.factor
        else:
            delta = self.config.get("delta_imla")
            delta = float(delta) if delta is not None else 10.0 / L
            scale = 1
        return self.config.sampler_config(
            theta=theta,
            delta=delta,
            seed=seed,
            reflected=scheme.startswith("R-"),
            n_iters=base.n_iters * scale,
            burn_in=base.effective_burn_in * scale,
            thinning=base.thinning * scale,
            keep_samples=True,
            record_logpi=True,
        )

    def _run_scheme(self, scheme, posterior, x0, truth, peak, seed) -> Tuple[ChainOutput, SamplerConfig, MetricSeries]:
        cfg = self._scheme_config(scheme, posterior.L, seed)
        recorder = _PsnrRecorder(truth, cfg.effective_burn_in, int(self.config.get("psnr_every", 10)), peak)
        logger.info(f"➡️  {scheme}: δ={cfg.delta:.4g}（δL = {cfg.delta * posterior.L:.3g}）, 迭代 {cfg.n_iters}")
        output = run_chain(posterior, cfg, x0, callbacks=recorder)
        return output, cfg, recorder.series

    def _acf_rows(self, scheme: str, samples: np.ndarray, notes: List[str]) -> Tuple[List[Dict], Dict]:
        rows: List[Dict] = []
        stats: Dict = {}
        if samples.shape[0] < 3:
            notes.append(f"{scheme}: 样本过少，跳过自相关")
            return rows, stats
        slow, fast = slow_fast_components(samples, seed=self.config.seed)
        max_lag = min(int(self.config.get("max_lag", 100)), samples.shape[0] - 1)
        for component, series in (("slow", slow), ("fast", fast)):
            try:
                rho = acf(series, max_lag)
                stats[f"ess_{component}"] = ess(series)
            except DegenerateVarianceException as e:
                notes.append(f"{scheme}/{component}: {e.message}")
                continue
            rows.extend({"scheme": scheme, "component": component, "lag": lag, "acf": value} for lag, value in enumerate(rho))
        return rows, stats

    def run(self) -> Dict:
        logger.info(f"🚀 反卷积实验: 噪声={self.noise}, 采样器={self.schemes}")
        self.repository.write_config_snapshot(self.config.to_dict())
        p = self.config.problem
        seeds = spawn_seeds(self.config.seed, 1 + len(self.schemes))

        model, truth = simulate_observation(
            self._clean_image(),
            self.noise,
            make_rng(seeds[0]),
            kernel_size=int(p.get("kernel_size", 5)),
            bsnr_db=float(p.get("bsnr_db", 30.0)),
            mean_intensity=float(p.get("mean_intensity", 10.0)),
            beta_fraction=float(p.get("beta_fraction", 0.01)),
            reg_weight=float(p.get("reg_weight", 1.0)),
            my_lambda=None if p.get("my_lambda") is None else float(p["my_lambda"]),
        )
        posterior = deconv_posterior(model)
        peak = float(truth.max())
        value_range = (0.0, peak)
        psnr_obs = psnr(truth, model.y, peak)
        x0 = np.maximum(model.y, 0.0).ravel()

        self.repository.write_image("truth.pgm", truth, value_range=value_range)
        self.repository.write_image("observation.pgm", np.clip(model.y, 0.0, peak), value_range=value_range)

        notes: List[str] = []
        metrics: Dict = {"psnr_observation": psnr_obs, "L": posterior.L, "lambda": posterior.lam, "schemes": {}}
        psnr_frames, trace_frames, acf_rows = [], [], []
        finals: Dict[str, MetricSeries] = {}

        for scheme, seed in zip(self.schemes, seeds[1:]):
            output, cfg, series = self._run_scheme(scheme, posterior, x0, truth, peak, seed)
            tag = scheme.lower()
            mean_img = output.running_mean.reshape(truth.shape)
            sd_img = np.sqrt(output.running_variance).reshape(truth.shape)
            if self.config.get("sd_log_scale", True):
                sd_img = np.log10(sd_img + 1e-12)
            self.repository.write_image(f"posterior_mean_{tag}.pgm", np.clip(mean_img, 0.0, peak), value_range=value_range)
            self.repository.write_image(f"posterior_sd_{tag}.pgm", sd_img)

            psnr_frames.append(series.to_frame().assign(scheme=scheme))
            trace = thinned_trace(output.logpi_trace, int(self.config.get("trace_points", 2000)))
            trace["iteration"] = cfg.effective_burn_in + trace["iteration"] * cfg.thinning
            trace_frames.append(trace.assign(scheme=scheme))
            rows, acf_stats = self._acf_rows(scheme, output.samples, notes)
            acf_rows.extend(rows)

            stats = {
                "delta": cfg.delta,
                "n_iters": cfg.n_iters,
                "psnr_mean": psnr(truth, mean_img, peak),
                "min_value": float(output.samples.min()),
                "flagged_steps": len(output.flagged_steps),
                "mean_inner_iterations": float(np.mean(output.inner_iterations)) if output.inner_iterations.size else 0.0,
                **acf_stats,
            }
            if output.logpi_trace.size >= 8:
                passed, details = stationarity_check(output.logpi_trace)
                stats["logpi_stationary"] = passed
                stats["stationarity"] = details
            else:
                notes.append(f"{scheme}: log-π 轨迹过短，跳过平稳性检查")
            metrics["schemes"][scheme] = stats
            finals[scheme] = series
            print(f"   ✅ {scheme}: 后验均值 PSNR = {stats['psnr_mean']:.2f} dB（观测 {psnr_obs:.2f} dB）")

        metrics.update(self._speedup(finals))
        self.repository.write_csv(
            "psnr.csv", pd.concat(psnr_frames, ignore_index=True)[["scheme", "iteration", "psnr"]]
        )
        self.repository.write_csv(
            "logpi_trace.csv", pd.concat(trace_frames, ignore_index=True)[["scheme", "iteration", "logpi"]]
        )
        self.repository.write_csv("acf.csv", pd.DataFrame(acf_rows, columns=["scheme", "component", "lag", "acf"]))
        self.repository.write_summary(metrics, notes)

        print(f"\n✅ 反卷积实验完成: {self.repository.run_dir}")
        return {"run_dir": str(self.repository.run_dir), **metrics}

    @staticmethod
    def _speedup(series: Dict[str, MetricSeries]) -> Dict:
        """R-IMLA 的滑动均值 PSNR 首次达到 R-MYULA 最终值所需的迭代数"""
        fast = next((series[s] for s in ("R-IMLA", "IMLA") if s in series), None)
        slow = next((series[s] for s in ("R-MYULA", "MYULA") if s in series), None)
        if fast is None or slow is None or not len(fast) or not len(slow):
            return {}
        target = slow.values[-1]
        reached = [k for k, v in zip(fast.iterations, fast.values) if v >= target]
        first = reached[0] if reached else math.inf
        return {
            "myula_final_psnr": target,
            "imla_iterations_to_match": first,
            "iteration_ratio": first / slow.iterations[-1],
        }
