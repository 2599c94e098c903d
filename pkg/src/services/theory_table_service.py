"""步长 / 步数随条件数变化的理论表"""
import logging
import math
from typing import Dict, List

import numpy as np
import pandas as pd

from src.repositories.run_output_repository import RunOutputRepository
from src.theory.contraction import contraction_C, delta_star
from src.theory.gaussian import (
    explicit_scheme_search,
    invariant_bias,
    n_steps_gaussian,
    smallest_n_below,
)
from src.theory.types import GaussianSpec
from src.utils.experiment_config import ExperimentConfig

logger = logging.getLogger(__name__)

TABLE_COLUMNS = [
    "theta", "kappa", "eps", "dim", "delta", "delta_times_L",
    "n", "n_search", "C", "bias", "feasible",
]


def loglog_slope(kappas, ns) -> float:
    """log n 对 log κ 的最小二乘斜率；可用点少于 2 个时为 nan"""
    k = np.asarray(kappas, dtype=float)
    n = np.asarray(ns, dtype=float)
    keep = (n > 0) & np.isfinite(n)
    if keep.sum() < 2:
        return math.nan
    slope, _ = np.polyfit(np.log(k[keep]), np.log(n[keep]), 1)
    return float(slope)


class TheoryTableService:
    """
    对 θ ∈ {0, 1/2, 1} 与 κ、ε 网格输出 (δ, n)

    θ = 1/2、θ = 1 使用闭式步数公式；θ = 0 数值搜索。
    n_search 为按精确 W₂ 搜索到的最小步数（-1 表示不可达）。
    """

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.dim = int(config.require("dim"))
        self.kappas = [float(k) for k in config.require("kappas")]
        self.eps_list = [float(e) for e in config.require("eps_list")]
        self.thetas = [float(t) for t in config.get("thetas", [0.0, 0.5, 1.0])]
        self.repository = RunOutputRepository(config.output_dir, config.experiment, config.seed, config.run_name)

    def _row(self, spec: GaussianSpec, theta: float, eps: float) -> Dict:
        if theta == 0.0:
            n, delta, feasible = explicit_scheme_search(spec, eps)
            n_search = n
        elif theta in (0.5, 1.0):
            n, delta = n_steps_gaussian(spec, theta, eps)
            n_search = smallest_n_below(spec, theta, delta, eps)
            feasible = True
        else:
            delta = delta_star(spec.m, spec.L, theta)
            n = n_search = smallest_n_below(spec, theta, delta, eps)
            feasible = n >= 0

        if delta > 0:
            C = contraction_C(spec.m, spec.L, delta, theta)
            bias = invariant_bias(spec, theta, delta)
        else:
            C, bias = math.nan, math.nan
        if not feasible:
            logger.warning(f"⚠️  θ={theta:g}, κ={spec.kappa:g}, ε={eps:g}: 不可行，行已标记")
        return {
            "theta": theta,
            "kappa": spec.kappa,
            "eps": eps,
            "dim": spec.dim,
            "delta": delta,
            "delta_times_L": delta * spec.L,
            "n": n,
            "n_search": n_search,
            "C": C,
            "bias": bias,
            "feasible": bool(feasible),
        }

    def build_table(self) -> pd.DataFrame:
        rows: List[Dict] = []
        for kappa in self.kappas:
            spec = GaussianSpec.geometric(self.dim, kappa)
            for theta in self.thetas:
                for eps in self.eps_list:
                    rows.append(self._row(spec, theta, eps))
        return pd.DataFrame(rows, columns=TABLE_COLUMNS)

    def slopes(self, table: pd.DataFrame) -> pd.DataFrame:
        rows = []
        for (theta, eps), group in table.groupby(["theta", "eps"], sort=True):
            ok = group[group["feasible"]]
            large = ok[ok["kappa"] >= 1e4]
            rows.append({
                "theta": theta,
                "eps": eps,
                "slope": loglog_slope(ok["kappa"], ok["n"]),
                "slope_large_kappa": loglog_slope(large["kappa"], large["n"]),
            })
        return pd.DataFrame(rows, columns=["theta", "eps", "slope", "slope_large_kappa"])

    def run(self) -> Dict:
        logger.info(f"🚀 开始生成理论表: d={self.dim}, κ={self.kappas}, ε={self.eps_list}")
        self.repository.write_config_snapshot(self.config.to_dict())

        table = self.build_table()
        slopes = self.slopes(table)
        self.repository.write_csv("theory_table.csv", table)
        self.repository.write_csv("slopes.csv", slopes)

        infeasible = int((~table["feasible"]).sum())
        notes = [f"{infeasible} 行不可行（ε 在稳定性限制下不可达）"] if infeasible else []
        metrics = {
            "rows": len(table),
            "infeasible_rows": infeasible,
            "slopes": {
                f"theta={r.theta:g},eps={r.eps:g}": {"slope": r.slope, "slope_large_kappa": r.slope_large_kappa}
                for r in slopes.itertuples()
            },
        }
        self.repository.write_summary(metrics, notes)

        print(f"\n✅ 理论表完成: {len(table)} 行，不可行 {infeasible} 行")
        for r in slopes.itertuples():
            print(f"   θ={r.theta:g}, ε={r.eps:g}: log n / log κ 斜率 = {r.slope:.3f}")
        return {"run_dir": str(self.repository.run_dir), **metrics}
