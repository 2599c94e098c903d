"""实验服务的端到端冒烟测试（小规模配置）"""
import json

import numpy as np
import pandas as pd
import pytest

from infrastructure.exceptions import ConfigException
from src.services.deconv_experiment_service import DeconvExperimentService
from src.services.gauss_sweep_service import GaussSweepService
from src.services.gmm_experiment_service import GmmExperimentService
from src.services.onedim_experiment_service import OneDimExperimentService
from src.services.sampling_service import SamplingService
from src.services.theory_table_service import TABLE_COLUMNS, TheoryTableService


def _summary(run_dir) -> dict:
    with open(f"{run_dir}/summary.json", encoding="utf-8") as f:
        return json.load(f)


class TestTheoryTable:

    def test_table_and_slopes(self, make_config):
        config = make_config("theory_table", {"dim": 10, "kappas": [100.0, 1000.0], "eps_list": [0.1]})
        result = TheoryTableService(config).run()
        table = pd.read_csv(f"{result['run_dir']}/theory_table.csv")
        assert list(table.columns) == TABLE_COLUMNS
        assert len(table) == 6
        midpoint = table[table["theta"] == 0.5]
        assert np.all(midpoint["bias"] < 1e-8)
        assert np.all(midpoint["n_search"] <= midpoint["n"])
        assert len(pd.read_csv(f"{result['run_dir']}/slopes.csv")) == 3
        summary = _summary(result["run_dir"])
        assert summary["status"] == "ok"
        assert {"theory_table.csv", "slopes.csv", "config.yaml", "summary.json"} <= set(summary["files"])


class TestGaussSweep:

    def test_replicas_match_closed_form(self, make_config):
        config = make_config(
            "gauss_sweep",
            {
                "sigmas": [1.0, 0.5],
                "x0": [1.0, 1.0],
                "delta": 0.05,
                "n_list": [10, 50],
                "replicas": 2000,
                "thetas": [0.5],
            },
        )
        result = GaussSweepService(config).run()
        moments = pd.read_csv(f"{result['run_dir']}/moments.csv")
        assert len(moments) == 4
        assert result["fraction_within_3se"] >= 0.5
        assert len(pd.read_csv(f"{result['run_dir']}/w2.csv")) == 2

    @pytest.mark.slow
    def test_default_sweep_matches_closed_form(self, make_config):
        # σ = (1, 0.1)，δ = 0.005，θ ∈ {0, 1/2, 1}，n ∈ {10, 100, 1000}，10⁵ 个副本
        result = GaussSweepService(make_config("gauss_sweep")).run()
        moments = pd.read_csv(f"{result['run_dir']}/moments.csv")
        assert len(moments) == 18
        assert set(moments["theta"]) == {0.0, 0.5, 1.0}
        # 36 个独立的 3σ 检验，允许一行越界；4 个标准误内必须全部吻合
        assert result["fraction_within_3se"] >= 17 / 18
        assert np.all(np.abs(moments["mean_emp"] - moments["mean_pred"]) <= 4.0 * moments["mean_stderr"])
        assert np.all(np.abs(moments["var_emp"] - moments["var_pred"]) <= 4.0 * moments["var_stderr"])


class TestOneDim:

    def test_standard_deviation_table(self, make_config):
        config = make_config("onedim", {"kinds": ["laplace", "uniform"], "n_iters": 2000, "burn_in": 100})
        result = OneDimExperimentService(config).run()
        sd = pd.read_csv(f"{result['run_dir']}/sd.csv")
        assert len(sd) == 6
        assert set(sd["scheme"]) == {"MYULA", "IMLA", "ILA"}
        assert "uniform_mass_outside" in result
        traces = pd.read_csv(f"{result['run_dir']}/traces.csv")
        assert traces["iteration"].max() <= 2000

    def test_cauchy_has_no_sd_row(self, make_config):
        config = make_config("onedim", {"kinds": ["cauchy"], "schemes": ["IMLA"], "n_iters": 500, "burn_in": 10})
        result = OneDimExperimentService(config).run()
        assert pd.read_csv(f"{result['run_dir']}/sd.csv").empty
        assert _summary(result["run_dir"])["notes"]

    def test_unknown_kind(self, make_config):
        with pytest.raises(ConfigException):
            OneDimExperimentService(make_config("onedim", {"kinds": ["gumbel"]}))

    @pytest.mark.slow
    def test_sd_table_at_default_length(self, make_config):
        config = make_config("onedim", {"kinds": ["laplace", "uniform", "quartic"], "schemes": ["MYULA", "IMLA"]})
        result = OneDimExperimentService(config).run()
        sd = pd.read_csv(f"{result['run_dir']}/sd.csv").set_index(["kind", "scheme"])
        exact = {"laplace": 1.4142, "uniform": 0.2887, "quartic": 0.5813}
        for kind, value in exact.items():
            assert sd.loc[(kind, "IMLA"), "sd_exact"] == pytest.approx(value, abs=1e-4)
            assert sd.loc[(kind, "IMLA"), "rel_error"] <= 0.02
        assert sd.loc[("quartic", "MYULA"), "sd_est"] > exact["quartic"]
        assert sd.loc[("quartic", "IMLA"), "rel_error"] < sd.loc[("quartic", "MYULA"), "rel_error"]


class TestGmm:

    def test_small_region(self, make_config):
        config = make_config(
            "gmm",
            {
                "phantom_size": 16,
                "problem.region": [4, 8, 4, 8],
                "n_iters": 200,
                "repetitions": 2,
                "schemes": ["exact", "IMLA", "ULA"],
            },
        )
        result = GmmExperimentService(config).run()
        assert result["pixels"] == 16
        w2 = pd.read_csv(f"{result['run_dir']}/w2_pixels.csv")
        assert len(w2) == 2 * 3 * 16
        assert np.all(w2["w2"] >= 0)
        summary = pd.read_csv(f"{result['run_dir']}/w2_summary.csv")
        assert summary["scheme"].tolist() == ["exact", "IMLA", "ULA"]
        assert "ula_over_imla" in result

    def test_zero_iterations(self, make_config):
        config = make_config("gmm", {"phantom_size": 16, "problem.region": [0, 2, 0, 2], "n_iters": 0})
        result = GmmExperimentService(config).run()
        assert result["n_samples"] == 0
        assert pd.read_csv(f"{result['run_dir']}/w2_pixels.csv").empty

    def test_unknown_scheme(self, make_config):
        with pytest.raises(ConfigException):
            GmmExperimentService(make_config("gmm", {"schemes": ["HMC"]}))

    @pytest.mark.slow
    def test_scheme_ordering_at_default_budget(self, make_config):
        config = make_config("gmm", {"schemes": ["exact", "IMLA", "ULA"]})
        result = GmmExperimentService(config).run()
        assert result["n_samples"] == 100_000 and result["repetitions"] == 10
        assert result["imla_over_exact"] <= 2.0
        assert result["ula_over_imla"] >= 10.0


class TestDeconv:

    @pytest.mark.slow
    def test_poisson_quick_run(self, make_config):
        config = make_config(
            "deconv_poisson",
            {
                "phantom_size": 16,
                "n_iters": 30,
                "burn_in": 10,
                "myula_iter_factor": 2,
                "psnr_every": 5,
                "max_lag": 10,
                "inner_max_iters": 20,
            },
        )
        result = DeconvExperimentService(config).run()
        run_dir = result["run_dir"]
        for scheme in ("R-MYULA", "R-IMLA"):
            stats = result["schemes"][scheme]
            assert stats["min_value"] >= 0.0
            assert np.isfinite(stats["psnr_mean"])
        assert result["schemes"]["R-MYULA"]["n_iters"] == 60
        psnr = pd.read_csv(f"{run_dir}/psnr.csv")
        assert set(psnr["scheme"]) == {"R-MYULA", "R-IMLA"}
        for name in ("truth.pgm", "observation.pgm", "posterior_mean_r-imla.pgm", "posterior_sd_r-myula.pgm"):
            assert name in _summary(run_dir)["files"]

    def test_poisson_requires_reflection(self, make_config):
        with pytest.raises(ConfigException):
            DeconvExperimentService(make_config("deconv_poisson", {"schemes": ["IMLA"]}))

    @pytest.mark.slow
    @pytest.mark.parametrize("experiment", ["deconv_gauss", "deconv_poisson"])
    def test_posterior_mean_improves_on_observation(self, make_config, experiment):
        result = DeconvExperimentService(make_config(experiment)).run()
        for scheme in ("R-MYULA", "R-IMLA"):
            assert result["schemes"][scheme]["psnr_mean"] > result["psnr_observation"]
        imla = result["schemes"]["R-IMLA"]
        assert imla["min_value"] >= 0.0
        assert imla["logpi_stationary"]


class TestSampling:

    def test_gaussian_standard_deviations(self, make_config):
        config = make_config(
            "sample", {"sigmas": [1.0, 0.5], "delta": 0.5, "n_iters": 2000, "burn_in": 100}
        )
        result = SamplingService(config).run()
        stats = pd.read_csv(f"{result['run_dir']}/stats.csv")
        np.testing.assert_allclose(stats["sd"], [1.0, 0.5], rtol=0.15)
        samples = pd.read_csv(f"{result['run_dir']}/samples.csv")
        assert list(samples.columns) == ["iteration", "x0", "x1", "logpi"]
        assert samples["iteration"].iloc[-1] == 2100
        assert result["scheme"] == "IMLA"

    def test_smoothed_onedim_target(self, make_config):
        config = make_config(
            "sample",
            {"target": "laplace", "smoothing_lambda": 0.05, "theta": 0.0, "delta": 0.05, "n_iters": 500, "burn_in": 50},
        )
        result = SamplingService(config).run()
        assert result["scheme"] == "ULA"
        assert result["n_kept"] == 500

    def test_unknown_target(self, make_config):
        with pytest.raises(ConfigException):
            SamplingService(make_config("sample", {"target": "banana"}))
