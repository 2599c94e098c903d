"""实验配置合并、命令行覆盖、运行时设置与随机流"""
import pytest

from infrastructure.exceptions import ConfigException, ValidationException
from infrastructure.random_streams import make_rng, spawn_seeds
from infrastructure.settings import RuntimeSettings
from src.utils.experiment_config import ExperimentConfigLoader, parse_override_tokens, parse_scalar


@pytest.fixture
def loader():
    return ExperimentConfigLoader()


class TestDefaults:

    def test_fallback_and_section_merge(self, make_config):
        config = make_config("theory_table")
        assert config.problem["dim"] == 100
        assert config.sampler["theta"] == 0.5
        assert config.sampler["inner_method"] == "bb"
        assert config.seed == 0

    def test_section_overrides_fallback(self, make_config):
        config = make_config("gmm")
        assert config.sampler["n_iters"] == 100000
        assert config.sampler["inner_tol"] == pytest.approx(1e-6)
        assert config.get("schemes") == ["exact", "IMLA", "ILA", "ULA"]

    def test_unknown_experiment(self, loader):
        with pytest.raises(ConfigException):
            loader.load("bogus")


class TestOverrides:

    def test_scientific_notation_becomes_float(self, make_config):
        config = make_config("sample", {"delta": "1e-4"})
        assert config.sampler["delta"] == pytest.approx(1e-4)
        assert isinstance(config.sampler["delta"], float)

    def test_key_routing(self, make_config):
        config = make_config("onedim", {"problem.kinds": "[laplace]", "trace_points": "50", "seed": "9"})
        assert config.get("kinds") == ["laplace"]
        assert config.get("trace_points") == 50
        assert config.seed == 9

    def test_dashed_keys(self, make_config):
        config = make_config("sample", {"--n-iters": "20"})
        assert config.sampler["n_iters"] == 20

    def test_unknown_keys(self, make_config):
        with pytest.raises(ConfigException):
            make_config("sample", {"bogus": "1"})
        with pytest.raises(ConfigException):
            make_config("sample", {"nosuch.section": "1"})
        with pytest.raises(ConfigException):
            make_config("sample", {"sampler.bogus": "1"})

    def test_parse_scalar(self):
        assert parse_scalar("0.5") == 0.5
        assert parse_scalar("true") is True
        assert parse_scalar("[1, 2]") == [1, 2]
        assert parse_scalar("laplace") == "laplace"
        assert parse_scalar("2.5e-3") == pytest.approx(2.5e-3)

    def test_parse_override_tokens(self):
        tokens = ["--delta", "0.1", "--problem.kind=laplace", "--x0=[1.0, 2.0]"]
        assert parse_override_tokens(tokens) == {"delta": "0.1", "problem.kind": "laplace", "x0": "[1.0, 2.0]"}
        with pytest.raises(ConfigException):
            parse_override_tokens(["--delta"])
        with pytest.raises(ConfigException):
            parse_override_tokens(["--delta", "--seed", "1"])
        with pytest.raises(ConfigException):
            parse_override_tokens(["delta", "0.1"])


class TestUserFiles:

    def test_user_file_merges(self, tmp_path, make_config):
        path = tmp_path / "run.yaml"
        path.write_text("experiment: sample\nsampler:\n  n_iters: 42\nproblem:\n  sigmas: [2.0]\n", encoding="utf-8")
        config = make_config("sample", config_file=path)
        assert config.sampler["n_iters"] == 42
        assert config.sampler["delta"] == 2.0
        assert config.get("sigmas") == [2.0]

    def test_cli_beats_user_file(self, tmp_path, make_config):
        path = tmp_path / "run.yaml"
        path.write_text("sampler:\n  n_iters: 42\n", encoding="utf-8")
        assert make_config("sample", {"n_iters": "7"}, config_file=path).sampler["n_iters"] == 7

    def test_mismatched_experiment(self, tmp_path, make_config):
        path = tmp_path / "run.yaml"
        path.write_text("experiment: gmm\n", encoding="utf-8")
        with pytest.raises(ConfigException):
            make_config("sample", config_file=path)

    def test_unknown_top_level_field(self, tmp_path, make_config):
        path = tmp_path / "run.yaml"
        path.write_text("samplers: {}\n", encoding="utf-8")
        with pytest.raises(ConfigException):
            make_config("sample", config_file=path)

    def test_missing_file(self, tmp_path, make_config):
        with pytest.raises(ConfigException):
            make_config("sample", config_file=tmp_path / "absent.yaml")

    def test_shipped_quick_configs(self, make_config):
        onedim = make_config("onedim", config_file=RuntimeSettings.EXPERIMENT_CONFIG_DIR / "onedim_quick.yaml")
        assert onedim.seed == 7
        assert onedim.get("kinds") == ["laplace", "quartic"]
        assert onedim.get("deltas")["laplace"] == 0.05
        poisson = make_config(
            "deconv_poisson", config_file=RuntimeSettings.EXPERIMENT_CONFIG_DIR / "deconv_poisson_quick.yaml"
        )
        assert poisson.get("phantom_size") == 32
        assert poisson.sampler["reflected"] is True


class TestSamplerConfig:

    def test_requires_delta(self, make_config):
        with pytest.raises(ConfigException):
            make_config("onedim").sampler_config()

    def test_builds_sampler_config(self, make_config):
        cfg = make_config("onedim", {"n_iters": "2e3"}).sampler_config(delta=0.05)
        assert cfg.n_iters == 2000 and isinstance(cfg.n_iters, int)
        assert cfg.delta == 0.05
        assert cfg.effective_burn_in == 10000

    def test_invalid_workers(self, make_config):
        with pytest.raises(ConfigException):
            make_config("sample", {"workers": "0"})


class TestRuntime:

    def test_workers_from_environment(self, monkeypatch):
        monkeypatch.setattr(RuntimeSettings, "WORKERS", "3")
        assert RuntimeSettings.workers() == 3
        monkeypatch.setattr(RuntimeSettings, "WORKERS", "0")
        with pytest.raises(ConfigException):
            RuntimeSettings.workers()
        monkeypatch.setattr(RuntimeSettings, "WORKERS", "many")
        with pytest.raises(ConfigException):
            RuntimeSettings.workers()

    def test_spawned_seeds(self):
        seeds = spawn_seeds(42, 4)
        assert seeds == spawn_seeds(42, 4)
        assert len(set(seeds)) == 4
        assert spawn_seeds(43, 4) != seeds

    def test_seed_range(self):
        with pytest.raises(ValidationException):
            make_rng(-1)
        with pytest.raises(ValidationException):
            make_rng(2**64)
        assert make_rng(7).random() == make_rng(7).random()
