"""
prox-langevin - Main Entry Point
实验命令行入口

用法:
    prox-langevin <command> [--config FILE] [--seed N] [--out DIR] [--log-level LEVEL] [--key value ...]
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

from dotenv import load_dotenv

# 加载环境变量
load_dotenv(dotenv_path=Path(".env"))

# 添加项目根目录到路径
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from infrastructure.exceptions import (
    AppException,
    ConfigException,
    NumericalFailureException,
    UnsupportedModelException,
    ValidationException,
)
from infrastructure.logging_config import setup_logging
from infrastructure.settings import RuntimeSettings
from src.services.deconv_experiment_service import DeconvExperimentService
from src.services.gauss_sweep_service import GaussSweepService
from src.services.gmm_experiment_service import GmmExperimentService
from src.services.onedim_experiment_service import OneDimExperimentService
from src.services.sampling_service import SamplingService
from src.services.theory_table_service import TheoryTableService
from src.utils.experiment_config import ExperimentConfig, ExperimentConfigLoader, parse_override_tokens

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_INTERRUPTED = 130


def print_header(command: str):
    """打印系统标题"""
    print("\n" + "=" * 70)
    print("🚀 prox-langevin")
    print(f"   近端 Langevin 采样实验 · {command}")
    print("=" * 70)


# ========================================================================
# 命令处理函数
# ========================================================================

def cmd_theory_table(config: ExperimentConfig) -> Dict:
    """θ ∈ {0, 1/2, 1} 的 (κ, ε) -> (δ, n) 理论表"""
    return TheoryTableService(config).run()


def cmd_gauss_sweep(config: ExperimentConfig) -> Dict:
    """对角高斯上的副本模拟与闭式矩对比"""
    return GaussSweepService(config).run()


def cmd_gmm(config: ExperimentConfig) -> Dict:
    """GMM 去噪：逐像素 W₂ 表、log-π 直方图与轨迹"""
    return GmmExperimentService(config).run()


def cmd_onedim(config: ExperimentConfig) -> Dict:
    """一维分布：直方图、标准差表、轨迹"""
    return OneDimExperimentService(config).run()


def cmd_deconv(config: ExperimentConfig) -> Dict:
    """TV 反卷积：后验均值 / 标准差图像、PSNR 曲线、log-π 轨迹、ACF"""
    return DeconvExperimentService(config).run()


def cmd_sample(config: ExperimentConfig) -> Dict:
    """通用采样"""
    return SamplingService(config).run()


COMMANDS: Dict[str, Callable[[ExperimentConfig], Dict]] = {
    "theory-table": cmd_theory_table,
    "gauss-sweep": cmd_gauss_sweep,
    "gmm": cmd_gmm,
    "onedim": cmd_onedim,
    "deconv": cmd_deconv,
    "sample": cmd_sample,
}


def experiment_for(command: str, noise: Optional[str]) -> str:
    if command == "deconv":
        return "deconv_gauss" if noise == "gaussian" else "deconv_poisson"
    return command.replace("-", "_")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prox-langevin",
        allow_abbrev=False,
        description="近端 Langevin 采样实验（IMLA / ILA / ULA / MYULA 及反射变体）",
        epilog="其余 --key value 参数覆盖配置项，如 --delta 0.01 或 --problem.kinds '[laplace]'",
    )
    parser.add_argument("command", choices=sorted(COMMANDS), help="实验命令")
    parser.add_argument("--config", help="YAML 配置文件，覆盖 config/experiments/defaults.yaml")
    parser.add_argument("--seed", type=int, help="主随机种子")
    parser.add_argument("--out", help="输出根目录")
    parser.add_argument("--run-name", help="运行目录名，默认 <experiment>_seed<seed>")
    parser.add_argument("--workers", type=int, help="并发链数量")
    parser.add_argument("--noise", choices=["gaussian", "poisson"], default="poisson", help="deconv 的噪声模型")
    parser.add_argument("--log-level", default=RuntimeSettings.LOG_LEVEL, help="日志级别")
    parser.add_argument("--config-dir", help="缺省配置目录，默认 config/experiments")
    return parser


def load_config(args: argparse.Namespace, extra: List[str]) -> ExperimentConfig:
    overrides: Dict[str, object] = parse_override_tokens(extra)
    for key, value in (("seed", args.seed), ("output_dir", args.out), ("run_name", args.run_name), ("workers", args.workers)):
        if value is not None:
            overrides[key] = value
    loader = ExperimentConfigLoader(args.config_dir)
    return loader.load(experiment_for(args.command, args.noise), args.config, overrides)


# ========================================================================
# 主程序
# ========================================================================

def main(argv: Optional[List[str]] = None) -> int:
    """主程序，返回进程退出码"""
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    setup_logging(args.log_level, RuntimeSettings.LOG_DIR)
    logger.info(f"系统启动: {args.command}")

    try:
        config = load_config(args, extra)
        print_header(args.command)
        result = COMMANDS[args.command](config)
        logger.info(f"✅ {args.command} 完成，输出目录 {result.get('run_dir')}")
        return EXIT_OK
    except KeyboardInterrupt:
        print("\n\n⚠️  程序被用户中断")
        logger.info("系统被用户中断")
        return EXIT_INTERRUPTED
    except (ConfigException, ValidationException, UnsupportedModelException) as e:
        logger.error(f"配置错误 [{e.code}]: {e.message}")
        print(f"\n❌ 配置错误: {e.message}")
        return EXIT_CONFIG
    except NumericalFailureException as e:
        logger.error(f"数值失败 [{e.code}]: {e}", exc_info=True)
        print(f"\n❌ 数值失败: {e}")
        return EXIT_NUMERICAL
    except AppException as e:
        logger.error(f"发生错误 [{e.code}]: {e.message}", exc_info=True)
        print(f"\n❌ 发生错误: {e.message}")
        return EXIT_ERROR
    except Exception as e:
        logger.error(f"发生错误: {e}", exc_info=True)
        print(f"\n❌ 发生错误: {e}")
        return EXIT_ERROR


def cli_entry():
    sys.exit(main())


if __name__ == "__main__":
    cli_entry()
