"""采样核工厂"""
import logging

from infrastructure.exceptions import UnsupportedModelException
from src.samplers.interface import StepKernel
from src.samplers.kernels import ExplicitKernel, ReflectedKernel, ThetaKernel
from src.samplers.types import SamplerConfig

logger = logging.getLogger(__name__)


def build_kernel(model, cfg: SamplerConfig) -> StepKernel:
    """按 θ 与 reflected 选择采样核，并检查模型是否提供所需算子"""
    if cfg.is_explicit and not model.has_gradient:
        raise UnsupportedModelException(
            f"θ = 0 需要梯度，{getattr(model, 'name', '模型')} 只有近端算子；请先做 Moreau-Yosida 平滑（MYULA）"
        )
    if cfg.reflected:
        kernel = ReflectedKernel(model, cfg)
    elif cfg.is_explicit:
        kernel = ExplicitKernel(model, cfg)
    else:
        kernel = ThetaKernel(model, cfg)
    logger.debug(f"采样核: {kernel.name} ({type(kernel).__name__})")
    return kernel
