"""
马尔可夫链驱动

执行 burn_in + n_iters 步，按 thinning 保留样本，并流式累计均值、二阶矩与 log-π 轨迹。
给定种子时结果完全确定。
"""
import logging
from typing import Callable, Iterable, List, Optional, Union

import numpy as np

from infrastructure.exceptions import NumericalFailureException, ValidationException
from infrastructure.random_streams import make_rng
from src.samplers.factory import build_kernel
from src.samplers.types import ChainOutput, SamplerConfig

logger = logging.getLogger(__name__)

ChainCallback = Callable[[int, np.ndarray], None]

_NOISE_BLOCK = 4096
# 噪声缓冲区的字节上限，高维链每块行数随之减少
_NOISE_BUDGET_BYTES = 16 * 2**20


def _noise_rows(dim: int) -> int:
    """每块噪声的行数，不超过 _NOISE_BLOCK 且缓冲区不超过 _NOISE_BUDGET_BYTES"""
    return max(1, min(_NOISE_BLOCK, _NOISE_BUDGET_BYTES // (8 * dim)))


def _as_callbacks(callbacks: Union[None, ChainCallback, Iterable[ChainCallback]]) -> List[ChainCallback]:
    if callbacks is None:
        return []
    if callable(callbacks):
        return [callbacks]
    return list(callbacks)


def run_chain(
    model,
    cfg: SamplerConfig,
    x0: np.ndarray,
    callbacks: Union[None, ChainCallback, Iterable[ChainCallback]] = None,
) -> ChainOutput:
    """
    运行一条链

    Args:
        model: TargetModel 或 SmoothedTarget
        cfg: 采样器配置（θ = 0 走显式 ULA，θ > 0 走隐式 θ-方法）
        x0: 初始状态，维度需与 model.dim 一致
        callbacks: 每步之后调用 callback(iteration, x)，iteration 从 1 开始计

    Returns:
        ChainOutput

    Raises:
        ValidationException: 维度不一致
        NumericalFailureException: 任一步失败，iteration 为出错步序号
    """
    x = np.array(x0, dtype=float).reshape(-1)
    if x.size != model.dim:
        raise ValidationException(f"初始点维度 {x.size} 与模型维度 {model.dim} 不一致")

    dim = x.size
    burn_in = cfg.effective_burn_in
    total = burn_in + int(cfg.n_iters)
    thinning = int(cfg.thinning)
    hooks = _as_callbacks(callbacks)
    kernel = build_kernel(model, cfg)
    rng = make_rng(cfg.seed)

    logger.info(
        f"🚀 {kernel.name}: δ={cfg.delta:g}, 维度={dim}, burn_in={burn_in}, n_iters={cfg.n_iters}, thinning={thinning}"
    )

    n_keep_max = int(cfg.n_iters) // thinning
    samples = np.empty((n_keep_max, dim)) if cfg.keep_samples else None
    logpi = np.empty(n_keep_max) if cfg.record_logpi else np.empty(0)
    inner_iterations = np.zeros(total, dtype=np.int64)
    inner_grad_norms = np.zeros(total)
    noise = np.empty((total, dim)) if cfg.record_noise else None
    trajectory = np.empty((total + 1, dim)) if cfg.record_noise else None
    if trajectory is not None:
        trajectory[0] = x
    flagged: List[int] = []

    mean = np.zeros(dim)
    second = np.zeros(dim)
    kept = 0
    # 缓冲区只分配一次并原地重填，随机流与分块方式无关
    buffer = np.empty((min(_noise_rows(dim), max(total, 1)), dim))
    block = buffer[:0]
    offset = 0
    progress_every = max(total // 10, 1)

    for k in range(1, total + 1):
        if offset == block.shape[0]:
            block = buffer[: min(buffer.shape[0], total - k + 1)]
            rng.standard_normal(out=block)
            offset = 0
        xi = block[offset]
        offset += 1

        try:
            x, report = kernel.step(x, xi, k)
        except NumericalFailureException as e:
            if e.iteration is None:
                e.iteration = k
            logger.error(f"❌ {kernel.name} 第 {k} 步失败: {e.message}")
            raise

        inner_iterations[k - 1] = report.iterations
        inner_grad_norms[k - 1] = report.grad_norm
        if not report.converged:
            flagged.append(k)
        if noise is not None:
            noise[k - 1] = xi
            trajectory[k] = x

        if k > burn_in and (k - burn_in) % thinning == 0:
            kept += 1
            mean += (x - mean) / kept
            second += (x * x - second) / kept
            if samples is not None:
                samples[kept - 1] = x
            if cfg.record_logpi:
                logpi[kept - 1] = -model.potential(x)

        for hook in hooks:
            hook(k, x)

        if k % progress_every == 0:
            logger.debug(f"{kernel.name} 进度 {k}/{total}")

    if kept == 0:
        # 没有保留任何迭代时，统计量只反映 x0
        x_start = np.array(x0, dtype=float).reshape(-1)
        mean, second, kept = x_start.copy(), x_start**2, 1
        samples = x_start[None, :].copy() if cfg.keep_samples else None
        logpi = np.array([-model.potential(x_start)]) if cfg.record_logpi else logpi

    if flagged:
        logger.warning(f"⚠️  {kernel.name}: {len(flagged)} 步内层求解未达到容差 {cfg.inner_tol:g}")
    logger.info(f"✅ {kernel.name} 完成: 保留 {kept} 个样本")

    return ChainOutput(
        x0=np.array(x0, dtype=float).reshape(-1),
        samples=samples,
        n_kept=kept,
        running_mean=mean,
        running_second_moment=second,
        logpi_trace=logpi,
        inner_iterations=inner_iterations,
        inner_grad_norms=inner_grad_norms,
        flagged_steps=flagged,
        noise=noise,
        trajectory=trajectory,
        scheme=kernel.name,
        final_state=x.copy(),
    )
