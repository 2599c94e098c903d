"""可复现的随机数流"""
from typing import List

import numpy as np

from infrastructure.exceptions import ValidationException

_UINT64_MAX = 2**64 - 1


def make_rng(seed: int) -> np.random.Generator:
    """按 64 位无符号种子创建链内独立的生成器"""
    seed = int(seed)
    if not 0 <= seed <= _UINT64_MAX:
        raise ValidationException(f"种子必须是 64 位无符号整数: {seed}")
    return np.random.default_rng(seed)


def spawn_seeds(seed: int, n_streams: int) -> List[int]:
    """
    从主种子派生 n 个互不相关的子种子（每条链一个）

    Args:
        seed: 实验主种子
        n_streams: 需要的子流数量

    Returns:
        子种子列表，顺序固定，保证同一主种子结果可复现
    """
    if n_streams < 0:
        raise ValidationException(f"子流数量不能为负: {n_streams}")
    children = np.random.SeedSequence(int(seed)).spawn(n_streams)
    return [int(child.generate_state(1, dtype=np.uint64)[0]) for child in children]
