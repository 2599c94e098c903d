"""目标分布、近端算子与 Moreau-Yosida 平滑"""
from src.models.moreau_yosida import my_envelope, my_gradient
from src.models.proximal import prox_box, prox_cauchy, prox_l1, prox_quartic
from src.models.total_variation import prox_tv, tv_norm
from src.models.types import SmoothedTarget, TargetModel

__all__ = [
    "TargetModel",
    "SmoothedTarget",
    "my_envelope",
    "my_gradient",
    "prox_l1",
    "prox_box",
    "prox_quartic",
    "prox_cauchy",
    "prox_tv",
    "tv_norm",
]
