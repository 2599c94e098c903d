"""合成测试图像（替代自然图像数据集）"""
import numpy as np

from infrastructure.validators import validate_positive


def shepp_like_phantom(size: int = 64) -> np.ndarray:
    """
    分段常数的合成图像，取值 [0, 1]

    包含一个大椭圆、两个内部椭圆、一个矩形和一条细条，边缘足够多，适合 TV 先验。
    """
    n = int(size)
    r, c = np.mgrid[0:n, 0:n]
    u = (c + 0.5) / n * 2.0 - 1.0
    v = (r + 0.5) / n * 2.0 - 1.0
    img = np.zeros((n, n))
    img[(u / 0.8) ** 2 + (v / 0.9) ** 2 <= 1.0] = 0.5
    img[((u + 0.3) / 0.25) ** 2 + ((v + 0.2) / 0.35) ** 2 <= 1.0] = 1.0
    img[((u - 0.35) / 0.2) ** 2 + ((v - 0.25) / 0.2) ** 2 <= 1.0] = 0.8
    img[(np.abs(u - 0.25) <= 0.15) & (np.abs(v + 0.45) <= 0.1)] = 0.2
    img[(np.abs(u) <= 0.6) & (np.abs(v - 0.65) <= 0.03)] = 0.9
    return img


def scale_to_mean_intensity(img: np.ndarray, mean_intensity: float) -> np.ndarray:
    """线性缩放使图像均值等于给定的平均强度（Poisson 实验的 MIV）"""
    mean_intensity = validate_positive("平均强度", mean_intensity)
    img = np.asarray(img, dtype=float)
    current = float(img.mean())
    validate_positive("图像均值", current)
    return img * (mean_intensity / current)
