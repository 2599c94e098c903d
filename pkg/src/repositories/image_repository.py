"""二进制 PGM (P5) 灰度图像读写，支持 8/16 位"""
import logging
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from infrastructure.exceptions import ValidationException
from infrastructure.validators import validate_file_path, validate_image

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _read_token(data: bytes, pos: int) -> Tuple[bytes, int]:
    """跳过空白与 # 注释，读取下一个头部字段"""
    n = len(data)
    while pos < n:
        if data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif data[pos : pos + 1].isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise ValidationException("PGM 头部不完整")
    return data[start:pos], pos


class ImageRepository:
    """PGM 图像仓库"""

    @staticmethod
    def read_pgm(file_path: PathLike, normalize: bool = True) -> np.ndarray:
        """
        读取 P5 格式灰度图

        Args:
            file_path: .pgm 文件路径
            normalize: True 时除以 maxval，返回 [0,1] 浮点图像

        Returns:
            (rows, cols) 浮点数组
        """
        path = validate_file_path(str(file_path), (".pgm",))
        data = path.read_bytes()
        magic, pos = _read_token(data, 0)
        if magic != b"P5":
            raise ValidationException(f"只支持二进制 PGM (P5)，实际为 {magic!r}: {path}")
        width, pos = _read_token(data, pos)
        height, pos = _read_token(data, pos)
        maxval, pos = _read_token(data, pos)
        width, height, maxval = int(width), int(height), int(maxval)
        if not 0 < maxval < 65536:
            raise ValidationException(f"PGM maxval 非法: {maxval}")
        # 头部与像素数据之间恰好一个空白字符
        pos += 1
        dtype = np.dtype(np.uint8) if maxval < 256 else np.dtype(">u2")
        expected = width * height * dtype.itemsize
        if len(data) - pos < expected:
            raise ValidationException(f"PGM 像素数据不完整: 需要 {expected} 字节，实际 {len(data) - pos}")
        pixels = np.frombuffer(data, dtype=dtype, count=width * height, offset=pos).reshape(height, width)
        image = pixels.astype(float)
        logger.info(f"读取图像: {path.name} ({height}×{width}, maxval={maxval})")
        return image / maxval if normalize else image

    @staticmethod
    def encode_pgm(
        image: np.ndarray,
        bit_depth: int = 8,
        value_range: Optional[Tuple[float, float]] = None,
    ) -> bytes:
        """
        浮点图像线性映射到 [0, maxval] 后编码为 P5

        value_range 缺省取图像的 (min, max)；常数图像编码为全 0。
        """
        image = validate_image("图像", image)
        if bit_depth not in (8, 16):
            raise ValidationException(f"PGM 只支持 8/16 位: {bit_depth}")
        maxval = 255 if bit_depth == 8 else 65535
        lo, hi = value_range if value_range is not None else (float(np.min(image)), float(np.max(image)))
        if not np.all(np.isfinite(image)):
            raise ValidationException("图像包含非有限值，无法写入 PGM")
        if hi > lo:
            scaled = np.clip((image - lo) / (hi - lo), 0.0, 1.0) * maxval
        else:
            scaled = np.zeros_like(image)
        dtype = np.uint8 if bit_depth == 8 else np.dtype(">u2")
        pixels = np.rint(scaled).astype(dtype)
        rows, cols = image.shape
        header = f"P5\n{cols} {rows}\n{maxval}\n".encode("ascii")
        return header + pixels.tobytes()
