# edgecodec/utils/quant.py
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from edgecodec.utils.numeric import round_half_away
from edgecodec.utils.transform import BLOCK_SIZES, inverse_zigzag, zigzag

LUMA = "luma"
CHROMA = "chroma"

# JPEG Annex K.1 / K.2 tables, raster order
ANNEX_K_LUMA = np.array([
    [16, 11, 10, 16, 24, 40, 51, 61],
    [12, 12, 14, 19, 26, 58, 60, 55],
    [14, 13, 16, 24, 40, 57, 69, 56],
    [14, 17, 22, 29, 51, 87, 80, 62],
    [18, 22, 37, 56, 68, 109, 103, 77],
    [24, 35, 55, 64, 81, 104, 113, 92],
    [49, 64, 78, 87, 103, 121, 120, 101],
    [72, 92, 95, 98, 112, 100, 103, 99],
], dtype=np.int64)

ANNEX_K_CHROMA = np.array([
    [17, 18, 24, 47, 99, 99, 99, 99],
    [18, 21, 26, 66, 99, 99, 99, 99],
    [24, 26, 56, 99, 99, 99, 99, 99],
    [47, 66, 99, 99, 99, 99, 99, 99],
    [99, 99, 99, 99, 99, 99, 99, 99],
    [99, 99, 99, 99, 99, 99, 99, 99],
    [99, 99, 99, 99, 99, 99, 99, 99],
    [99, 99, 99, 99, 99, 99, 99, 99],
], dtype=np.int64)

_BASE_TABLES = {LUMA: ANNEX_K_LUMA, CHROMA: ANNEX_K_CHROMA}


@dataclass(frozen=True)
class QuantMatrix:
    block_size: int
    kind: str
    entries: np.ndarray = field(repr=False)

    @property
    def steps(self) -> np.ndarray:
        return self.entries.astype(np.float64)


def quality_scale(quality: int) -> Fraction:
    """IJG percentage scale: 5000/q below 50, 200 - 2q from 50 up, kept exact."""
    if not isinstance(quality, (int, np.integer)) or not 1 <= quality <= 100:
        raise ValueError(f"Quality must be an integer in [1, 100], got {quality!r}")
    return Fraction(5000, int(quality)) if quality < 50 else Fraction(200 - 2 * int(quality))


def base_qmatrix(block_size: int, kind: str, quality: int) -> QuantMatrix:
    """
    Annex-K table scaled for quality and replicated to N x N.

    Each 8x8 entry covers an (N/8) x (N/8) patch for N = 16, 32; scaled
    entries are rounded half away from zero and clamped to [1, 255].
    """
    if block_size not in BLOCK_SIZES:
        raise ValueError(f"Block size must be one of {BLOCK_SIZES}, got {block_size}")
    if kind not in _BASE_TABLES:
        raise ValueError(f"Unknown quantization class {kind!r}")
    scale = quality_scale(quality)
    # entry * s / 100 rounded half up in integers; entries are non-negative
    num, den = scale.numerator, scale.denominator
    scaled = (2 * _BASE_TABLES[kind] * num + 100 * den) // (200 * den)
    scaled = np.clip(scaled, 1, 255).astype(np.int64)
    factor = block_size // 8
    entries = np.kron(scaled, np.ones((factor, factor), dtype=np.int64))
    entries.setflags(write=False)
    return QuantMatrix(block_size=block_size, kind=kind, entries=entries)


def quantize(coeffs: np.ndarray, q: QuantMatrix) -> np.ndarray:
    """
    Uniform quantization of raster-order coefficients.

    Args:
        coeffs: (N, N) or (..., N, N) DCT coefficients.
    Returns:
        int64 array (..., N*N) in zigzag order.
    """
    coeffs = np.asarray(coeffs, dtype=np.float64)
    n = q.block_size
    if coeffs.shape[-2:] != (n, n):
        raise ValueError(f"Coefficient blocks {coeffs.shape[-2:]} do not match {n}x{n} Q-matrix")
    levels = round_half_away(coeffs / q.steps).astype(np.int64)
    flat = levels.reshape(coeffs.shape[:-2] + (n * n,))
    return flat[..., zigzag(n)]


def dequantize(values: np.ndarray, q: QuantMatrix) -> np.ndarray:
    """Multiplies zigzag levels by their steps and restores raster (..., N, N) order."""
    values = np.asarray(values)
    n = q.block_size
    if values.shape[-1] != n * n:
        raise ValueError(f"Quantized blocks of length {values.shape[-1]} do not match {n}x{n} Q-matrix")
    raster = values[..., inverse_zigzag(n)].astype(np.float64)
    return raster.reshape(values.shape[:-1] + (n, n)) * q.steps
