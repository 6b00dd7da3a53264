# edgecodec/utils/metrics.py
import math
from dataclasses import dataclass

import numpy as np

from edgecodec.utils.colorspace import YcbcrImage

SOURCE_BITS_PER_PIXEL = 24
PEAK = 255.0


@dataclass(frozen=True)
class QualityReport:
    psnr_db: float
    bpp: float
    cr: float
    mse_y: float
    mse_cb: float
    mse_cr: float
    compressed_bits: int
    pixels: int
    rgb_psnr_db: float = float("nan")


def mse(a: np.ndarray, b: np.ndarray) -> float:
    """Mean squared difference of two equally sized planes."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"Plane shapes differ: {a.shape} vs {b.shape}")
    diff = a - b
    return float(np.mean(diff * diff))


def psnr_from_mse(total_mse: float, channels: int = 3) -> float:
    """10 log10(255^2 * channels / total_mse); infinite when the error is zero."""
    if total_mse == 0:
        return math.inf
    return 10.0 * math.log10(PEAK * PEAK * channels / total_mse)


def plane_mses(orig: YcbcrImage, recon: YcbcrImage):
    return tuple(mse(a, b) for a, b in zip(orig.planes, recon.planes))


def psnr(orig: YcbcrImage, recon: YcbcrImage) -> float:
    """PSNR over the summed Y, Cb and Cr mean squared errors."""
    return psnr_from_mse(sum(plane_mses(orig, recon)))


def rgb_psnr(orig: np.ndarray, recon: np.ndarray) -> float:
    """Conventional PSNR over all RGB samples; reported for context only."""
    return psnr_from_mse(mse(orig, recon), channels=1)


def rate_from_bits(compressed_bits: int, width: int, height: int):
    """Returns (bpp, cr) against a 24-bit source."""
    pixels = width * height
    if pixels <= 0:
        raise ValueError(f"Image must have pixels, got {width}x{height}")
    bpp = compressed_bits / pixels
    cr = SOURCE_BITS_PER_PIXEL / bpp if bpp > 0 else math.inf
    return bpp, cr


def rate(cs) -> tuple:
    """(bpp, cr) of a CompressedImage, counting every serialized byte."""
    return rate_from_bits(cs.size_bits, cs.header.width, cs.header.height)


def build_report(orig: YcbcrImage, recon: YcbcrImage, compressed_bits: int,
                 rgb_psnr_db: float = float("nan")) -> QualityReport:
    mse_y, mse_cb, mse_cr = plane_mses(orig, recon)
    bpp, cr = rate_from_bits(compressed_bits, orig.width, orig.height)
    return QualityReport(
        psnr_db=psnr_from_mse(mse_y + mse_cb + mse_cr),
        bpp=bpp,
        cr=cr,
        mse_y=mse_y,
        mse_cb=mse_cb,
        mse_cr=mse_cr,
        compressed_bits=compressed_bits,
        pixels=orig.width * orig.height,
        rgb_psnr_db=rgb_psnr_db,
    )
