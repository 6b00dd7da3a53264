# edgecodec/utils/codec.py
import concurrent.futures
import logging
from dataclasses import dataclass

import numpy as np

from edgecodec.utils import colorspace, entropy, quant, transform
from edgecodec.utils.colorspace import YcbcrImage
from edgecodec.utils.edgedetect import CannyParams, canny
from edgecodec.utils.imageio import RgbImage
from edgecodec.utils.metrics import QualityReport, build_report, rgb_psnr
from edgecodec.utils.scheme import (FORCE_AUTO, FORCE_MODES, Scheme, classify,
                                    edge_block_pct, forced_classification, retain_blocks)

logger = logging.getLogger('edgecodec.codec')

PLANE_NAMES = ("Y", "Cb", "Cr")
PLANE_KINDS = (quant.LUMA, quant.CHROMA, quant.CHROMA)
# Width and height travel as u16 header fields
MAX_DIMENSION = 0xFFFF


@dataclass(frozen=True)
class EncodeConfig:
    block_size: int = 8
    scheme: Scheme = Scheme.M3
    quality: int = 50
    sigma: float = 1.4
    canny_low: float = 0.1
    canny_high: float = 0.3
    min_edge_pixels: int = 1
    force_classification: str = FORCE_AUTO

    @property
    def canny_params(self) -> CannyParams:
        return CannyParams(sigma=self.sigma, low=self.canny_low, high=self.canny_high)

    def validate(self) -> "EncodeConfig":
        if self.block_size not in transform.BLOCK_SIZES:
            raise ValueError(f"Block size must be one of {transform.BLOCK_SIZES}, got {self.block_size}")
        if not isinstance(self.scheme, Scheme):
            raise ValueError(f"Unknown scheme {self.scheme!r}")
        quant.quality_scale(self.quality)
        self.canny_params.validate()
        if not 1 <= self.min_edge_pixels <= 0xFFFF:
            raise ValueError(f"min_edge_pixels must be in [1, 65535], got {self.min_edge_pixels}")
        if self.force_classification not in FORCE_MODES:
            raise ValueError(
                f"force_classification must be one of {FORCE_MODES}, got {self.force_classification!r}"
            )
        return self


@dataclass
class EncodeResult:
    data: bytes
    stream: entropy.CompressedImage
    classification: np.ndarray
    original: YcbcrImage

    @property
    def edge_block_pct(self) -> float:
        return edge_block_pct(self.classification)

    @property
    def size_bits(self) -> int:
        return len(self.data) * 8


def _float32(value: float) -> float:
    return float(np.float32(value))


def detect_edges(ycc: YcbcrImage, cfg: EncodeConfig) -> np.ndarray:
    """Canny mask of the Y plane; empty for planes too small to differentiate."""
    if ycc.height < 3 or ycc.width < 3:
        logger.debug(f"Plane {ycc.width}x{ycc.height} too small for edge detection; no edges.")
        return np.zeros(ycc.y.shape, dtype=bool)
    return canny(ycc.y, cfg.canny_params)


def classify_blocks(ycc: YcbcrImage, grid: transform.BlockGrid, cfg: EncodeConfig) -> np.ndarray:
    """Edge/non-edge map from Canny on Y, or a forced map."""
    if cfg.force_classification != FORCE_AUTO:
        return forced_classification(grid, cfg.force_classification)
    return classify(detect_edges(ycc, cfg), grid, cfg.min_edge_pixels)


def edge_overlay(img: RgbImage, cfg: EncodeConfig):
    """
    Visualizes the classification: edge blocks tinted red, Canny pixels white.

    Returns:
        (RgbImage, classification)
    """
    cfg.validate()
    ycc = colorspace.forward(img)
    grid = transform.BlockGrid(cfg.block_size, img.width, img.height)
    edges = detect_edges(ycc, cfg)
    if cfg.force_classification != FORCE_AUTO:
        classification = forced_classification(grid, cfg.force_classification)
    else:
        classification = classify(edges, grid, cfg.min_edge_pixels)

    n = cfg.block_size
    tint = np.kron(classification, np.ones((n, n), dtype=bool))[:img.height, :img.width]
    rgb = img.as_array().astype(np.float64)
    rgb[tint] = 0.5 * rgb[tint] + 0.5 * np.array([255.0, 0.0, 0.0])
    rgb[edges] = 255.0
    return RgbImage.from_array(np.rint(rgb).astype(np.uint8)), classification


def code_plane(plane: np.ndarray, kind: str, classification: np.ndarray, cfg: EncodeConfig) -> np.ndarray:
    """partition -> DCT -> quantize -> retain; returns (blocks, N*N) zigzag levels."""
    _, blocks = transform.partition(plane, cfg.block_size)
    q = quant.base_qmatrix(cfg.block_size, kind, cfg.quality)
    levels = quant.quantize(transform.dct2(blocks), q)
    return retain_blocks(levels, classification, cfg.scheme)


def reconstruct_plane(levels: np.ndarray, kind: str, grid: transform.BlockGrid, quality: int) -> np.ndarray:
    """dequantize -> IDCT -> reassemble and crop."""
    q = quant.base_qmatrix(grid.block_size, kind, quality)
    return transform.reassemble(grid, transform.idct2(quant.dequantize(levels, q)))


def encode_image(img: RgbImage, cfg: EncodeConfig, max_workers: int = 1) -> EncodeResult:
    """Runs the full encoder and serializes the stream."""
    cfg.validate()
    if img.width > MAX_DIMENSION or img.height > MAX_DIMENSION:
        raise ValueError(
            f"Image {img.width}x{img.height} exceeds the {MAX_DIMENSION}x{MAX_DIMENSION} stream limit"
        )
    # The header carries float32 means; center with exactly those values
    means = tuple(_float32(m) for m in colorspace.channel_means(img))
    ycc = colorspace.forward(img, means)
    grid = transform.BlockGrid(cfg.block_size, img.width, img.height)
    classification = classify_blocks(ycc, grid, cfg)
    logger.debug(
        f"{grid.blocks_x}x{grid.blocks_y} blocks of {cfg.block_size}, "
        f"{int(classification.sum())} edge ({edge_block_pct(classification):.2f}%)"
    )

    with concurrent.futures.ThreadPoolExecutor(max_workers=max(1, max_workers),
                                               thread_name_prefix='PlaneCoder') as executor:
        futures = [
            executor.submit(code_plane, plane, kind, classification, cfg)
            for plane, kind in zip(ycc.planes, PLANE_KINDS)
        ]
        planes = [f.result() for f in futures]

    header = entropy.StreamHeader(
        block_size=cfg.block_size,
        scheme=cfg.scheme.tag,
        quality=cfg.quality,
        width=img.width,
        height=img.height,
        mean_r=means[0],
        mean_g=means[1],
        mean_b=means[2],
        sigma=_float32(cfg.sigma),
        canny_low=_float32(cfg.canny_low),
        canny_high=_float32(cfg.canny_high),
        min_edge_pixels=cfg.min_edge_pixels,
        blocks_x=grid.blocks_x,
        blocks_y=grid.blocks_y,
    )
    stream = entropy.encode(planes, classification, header)
    data = stream.to_bytes()
    return EncodeResult(data=data, stream=stream, classification=classification, original=ycc)


def decode_planes(data: bytes) -> YcbcrImage:
    """Parses a stream and rebuilds the (unrounded) YCbCr planes."""
    planes, _, header = entropy.decode_bytes(data)
    grid = transform.BlockGrid(header.block_size, header.width, header.height)
    y, cb, cr = (reconstruct_plane(levels, kind, grid, header.quality)
                 for levels, kind in zip(planes, PLANE_KINDS))
    return YcbcrImage(y=y, cb=cb, cr=cr, mean_r=header.mean_r, mean_g=header.mean_g, mean_b=header.mean_b)


def decode_image(data: bytes) -> RgbImage:
    return colorspace.inverse(decode_planes(data))


def compare(orig: RgbImage, recon: RgbImage, compressed_bits: int = 0) -> QualityReport:
    """
    Scores a reconstruction in YCbCr space; the reconstruction is centered with
    the original's means so both sides share one color transform.
    """
    if (orig.width, orig.height) != (recon.width, recon.height):
        raise ValueError(
            f"Image sizes differ: {orig.width}x{orig.height} vs {recon.width}x{recon.height}"
        )
    reference = colorspace.forward(orig)
    candidate = colorspace.forward(recon, reference.means)
    return build_report(reference, candidate, compressed_bits,
                        rgb_psnr_db=rgb_psnr(orig.as_array(), recon.as_array()))


def evaluate(img: RgbImage, data: bytes) -> QualityReport:
    """Decodes `data` and scores it against `img`, charging every stream byte to the rate."""
    return compare(img, decode_image(data), compressed_bits=len(data) * 8)
