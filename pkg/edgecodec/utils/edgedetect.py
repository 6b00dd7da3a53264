# edgecodec/utils/edgedetect.py
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

logger = logging.getLogger('edgecodec.edgedetect')

# 8-connectivity for hysteresis linking
_EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


class PlaneTooSmallError(ValueError):
    pass


@dataclass(frozen=True)
class CannyParams:
    """Gaussian std-dev plus hysteresis thresholds relative to the post-suppression maximum."""
    sigma: float = 1.4
    low: float = 0.1
    high: float = 0.3

    def validate(self):
        if not self.sigma > 0:
            raise ValueError(f"Canny sigma must be positive, got {self.sigma}")
        if not (0 < self.low < self.high <= 1):
            raise ValueError(
                f"Canny thresholds must satisfy 0 < low < high <= 1, got low={self.low} high={self.high}"
            )
        return self


@dataclass
class CannyResult:
    """Edge mask together with the intermediates needed to audit it."""
    edges: np.ndarray
    magnitude: np.ndarray
    suppressed: np.ndarray
    low_threshold: float
    high_threshold: float


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Normalized 1D Gaussian of radius ceil(3*sigma)."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    radius = int(math.ceil(3 * sigma))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return kernel / kernel.sum()


def gaussian_smooth(plane: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian smoothing with edge-replicated borders."""
    kernel = gaussian_kernel(sigma)
    plane = np.asarray(plane, dtype=np.float64)
    smoothed = ndimage.correlate1d(plane, kernel, axis=0, mode='nearest')
    return ndimage.correlate1d(smoothed, kernel, axis=1, mode='nearest')


def gradient(plane: np.ndarray):
    """
    3x3 Sobel gradient with replicated borders.

    Returns:
        (gx, gy, magnitude, direction) where gx grows left-to-right, gy
        top-to-bottom and direction = atan2(gy, gx) in radians.
    """
    plane = np.asarray(plane, dtype=np.float64)
    if plane.ndim != 2 or plane.shape[0] < 3 or plane.shape[1] < 3:
        raise PlaneTooSmallError(f"Gradient needs a plane of at least 3x3, got {plane.shape}")
    gx = ndimage.sobel(plane, axis=1, mode='nearest')
    gy = ndimage.sobel(plane, axis=0, mode='nearest')
    return gx, gy, np.hypot(gx, gy), np.arctan2(gy, gx)


def non_max_suppression(magnitude: np.ndarray, direction: np.ndarray) -> np.ndarray:
    """
    Keeps pixels whose magnitude is >= both neighbours along the gradient
    direction quantized to 0, 45, 90 or 135 degrees. Ties survive.
    """
    angle = np.degrees(direction) % 180.0
    padded = np.pad(magnitude, 1, mode='edge')
    h, w = magnitude.shape

    def shifted(dr, dc):
        return padded[1 + dr:1 + dr + h, 1 + dc:1 + dc + w]

    # Rows grow downward, so a 45 degree gradient points down-right
    horizontal = (angle < 22.5) | (angle >= 157.5)
    diagonal = (angle >= 22.5) & (angle < 67.5)
    vertical = (angle >= 67.5) & (angle < 112.5)
    anti_diagonal = (angle >= 112.5) & (angle < 157.5)

    keep = np.zeros(magnitude.shape, dtype=bool)
    for sector, (dr, dc) in (
        (horizontal, (0, 1)),
        (diagonal, (1, 1)),
        (vertical, (1, 0)),
        (anti_diagonal, (1, -1)),
    ):
        local_max = (magnitude >= shifted(dr, dc)) & (magnitude >= shifted(-dr, -dc))
        keep |= sector & local_max
    return keep


def hysteresis(magnitude: np.ndarray, survivors: np.ndarray, low: float, high: float) -> np.ndarray:
    """Weak pixels (> low) survive only when 8-connected to a strong pixel (>= high)."""
    candidates = survivors & (magnitude > low)
    strong = candidates & (magnitude >= high)
    if not strong.any():
        return np.zeros(magnitude.shape, dtype=bool)
    labels, _ = ndimage.label(candidates, structure=_EIGHT_CONNECTED)
    linked = np.unique(labels[strong])
    return np.isin(labels, linked[linked > 0])


def canny_detail(plane: np.ndarray, params: CannyParams) -> CannyResult:
    """Full Canny pipeline returning the mask and its intermediates."""
    params.validate()
    plane = np.asarray(plane, dtype=np.float64)
    # Anchor at the minimum so integer-valued planes give bit-identical masks under offsets
    if plane.size:
        plane = plane - plane.min()
    smoothed = gaussian_smooth(plane, params.sigma)
    _, _, magnitude, direction = gradient(smoothed)
    survivors = non_max_suppression(magnitude, direction)

    suppressed = np.where(survivors, magnitude, 0.0)
    peak = float(suppressed.max(initial=0.0))
    low, high = params.low * peak, params.high * peak
    if peak == 0.0:
        edges = np.zeros(plane.shape, dtype=bool)
    else:
        edges = hysteresis(magnitude, survivors, low, high)
    logger.debug(
        f"Canny sigma={params.sigma} low={params.low} high={params.high}: "
        f"peak magnitude {peak:.3f}, {int(edges.sum())} edge pixels of {edges.size}"
    )
    return CannyResult(edges=edges, magnitude=magnitude, suppressed=suppressed,
                       low_threshold=low, high_threshold=high)


def canny(plane: np.ndarray, params: CannyParams) -> np.ndarray:
    """Boolean edge map with the plane's shape."""
    return canny_detail(plane, params).edges
