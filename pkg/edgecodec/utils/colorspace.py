# edgecodec/utils/colorspace.py
from dataclasses import dataclass

import numpy as np

from edgecodec.utils.imageio import RgbImage
from edgecodec.utils.numeric import round_half_away

# Rows map mean-removed (R, G, B) to (Y, Cb, Cr). The luminance weight for B is
# 0.114; 0.144 would push white to Y > 255 and breaks the inverse below.
FORWARD_MATRIX = np.array([
    [0.299, 0.587, 0.114],
    [-0.16875, -0.33126, 0.5],
    [0.5, -0.41869, -0.08131],
])

INVERSE_MATRIX = np.array([
    [1.0, 0.0, 1.402],
    [1.0, -0.34413, -0.71414],
    [1.0, 1.772, 0.0],
])


@dataclass
class YcbcrImage:
    """Three float64 planes of shape (height, width) plus the removed channel means."""
    y: np.ndarray
    cb: np.ndarray
    cr: np.ndarray
    mean_r: float
    mean_g: float
    mean_b: float

    def __post_init__(self):
        if not (self.y.shape == self.cb.shape == self.cr.shape):
            raise ValueError(
                f"Plane shapes differ: Y{self.y.shape} Cb{self.cb.shape} Cr{self.cr.shape}"
            )

    @property
    def width(self) -> int:
        return self.y.shape[1]

    @property
    def height(self) -> int:
        return self.y.shape[0]

    @property
    def means(self):
        return (self.mean_r, self.mean_g, self.mean_b)

    @property
    def planes(self):
        return (self.y, self.cb, self.cr)


def channel_means(img: RgbImage):
    """Exact arithmetic means of the R, G and B planes."""
    totals = img.as_array().reshape(-1, 3).sum(axis=0, dtype=np.int64)
    return tuple(float(t) / img.pixels for t in totals)


def forward(img: RgbImage, means=None) -> YcbcrImage:
    """
    Removes the channel means and maps RGB to YCbCr with no rounding,
    level shift or chroma offset.

    `means` overrides the computed means; used to compare a reconstruction
    against an original in the same centered space.
    """
    if means is None:
        means = channel_means(img)
    rgb = img.as_array().astype(np.float64) - np.asarray(means, dtype=np.float64)
    ycc = rgb @ FORWARD_MATRIX.T
    return YcbcrImage(
        y=np.ascontiguousarray(ycc[..., 0]),
        cb=np.ascontiguousarray(ycc[..., 1]),
        cr=np.ascontiguousarray(ycc[..., 2]),
        mean_r=float(means[0]),
        mean_g=float(means[1]),
        mean_b=float(means[2]),
    )


def inverse(img: YcbcrImage) -> RgbImage:
    """Maps YCbCr back to RGB, restores the means, rounds half away from zero and clamps."""
    ycc = np.stack(img.planes, axis=-1)
    rgb = ycc @ INVERSE_MATRIX.T + np.asarray(img.means, dtype=np.float64)
    rgb = np.clip(round_half_away(rgb), 0, 255).astype(np.uint8)
    return RgbImage.from_array(rgb)
