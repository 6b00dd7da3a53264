# tests/fixtures.py
# Deterministic synthetic images; the public test photographs are not redistributed.
import os

import numpy as np

from edgecodec.utils.imageio import RgbImage, write_ppm_file


def random_image(rng, width, height) -> RgbImage:
    return RgbImage.from_array(rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8))


def uniform_image(width, height, value=(128, 128, 128)) -> RgbImage:
    array = np.empty((height, width, 3), dtype=np.uint8)
    array[...] = value
    return RgbImage.from_array(array)


def synthetic_scene(size=128, seed=0) -> RgbImage:
    """
    Photo-like test scene: smooth colored gradients, a rectangle, a disk and a
    textured patch, plus mild noise. Layout shifts with the seed.
    """
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:size, 0:size].astype(np.float64)
    scale = size / 128.0

    rgb = np.empty((size, size, 3), dtype=np.float64)
    rgb[..., 0] = 60 + 0.5 * x / scale
    rgb[..., 1] = 80 + 0.4 * y / scale
    rgb[..., 2] = 150 - 0.3 * x / scale

    top, left = (int(v * scale) for v in rng.integers(10, 30, size=2))
    rgb[top:top + int(40 * scale), left:left + int(40 * scale)] = (200, 60, 50)

    cy, cx = (v * scale for v in rng.integers(75, 100, size=2))
    disk = (y - cy) ** 2 + (x - cx) ** 2 <= (22 * scale) ** 2
    rgb[disk] = (40, 160, 210)

    period_x, period_y = rng.integers(6, 10, size=2)
    texture = 35.0 * np.sin(2 * np.pi * x / period_x) * np.sin(2 * np.pi * y / period_y)
    patch = (y >= 70 * scale) & (y < 120 * scale) & (x >= 8 * scale) & (x < 60 * scale)
    rgb[patch] += texture[patch][:, None]

    rgb += rng.normal(0.0, 1.5, size=rgb.shape)
    return RgbImage.from_array(np.clip(np.rint(rgb), 0, 255).astype(np.uint8))


def save_ppm(directory, name, img: RgbImage) -> str:
    path = os.path.join(directory, name)
    write_ppm_file(path, img)
    return path
