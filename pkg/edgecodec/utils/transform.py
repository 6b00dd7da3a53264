# edgecodec/utils/transform.py
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

BLOCK_SIZES = (8, 16, 32)


@dataclass(frozen=True)
class BlockGrid:
    """Geometry of an N x N tiling; padded dims are the next multiples of N."""
    block_size: int
    true_width: int
    true_height: int

    def __post_init__(self):
        if self.block_size not in BLOCK_SIZES:
            raise ValueError(f"Block size must be one of {BLOCK_SIZES}, got {self.block_size}")
        if self.true_width < 1 or self.true_height < 1:
            raise ValueError(f"Grid dimensions must be positive, got {self.true_width}x{self.true_height}")

    @property
    def blocks_x(self) -> int:
        return -(-self.true_width // self.block_size)

    @property
    def blocks_y(self) -> int:
        return -(-self.true_height // self.block_size)

    @property
    def padded_width(self) -> int:
        return self.blocks_x * self.block_size

    @property
    def padded_height(self) -> int:
        return self.blocks_y * self.block_size

    @property
    def block_count(self) -> int:
        return self.blocks_x * self.blocks_y


def partition(plane: np.ndarray, block_size: int):
    """
    Pads a plane by edge replication to multiples of N and cuts it into blocks.

    Returns:
        grid (BlockGrid): tiling geometry.
        blocks (np.ndarray): shape (blocks_y * blocks_x, N, N), row-major block order.
    """
    plane = np.asarray(plane, dtype=np.float64)
    height, width = plane.shape
    grid = BlockGrid(block_size, width, height)
    n = block_size
    padded = np.pad(
        plane,
        ((0, grid.padded_height - height), (0, grid.padded_width - width)),
        mode='edge',
    )
    blocks = padded.reshape(grid.blocks_y, n, grid.blocks_x, n).swapaxes(1, 2)
    return grid, np.ascontiguousarray(blocks.reshape(-1, n, n))


def reassemble(grid: BlockGrid, blocks: np.ndarray) -> np.ndarray:
    """Inverse of partition: tiles blocks back and crops to the true dimensions."""
    n = grid.block_size
    blocks = np.asarray(blocks).reshape(grid.blocks_y, grid.blocks_x, n, n)
    padded = blocks.swapaxes(1, 2).reshape(grid.padded_height, grid.padded_width)
    return np.ascontiguousarray(padded[:grid.true_height, :grid.true_width])


@lru_cache(maxsize=None)
def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II basis: D[k, x] = sqrt(2/N) C(k) cos((2x+1) k pi / 2N)."""
    k = np.arange(n, dtype=np.float64)[:, None]
    x = np.arange(n, dtype=np.float64)[None, :]
    basis = math.sqrt(2.0 / n) * np.cos((2 * x + 1) * k * math.pi / (2 * n))
    basis[0, :] *= 1.0 / math.sqrt(2.0)
    basis.setflags(write=False)
    return basis


def dct2(blocks: np.ndarray) -> np.ndarray:
    """2D DCT of one (N, N) block or a stack (..., N, N); coefficients in raster order."""
    blocks = np.asarray(blocks, dtype=np.float64)
    d = dct_matrix(blocks.shape[-1])
    return d @ blocks @ d.T


def idct2(coeffs: np.ndarray) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=np.float64)
    d = dct_matrix(coeffs.shape[-1])
    return d.T @ coeffs @ d


@lru_cache(maxsize=None)
def zigzag_positions(n: int):
    """(row, col) pairs in zigzag order: (0,0), (0,1), (1,0), (2,0), (1,1), (0,2), ..."""
    if n < 1:
        raise ValueError(f"Zigzag size must be positive, got {n}")
    order = []
    for s in range(2 * n - 1):
        rows = range(max(0, s - n + 1), min(s, n - 1) + 1)
        # Odd anti-diagonals run down-left, even ones up-right
        if s % 2 == 0:
            rows = reversed(rows)
        order.extend((r, s - r) for r in rows)
    return tuple(order)


@lru_cache(maxsize=None)
def zigzag(n: int) -> np.ndarray:
    """order[k] = raster index of the k-th zigzag position, so zz = flat[order]."""
    order = np.array([r * n + c for r, c in zigzag_positions(n)], dtype=np.intp)
    order.setflags(write=False)
    return order


@lru_cache(maxsize=None)
def inverse_zigzag(n: int) -> np.ndarray:
    """inverse[i] = zigzag position of raster index i, so flat = zz[inverse]."""
    inverse = np.empty(n * n, dtype=np.intp)
    inverse[zigzag(n)] = np.arange(n * n, dtype=np.intp)
    inverse.setflags(write=False)
    return inverse
