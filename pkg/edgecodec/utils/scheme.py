# edgecodec/utils/scheme.py
import enum
import logging

import numpy as np

from edgecodec.utils.transform import BlockGrid

logger = logging.getLogger('edgecodec.scheme')

FORCE_AUTO = "auto"
FORCE_ALL_EDGE = "all-edge"
FORCE_ALL_NONEDGE = "all-nonedge"
FORCE_MODES = (FORCE_AUTO, FORCE_ALL_EDGE, FORCE_ALL_NONEDGE)


class Scheme(enum.Enum):
    """AC retention for edge blocks; value is (wire tag, percent of non-zero ACs kept)."""
    M1 = (1, 100)
    M2 = (2, 70)
    M3 = (3, 50)

    @property
    def tag(self) -> int:
        return self.value[0]

    @property
    def percent(self) -> int:
        return self.value[1]

    @property
    def retention(self) -> float:
        return self.percent / 100.0

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def from_tag(cls, tag: int) -> "Scheme":
        for scheme in cls:
            if scheme.tag == tag:
                return scheme
        raise ValueError(f"Unknown scheme tag {tag}")

    @classmethod
    def parse(cls, text: str) -> "Scheme":
        """Accepts 'm1', 'M-2', '3' and similar spellings."""
        cleaned = str(text).strip().upper().replace("-", "")
        if cleaned.isdigit():
            return cls.from_tag(int(cleaned))
        try:
            return cls[cleaned]
        except KeyError:
            raise ValueError(f"Unknown scheme {text!r}; expected one of m1, m2, m3") from None


def classify(edges: np.ndarray, grid: BlockGrid, min_edge_pixels: int = 1) -> np.ndarray:
    """
    Marks a block as edge when its unpadded area holds >= min_edge_pixels edge pixels.

    Returns:
        bool array (blocks_y, blocks_x), True for edge blocks.
    """
    edges = np.asarray(edges, dtype=bool)
    if edges.shape != (grid.true_height, grid.true_width):
        raise ValueError(
            f"Edge map {edges.shape} does not match plane {grid.true_height}x{grid.true_width}"
        )
    if min_edge_pixels < 1:
        raise ValueError(f"min_edge_pixels must be >= 1, got {min_edge_pixels}")
    n = grid.block_size
    # Padding never counts as edge
    padded = np.zeros((grid.padded_height, grid.padded_width), dtype=np.int64)
    padded[:grid.true_height, :grid.true_width] = edges
    counts = padded.reshape(grid.blocks_y, n, grid.blocks_x, n).sum(axis=(1, 3))
    return counts >= min_edge_pixels


def forced_classification(grid: BlockGrid, mode: str) -> np.ndarray:
    if mode == FORCE_ALL_EDGE:
        return np.ones((grid.blocks_y, grid.blocks_x), dtype=bool)
    if mode == FORCE_ALL_NONEDGE:
        return np.zeros((grid.blocks_y, grid.blocks_x), dtype=bool)
    raise ValueError(f"Unknown forced classification {mode!r}")


def edge_block_pct(classification: np.ndarray) -> float:
    classification = np.asarray(classification, dtype=bool)
    if classification.size == 0:
        return 0.0
    return 100.0 * float(classification.sum()) / classification.size


def retain_blocks(blocks: np.ndarray, is_edge: np.ndarray, scheme: Scheme) -> np.ndarray:
    """
    Applies the retention rule to a stack of zigzag blocks (B, N*N).

    Non-edge blocks keep only DC. Edge blocks keep the first ceil(p * k)
    non-zero ACs in zigzag order, k being their non-zero AC count.
    """
    blocks = np.asarray(blocks)
    is_edge = np.asarray(is_edge, dtype=bool).reshape(-1)
    if blocks.ndim != 2 or blocks.shape[0] != is_edge.size:
        raise ValueError(
            f"Expected {is_edge.size} zigzag blocks, got array of shape {blocks.shape}"
        )
    out = np.zeros_like(blocks)
    out[:, 0] = blocks[:, 0]
    ac = blocks[:, 1:]
    nonzero = ac != 0
    k = nonzero.sum(axis=1)
    # Integer ceil avoids 0.7 * 10 -> 7.000000000000001 -> 8
    m = (scheme.percent * k + 99) // 100
    rank = np.cumsum(nonzero, axis=1)
    keep = nonzero & (rank <= m[:, None]) & is_edge[:, None]
    out[:, 1:] = np.where(keep, ac, 0)
    return out


def retain(block: np.ndarray, is_edge: bool, scheme: Scheme) -> np.ndarray:
    """Single-block form of retain_blocks."""
    block = np.asarray(block)
    return retain_blocks(block[None, :], np.array([is_edge]), scheme)[0]
