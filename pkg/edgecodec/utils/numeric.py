# edgecodec/utils/numeric.py
import numpy as np


def round_half_away(values):
    """Round to the nearest integer, halves away from zero (2.5 -> 3, -2.5 -> -3)."""
    values = np.asarray(values, dtype=np.float64)
    return np.sign(values) * np.floor(np.abs(values) + 0.5)
