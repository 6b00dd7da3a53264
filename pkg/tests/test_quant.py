# tests/test_quant.py
import math
import unittest
from fractions import Fraction

import numpy as np

from edgecodec.utils import quant, transform
from edgecodec.utils.quant import ANNEX_K_LUMA, CHROMA, LUMA


class TestQuantMatrix(unittest.TestCase):

    def test_quality_fifty_is_annex_k(self):
        q = quant.base_qmatrix(8, LUMA, 50)
        np.testing.assert_array_equal(q.entries, ANNEX_K_LUMA)
        self.assertEqual(q.entries[0, 0], 16)

    def test_quality_hundred_clamps_to_one(self):
        for kind in (LUMA, CHROMA):
            q = quant.base_qmatrix(8, kind, 100)
            self.assertTrue(np.all(q.entries == 1))

    def test_replication(self):
        q8 = quant.base_qmatrix(8, LUMA, 50).entries
        q16 = quant.base_qmatrix(16, LUMA, 50).entries
        q32 = quant.base_qmatrix(32, CHROMA, 30).entries
        self.assertEqual(q16[2, 3], q8[1, 1])
        self.assertEqual(q16.shape, (16, 16))
        np.testing.assert_array_equal(q32[::4, ::4], quant.base_qmatrix(8, CHROMA, 30).entries)

    def test_scale_factor(self):
        self.assertEqual(quant.quality_scale(10), 500)
        self.assertEqual(quant.quality_scale(3), Fraction(5000, 3))
        self.assertEqual(quant.quality_scale(50), 100)
        self.assertEqual(quant.quality_scale(75), 50)
        self.assertEqual(quant.quality_scale(100), 0)

    def test_real_valued_scale_below_fifty(self):
        # 16 * (5000 / 13) / 100 = 61.54; a truncated scale of 384 would give 61
        self.assertEqual(quant.base_qmatrix(8, LUMA, 13).entries[0, 0], 62)
        for kind, table in ((LUMA, ANNEX_K_LUMA), (CHROMA, quant.ANNEX_K_CHROMA)):
            for quality in range(1, 101):
                s = Fraction(5000, quality) if quality < 50 else Fraction(200 - 2 * quality)
                expected = [[min(255, max(1, math.floor(int(v) * s / 100 + Fraction(1, 2))))
                             for v in row] for row in table]
                np.testing.assert_array_equal(quant.base_qmatrix(8, kind, quality).entries, expected,
                                              err_msg=f"{kind} quality {quality}")


    def test_low_quality_clamps_to_255(self):
        q = quant.base_qmatrix(8, CHROMA, 1)
        self.assertEqual(int(q.entries.max()), 255)
        self.assertGreaterEqual(int(q.entries.min()), 1)

    def test_quality_out_of_range(self):
        for quality in (0, 101, -5, 50.5):
            with self.assertRaises(ValueError, msg=f"quality {quality} should be rejected"):
                quant.base_qmatrix(8, LUMA, quality)

    def test_bad_block_size_and_kind(self):
        with self.assertRaises(ValueError):
            quant.base_qmatrix(12, LUMA, 50)
        with self.assertRaises(ValueError):
            quant.base_qmatrix(8, "alpha", 50)

    def test_monotone_in_quality(self):
        for kind in (LUMA, CHROMA):
            previous = quant.base_qmatrix(8, kind, 1).entries
            for quality in range(2, 101):
                current = quant.base_qmatrix(8, kind, quality).entries
                self.assertTrue(np.all(current <= previous), f"{kind} entries grew at quality {quality}")
                previous = current


class TestQuantize(unittest.TestCase):

    def setUp(self):
        self.q = quant.base_qmatrix(8, LUMA, 50)

    def test_zero_block(self):
        self.assertTrue(np.all(quant.quantize(np.zeros((8, 8)), self.q) == 0))
        self.assertTrue(np.all(quant.dequantize(np.zeros(64, dtype=np.int64), self.q) == 0))

    def test_dc_example(self):
        coeffs = np.zeros((8, 8))
        coeffs[0, 0] = 1024.0
        levels = quant.quantize(coeffs, self.q)
        self.assertEqual(levels[0], 64)
        self.assertEqual(quant.dequantize(levels, self.q)[0, 0], 1024.0)

    def test_rounding(self):
        coeffs = np.zeros((8, 8))
        coeffs[0, 0] = 7.9
        coeffs[0, 3] = 8.0
        coeffs[3, 0] = -7.0
        levels = quant.quantize(coeffs, self.q)
        raster = np.zeros(64, dtype=np.int64)
        raster[transform.zigzag(8)] = levels
        raster = raster.reshape(8, 8)
        self.assertEqual(raster[0, 0], 0)
        # Step 16 at (0, 3): 0.5 rounds away from zero
        self.assertEqual(raster[0, 3], 1)
        # Step 14 at (3, 0): -0.5 rounds to -1
        self.assertEqual(raster[3, 0], -1)

    def test_output_is_zigzag(self):
        coeffs = np.zeros((8, 8))
        coeffs[1, 0] = 12.0 * 10
        levels = quant.quantize(coeffs, self.q)
        self.assertEqual(levels[2], 10)

    def test_error_bound_and_idempotence(self):
        rng = np.random.default_rng(31)
        for n in transform.BLOCK_SIZES:
            for kind in (LUMA, CHROMA):
                q = quant.base_qmatrix(n, kind, int(rng.integers(1, 101)))
                coeffs = rng.normal(scale=200.0, size=(20, n, n))
                levels = quant.quantize(coeffs, q)
                self.assertEqual(levels.dtype, np.int64)
                restored = quant.dequantize(levels, q)
                self.assertTrue(np.all(np.abs(coeffs - restored) <= q.steps / 2 + 1e-9))
                np.testing.assert_array_equal(quant.quantize(restored, q), levels)

    def test_shape_mismatch(self):
        with self.assertRaises(ValueError):
            quant.quantize(np.zeros((16, 16)), self.q)
        with self.assertRaises(ValueError):
            quant.dequantize(np.zeros(256, dtype=np.int64), self.q)


if __name__ == '__main__':
    unittest.main()
