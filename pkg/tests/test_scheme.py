# tests/test_scheme.py
import unittest

import numpy as np

from edgecodec.utils import quant, transform
from edgecodec.utils.scheme import (FORCE_ALL_EDGE, FORCE_ALL_NONEDGE, Scheme, classify, edge_block_pct,
                                    forced_classification, retain, retain_blocks)
from edgecodec.utils.transform import BlockGrid


def _block_with(positions, n=8, dc=64):
    block = np.zeros(n * n, dtype=np.int64)
    block[0] = dc
    for i, pos in enumerate(positions):
        block[pos] = (i % 5 + 1) * (-1 if i % 2 else 1)
    return block


class TestSchemeEnum(unittest.TestCase):

    def test_retention_fractions(self):
        self.assertEqual([s.retention for s in Scheme], [1.0, 0.7, 0.5])
        self.assertEqual([s.tag for s in Scheme], [1, 2, 3])

    def test_parse(self):
        self.assertIs(Scheme.parse("m2"), Scheme.M2)
        self.assertIs(Scheme.parse("M-3"), Scheme.M3)
        self.assertIs(Scheme.parse("1"), Scheme.M1)
        with self.assertRaises(ValueError):
            Scheme.parse("m4")
        with self.assertRaises(ValueError):
            Scheme.from_tag(0)


class TestClassify(unittest.TestCase):

    def test_empty_map(self):
        grid = BlockGrid(8, 16, 16)
        self.assertFalse(classify(np.zeros((16, 16), dtype=bool), grid).any())

    def test_full_map(self):
        grid = BlockGrid(8, 20, 12)
        result = classify(np.ones((12, 20), dtype=bool), grid, min_edge_pixels=1)
        self.assertEqual(result.shape, (2, 3))
        self.assertTrue(result.all())

    def test_single_pixel(self):
        edges = np.zeros((16, 16), dtype=bool)
        edges[3, 3] = True
        result = classify(edges, BlockGrid(8, 16, 16), 1)
        np.testing.assert_array_equal(result, [[True, False], [False, False]])

    def test_padding_never_counts(self):
        edges = np.ones((10, 10), dtype=bool)
        # Real pixels per block: 64, 16, 16 and 4; padding would make every block 64
        result = classify(edges, BlockGrid(8, 10, 10), min_edge_pixels=5)
        np.testing.assert_array_equal(result, [[True, True], [True, False]])
        result = classify(edges, BlockGrid(8, 10, 10), min_edge_pixels=17)
        np.testing.assert_array_equal(result, [[True, False], [False, False]])
        result = classify(edges, BlockGrid(8, 10, 10), min_edge_pixels=4)
        self.assertTrue(result.all())


    def test_threshold(self):
        edges = np.zeros((8, 8), dtype=bool)
        edges[0, :3] = True
        grid = BlockGrid(8, 8, 8)
        self.assertTrue(classify(edges, grid, 3)[0, 0])
        self.assertFalse(classify(edges, grid, 4)[0, 0])

    def test_dimension_mismatch(self):
        with self.assertRaises(ValueError):
            classify(np.zeros((8, 9), dtype=bool), BlockGrid(8, 8, 8))
        with self.assertRaises(ValueError):
            classify(np.zeros((8, 8), dtype=bool), BlockGrid(8, 8, 8), min_edge_pixels=0)

    def test_forced_maps(self):
        grid = BlockGrid(16, 40, 20)
        self.assertTrue(forced_classification(grid, FORCE_ALL_EDGE).all())
        self.assertFalse(forced_classification(grid, FORCE_ALL_NONEDGE).any())
        self.assertEqual(edge_block_pct(forced_classification(grid, FORCE_ALL_EDGE)), 100.0)
        with self.assertRaises(ValueError):
            forced_classification(grid, "sometimes")


class TestRetain(unittest.TestCase):

    POSITIONS = [1, 2, 5, 6, 7, 9, 12, 20, 31, 40]

    def _support(self, block):
        return set(np.flatnonzero(block[1:]) + 1)

    def test_m2_keeps_first_seventy_percent(self):
        block = _block_with(self.POSITIONS)
        out = retain(block, True, Scheme.M2)
        self.assertEqual(self._support(out), {1, 2, 5, 6, 7, 9, 12})
        np.testing.assert_array_equal(out[[1, 2, 5, 6, 7, 9, 12]], block[[1, 2, 5, 6, 7, 9, 12]])

    def test_m3_keeps_half(self):
        out = retain(_block_with(self.POSITIONS), True, Scheme.M3)
        self.assertEqual(self._support(out), {1, 2, 5, 6, 7})

    def test_ceiling_keeps_at_least_one(self):
        self.assertEqual(self._support(retain(_block_with([9]), True, Scheme.M3)), {9})
        self.assertEqual(self._support(retain(_block_with([3, 4, 8]), True, Scheme.M3)), {3, 4})
        self.assertEqual(self._support(retain(_block_with([3, 4, 8]), True, Scheme.M2)), {3, 4, 8})

    def test_m1_is_identity(self):
        block = _block_with(self.POSITIONS)
        np.testing.assert_array_equal(retain(block, True, Scheme.M1), block)

    def test_non_edge_keeps_only_dc(self):
        for scheme in Scheme:
            out = retain(_block_with(self.POSITIONS, dc=64), False, scheme)
            self.assertEqual(out[0], 64)
            self.assertFalse(out[1:].any())

    def test_prefix_and_nesting(self):
        rng = np.random.default_rng(41)
        blocks = rng.integers(-3, 4, size=(500, 64)) * (rng.random((500, 64)) < 0.3)
        is_edge = np.ones(500, dtype=bool)
        outputs = {s: retain_blocks(blocks, is_edge, s) for s in Scheme}
        for b in range(500):
            nonzero = list(np.flatnonzero(blocks[b, 1:]) + 1)
            supports = {}
            for scheme, out in outputs.items():
                self.assertEqual(out[b, 0], blocks[b, 0])
                kept = list(np.flatnonzero(out[b, 1:]) + 1)
                self.assertEqual(kept, nonzero[:len(kept)], "retained set must be a zigzag prefix")
                supports[scheme] = set(kept)
            self.assertTrue(supports[Scheme.M3] <= supports[Scheme.M2] <= supports[Scheme.M1])

    def test_rejects_mismatched_flags(self):
        with self.assertRaises(ValueError):
            retain_blocks(np.zeros((3, 64), dtype=np.int64), np.ones(2, dtype=bool), Scheme.M1)

    def test_reconstruction_error_grows_with_dropping(self):
        rng = np.random.default_rng(42)
        for n in transform.BLOCK_SIZES:
            count = 1000 if n == 8 else 200
            q = quant.base_qmatrix(n, quant.LUMA, 50)
            pixels = rng.uniform(-128, 128, size=(count, n, n))
            coeffs = transform.dct2(pixels)
            levels = quant.quantize(coeffs, q)
            is_edge = np.ones(count, dtype=bool)
            coeff_err, pixel_err = [], []
            for scheme in Scheme:
                restored = quant.dequantize(retain_blocks(levels, is_edge, scheme), q)
                coeff_err.append(((coeffs - restored) ** 2).sum(axis=(1, 2)))
                pixel_err.append(((pixels - transform.idct2(restored)) ** 2).sum(axis=(1, 2)))
            self.assertTrue(np.all(coeff_err[0] <= coeff_err[1]))
            self.assertTrue(np.all(coeff_err[1] <= coeff_err[2]))
            self.assertTrue(np.all(pixel_err[0] <= pixel_err[1] + 1e-6))
            self.assertTrue(np.all(pixel_err[1] <= pixel_err[2] + 1e-6))


if __name__ == '__main__':
    unittest.main()
