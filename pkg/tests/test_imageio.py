# tests/test_imageio.py

# run with:
# python -m unittest discover -s tests -v

import os
import shutil
import tempfile
import unittest

import numpy as np

from edgecodec.utils.imageio import (BadMagicError, MalformedHeaderError, PpmError, RgbImage,
                                     TruncatedPayloadError, UnsupportedMaxvalError, ZeroDimensionError,
                                     read_ppm, read_ppm_file, write_ppm, write_ppm_file)
from tests.fixtures import random_image


class TestReadPpm(unittest.TestCase):

    def test_single_pixel(self):
        img = read_ppm(b"P6 1 1 255\n" + bytes([10, 20, 30]))
        self.assertEqual((img.width, img.height), (1, 1))
        self.assertEqual(img.data, bytes([10, 20, 30]))

    def test_comment_in_header_is_skipped(self):
        img = read_ppm(b"P6\n# comment\n2 1\n255\n" + bytes(range(6)))
        self.assertEqual((img.width, img.height), (2, 1))
        self.assertEqual(img.data, bytes(range(6)))

    def test_comment_between_every_field(self):
        buf = b"P6#a\n3#b\n#c\n1 #d\n255\n" + bytes(9)
        img = read_ppm(buf)
        self.assertEqual((img.width, img.height), (3, 1))

    def test_unsupported_maxval(self):
        with self.assertRaises(UnsupportedMaxvalError):
            read_ppm(b"P6 1 1 65535\n" + bytes(6))

    def test_bad_magic(self):
        with self.assertRaises(BadMagicError):
            read_ppm(b"P3 1 1 255\n0 0 0\n")

    def test_zero_dimension(self):
        with self.assertRaises(ZeroDimensionError):
            read_ppm(b"P6 0 4 255\n")

    def test_truncated_payload(self):
        with self.assertRaises(TruncatedPayloadError):
            read_ppm(b"P6 2 2 255\n" + bytes(11))

    def test_malformed_header(self):
        with self.assertRaises(MalformedHeaderError):
            read_ppm(b"P6 two 2 255\n" + bytes(12))
        with self.assertRaises(MalformedHeaderError):
            read_ppm(b"P6 2 2")

    def test_errors_are_distinct(self):
        kinds = {BadMagicError, MalformedHeaderError, UnsupportedMaxvalError,
                 ZeroDimensionError, TruncatedPayloadError}
        self.assertEqual(len(kinds), 5)
        for kind in kinds:
            self.assertTrue(issubclass(kind, PpmError))

    def test_trailing_bytes_ignored(self):
        img = read_ppm(b"P6 1 1 255\n" + bytes([1, 2, 3]) + b"extra")
        self.assertEqual(img.data, bytes([1, 2, 3]))


class TestWritePpm(unittest.TestCase):

    def setUp(self):
        self.test_dir = tempfile.mkdtemp(prefix="edgecodec_test_")

    def tearDown(self):
        if os.path.exists(self.test_dir):
            shutil.rmtree(self.test_dir, ignore_errors=True)

    def test_canonical_form(self):
        img = RgbImage(1, 1, bytes(3))
        self.assertEqual(write_ppm(img), b"P6\n1 1\n255\n" + bytes(3))

    def test_payload_is_row_major(self):
        pixels = bytes(range(12))
        out = write_ppm(RgbImage(2, 2, pixels))
        self.assertEqual(out[-12:], pixels)
        self.assertEqual(len(out), len(b"P6\n2 2\n255\n") + 12)

    def test_round_trip_random_images(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            w, h = (int(v) for v in rng.integers(1, 40, size=2))
            img = random_image(rng, w, h)
            self.assertEqual(read_ppm(write_ppm(img)), img)

    def test_round_trip_16x16(self):
        img = random_image(np.random.default_rng(1), 16, 16)
        self.assertEqual(read_ppm(write_ppm(img)).data, img.data)

    def test_deterministic(self):
        img = random_image(np.random.default_rng(3), 5, 4)
        self.assertEqual(write_ppm(img), write_ppm(RgbImage(img.width, img.height, bytes(img.data))))

    def test_file_round_trip(self):
        img = random_image(np.random.default_rng(4), 9, 3)
        path = os.path.join(self.test_dir, "sub", "img.ppm")
        write_ppm_file(path, img)
        self.assertEqual(read_ppm_file(path), img)


class TestRgbImage(unittest.TestCase):

    def test_payload_length_checked(self):
        with self.assertRaises(ValueError):
            RgbImage(2, 2, bytes(11))

    def test_array_view(self):
        img = RgbImage(2, 1, bytes([1, 2, 3, 4, 5, 6]))
        np.testing.assert_array_equal(img.as_array()[0, 1], [4, 5, 6])


if __name__ == '__main__':
    unittest.main()
