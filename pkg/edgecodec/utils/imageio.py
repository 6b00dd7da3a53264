# edgecodec/utils/imageio.py
import logging
import os
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger('edgecodec.imageio')

PPM_MAGIC = b"P6"
PPM_MAXVAL = 255
_WHITESPACE = b" \t\n\r\x0b\x0c"


class PpmError(Exception):
    """Base class for binary PPM parsing failures."""


class BadMagicError(PpmError):
    pass


class MalformedHeaderError(PpmError):
    pass


class UnsupportedMaxvalError(PpmError):
    pass


class ZeroDimensionError(PpmError):
    pass


class TruncatedPayloadError(PpmError):
    pass


@dataclass(frozen=True)
class RgbImage:
    """8-bit interleaved RGB raster, row-major R,G,B bytes."""
    width: int
    height: int
    data: bytes

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"Image dimensions must be positive, got {self.width}x{self.height}")
        if len(self.data) != 3 * self.width * self.height:
            raise ValueError(
                f"Pixel payload is {len(self.data)} bytes, expected {3 * self.width * self.height} "
                f"for a {self.width}x{self.height} image"
            )

    @property
    def pixels(self) -> int:
        return self.width * self.height

    def as_array(self) -> np.ndarray:
        """Read-only (height, width, 3) uint8 view of the payload."""
        return np.frombuffer(self.data, dtype=np.uint8).reshape(self.height, self.width, 3)

    @classmethod
    def from_array(cls, array) -> "RgbImage":
        array = np.asarray(array)
        if array.ndim != 3 or array.shape[2] != 3:
            raise ValueError(f"Expected a (height, width, 3) array, got shape {array.shape}")
        if array.dtype != np.uint8:
            if array.min(initial=0) < 0 or array.max(initial=0) > 255:
                raise ValueError("Samples must lie in [0, 255]")
            array = array.astype(np.uint8)
        height, width, _ = array.shape
        return cls(width=width, height=height, data=np.ascontiguousarray(array).tobytes())


def _next_token(buf: bytes, pos: int):
    """Returns (token, position after token), skipping whitespace and '#' comments."""
    size = len(buf)
    while pos < size:
        ch = buf[pos:pos + 1]
        if ch == b"#":
            # Comment runs to the end of the line
            while pos < size and buf[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif ch in _WHITESPACE:
            pos += 1
        else:
            break
    start = pos
    while pos < size and buf[pos:pos + 1] not in _WHITESPACE and buf[pos:pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise MalformedHeaderError(f"Unexpected end of PPM header at byte {start}")
    return buf[start:pos], pos


def _parse_int(token: bytes, field: str) -> int:
    if not token.isdigit():
        raise MalformedHeaderError(f"PPM {field} is not a decimal integer: {token!r}")
    return int(token)


def read_ppm(buf: bytes) -> RgbImage:
    """
    Parses a binary PPM ("P6") image with maxval 255.

    Comments are accepted anywhere whitespace is. Bytes following the pixel
    payload are ignored; a payload shorter than width*height*3 is rejected.
    """
    buf = bytes(buf)
    if buf[:2] != PPM_MAGIC:
        raise BadMagicError(f"Not a binary PPM: magic is {buf[:2]!r}, expected {PPM_MAGIC!r}")
    pos = 2
    if pos >= len(buf) or (buf[pos:pos + 1] not in _WHITESPACE and buf[pos:pos + 1] != b"#"):
        raise MalformedHeaderError("Missing whitespace after PPM magic")

    token, pos = _next_token(buf, pos)
    width = _parse_int(token, "width")
    token, pos = _next_token(buf, pos)
    height = _parse_int(token, "height")
    token, pos = _next_token(buf, pos)
    maxval = _parse_int(token, "maxval")

    if width == 0 or height == 0:
        raise ZeroDimensionError(f"PPM has a zero dimension: {width}x{height}")
    if maxval != PPM_MAXVAL:
        raise UnsupportedMaxvalError(f"Unsupported maxval {maxval}; only {PPM_MAXVAL} is supported")

    # Exactly one whitespace byte separates the header from the payload
    if pos >= len(buf) or buf[pos:pos + 1] not in _WHITESPACE:
        raise MalformedHeaderError("Missing whitespace between PPM header and payload")
    pos += 1

    expected = 3 * width * height
    payload = buf[pos:pos + expected]
    if len(payload) < expected:
        raise TruncatedPayloadError(
            f"PPM payload truncated: got {len(payload)} of {expected} bytes"
        )
    if len(buf) > pos + expected:
        logger.debug(f"Ignoring {len(buf) - pos - expected} trailing bytes after PPM payload.")
    return RgbImage(width=width, height=height, data=payload)


def write_ppm(img: RgbImage) -> bytes:
    """Serializes an image with the canonical header 'P6\\n<w> <h>\\n255\\n'."""
    header = f"P6\n{img.width} {img.height}\n{PPM_MAXVAL}\n".encode("ascii")
    return header + img.data


def read_ppm_file(path: str) -> RgbImage:
    with open(path, "rb") as f:
        buf = f.read()
    img = read_ppm(buf)
    logger.debug(f"Read {img.width}x{img.height} PPM from '{path}'.")
    return img


def write_ppm_file(path: str, img: RgbImage) -> None:
    out_dir = os.path.dirname(path)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    with open(path, "wb") as f:
        f.write(write_ppm(img))
    logger.debug(f"Wrote {img.width}x{img.height} PPM to '{path}'.")
