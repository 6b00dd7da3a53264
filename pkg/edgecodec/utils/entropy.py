# edgecodec/utils/entropy.py
import heapq
import logging
import struct
from dataclasses import dataclass, field

import numpy as np

from edgecodec.utils.transform import BLOCK_SIZES

logger = logging.getLogger('edgecodec.entropy')

MAGIC = b"EDC1"
VERSION = 1
MAX_CODE_LENGTH = 16
MAX_DC_SIZE = 16
MAX_AC_SIZE = 15
EOB = 0x00
ZRL = 0xF0

# magic | version | block_size | scheme | quality | width | height |
# mean_r, mean_g, mean_b | sigma, low, high | min_edge_pixels | blocks_x | blocks_y
_HEADER = struct.Struct("<4sBBBBHHffffffHHH")
_PAYLOAD_LENGTH = struct.Struct("<I")

# Table order inside the stream
DC_LUMA, AC_LUMA, DC_CHROMA, AC_CHROMA = range(4)


# --- Errors ---

class BitstreamError(Exception):
    """Malformed stream; `offset` is the bit position where it was detected."""

    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (at bit offset {offset})")
        self.message = message
        self.offset = offset


class BadMagicError(BitstreamError):
    def __init__(self, offset: int = 0):
        super().__init__("bad magic", offset)


class UnsupportedVersionError(BitstreamError):
    pass


class InvalidHeaderError(BitstreamError):
    pass


class TruncatedStreamError(BitstreamError):
    pass


class InvalidHuffmanTableError(BitstreamError):
    pass


class InvalidHuffmanCodeError(BitstreamError):
    pass


class RunPastBlockEndError(BitstreamError):
    pass


class EntropyEncodeError(Exception):
    pass


class AmplitudeOverflowError(EntropyEncodeError):
    pass


class MissingCodeError(EntropyEncodeError):
    pass


# --- Bit I/O ---

class BitWriter:
    """MSB-first bit packer."""

    def __init__(self):
        self._buf = bytearray()
        self._acc = 0
        self._nbits = 0

    def write(self, value: int, length: int):
        if length == 0:
            return
        self._acc = (self._acc << length) | (value & ((1 << length) - 1))
        self._nbits += length
        while self._nbits >= 8:
            self._nbits -= 8
            self._buf.append((self._acc >> self._nbits) & 0xFF)
        self._acc &= (1 << self._nbits) - 1

    def getvalue(self) -> bytes:
        """Flushes with 1-bits up to the byte boundary."""
        if self._nbits:
            pad = 8 - self._nbits
            self.write((1 << pad) - 1, pad)
        return bytes(self._buf)


class BitReader:
    """MSB-first bit reader; `base_offset` maps positions to the whole stream."""

    def __init__(self, data: bytes, base_offset: int = 0):
        self._data = data
        self._limit = len(data) * 8
        self.pos = 0
        self.base_offset = base_offset

    @property
    def offset(self) -> int:
        return self.base_offset + self.pos

    def read_bit(self) -> int:
        if self.pos >= self._limit:
            raise TruncatedStreamError("payload ended mid-symbol", self.offset)
        byte = self._data[self.pos >> 3]
        bit = (byte >> (7 - (self.pos & 7))) & 1
        self.pos += 1
        return bit

    def read(self, length: int) -> int:
        if self.pos + length > self._limit:
            raise TruncatedStreamError("payload ended mid-amplitude", self.offset)
        value = 0
        for _ in range(length):
            value = (value << 1) | self.read_bit()
        return value


# --- Amplitude coding ---

def size_category(value: int) -> int:
    """Number of bits in |value|; 0 for 0."""
    return int(abs(int(value))).bit_length()


def encode_amplitude(value: int, size: int) -> int:
    """Negative values are stored as value - 1 in `size` bits (JPEG convention)."""
    return value if value >= 0 else value + (1 << size) - 1


def decode_amplitude(bits: int, size: int) -> int:
    if size == 0:
        return 0
    if bits >> (size - 1):
        return bits
    return bits - (1 << size) + 1


# --- Huffman tables ---

def _code_sizes(frequencies):
    """
    Annex K.2 code-size procedure with a reserved symbol 256 so no code is all ones.
    Ties pick the largest symbol index, pushing the reserved symbol to the longest code.
    """
    freq = list(frequencies) + [1]
    codesize = [0] * 257
    others = [-1] * 257
    # (frequency, -index) pops the least frequent node, largest index first
    heap = [(f, -i) for i, f in enumerate(freq) if f]
    heapq.heapify(heap)
    while len(heap) > 1:
        f1, v1 = heapq.heappop(heap)
        f2, v2 = heapq.heappop(heap)
        v1, v2 = -v1, -v2
        heapq.heappush(heap, (f1 + f2, -v1))
        codesize[v1] += 1
        while others[v1] >= 0:
            v1 = others[v1]
            codesize[v1] += 1
        others[v1] = v2
        codesize[v2] += 1
        while others[v2] >= 0:
            v2 = others[v2]
            codesize[v2] += 1
    return codesize


def _limit_lengths(codesize):
    """Annex K.3 Adjust_BITS: caps lengths at 16 and drops the reserved code."""
    bits = [0] * (max(max(codesize), MAX_CODE_LENGTH) + 1)
    for size in codesize:
        if size:
            bits[size] += 1
    for i in range(len(bits) - 1, MAX_CODE_LENGTH, -1):
        while bits[i] > 0:
            j = i - 2
            while bits[j] == 0:
                j -= 1
            bits[i] -= 2
            bits[i - 1] += 1
            bits[j + 1] += 2
            bits[j] -= 1
    i = MAX_CODE_LENGTH
    while bits[i] == 0:
        i -= 1
    bits[i] -= 1
    return bits[1:MAX_CODE_LENGTH + 1]


@dataclass(frozen=True)
class HuffmanTable:
    """Canonical code: counts[l-1] codes of length l, symbols listed in code order."""
    counts: tuple
    symbols: tuple
    _codes: dict = field(default=None, compare=False, repr=False)
    _lookup: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(self.counts) != MAX_CODE_LENGTH:
            raise InvalidHuffmanTableError(f"expected 16 length counts, got {len(self.counts)}")
        if sum(self.counts) != len(self.symbols):
            raise InvalidHuffmanTableError(
                f"length counts sum to {sum(self.counts)} but {len(self.symbols)} symbols follow"
            )
        if len(set(self.symbols)) != len(self.symbols):
            raise InvalidHuffmanTableError("duplicate symbols in table")
        kraft = sum(c * 2 ** (MAX_CODE_LENGTH - length)
                    for length, c in enumerate(self.counts, start=1))
        if kraft > 2 ** MAX_CODE_LENGTH:
            raise InvalidHuffmanTableError("code lengths violate the Kraft inequality")

        codes, lookup = {}, {}
        code = 0
        it = iter(self.symbols)
        for length, count in enumerate(self.counts, start=1):
            for _ in range(count):
                symbol = next(it)
                codes[symbol] = (code, length)
                lookup[(length, code)] = symbol
                code += 1
            code <<= 1
        object.__setattr__(self, "_codes", codes)
        object.__setattr__(self, "_lookup", lookup)

    @classmethod
    def from_frequencies(cls, frequencies) -> "HuffmanTable":
        """Builds a length-limited canonical table from a 256-entry histogram."""
        frequencies = [int(f) for f in frequencies]
        if len(frequencies) != 256:
            raise ValueError(f"expected 256 frequencies, got {len(frequencies)}")
        if not any(frequencies):
            return cls(counts=(0,) * MAX_CODE_LENGTH, symbols=())
        codesize = _code_sizes(frequencies)
        counts = _limit_lengths(codesize)
        # Symbols sorted by original code size keep their relative order after limiting
        ordered = sorted((s for s in range(256) if codesize[s]), key=lambda s: (codesize[s], s))
        return cls(counts=tuple(counts), symbols=tuple(ordered))

    def code(self, symbol: int):
        try:
            return self._codes[symbol]
        except KeyError:
            raise MissingCodeError(f"symbol {symbol:#04x} has no Huffman code") from None

    def write_symbol(self, writer: BitWriter, symbol: int):
        code, length = self.code(symbol)
        writer.write(code, length)

    def read_symbol(self, reader: BitReader) -> int:
        start = reader.offset
        code = 0
        for length in range(1, MAX_CODE_LENGTH + 1):
            code = (code << 1) | reader.read_bit()
            symbol = self._lookup.get((length, code))
            if symbol is not None:
                return symbol
        raise InvalidHuffmanCodeError("no Huffman code matches", start)

    def to_bytes(self) -> bytes:
        return bytes(self.counts) + bytes(self.symbols)

    @property
    def code_lengths(self) -> dict:
        return {symbol: length for symbol, (_, length) in self._codes.items()}


# --- Symbolization ---

def _dc_symbols(blocks: np.ndarray):
    """(size, amplitude bits) per block; DC predicted from the previous block, 0 first."""
    dc = blocks[:, 0].astype(np.int64)
    deltas = np.diff(dc, prepend=0)
    out = []
    for delta in deltas.tolist():
        size = size_category(delta)
        if size > MAX_DC_SIZE:
            raise AmplitudeOverflowError(f"DC difference {delta} needs {size} bits (max {MAX_DC_SIZE})")
        out.append((size, encode_amplitude(delta, size), size))
    return out


def _ac_symbols(block: np.ndarray):
    """(symbol, amplitude bits, size) for the AC part of one zigzag block."""
    out = []
    last = len(block) - 1
    prev = 0
    for pos in np.flatnonzero(block[1:]).tolist():
        pos += 1
        value = int(block[pos])
        run = pos - prev - 1
        while run > 15:
            out.append((ZRL, 0, 0))
            run -= 16
        size = size_category(value)
        if size > MAX_AC_SIZE:
            raise AmplitudeOverflowError(f"AC coefficient {value} needs {size} bits (max {MAX_AC_SIZE})")
        out.append(((run << 4) | size, encode_amplitude(value, size), size))
        prev = pos
    if prev != last:
        out.append((EOB, 0, 0))
    return out


# --- Container ---

@dataclass(frozen=True)
class StreamHeader:
    block_size: int
    scheme: int
    quality: int
    width: int
    height: int
    mean_r: float
    mean_g: float
    mean_b: float
    sigma: float
    canny_low: float
    canny_high: float
    min_edge_pixels: int
    blocks_x: int
    blocks_y: int
    version: int = VERSION

    @property
    def block_count(self) -> int:
        return self.blocks_x * self.blocks_y

    def pack(self) -> bytes:
        return _HEADER.pack(
            MAGIC, self.version, self.block_size, self.scheme, self.quality,
            self.width, self.height, self.mean_r, self.mean_g, self.mean_b,
            self.sigma, self.canny_low, self.canny_high,
            self.min_edge_pixels, self.blocks_x, self.blocks_y,
        )

    @classmethod
    def unpack(cls, data: bytes) -> "StreamHeader":
        if len(data) < 4 or data[:4] != MAGIC:
            if len(data) < 4 and MAGIC.startswith(bytes(data)):
                raise TruncatedStreamError("stream ended inside the header", len(data) * 8)
            raise BadMagicError(0)
        if len(data) < _HEADER.size:
            raise TruncatedStreamError("stream ended inside the header", len(data) * 8)
        (_, version, block_size, scheme, quality, width, height,
         mean_r, mean_g, mean_b, sigma, low, high,
         min_edge, blocks_x, blocks_y) = _HEADER.unpack_from(data)
        if version != VERSION:
            raise UnsupportedVersionError(f"unsupported stream version {version}", 4 * 8)
        header = cls(block_size=block_size, scheme=scheme, quality=quality,
                     width=width, height=height, mean_r=mean_r, mean_g=mean_g, mean_b=mean_b,
                     sigma=sigma, canny_low=low, canny_high=high, min_edge_pixels=min_edge,
                     blocks_x=blocks_x, blocks_y=blocks_y, version=version)
        header.check()
        return header

    def check(self):
        """Raises InvalidHeaderError when fields are out of range or inconsistent."""
        if self.block_size not in BLOCK_SIZES:
            raise InvalidHeaderError(f"invalid block size {self.block_size}", 5 * 8)
        if self.scheme not in (1, 2, 3):
            raise InvalidHeaderError(f"invalid scheme tag {self.scheme}", 6 * 8)
        if not 1 <= self.quality <= 100:
            raise InvalidHeaderError(f"invalid quality {self.quality}", 7 * 8)
        if not (1 <= self.width <= 0xFFFF and 1 <= self.height <= 0xFFFF):
            raise InvalidHeaderError(f"invalid dimensions {self.width}x{self.height}", 8 * 8)
        if not 1 <= self.min_edge_pixels <= 0xFFFF:
            raise InvalidHeaderError(f"invalid min_edge_pixels {self.min_edge_pixels}", 36 * 8)
        n = self.block_size
        if self.blocks_x != -(-self.width // n) or self.blocks_y != -(-self.height // n):
            raise InvalidHeaderError(
                f"block grid {self.blocks_x}x{self.blocks_y} does not tile {self.width}x{self.height}",
                (_HEADER.size - 4) * 8,
            )


@dataclass
class CompressedImage:
    """Header, classification bitmap, the four Huffman tables and three plane payloads."""
    header: StreamHeader
    classification: np.ndarray
    tables: tuple
    payloads: tuple
    # Bit offsets of each payload within the serialized stream, known after parsing
    payload_offsets: tuple = (0, 0, 0)

    def to_bytes(self) -> bytes:
        bitmap = np.packbits(np.asarray(self.classification, dtype=bool).reshape(-1)).tobytes()
        parts = [self.header.pack(), bitmap]
        parts.extend(table.to_bytes() for table in self.tables)
        for payload in self.payloads:
            parts.append(_PAYLOAD_LENGTH.pack(len(payload)))
            parts.append(payload)
        return b"".join(parts)

    @property
    def size_bits(self) -> int:
        return len(self.to_bytes()) * 8

    @classmethod
    def from_bytes(cls, data: bytes) -> "CompressedImage":
        data = bytes(data)
        header = StreamHeader.unpack(data)
        pos = _HEADER.size

        bitmap_len = -(-header.block_count // 8)
        if len(data) < pos + bitmap_len:
            raise TruncatedStreamError("stream ended inside the classification bitmap", len(data) * 8)
        bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8, count=bitmap_len, offset=pos))
        classification = bits[:header.block_count].astype(bool).reshape(header.blocks_y, header.blocks_x)
        pos += bitmap_len

        tables = []
        for index in range(4):
            if len(data) < pos + MAX_CODE_LENGTH:
                raise TruncatedStreamError(f"stream ended inside Huffman table {index}", len(data) * 8)
            counts = tuple(data[pos:pos + MAX_CODE_LENGTH])
            total = sum(counts)
            start = pos + MAX_CODE_LENGTH
            if len(data) < start + total:
                raise TruncatedStreamError(f"stream ended inside Huffman table {index}", len(data) * 8)
            try:
                table = HuffmanTable(counts=counts, symbols=tuple(data[start:start + total]))
            except InvalidHuffmanTableError as e:
                raise InvalidHuffmanTableError(f"Huffman table {index}: {e.message}", pos * 8) from None
            tables.append(table)
            pos = start + total

        payloads = []
        for plane in range(3):
            if len(data) < pos + _PAYLOAD_LENGTH.size:
                raise TruncatedStreamError(f"stream ended before plane {plane} payload", len(data) * 8)
            (length,) = _PAYLOAD_LENGTH.unpack_from(data, pos)
            pos += _PAYLOAD_LENGTH.size
            if len(data) < pos + length:
                raise TruncatedStreamError(f"plane {plane} payload truncated", len(data) * 8)
            payloads.append((pos * 8, data[pos:pos + length]))
            pos += length
        if pos != len(data):
            logger.debug(f"Ignoring {len(data) - pos} trailing bytes after the last payload.")

        return cls(header=header, classification=classification, tables=tuple(tables),
                   payloads=tuple(p for _, p in payloads),
                   payload_offsets=tuple(o for o, _ in payloads))


def _plane_tables(plane: int):
    return (DC_LUMA, AC_LUMA) if plane == 0 else (DC_CHROMA, AC_CHROMA)


def encode(planes, classification: np.ndarray, header: StreamHeader) -> CompressedImage:
    """
    Entropy-codes three stacks of retained zigzag blocks (Y, Cb, Cr).

    Args:
        planes: three int arrays (block_count, N*N) already quantized and retained.
        classification: bool (blocks_y, blocks_x); only edge blocks carry AC symbols.
        header: fields serialized ahead of the tables.
    """
    header.check()
    classification = np.asarray(classification, dtype=bool)
    if classification.shape != (header.blocks_y, header.blocks_x):
        raise ValueError(
            f"Classification {classification.shape} does not match grid "
            f"{header.blocks_y}x{header.blocks_x}"
        )
    n2 = header.block_size ** 2
    edge_flags = classification.reshape(-1).tolist()

    # Symbolize every plane, then histogram per table class
    streams = []
    histograms = [np.zeros(256, dtype=np.int64) for _ in range(4)]
    for index, blocks in enumerate(planes):
        blocks = np.asarray(blocks, dtype=np.int64)
        if blocks.shape != (header.block_count, n2):
            raise ValueError(f"Plane {index} has shape {blocks.shape}, expected {(header.block_count, n2)}")
        dc_id, ac_id = _plane_tables(index)
        dc = _dc_symbols(blocks)
        ac = []
        for block, is_edge in zip(blocks, edge_flags):
            symbols = _ac_symbols(block) if is_edge else []
            ac.append(symbols)
            for symbol, _, _ in symbols:
                histograms[ac_id][symbol] += 1
        for symbol, _, _ in dc:
            histograms[dc_id][symbol] += 1
        streams.append((dc, ac))

    tables = tuple(HuffmanTable.from_frequencies(h) for h in histograms)

    payloads = []
    for index, (dc, ac) in enumerate(streams):
        dc_id, ac_id = _plane_tables(index)
        dc_table, ac_table = tables[dc_id], tables[ac_id]
        writer = BitWriter()
        for (size, amp, _), block_symbols in zip(dc, ac):
            dc_table.write_symbol(writer, size)
            writer.write(amp, size)
            for symbol, amp_bits, amp_size in block_symbols:
                ac_table.write_symbol(writer, symbol)
                writer.write(amp_bits, amp_size)
        payloads.append(writer.getvalue())

    logger.debug(
        "Payload bytes Y/Cb/Cr: " + "/".join(str(len(p)) for p in payloads)
    )
    return CompressedImage(header=header, classification=classification.copy(),
                           tables=tables, payloads=tuple(payloads))


def _decode_plane(payload: bytes, base_offset: int, dc_table: HuffmanTable, ac_table: HuffmanTable,
                  edge_flags, n2: int) -> np.ndarray:
    reader = BitReader(payload, base_offset)
    blocks = np.zeros((len(edge_flags), n2), dtype=np.int64)
    dc = 0
    for b, is_edge in enumerate(edge_flags):
        start = reader.offset
        size = dc_table.read_symbol(reader)
        if size > MAX_DC_SIZE:
            raise InvalidHuffmanCodeError(f"DC size category {size} out of range", start)
        dc += decode_amplitude(reader.read(size), size)
        blocks[b, 0] = dc
        if not is_edge:
            continue
        k = 1
        while k < n2:
            start = reader.offset
            symbol = ac_table.read_symbol(reader)
            if symbol == EOB:
                break
            if symbol == ZRL:
                k += 16
                if k > n2:
                    raise RunPastBlockEndError("zero run passes the end of the block", start)
                continue
            run, size = symbol >> 4, symbol & 0x0F
            if size == 0:
                raise InvalidHuffmanCodeError(f"invalid AC symbol {symbol:#04x}", start)
            k += run
            if k >= n2:
                raise RunPastBlockEndError("coefficient run passes the end of the block", start)
            blocks[b, k] = decode_amplitude(reader.read(size), size)
            k += 1
    return blocks


def decode(cs: CompressedImage):
    """
    Exact inverse of encode.

    Returns:
        (planes, classification, header) with planes as three (block_count, N*N) int64 arrays.
    """
    header = cs.header
    n2 = header.block_size ** 2
    edge_flags = np.asarray(cs.classification, dtype=bool).reshape(-1).tolist()
    planes = []
    for index in range(3):
        dc_id, ac_id = _plane_tables(index)
        planes.append(_decode_plane(cs.payloads[index], cs.payload_offsets[index],
                                    cs.tables[dc_id], cs.tables[ac_id], edge_flags, n2))
    return planes, np.asarray(cs.classification, dtype=bool).copy(), header


def decode_bytes(data: bytes):
    return decode(CompressedImage.from_bytes(data))
