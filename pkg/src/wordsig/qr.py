"""QR code encoding and decoding for payload text.

Byte mode only, versions 1-40, EC levels L/M/Q/H. Encoding picks the
smallest version that fits and selects the mask by the standard penalty
rules. Decoding accepts a QrMatrix (tolerating codeword errors up to the
Reed-Solomon budget and up to 3 flipped format bits per copy) or a clean,
axis-aligned PNG raster as produced by render_png.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from PIL import Image, UnidentifiedImageError

from . import qrtables as t
from .errors import QrCapacityError, QrDecodeError
from .gf256 import rs_decode, rs_encode

_EC_BITS = {"L": 1, "M": 0, "Q": 3, "H": 2}
_EC_FROM_BITS = {v: k for k, v in _EC_BITS.items()}

_FORMAT_GEN = 0x537  # BCH(15,5) generator
_FORMAT_MASK = 0x5412
_VERSION_GEN = 0x1F25  # Golay(18,6) generator

_PAD_BYTES = (0xEC, 0x11)


@dataclass(frozen=True, eq=False)
class QrMatrix:
    """A rendered symbol: side x side boolean grid, True = dark module."""

    version: int
    ec_level: str
    bits: np.ndarray = field(repr=False)

    @property
    def side(self) -> int:
        return 17 + 4 * self.version

    def __post_init__(self):
        if self.bits.shape != (self.side, self.side):
            raise ValueError("bit grid does not match version side length")

    def __eq__(self, other):
        return (
            isinstance(other, QrMatrix)
            and self.version == other.version
            and self.ec_level == other.ec_level
            and np.array_equal(self.bits, other.bits)
        )


# ---------------------------------------------------------------------------
# Function patterns and module bookkeeping
# ---------------------------------------------------------------------------

def _bch_remainder(value: int, generator: int, value_bits: int, rem_bits: int) -> int:
    value <<= rem_bits
    for shift in range(value_bits - 1, -1, -1):
        if value >> (shift + rem_bits) & 1:
            value ^= generator << shift
    return value


def format_bits(ec_level: str, mask: int) -> int:
    data = (_EC_BITS[ec_level] << 3) | mask
    return ((data << 10) | _bch_remainder(data, _FORMAT_GEN, 5, 10)) ^ _FORMAT_MASK


def version_bits(version: int) -> int:
    return (version << 12) | _bch_remainder(version, _VERSION_GEN, 6, 12)


def _format_positions(side: int):
    """Module coordinates of both format copies, MSB (bit 14) first."""
    copy_a = [(8, c) for c in (0, 1, 2, 3, 4, 5, 7)] + [(8, 8), (7, 8)]
    copy_a += [(r, 8) for r in (5, 4, 3, 2, 1, 0)]
    copy_b = [(side - 1 - i, 8) for i in range(7)]
    copy_b += [(8, side - 8 + i) for i in range(8)]
    return copy_a, copy_b


@lru_cache(maxsize=None)
def _layout(version: int):
    """(base, reserved) for a version.

    base holds every module whose value does not depend on the data,
    including version info; format cells are reserved but left light (they
    are written per mask). reserved marks all non-data modules.
    """
    side = 17 + 4 * version
    base = np.zeros((side, side), dtype=bool)
    reserved = np.zeros((side, side), dtype=bool)

    def finder(r0, c0):
        base[r0:r0 + 7, c0:c0 + 7] = True
        base[r0 + 1:r0 + 6, c0 + 1:c0 + 6] = False
        base[r0 + 2:r0 + 5, c0 + 2:c0 + 5] = True

    # finders with their separators (the separator ring stays light)
    finder(0, 0)
    reserved[0:8, 0:8] = True
    finder(0, side - 7)
    reserved[0:8, side - 8:] = True
    finder(side - 7, 0)
    reserved[side - 8:, 0:8] = True

    # timing patterns
    for i in range(8, side - 8):
        base[6, i] = base[i, 6] = i % 2 == 0
        reserved[6, i] = reserved[i, 6] = True

    # alignment patterns, skipping the three finder corners
    centers = t.ALIGNMENT[version]
    for r in centers:
        for c in centers:
            if (r < 9 and c < 9) or (r < 9 and c > side - 10) or (r > side - 10 and c < 9):
                continue
            base[r - 2:r + 3, c - 2:c + 3] = True
            base[r - 1:r + 2, c - 1:c + 2] = False
            base[r, c] = True
            reserved[r - 2:r + 3, c - 2:c + 3] = True

    # format areas + the always-dark module
    for pos in _format_positions(side)[0] + _format_positions(side)[1]:
        reserved[pos] = True
    base[side - 8, 8] = True
    reserved[side - 8, 8] = True

    # version info blocks for version 7 up
    if version >= 7:
        vbits = version_bits(version)
        for k in range(18):
            bit = vbits >> k & 1
            base[side - 11 + k % 3, k // 3] = bit
            base[k // 3, side - 11 + k % 3] = bit
        reserved[side - 11:side - 8, 0:6] = True
        reserved[0:6, side - 11:side - 8] = True

    return base, reserved


@lru_cache(maxsize=None)
def _data_positions(version: int) -> tuple:
    """Zigzag traversal of data modules: column pairs right to left."""
    side = 17 + 4 * version
    _, reserved = _layout(version)
    positions = []
    col = side - 1
    upward = True
    while col > 0:
        if col == 6:  # the timing column is skipped entirely
            col -= 1
        rows = range(side - 1, -1, -1) if upward else range(side)
        for r in rows:
            for c in (col, col - 1):
                if not reserved[r, c]:
                    positions.append((r, c))
        upward = not upward
        col -= 2
    return tuple(positions)


@lru_cache(maxsize=None)
def _mask_array(version: int, mask: int) -> np.ndarray:
    side = 17 + 4 * version
    r = np.arange(side).reshape(-1, 1)
    c = np.arange(side).reshape(1, -1)
    if mask == 0:
        cond = (r + c) % 2 == 0
    elif mask == 1:
        cond = r % 2 == 0
    elif mask == 2:
        cond = c % 3 == 0
    elif mask == 3:
        cond = (r + c) % 3 == 0
    elif mask == 4:
        cond = (r // 2 + c // 3) % 2 == 0
    elif mask == 5:
        cond = (r * c) % 2 + (r * c) % 3 == 0
    elif mask == 6:
        cond = ((r * c) % 2 + (r * c) % 3) % 2 == 0
    elif mask == 7:
        cond = ((r + c) % 2 + (r * c) % 3) % 2 == 0
    else:
        raise ValueError(f"mask must be 0-7, got {mask}")
    return np.broadcast_to(cond, (side, side)).copy()


def _write_format(bits: np.ndarray, ec_level: str, mask: int) -> None:
    fmt = format_bits(ec_level, mask)
    copy_a, copy_b = _format_positions(bits.shape[0])
    for i in range(15):
        bit = bool(fmt >> (14 - i) & 1)
        bits[copy_a[i]] = bit
        bits[copy_b[i]] = bit


# ---------------------------------------------------------------------------
# Mask penalty scoring
# ---------------------------------------------------------------------------

_N3_PATTERN = np.array([1, 0, 1, 1, 1, 0, 1, 0, 0, 0, 0], dtype=bool)


def _runs_penalty(m: np.ndarray) -> int:
    """Row-run scoring: each run of length L >= 5 costs 3 + (L - 5)."""
    eq = m[:, 1:] == m[:, :-1]
    win5 = eq[:, :-3] & eq[:, 1:-2] & eq[:, 2:-1] & eq[:, 3:]
    starts = win5.copy()
    starts[:, 1:] &= ~win5[:, :-1]
    return int(win5.sum()) + 2 * int(starts.sum())


def _pattern_count(m: np.ndarray, pattern: np.ndarray) -> int:
    width = len(pattern)
    if m.shape[1] < width:
        return 0
    acc = np.ones((m.shape[0], m.shape[1] - width + 1), dtype=bool)
    for k, want in enumerate(pattern):
        acc &= m[:, k:m.shape[1] - width + 1 + k] == want
    return int(acc.sum())


def _penalty(m: np.ndarray) -> int:
    n1 = _runs_penalty(m) + _runs_penalty(m.T)
    blocks = (m[:-1, :-1] == m[1:, :-1]) & (m[:-1, :-1] == m[:-1, 1:]) & (m[:-1, :-1] == m[1:, 1:])
    n2 = 3 * int(blocks.sum())
    n3 = 0
    for grid in (m, m.T):
        n3 += _pattern_count(grid, _N3_PATTERN) + _pattern_count(grid, _N3_PATTERN[::-1])
    n3 *= 40
    total = m.size
    dark = int(m.sum())
    n4 = 10 * (abs(100 * dark - 50 * total) // (5 * total))
    return n1 + n2 + n3 + n4


# ---------------------------------------------------------------------------
# Encoding
# ---------------------------------------------------------------------------

def _min_version(n_bytes: int, ec_level: str) -> int:
    for version in range(1, 41):
        if n_bytes <= t.byte_mode_capacity(version, ec_level):
            return version
    raise QrCapacityError(
        f"{n_bytes} bytes exceed QR version 40 capacity at level {ec_level}"
    )


def _build_codewords(data: bytes, version: int, ec_level: str) -> bytes:
    n_data = t.data_codewords(version, ec_level)
    count_bits = 8 if version <= 9 else 16

    bits = []
    for value, width in ((0b0100, 4), (len(data), count_bits)):
        bits.extend((value >> (width - 1 - i)) & 1 for i in range(width))
    for byte in data:
        bits.extend((byte >> (7 - i)) & 1 for i in range(8))
    bits.extend([0] * min(4, n_data * 8 - len(bits)))  # terminator
    while len(bits) % 8:
        bits.append(0)
    stream = bytearray(
        int("".join(map(str, bits[i:i + 8])), 2) for i in range(0, len(bits), 8)
    )
    for i in range(n_data - len(stream)):
        stream.append(_PAD_BYTES[i % 2])

    sizes = t.block_sizes(version, ec_level)
    ec_len = t.EC_PER_BLOCK[version][ec_level]
    blocks, ecs, offset = [], [], 0
    for size in sizes:
        block = bytes(stream[offset:offset + size])
        blocks.append(block)
        ecs.append(rs_encode(block, ec_len))
        offset += size

    out = bytearray()
    for i in range(max(sizes)):
        for block in blocks:
            if i < len(block):
                out.append(block[i])
    for i in range(ec_len):
        for ec in ecs:
            out.append(ec[i])
    return bytes(out)


def qr_encode(text: str, ec_level: str = "M") -> QrMatrix:
    """Encode text in byte mode at the smallest fitting version."""
    if ec_level not in t.LEVELS:
        raise ValueError(f"ec_level must be one of {t.LEVELS}")
    data = text.encode("utf-8")
    version = _min_version(len(data), ec_level)
    codewords = _build_codewords(data, version, ec_level)

    base, reserved = _layout(version)
    positions = _data_positions(version)
    bit_values = np.zeros(len(positions), dtype=bool)
    for i, byte in enumerate(codewords):
        for j in range(8):
            bit_values[i * 8 + j] = byte >> (7 - j) & 1

    unmasked = base.copy()
    rows = np.fromiter((p[0] for p in positions), dtype=np.intp)
    cols = np.fromiter((p[1] for p in positions), dtype=np.intp)
    unmasked[rows, cols] = bit_values

    best = None
    for mask in range(8):
        trial = unmasked ^ (_mask_array(version, mask) & ~reserved)
        _write_format(trial, ec_level, mask)
        score = _penalty(trial)
        if best is None or score < best[0]:
            best = (score, trial)
    return QrMatrix(version, ec_level, best[1])


# ---------------------------------------------------------------------------
# Decoding
# ---------------------------------------------------------------------------

def _read_format(bits: np.ndarray) -> tuple[str, int]:
    """Recover (ec_level, mask), correcting up to 3 bit errors per copy."""
    copy_a, copy_b = _format_positions(bits.shape[0])
    best = None
    for positions in (copy_a, copy_b):
        observed = 0
        for pos in positions:
            observed = observed << 1 | int(bits[pos])
        for data in range(32):
            candidate = format_bits(_EC_FROM_BITS[data >> 3], data & 7)
            distance = bin(candidate ^ observed).count("1")
            if best is None or distance < best[0]:
                best = (distance, data)
    if best[0] > 3:
        raise QrDecodeError("format information unreadable")
    return _EC_FROM_BITS[best[1] >> 3], best[1] & 7


def _deinterleave(codewords: bytes, version: int, ec_level: str) -> list[bytes]:
    """Undo interleaving; returns each block as data + parity bytes."""
    sizes = t.block_sizes(version, ec_level)
    ec_len = t.EC_PER_BLOCK[version][ec_level]
    data_parts = [bytearray() for _ in sizes]
    ec_parts = [bytearray() for _ in sizes]
    it = iter(codewords)
    for i in range(max(sizes)):
        for b, size in enumerate(sizes):
            if i < size:
                data_parts[b].append(next(it))
    for _ in range(ec_len):
        for b in range(len(sizes)):
            ec_parts[b].append(next(it))
    return [bytes(d + e) for d, e in zip(data_parts, ec_parts)]


def _parse_bitstream(data: bytes, version: int) -> bytes:
    count_bits = 8 if version <= 9 else 16
    total_bits = len(data) * 8

    pos = 0

    def take(width: int) -> int:
        nonlocal pos
        value = 0
        for _ in range(width):
            value = value << 1 | (data[pos // 8] >> (7 - pos % 8) & 1)
            pos += 1
        return value

    out = bytearray()
    while total_bits - pos >= 4:
        mode = take(4)
        if mode == 0:  # terminator
            break
        if mode != 0b0100:
            raise QrDecodeError(f"unsupported QR mode {mode:04b}")
        count = take(count_bits)
        if total_bits - pos < count * 8:
            raise QrDecodeError("character count exceeds remaining data")
        for _ in range(count):
            out.append(take(8))
    return bytes(out)


def _decode_matrix(matrix: QrMatrix) -> str:
    version = matrix.version
    bits = matrix.bits
    ec_level, mask = _read_format(bits)

    unmasked = bits ^ (_mask_array(version, mask) & ~_layout(version)[1])
    positions = _data_positions(version)
    n_codewords = t.TOTAL_CODEWORDS[version]
    codewords = bytearray(n_codewords)
    for i in range(n_codewords):
        value = 0
        for j in range(8):
            value = value << 1 | int(unmasked[positions[i * 8 + j]])
        codewords[i] = value

    data = bytearray()
    sizes = t.block_sizes(version, ec_level)
    ec_len = t.EC_PER_BLOCK[version][ec_level]
    for block, size in zip(_deinterleave(bytes(codewords), version, ec_level), sizes):
        data.extend(rs_decode(block, ec_len)[:size])

    try:
        return _parse_bitstream(bytes(data), version).decode("utf-8")
    except UnicodeDecodeError as exc:
        raise QrDecodeError("decoded payload is not valid UTF-8") from exc


def qr_decode(source: QrMatrix | bytes) -> str:
    """Decode a QrMatrix or a PNG raster back to its payload text."""
    if isinstance(source, (bytes, bytearray)):
        source = read_png(bytes(source))
    if not isinstance(source, QrMatrix):
        raise TypeError("qr_decode expects a QrMatrix or PNG bytes")
    return _decode_matrix(source)


# ---------------------------------------------------------------------------
# PNG rendering and reading
# ---------------------------------------------------------------------------

def render_png(matrix: QrMatrix, module_pixels: int, quiet_zone: int = 4) -> bytes:
    """1-bit black/white PNG with a light quiet zone on all four sides."""
    if module_pixels < 1:
        raise ValueError("module_pixels must be at least 1")
    if quiet_zone < 0:
        raise ValueError("quiet_zone must not be negative")
    side = matrix.side
    grid = np.zeros((side + 2 * quiet_zone, side + 2 * quiet_zone), dtype=bool)
    grid[quiet_zone:quiet_zone + side, quiet_zone:quiet_zone + side] = matrix.bits
    pixels = np.repeat(np.repeat(grid, module_pixels, axis=0), module_pixels, axis=1)
    image = Image.fromarray(np.where(pixels, 0, 255).astype(np.uint8), "L").convert(
        "1", dither=Image.Dither.NONE
    )
    buf = io.BytesIO()
    image.save(buf, format="PNG")
    return buf.getvalue()


def read_png(data: bytes) -> QrMatrix:
    """Recover the module grid from an axis-aligned, undistorted raster."""
    try:
        image = Image.open(io.BytesIO(data))
        image.load()
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise QrDecodeError(f"unreadable image: {exc}") from exc
    dark = np.asarray(image.convert("L")) < 128

    dark_rows = np.flatnonzero(dark.any(axis=1))
    dark_cols = np.flatnonzero(dark.any(axis=0))
    if dark_rows.size == 0:
        raise QrDecodeError("image contains no dark modules")
    r0, r1 = int(dark_rows[0]), int(dark_rows[-1])
    c0, c1 = int(dark_cols[0]), int(dark_cols[-1])
    height, width = r1 - r0 + 1, c1 - c0 + 1
    if height != width:
        raise QrDecodeError("symbol extent is not square")

    # the top-left finder ring is 7 modules wide, giving the module size
    run = 0
    while c0 + run <= c1 and dark[r0, c0 + run]:
        run += 1
    if run % 7 or run == 0:
        raise QrDecodeError("no finder pattern at the top-left corner")
    module_px = run // 7
    if width % module_px:
        raise QrDecodeError("symbol width is not a whole number of modules")
    side = width // module_px
    if (side - 17) % 4 or not 1 <= (side - 17) // 4 <= 40:
        raise QrDecodeError(f"{side} modules per side is not a QR version")
    version = (side - 17) // 4

    centers = np.arange(side) * module_px + module_px // 2
    bits = dark[np.ix_(r0 + centers, c0 + centers)]

    finder = np.ones((7, 7), dtype=bool)
    finder[1:6, 1:6] = False
    finder[2:5, 2:5] = True
    for corner in (bits[:7, :7], bits[:7, -7:], bits[-7:, :7]):
        if not np.array_equal(corner, finder):
            raise QrDecodeError("finder patterns missing or damaged")

    ec_level, _ = _read_format(bits)
    return QrMatrix(version, ec_level, bits)
