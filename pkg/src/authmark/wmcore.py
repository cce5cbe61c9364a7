"""Mid-band coefficient exchange watermarking (MMBEC and the MBEC baseline).

Each 8x8 DCT block carries one bit, written as the ordering of a coefficient
pair: ``C1 >= C2`` reads as 0, ``C1 < C2`` as 1.  Embedding swaps the pair when
the ordering disagrees with the bit, then MMBEC pushes the two values at least
``B`` apart so that quantization is unlikely to reorder them.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import defaults
from .imaging import GrayImage, dct2, from_blocks, idct2, load_image, to_blocks, to_pixels

LUMINANCE_QUANT_TABLE = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.int64,
)
LUMINANCE_QUANT_TABLE.setflags(write=False)


class CapacityError(ValueError):
    pass


class Algorithm(str, enum.Enum):
    MMBEC = "MMBEC"
    MBEC = "MBEC"


class CoefficientPosition(NamedTuple):
    """1-based (row, col) into an 8x8 coefficient block."""

    row: int
    col: int

    @property
    def index(self) -> tuple[int, int]:
        return self.row - 1, self.col - 1


@dataclass(frozen=True)
class CoefficientPair:
    first: CoefficientPosition
    second: CoefficientPosition
    quant_factor: int


_PAIR_SPECS = (
    ((4, 1), (2, 3), 14),
    ((3, 3), (1, 4), 16),
    ((5, 2), (4, 3), 22),
    ((3, 4), (1, 5), 24),
    ((3, 5), (1, 6), 40),
)


def standard_pair_set() -> tuple[CoefficientPair, ...]:
    """The five mid-band pairs whose two positions share a quantizer step."""
    pairs = tuple(
        CoefficientPair(CoefficientPosition(*a), CoefficientPosition(*b), q) for a, b, q in _PAIR_SPECS
    )
    for p in pairs:
        for pos in (p.first, p.second):
            if not (1 <= pos.row <= 8 and 1 <= pos.col <= 8):
                raise AssertionError(f"{pos} outside the block")
            if LUMINANCE_QUANT_TABLE[pos.index] != p.quant_factor:
                raise AssertionError(f"quant table disagrees with pair {p}")
    return pairs


@dataclass(frozen=True, eq=False)
class WatermarkBits:
    """Flattened n x m binary watermark."""

    bits: np.ndarray
    n: int
    m: int

    def __post_init__(self):
        b = np.asarray(self.bits).reshape(-1)
        if b.size != self.n * self.m:
            raise ValueError(f"{b.size} bits cannot form a {self.n}x{self.m} watermark")
        if b.size and not np.isin(b, (0, 1)).all():
            raise ValueError("watermark bits must be 0 or 1")
        b = b.astype(np.uint8)
        b.setflags(write=False)
        object.__setattr__(self, "bits", b)

    @classmethod
    def from_sequence(cls, bits) -> "WatermarkBits":
        b = np.asarray(bits, dtype=np.uint8).reshape(-1)
        return cls(b, 1, b.size)

    @classmethod
    def from_array(cls, arr) -> "WatermarkBits":
        a = np.asarray(arr)
        if a.ndim != 2:
            raise ValueError("expected a 2-D watermark")
        return cls(a.reshape(-1), a.shape[0], a.shape[1])

    def as_array(self) -> np.ndarray:
        return self.bits.reshape(self.n, self.m)

    def __len__(self):
        return self.bits.size

    def __eq__(self, other):
        if not isinstance(other, WatermarkBits):
            return NotImplemented
        return (self.n, self.m) == (other.n, other.m) and bool(np.array_equal(self.bits, other.bits))

    __hash__ = None


@dataclass(frozen=True)
class EmbedParams:
    """Embedding configuration.

    ``pair_index`` selects one pair (1..5) for ablation; ``None`` writes the
    same bit into every pair and decodes by majority.  ``repetition`` fills
    the blocks left over after the last bit by cycling the watermark again.
    """

    strength_b: float = defaults.STRENGTH_B
    algorithm: Algorithm = Algorithm(defaults.ALGORITHM)
    pair_index: int | None = None
    repetition: bool = True

    def __post_init__(self):
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        if not np.isfinite(self.strength_b) or self.strength_b < 0:
            raise ValueError(f"strength_b must be a finite value >= 0, got {self.strength_b}")
        if self.pair_index is not None and not 1 <= self.pair_index <= 5:
            raise ValueError(f"pair index must be in 1..5, got {self.pair_index}")

    @classmethod
    def parse_pairs(cls, text: str) -> int | None:
        """``"all"`` -> None, ``"3"`` or ``"single:3"`` -> 3."""
        text = text.strip().lower()
        if text in ("all", "all_pairs_majority"):
            return None
        idx = int(text.removeprefix("single:"))
        if not 1 <= idx <= 5:
            raise ValueError(f"pair index must be in 1..5, got {idx}")
        return idx

    @property
    def pair_strategy(self) -> str:
        if self.algorithm is Algorithm.MBEC:
            return "single(1)"
        return "all_pairs_majority" if self.pair_index is None else f"single({self.pair_index})"

    def active_pairs(self) -> tuple[CoefficientPair, ...]:
        pairs = standard_pair_set()
        if self.algorithm is Algorithm.MBEC:
            return pairs[:1]
        if self.pair_index is None:
            return pairs
        return (pairs[self.pair_index - 1],)

    def effective_strength(self) -> float:
        if self.algorithm is Algorithm.MBEC:
            return defaults.MBEC_EXCHANGE_MARGIN
        return float(self.strength_b)


MBEC_PARAMS = EmbedParams(algorithm=Algorithm.MBEC)


# ---------------------------------------------------------------------------
# per-block primitives (work on a single block or a stack of blocks)


def embed_bit(block: np.ndarray, bit, pair: CoefficientPair, strength_b: float) -> np.ndarray:
    """Write ``bit`` into ``pair`` of a DCT block; returns a new array.

    Accepts one (8, 8) block with a scalar bit, or (k, 8, 8) with k bits.
    """
    out = np.array(block, dtype=np.float64, copy=True)
    bit = np.asarray(bit)
    (r1, c1), (r2, c2) = pair.first.index, pair.second.index
    a = out[..., r1, c1].copy()
    b = out[..., r2, c2].copy()

    one = bit == 1
    swap = np.where(one, a >= b, a < b)
    a, b = np.where(swap, b, a), np.where(swap, a, b)

    half = strength_b / 2.0
    # bit 0 wants C1 - C2 >= B, bit 1 wants C2 - C1 >= B
    gap = np.where(one, b - a, a - b)
    push = gap < strength_b
    sign = np.where(one, -1.0, 1.0)
    a = np.where(push, a + sign * half, a)
    b = np.where(push, b - sign * half, b)

    out[..., r1, c1] = a
    out[..., r2, c2] = b
    return out


def extract_bit(block: np.ndarray, pair: CoefficientPair):
    """0 if C1 >= C2 else 1; vectorized over leading axes."""
    (r1, c1), (r2, c2) = pair.first.index, pair.second.index
    block = np.asarray(block)
    res = (block[..., r1, c1] < block[..., r2, c2]).astype(np.uint8)
    return int(res) if res.ndim == 0 else res


def _embed_blocks(coeffs, bits, pairs, strength):
    for pair in pairs:
        coeffs = embed_bit(coeffs, bits, pair, strength)
    return coeffs


def _decode_blocks(coeffs, pairs) -> np.ndarray:
    votes = sum(extract_bit(coeffs, p).astype(np.int64) for p in pairs)
    return (2 * votes > len(pairs)).astype(np.uint8)


# ---------------------------------------------------------------------------
# image level


def capacity(img: GrayImage, params: EmbedParams | None = None) -> int:
    """Addressable bits: one per 8x8 block."""
    to_blocks(img)  # alignment check
    return (img.width // 8) * (img.height // 8)


def _block_bits(nbits: int, nblocks: int, repetition: bool) -> np.ndarray:
    """Watermark index carried by each block, -1 for blocks left untouched."""
    idx = np.arange(nblocks)
    if nbits == 0:
        return np.full(nblocks, -1)
    if repetition:
        return idx % nbits
    return np.where(idx < nbits, idx, -1)


def embed(img: GrayImage, wm: WatermarkBits, params: EmbedParams | None = None) -> GrayImage:
    params = params or EmbedParams()
    grid = to_blocks(img)
    cap = len(grid)
    if len(wm) > cap:
        raise CapacityError(f"capacity {cap} < {len(wm)}")
    pairs = params.active_pairs()
    strength = params.effective_strength()

    layout = _block_bits(len(wm), cap, params.repetition)
    carried = layout >= 0
    if not carried.any():
        return from_blocks(grid)
    bits = wm.bits[layout[carried]]

    coeffs = dct2(grid.blocks[carried])
    marked = to_pixels(idct2(_embed_blocks(coeffs, bits, pairs, strength))).astype(np.float64)

    # Rounding and clamping can reorder a pair in saturated blocks; re-embed those
    # from their rounded state until every carried block reads back correctly.
    for _ in range(defaults.CORRECTION_PASSES):
        current = dct2(marked)
        bad = _decode_blocks(current, pairs) != bits
        if not bad.any():
            break
        marked[bad] = to_pixels(idct2(_embed_blocks(current[bad], bits[bad], pairs, strength)))

    blocks = grid.blocks.copy()
    blocks[carried] = marked
    return from_blocks(grid.with_blocks(blocks))


def extract(
    img: GrayImage,
    nbits: int,
    params: EmbedParams | None = None,
    shape: tuple[int, int] | None = None,
) -> WatermarkBits:
    """Blind extraction of ``nbits`` bits; copies are combined by majority, ties read 0."""
    params = params or EmbedParams()
    grid = to_blocks(img)
    cap = len(grid)
    if nbits > cap:
        raise CapacityError(f"capacity {cap} < {nbits}")
    if nbits < 0:
        raise ValueError("nbits must be non-negative")
    n, m = shape if shape is not None else (1, nbits)
    if nbits == 0:
        return WatermarkBits(np.zeros(0, np.uint8), n, m)

    block_bits = _decode_blocks(dct2(grid.blocks), params.active_pairs())
    layout = _block_bits(nbits, cap, params.repetition)
    used = layout >= 0
    ones = np.bincount(layout[used], weights=block_bits[used], minlength=nbits)
    copies = np.bincount(layout[used], minlength=nbits)
    return WatermarkBits((2 * ones > copies).astype(np.uint8), n, m)


def embed_mbec(img: GrayImage, wm: WatermarkBits, params: EmbedParams | None = None) -> GrayImage:
    params = params or EmbedParams()
    return embed(img, wm, EmbedParams(params.strength_b, Algorithm.MBEC, None, params.repetition))


def extract_mbec(
    img: GrayImage, nbits: int, params: EmbedParams | None = None, shape=None
) -> WatermarkBits:
    params = params or EmbedParams()
    mbec = EmbedParams(params.strength_b, Algorithm.MBEC, None, params.repetition)
    return extract(img, nbits, mbec, shape)


# ---------------------------------------------------------------------------
# watermark files

_BITS_HEADER = struct.Struct(">II")


def encode_bits(wm: WatermarkBits) -> bytes:
    """8-byte big-endian (n, m) header followed by MSB-first packed bits."""
    return _BITS_HEADER.pack(wm.n, wm.m) + np.packbits(wm.bits).tobytes()


def decode_bits(buf: bytes) -> WatermarkBits:
    if len(buf) < _BITS_HEADER.size:
        raise ValueError("watermark file too short for its header")
    n, m = _BITS_HEADER.unpack_from(buf)
    total = n * m
    body = np.frombuffer(buf, dtype=np.uint8, offset=_BITS_HEADER.size)
    if body.size != (total + 7) // 8:
        raise ValueError(f"watermark file holds {body.size} bytes, {n}x{m} needs {(total + 7) // 8}")
    return WatermarkBits(np.unpackbits(body)[:total], n, m)


def watermark_from_image(img: GrayImage) -> WatermarkBits:
    """Logo-style mark: samples >= 128 become 1."""
    return WatermarkBits.from_array((img.pixels >= 128).astype(np.uint8))


def load_watermark(path) -> WatermarkBits:
    """Read a raw bit file, or threshold a grayscale image."""
    path = Path(path)
    head = path.read_bytes()[:8]
    if head[:2] == b"P5" or head == b"\x89PNG\r\n\x1a\n":
        return watermark_from_image(load_image(path))
    return decode_bits(path.read_bytes())


def save_watermark(wm: WatermarkBits, path) -> None:
    Path(path).write_bytes(encode_bits(wm))
