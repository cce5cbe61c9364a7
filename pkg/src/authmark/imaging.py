"""Grayscale rasters, PGM/PNG I/O, 8x8 block partitioning and the 2-D DCT."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

BLOCK = 8
# Guards against absurd headers before any allocation happens.
MAX_DIMENSION = 1 << 16


class ImageFormatError(ValueError):
    pass


class AlignmentError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GrayImage:
    """8-bit grayscale image stored as a (height, width) uint8 array."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2 or px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError(f"expected a non-empty 2-D array, got shape {px.shape}")
        if px.dtype != np.uint8:
            if not np.issubdtype(px.dtype, np.integer) or px.min() < 0 or px.max() > 255:
                raise ValueError("samples must be integers in [0, 255]")
            px = px.astype(np.uint8)
        px = np.ascontiguousarray(px)
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def data(self) -> bytes:
        """Row-major sample bytes."""
        return self.pixels.tobytes()

    @classmethod
    def from_bytes(cls, width: int, height: int, data: bytes) -> "GrayImage":
        if len(data) != width * height:
            raise ValueError(f"expected {width * height} samples, got {len(data)}")
        return cls(np.frombuffer(data, dtype=np.uint8).reshape(height, width))

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )

    __hash__ = None

    def __repr__(self):
        return f"GrayImage({self.width}x{self.height})"


@dataclass(frozen=True, eq=False)
class BlockGrid:
    """Row-major 8x8 blocks of an image.

    ``orig_width``/``orig_height`` record the pre-padding size so that
    ``from_blocks`` can crop padded grids back.
    """

    blocks_x: int
    blocks_y: int
    blocks: np.ndarray  # (blocks_y * blocks_x, 8, 8) float64
    orig_width: int | None = field(default=None)
    orig_height: int | None = field(default=None)

    def __post_init__(self):
        if self.blocks.shape != (self.blocks_x * self.blocks_y, BLOCK, BLOCK):
            raise ValueError(
                f"blocks shape {self.blocks.shape} does not match "
                f"{self.blocks_y}x{self.blocks_x} grid"
            )
        if not np.all(np.isfinite(self.blocks)):
            raise ValueError("block values must be finite")

    def __len__(self):
        return len(self.blocks)

    def with_blocks(self, blocks: np.ndarray) -> "BlockGrid":
        return BlockGrid(self.blocks_x, self.blocks_y, blocks, self.orig_width, self.orig_height)


# ---------------------------------------------------------------------------
# file I/O


def _read_token(buf: bytes, pos: int) -> tuple[bytes, int]:
    n = len(buf)
    while pos < n:
        c = buf[pos : pos + 1]
        if c == b"#":
            while pos < n and buf[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < n and not buf[pos : pos + 1].isspace() and buf[pos : pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise ImageFormatError("corrupt header")
    return buf[start:pos], pos


def decode_pgm(buf: bytes) -> GrayImage:
    """Decode a binary (P5) PGM with maxval 255."""
    if buf[:2] != b"P5":
        raise ImageFormatError("unsupported format: not a binary PGM (P5)")
    pos = 2
    fields = []
    for _ in range(3):
        tok, pos = _read_token(buf, pos)
        if not tok.isdigit():
            raise ImageFormatError("corrupt header")
        fields.append(int(tok))
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise ImageFormatError("corrupt header")
    if width > MAX_DIMENSION or height > MAX_DIMENSION:
        raise ImageFormatError(f"dimension overflow: {width}x{height}")
    if maxval != 255:
        raise ImageFormatError(f"unsupported format: maxval {maxval} (only 255)")
    # exactly one whitespace byte separates the header from the raster
    if pos >= len(buf) or not buf[pos : pos + 1].isspace():
        raise ImageFormatError("corrupt header")
    body = buf[pos + 1 : pos + 1 + width * height]
    if len(body) != width * height:
        raise ImageFormatError("corrupt payload")
    return GrayImage.from_bytes(width, height, body)


def encode_pgm(img: GrayImage) -> bytes:
    return b"P5\n%d %d\n255\n" % (img.width, img.height) + img.data


def load_image(path: str | os.PathLike) -> GrayImage:
    """Load a P5 PGM, or an 8-bit grayscale PNG."""
    path = Path(path)
    buf = path.read_bytes()
    if buf[:2] == b"P5":
        return decode_pgm(buf)
    if buf[:8] == b"\x89PNG\r\n\x1a\n":
        from PIL import Image

        try:
            with Image.open(path) as im:
                im.load()
                if im.mode != "L":
                    raise ImageFormatError(f"unsupported format: PNG mode {im.mode}, need 8-bit gray")
                return GrayImage(np.array(im, dtype=np.uint8))
        except ImageFormatError:
            raise
        except Exception as exc:  # Pillow raises a zoo of types on bad data
            raise ImageFormatError(f"corrupt payload: {exc}") from exc
    raise ImageFormatError("unsupported format: expected P5 PGM or PNG")


def save_image(img: GrayImage, path: str | os.PathLike) -> None:
    """Write ``img`` losslessly; PNG if the suffix says so, P5 PGM otherwise."""
    path = Path(path)
    if path.suffix.lower() == ".png":
        from PIL import Image

        Image.fromarray(img.pixels, mode="L").save(path)
    else:
        path.write_bytes(encode_pgm(img))


# ---------------------------------------------------------------------------
# blocks


def to_blocks(img: GrayImage, pad: bool = False) -> BlockGrid:
    h, w = img.height, img.width
    px = img.pixels
    if h % BLOCK or w % BLOCK:
        if not pad:
            raise AlignmentError(f"image {w}x{h} is not a multiple of {BLOCK} in both dimensions")
        px = np.pad(px, ((0, -h % BLOCK), (0, -w % BLOCK)), mode="edge")
    by, bx = px.shape[0] // BLOCK, px.shape[1] // BLOCK
    blocks = (
        px.reshape(by, BLOCK, bx, BLOCK).swapaxes(1, 2).reshape(-1, BLOCK, BLOCK).astype(np.float64)
    )
    if pad:
        return BlockGrid(bx, by, blocks, orig_width=w, orig_height=h)
    return BlockGrid(bx, by, blocks)


def round_half_away(x: np.ndarray) -> np.ndarray:
    # Snap to 1e-9 first so values a rounding error away from .5 round the same everywhere.
    x = np.round(np.asarray(x, dtype=np.float64), 9)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def to_pixels(values: np.ndarray) -> np.ndarray:
    """Round half away from zero, clamp to [0, 255], cast to uint8."""
    return np.clip(round_half_away(values), 0, 255).astype(np.uint8)


def from_blocks(grid: BlockGrid) -> GrayImage:
    by, bx = grid.blocks_y, grid.blocks_x
    px = to_pixels(grid.blocks).reshape(by, bx, BLOCK, BLOCK).swapaxes(1, 2)
    px = px.reshape(by * BLOCK, bx * BLOCK)
    if grid.orig_height is not None and grid.orig_width is not None:
        px = px[: grid.orig_height, : grid.orig_width]
    return GrayImage(px)


# ---------------------------------------------------------------------------
# DCT


def _dct_matrix(n: int = BLOCK) -> np.ndarray:
    k = np.arange(n)[:, None]
    i = np.arange(n)[None, :]
    m = np.cos(np.pi * (2 * i + 1) * k / (2 * n)) * np.sqrt(2.0 / n)
    m[0] /= np.sqrt(2.0)
    return m


DCT_MATRIX = _dct_matrix()
DCT_MATRIX.setflags(write=False)


def dct2(block: np.ndarray) -> np.ndarray:
    """Orthonormal type-II 2-D DCT of one block or a stack of blocks (..., 8, 8)."""
    return DCT_MATRIX @ np.asarray(block, dtype=np.float64) @ DCT_MATRIX.T


def idct2(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of :func:`dct2`."""
    return DCT_MATRIX.T @ np.asarray(coeffs, dtype=np.float64) @ DCT_MATRIX
