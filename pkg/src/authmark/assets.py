"""Bundled reproduction image, logo mark and test corpus."""

from importlib import resources

from .imaging import GrayImage, load_image
from .wmcore import WatermarkBits, watermark_from_image

_DATA = resources.files("authmark") / "data"


def cover_path():
    return _DATA / "cover.pgm"


def logo_path():
    return _DATA / "logo.pgm"


def cover() -> GrayImage:
    """256x256 reproduction host image."""
    return load_image(cover_path())


def logo() -> WatermarkBits:
    """32x32 binary logo mark (1024 bits)."""
    return watermark_from_image(load_image(logo_path()))


def corpus() -> dict[str, GrayImage]:
    return {
        p.name.removesuffix(".pgm"): load_image(p)
        for p in sorted((_DATA / "corpus").iterdir(), key=lambda p: p.name)
        if p.name.endswith(".pgm")
    }
