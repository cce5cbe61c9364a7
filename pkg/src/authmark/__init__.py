"""Blind DCT mid-band watermarking with hash-based authorship verification."""

from .attacks import bench_sr_vs_qf, calibrate, jpeg_attack, scale_quant_table, similarity_ratio
from .imaging import GrayImage, dct2, from_blocks, idct2, load_image, save_image, to_blocks
from .protocol import build_payload, embed_authorship, hash_image, hash_keyword, resolve_dispute, verify
from .wmcore import (
    Algorithm,
    EmbedParams,
    WatermarkBits,
    capacity,
    embed,
    embed_bit,
    embed_mbec,
    extract,
    extract_bit,
    extract_mbec,
    standard_pair_set,
)

__version__ = "0.1.0"
