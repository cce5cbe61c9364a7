"""JPEG-quantization attack, the similarity ratio, and the SR-vs-QF sweep."""

from __future__ import annotations

import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

from . import defaults
from .imaging import GrayImage, dct2, from_blocks, idct2, round_half_away, to_blocks
from .wmcore import LUMINANCE_QUANT_TABLE, EmbedParams, WatermarkBits, embed, extract


def check_qf(qf: int) -> int:
    if isinstance(qf, bool) or int(qf) != qf or not 1 <= qf <= 100:
        raise ValueError(f"quality factor must be an integer in [1, 100], got {qf}")
    return int(qf)


def scale_quant_table(base: np.ndarray, qf: int) -> np.ndarray:
    """IJG quality scaling, done in exact integer arithmetic."""
    qf = check_qf(qf)
    base = np.asarray(base, dtype=np.int64)
    if qf < 50:
        # floor((Q * 5000/qf + 50) / 100) without going through floats
        scaled = (base * 5000 + 50 * qf) // (100 * qf)
    else:
        scaled = (base * (200 - 2 * qf) + 50) // 100
    return np.clip(scaled, 1, 255)


def quantize_blocks(coeffs: np.ndarray, table: np.ndarray) -> np.ndarray:
    """Quantize/dequantize DCT blocks against ``table``."""
    return round_half_away(coeffs / table) * table


def jpeg_attack(img: GrayImage, qf: int, base: np.ndarray = LUMINANCE_QUANT_TABLE) -> GrayImage:
    """Simulated baseline-JPEG lossy stage at quality ``qf``."""
    table = scale_quant_table(base, qf)
    grid = to_blocks(img)
    out = idct2(quantize_blocks(dct2(grid.blocks), table))
    return from_blocks(grid.with_blocks(out))


def pillow_jpeg(img: GrayImage, qf: int) -> GrayImage:
    """Round-trip through Pillow's libjpeg encoder, for cross-checking the simulator."""
    from PIL import Image

    buf = io.BytesIO()
    Image.fromarray(img.pixels, mode="L").save(buf, format="JPEG", quality=check_qf(qf), subsampling=0)
    buf.seek(0)
    with Image.open(buf) as im:
        return GrayImage(np.array(im.convert("L"), dtype=np.uint8))


CODECS = {"sim": jpeg_attack, "pillow": pillow_jpeg}


@dataclass(frozen=True)
class SimilarityResult:
    s: int
    d: int

    @property
    def sr(self) -> float:
        total = self.s + self.d
        return self.s / total if total else 1.0


def _as_bits(x) -> np.ndarray:
    if isinstance(x, WatermarkBits):
        return x.bits
    return np.asarray(x, dtype=np.uint8).reshape(-1)


def similarity_ratio(a, b) -> SimilarityResult:
    """Matching/differing bit counts between two equal-length sequences."""
    a, b = _as_bits(a), _as_bits(b)
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    s = int(np.count_nonzero(a == b))
    return SimilarityResult(s, a.size - s)


@dataclass(frozen=True)
class BenchRow:
    qf: int
    sr_by_algorithm: dict[str, float]


def bench_sr_vs_qf(
    img: GrayImage,
    wm: WatermarkBits,
    params_by_algorithm: Sequence[tuple[str, EmbedParams]],
    qfs: Iterable[int] = defaults.BENCH_QFS,
    codec: str = "sim",
    workers: int = 1,
) -> list[BenchRow]:
    """Embed once per configuration, attack at every QF, report SR against ``wm``."""
    attack = CODECS[codec]
    qfs = sorted({check_qf(q) for q in qfs})
    marked = {tag: embed(img, wm, params) for tag, params in params_by_algorithm}
    cells = [(tag, params, qf) for tag, params in params_by_algorithm for qf in qfs]

    def run(cell):
        tag, params, qf = cell
        got = extract(attack(marked[tag], qf), len(wm), params)
        return similarity_ratio(got, wm).sr

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            srs = list(pool.map(run, cells))
    else:
        srs = [run(c) for c in cells]

    table = {(tag, qf): sr for (tag, _, qf), sr in zip(cells, srs)}
    return [BenchRow(qf, {tag: table[tag, qf] for tag, _ in params_by_algorithm}) for qf in qfs]


def write_bench_csv(rows: Sequence[BenchRow], out: TextIO) -> None:
    tags = list(rows[0].sr_by_algorithm) if rows else []
    out.write(",".join(["qf", *tags]) + "\n")
    for row in rows:
        out.write(",".join([str(row.qf), *(f"{row.sr_by_algorithm[t]:.4f}" for t in tags)]) + "\n")


def write_bench_gnuplot(rows: Sequence[BenchRow], out: TextIO) -> None:
    """Whitespace-separated columns, plottable with ``plot 'f' using 1:2 with lines``."""
    tags = list(rows[0].sr_by_algorithm) if rows else []
    out.write("# " + " ".join(["qf", *tags]) + "\n")
    for row in rows:
        out.write(" ".join([str(row.qf), *(f"{row.sr_by_algorithm[t]:.4f}" for t in tags)]) + "\n")


def calibrate(
    img: GrayImage,
    wm: WatermarkBits,
    qf: int = 25,
    target_sr: float = 1.0,
    params: EmbedParams | None = None,
    candidates: Iterable[float] = defaults.CALIBRATION_BS,
    codec: str = "sim",
) -> tuple[float | None, list[tuple[float, float]]]:
    """Smallest strength B reaching ``target_sr`` after a QF attack.

    Returns ``(best_b or None, [(b, sr), ...])`` over the candidates tried.
    """
    params = params or EmbedParams()
    attack = CODECS[codec]
    check_qf(qf)
    trace = []
    for b in sorted(candidates):
        p = EmbedParams(b, params.algorithm, params.pair_index, params.repetition)
        sr = similarity_ratio(extract(attack(embed(img, wm, p), qf), len(wm), p), wm).sr
        trace.append((b, sr))
        if sr >= target_sr:
            return b, trace
    return None, trace
