import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from authmark.attacks import (
    BenchRow,
    bench_sr_vs_qf,
    calibrate,
    jpeg_attack,
    pillow_jpeg,
    quantize_blocks,
    scale_quant_table,
    similarity_ratio,
    write_bench_csv,
    write_bench_gnuplot,
)
from authmark.imaging import GrayImage, dct2, idct2
from authmark.wmcore import LUMINANCE_QUANT_TABLE, EmbedParams, WatermarkBits, embed, extract
from oracles import ijg_scale, naive_jpeg_block

CONFIGS = [("MMBEC", EmbedParams()), ("MBEC", EmbedParams(algorithm="MBEC"))]


# --- quality scaling ---------------------------------------------------------------


def test_scale_identity_at_50():
    assert np.array_equal(scale_quant_table(LUMINANCE_QUANT_TABLE, 50), LUMINANCE_QUANT_TABLE)


def test_scale_all_ones_at_100():
    assert (scale_quant_table(LUMINANCE_QUANT_TABLE, 100) == 1).all()


def test_scale_qf25_entry():
    assert scale_quant_table(LUMINANCE_QUANT_TABLE, 25)[3, 0] == 28


@pytest.mark.parametrize("qf", range(1, 101))
def test_scale_matches_formula(qf):
    expected = [[ijg_scale(int(q), qf) for q in row] for row in LUMINANCE_QUANT_TABLE]
    assert scale_quant_table(LUMINANCE_QUANT_TABLE, qf).tolist() == expected


@pytest.mark.parametrize("qf", [0, 101, -5, 2.5, True])
def test_qf_out_of_range(qf, cover):
    with pytest.raises(ValueError):
        scale_quant_table(LUMINANCE_QUANT_TABLE, qf)
    with pytest.raises(ValueError):
        jpeg_attack(cover, qf)


# --- JPEG simulation ----------------------------------------------------------------


def test_qf100_near_identity(cover):
    diff = np.abs(jpeg_attack(cover, 100).pixels.astype(int) - cover.pixels.astype(int))
    assert diff.max() <= 1


@pytest.mark.parametrize("qf", [5, 25, 50, 90])
def test_attack_output_valid(cover, qf):
    out = jpeg_attack(cover, qf)
    assert (out.width, out.height) == (cover.width, cover.height)
    assert out.pixels.dtype == np.uint8


def test_attack_is_deterministic(cover):
    assert jpeg_attack(cover, 30) == jpeg_attack(cover, 30)


@pytest.mark.parametrize("c", [0, 1, 37, 128, 200, 255])
@pytest.mark.parametrize("qf", [1, 5, 10, 25, 50, 75, 100])
def test_constant_image_bound(c, qf):
    # Only the DC term survives: 8c is snapped to a multiple of the DC step q,
    # so the reconstructed level moves by at most q/16 before pixel rounding.
    q = int(scale_quant_table(LUMINANCE_QUANT_TABLE, qf)[0, 0])
    out = jpeg_attack(GrayImage(np.full((16, 16), c, np.uint8)), qf).pixels
    assert (out == out[0, 0]).all()
    level = np.floor(8 * c / q + 0.5) * q / 8
    expected = min(max(int(np.floor(level + 0.5)), 0), 255)
    assert out[0, 0] == expected
    assert abs(int(out[0, 0]) - c) <= q / 16 + 0.5


def test_matches_definitional_oracle(rng):
    for qf in (10, 50, 90):
        table = scale_quant_table(LUMINANCE_QUANT_TABLE, qf)
        for _ in range(5):
            block = rng.uniform(0, 255, (8, 8))
            ours = idct2(quantize_blocks(dct2(block), table))
            assert np.abs(ours - naive_jpeg_block(block, table)).max() < 1e-9


def test_pillow_codec_agrees_roughly(cover):
    # libjpeg uses the same tables and scaling; only its integer DCT and rounding differ
    a = jpeg_attack(cover, 75).pixels.astype(int)
    b = pillow_jpeg(cover, 75).pixels.astype(int)
    assert np.abs(a - b).mean() < 1.0


# --- similarity ratio --------------------------------------------------------------


def test_sr_equal_and_complement(rng):
    a = rng.integers(0, 2, 100)
    assert similarity_ratio(a, a).sr == 1.0
    assert similarity_ratio(a, 1 - a).sr == 0.0


def test_sr_750_of_1024():
    a = np.zeros(1024, np.uint8)
    b = a.copy()
    b[750:] = 1
    res = similarity_ratio(a, b)
    assert (res.s, res.d) == (750, 274)
    assert res.sr == 750 / 1024
    assert f"{res.sr:.4f}" == "0.7324"


def test_sr_length_mismatch():
    with pytest.raises(ValueError):
        similarity_ratio([0, 1], [0, 1, 1])


def test_sr_accepts_watermark_bits():
    wm = WatermarkBits.from_array([[0, 1], [1, 1]])
    assert similarity_ratio(wm, [0, 1, 0, 1]).sr == 0.75


@settings(max_examples=100)
@given(st.integers(1, 300).flatmap(lambda n: st.tuples(
    arrays(np.uint8, n, elements=st.integers(0, 1)), arrays(np.uint8, n, elements=st.integers(0, 1)))))
def test_sr_symmetry(pair):
    a, b = pair
    r1, r2 = similarity_ratio(a, b), similarity_ratio(b, a)
    assert r1 == r2
    assert r1.s + r1.d == a.size
    assert 0.0 <= r1.sr <= 1.0
    assert r1.sr == r1.s / (r1.s + r1.d)


# --- bench --------------------------------------------------------------------------


@pytest.fixture(scope="module")
def bench_rows():
    from authmark import assets

    return bench_sr_vs_qf(assets.cover(), assets.logo(), CONFIGS, [100, 5, 50, 25, 75])


def test_bench_rows_sorted_and_bounded(bench_rows):
    assert [r.qf for r in bench_rows] == [5, 25, 50, 75, 100]
    for r in bench_rows:
        assert set(r.sr_by_algorithm) == {"MMBEC", "MBEC"}
        assert all(0 <= v <= 1 for v in r.sr_by_algorithm.values())


def test_bench_qf100_perfect(bench_rows):
    assert bench_rows[-1].sr_by_algorithm == {"MMBEC": 1.0, "MBEC": 1.0}


def test_bench_mbec_qf75_near_one(bench_rows):
    assert bench_rows[3].sr_by_algorithm["MBEC"] >= 0.98


def test_bench_parallel_matches_serial(cover, logo):
    qfs = [20, 40, 60, 80]
    assert bench_sr_vs_qf(cover, logo, CONFIGS, qfs, workers=4) == bench_sr_vs_qf(cover, logo, CONFIGS, qfs)


def test_bench_is_pipeline_composition(cover, logo):
    (row,) = bench_sr_vs_qf(cover, logo, CONFIGS[:1], [35])
    manual = similarity_ratio(extract(jpeg_attack(embed(cover, logo), 35), 1024), logo).sr
    assert row.sr_by_algorithm["MMBEC"] == manual


def test_csv_format():
    rows = [BenchRow(5, {"MMBEC": 0.779, "MBEC": 0.78712}), BenchRow(100, {"MMBEC": 1.0, "MBEC": 1.0})]
    buf = io.StringIO()
    write_bench_csv(rows, buf)
    assert buf.getvalue() == "qf,MMBEC,MBEC\n5,0.7790,0.7871\n100,1.0000,1.0000\n"
    buf = io.StringIO()
    write_bench_gnuplot(rows, buf)
    assert buf.getvalue().splitlines() == ["# qf MMBEC MBEC", "5 0.7790 0.7871", "100 1.0000 1.0000"]


def test_bench_with_pillow_codec(cover, logo):
    (row,) = bench_sr_vs_qf(cover, logo, CONFIGS[:1], [50], codec="pillow")
    assert row.sr_by_algorithm["MMBEC"] >= 0.99


def test_calibrate(cover, logo):
    best, trace = calibrate(cover, logo, qf=25, target_sr=1.0)
    assert best is not None and best <= 100
    assert trace[-1] == (best, 1.0)
    assert all(sr < 1.0 for _, sr in trace[:-1])


def test_calibrate_unreachable(cover, logo):
    best, trace = calibrate(cover, logo, qf=1, target_sr=1.0, candidates=[10.0, 20.0])
    assert best is None and len(trace) == 2


def test_mmbec_monotone_envelope(cover, logo):
    rows = bench_sr_vs_qf(cover, logo, CONFIGS[:1], range(30, 101))
    srs = [r.sr_by_algorithm["MMBEC"] for r in rows]
    # above QF 30 a higher QF never loses more than 0.02; below that the curve
    # wobbles because quantizer steps near B can push a pair either way
    for i in range(len(srs)):
        for j in range(i + 1, len(srs)):
            assert srs[j] >= srs[i] - 0.02
