import numpy as np
import oracles
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from leafbench.clahe import (
    ClaheParams,
    clahe,
    clip_histogram,
    clip_threshold,
    equalization_lut,
    histogram_equalize,
    tile_lookup,
)
from leafbench.errors import GridTooFine
from leafbench.imgcore import Raster, to_luma_chroma


def gray(a):
    return Raster.gray(np.asarray(a, dtype=np.uint8))


def test_params_validation_and_parse():
    p = ClaheParams.parse(0.5, "5x5")
    assert p == ClaheParams(0.5, (5, 5)) and p.label == "(0.5,5)"
    for bad in (dict(clip_limit=0), dict(clip_limit=-1), dict(tile_grid=(0, 3))):
        with pytest.raises(ValueError):
            ClaheParams(**bad)
    with pytest.raises(ValueError):
        ClaheParams.parse(1.0, "5by5")


def test_clip_threshold_examples():
    assert clip_threshold(ClaheParams(2.0, (8, 8)), 32 * 32) == 8
    assert clip_threshold(ClaheParams(0.5, (5, 5)), 52 * 52) == 5
    assert clip_threshold(ClaheParams(1e-9), 1024) == 1


def test_histogram_equalize_examples():
    assert histogram_equalize(gray([[0, 1, 2, 3]])).samples[:, :, 0].tolist() == [[0, 85, 170, 255]]
    two = gray([[0, 255], [255, 0]])
    assert histogram_equalize(two) == two
    flat = gray(np.full((5, 5), 77))
    assert histogram_equalize(flat) == flat


@given(arrays(np.uint8, st.tuples(st.integers(1, 12), st.integers(1, 12))))
def test_histogram_equalize_matches_oracle(a):
    assert np.array_equal(histogram_equalize(gray(a)).samples[:, :, 0], oracles.histogram_equalize(a))


@given(arrays(np.int64, 256, elements=st.integers(0, 300)), st.integers(1, 50))
def test_clip_histogram_conserves_mass_and_caps(hist, limit):
    out = clip_histogram(hist, limit)
    assert out.sum() == hist.sum()
    excess = np.maximum(hist - limit, 0).sum()
    assert out.max() <= max(limit + excess // 256 + 1, hist.max() if excess == 0 else 0)


@given(arrays(np.int64, 256, elements=st.integers(0, 300)), st.integers(1, 40), st.integers(1, 40))
def test_raising_clip_never_lowers_a_clipped_bin(hist, a, b):
    lo, hi = sorted((a, b))
    assert np.all(np.minimum(hist, hi) >= np.minimum(hist, lo))


@given(arrays(np.uint8, (16, 16)), st.integers(1, 20))
def test_tile_lookup_monotone(tile, limit):
    lut = tile_lookup(tile, limit)
    assert np.all(np.diff(lut.astype(int)) >= 0)
    assert lut.min() >= 0 and lut.max() <= 255


def test_equalization_lut_degenerate():
    h = np.zeros(256, dtype=np.int64)
    h[40] = 9
    assert np.array_equal(equalization_lut(h), np.arange(256))


def test_single_tile_unclipped_reduces_to_histogram_equalization():
    rng = np.random.default_rng(0)
    for _ in range(20):
        h, w = rng.integers(8, 40, 2)
        a = rng.integers(0, 256, (h, w), dtype=np.uint8)
        out = clahe(gray(a), ClaheParams(1e6, (1, 1))).samples.astype(int)
        he = histogram_equalize(gray(a)).samples.astype(int)
        assert np.abs(out - he).max() <= 1


@pytest.mark.parametrize("params", [
    ClaheParams(2.0, (8, 8)), ClaheParams(2.0, (5, 5)), ClaheParams(1.0, (5, 5)),
    ClaheParams(0.5, (5, 5)), ClaheParams(3.0, (3, 2)),
])
def test_clahe_matches_step_by_step_oracle(params):
    rng = np.random.default_rng(hash(params.tile_grid) % 1000)
    for shape in ((40, 40), (33, 27), (16, 21)):
        # smooth-ish content so tiles carry real structure
        a = np.clip(rng.normal(120, 40, shape), 0, 255).astype(np.uint8)
        ours = clahe(gray(a), params).samples[:, :, 0]
        ref = oracles.clahe_gray(a, params.clip_limit, *params.tile_grid)
        assert np.array_equal(ours, ref)


def test_constant_image_values_follow_redistribution():
    # A flat tile's spike is clipped and spread over all bins, so the lookup is a
    # ramp rather than the identity; the exact levels come from the oracle above.
    flat = gray(np.full((256, 256), 100))
    assert np.unique(clahe(flat, ClaheParams(2.0, (8, 8))).samples).tolist() == [102]
    assert np.unique(clahe(flat, ClaheParams(0.5, (5, 5))).samples).tolist() == [105]
    ref = oracles.clahe_gray(np.full((256, 256), 100, np.uint8), 2.0, 8, 8)
    assert np.unique(ref).tolist() == [102]
    for v in (0, 255):
        edge = gray(np.full((64, 64), v))
        assert clahe(edge, ClaheParams(2.0, (8, 8))) == edge


def test_color_operates_on_luma_only():
    rng = np.random.default_rng(2)
    a = rng.integers(0, 256, (40, 40, 3), dtype=np.uint8)
    ycc = to_luma_chroma(Raster(a))
    out = clahe(ycc, ClaheParams(2.0, (4, 4)))
    assert np.array_equal(out.samples[:, :, 1:], ycc.samples[:, :, 1:])
    assert np.array_equal(out.samples[:, :, 0],
                          clahe(gray(ycc.samples[:, :, 0]), ClaheParams(2.0, (4, 4))).samples[:, :, 0])
    # achromatic input stays achromatic
    g = np.repeat(rng.integers(0, 256, (32, 32, 1), dtype=np.uint8), 3, axis=2)
    o = clahe(Raster(g), ClaheParams(2.0, (4, 4))).samples
    assert np.all(o.max(axis=2) == o.min(axis=2))


def test_grid_too_fine():
    with pytest.raises(GridTooFine):
        clahe(gray(np.zeros((8, 8))), ClaheParams(2.0, (8, 8)))
    with pytest.raises(GridTooFine):
        clahe(gray(np.zeros((4, 4))), ClaheParams(2.0, (5, 5)))


@given(arrays(np.uint8, st.tuples(st.integers(16, 40), st.integers(16, 40))),
       st.floats(0.1, 10), st.integers(1, 8), st.integers(1, 8))
def test_shape_range_determinism(a, clip, gx, gy):
    img = gray(a)
    p = ClaheParams(clip, (gx, gy))
    out = clahe(img, p)
    assert out.shape == img.shape
    assert clahe(img, p) == out


def test_smallest_legal_tiles():
    # 10x10 pads to 16x16 under an 8x8 grid: 2x2 tiles are allowed
    assert clahe(gray(np.zeros((10, 10))), ClaheParams(2.0, (8, 8))).shape == (10, 10, 1)
