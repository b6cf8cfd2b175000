import math

import numpy as np
import oracles
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from leafbench.errors import ImageTooSmall, ShapeMismatch, ZeroReference
from leafbench.imgcore import Raster
from leafbench.metrics import MetricConfig, evaluate, mse, nmi, nrmse, psnr, ssim
from leafbench.noise import NoiseSpec, inject


def const(v, h=16, w=16, c=3):
    return Raster(np.full((h, w, c), v, dtype=np.uint8)) if c == 3 else Raster.gray(np.full((h, w), v, np.uint8))


@st.composite
def pairs(draw, min_side=7, max_side=20):
    h = draw(st.integers(min_side, max_side))
    w = draw(st.integers(min_side, max_side))
    c = draw(st.sampled_from([1, 3]))
    a = draw(arrays(np.uint8, (h, w, c)))
    b = draw(arrays(np.uint8, (h, w, c)))
    space = "gray" if c == 1 else "srgb"
    return Raster(a, space), Raster(b, space)


def test_hand_examples():
    a, b = const(100), const(110)
    assert mse(a, b) == 100.0
    assert psnr(a, b) == pytest.approx(28.13, abs=0.01)
    assert ssim(a, b) == pytest.approx(0.99548, abs=1e-4)
    assert nrmse(a, b) == pytest.approx(0.1, abs=1e-12)
    # two delta histograms: the joint entropy is zero, so the score is defined as 1
    assert nmi(a, b) == 1.0
    z = Raster.gray(np.zeros((2, 2), np.uint8))
    t = Raster.gray(np.array([[2, 4], [6, 8]], np.uint8))
    assert mse(z, t) == 30.0
    assert 10 * math.log10(255 ** 2 / 67.3) == pytest.approx(29.85, abs=0.01)


def test_identity_vector():
    x = Raster(np.random.default_rng(0).integers(0, 256, (32, 32, 3), dtype=np.uint8))
    v = evaluate(x, x)
    assert (v.mse, v.psnr, v.nrmse) == (0.0, math.inf, 0.0)
    assert abs(v.ssim - 1) < 1e-9 and abs(v.nmi - 2) < 1e-9


def test_evaluate_equals_standalone_operations():
    rng = np.random.default_rng(1)
    a = Raster(rng.integers(0, 256, (20, 24, 3), dtype=np.uint8))
    b = Raster(rng.integers(0, 256, (20, 24, 3), dtype=np.uint8))
    v = evaluate(a, b)
    assert v.as_tuple() == (mse(a, b), ssim(a, b), psnr(a, b), nrmse(a, b), nmi(a, b))
    assert evaluate(const(100), const(110)).as_dict() == pytest.approx(
        dict(mse=100.0, ssim=0.995476, psnr=28.1308, nrmse=0.1, nmi=1.0), abs=1e-4)


@given(pairs())
def test_metrics_match_definitional_oracles(p):
    a, b = p
    assert abs(ssim(a, b) - oracles.ssim(a.samples, b.samples)) < 1e-7
    assert abs(nmi(a, b) - oracles.nmi(a.samples, b.samples)) < 1e-7
    if a.samples.any():
        assert abs(nrmse(a, b) - oracles.nrmse(a.samples, b.samples)) < 1e-7
    d = a.samples.astype(float) - b.samples.astype(float)
    assert abs(mse(a, b) - (d * d).sum() / d.size) < 1e-9


@given(pairs())
def test_symmetry_and_bounds(p):
    a, b = p
    assert mse(a, b) == mse(b, a) and psnr(a, b) == psnr(b, a)
    assert nmi(a, b) == pytest.approx(nmi(b, a), abs=1e-12)
    assert ssim(a, b) == pytest.approx(ssim(b, a), abs=1e-12)
    assert -1 - 1e-12 <= ssim(a, b) <= 1 + 1e-12
    assert 1 - 1e-12 <= nmi(a, b) <= 2 + 1e-12
    if a.samples.any():
        n = nrmse(a, b)
        assert n >= 0
        ref = a.samples.astype(float)
        assert abs(n * n * np.mean(ref * ref) - mse(a, b)) < 1e-9 * max(1.0, mse(a, b))


def test_nrmse_is_reference_normalized():
    a, b = const(100), const(200)
    assert nrmse(a, b) == pytest.approx(1.0) and nrmse(b, a) == pytest.approx(0.5)


def test_psnr_decreases_with_mse():
    ref = const(128)
    prev = math.inf
    for d in (1, 2, 5, 20, 60):
        cur = psnr(ref, const(128 + d))
        assert cur < prev
        prev = cur


def test_psnr_monotone_in_noise_level():
    rng = np.random.default_rng(4)
    clean = Raster(np.clip(rng.normal(128, 20, (64, 64, 3)), 0, 255).astype(np.uint8))
    means = []
    for sigma in (5, 10, 25):
        var = (sigma / 255) ** 2
        vals = [psnr(clean, inject(clean, NoiseSpec("gaussian", variance=var, seed=s))) for s in range(5)]
        means.append(np.mean(vals))
    assert means[0] >= means[1] >= means[2]


def test_nmi_independent_images_near_one():
    rng = np.random.default_rng(7)
    a = Raster(rng.integers(0, 256, (256, 256, 3), dtype=np.uint8))
    b = Raster(rng.integers(0, 256, (256, 256, 3), dtype=np.uint8))
    assert abs(nmi(a, b) - 1.0) <= 0.05


def test_errors():
    with pytest.raises(ShapeMismatch):
        evaluate(const(1, 8, 8), const(1, 8, 9))
    with pytest.raises(ShapeMismatch):
        mse(const(1, 8, 8), const(1, 8, 8, c=1))
    with pytest.raises(ImageTooSmall):
        ssim(const(1, 6, 20), const(1, 6, 20))
    with pytest.raises(ZeroReference):
        nrmse(const(0), const(3))
    with pytest.raises(ValueError):
        MetricConfig(ssim_window=4)
