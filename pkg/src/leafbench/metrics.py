"""Full-reference image quality metrics: MSE, SSIM, PSNR, NRMSE, NMI.

All metrics promote 8-bit samples to float64 (or exact int64 sums) with no
normalization beyond what each definition states.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ImageTooSmall, ShapeMismatch, ZeroReference
from .imgcore import Raster

METRIC_NAMES = ("mse", "ssim", "psnr", "nrmse", "nmi")


@dataclass(frozen=True)
class MetricConfig:
    data_range: float = 255.0
    ssim_window: int = 7
    ssim_k1: float = 0.01
    ssim_k2: float = 0.03
    nmi_bins: int = 100

    def __post_init__(self):
        if not self.data_range > 0:
            raise ValueError("data_range must be positive")
        if self.ssim_window < 3 or self.ssim_window % 2 != 1:
            raise ValueError("ssim_window must be odd and >= 3")
        if not (self.ssim_k1 > 0 and self.ssim_k2 > 0):
            raise ValueError("ssim constants must be positive")
        if self.nmi_bins < 2:
            raise ValueError("nmi_bins must be >= 2")


@dataclass(frozen=True)
class MetricVector:
    mse: float
    ssim: float
    psnr: float
    nrmse: float
    nmi: float

    def as_tuple(self):
        return tuple(getattr(self, name) for name in METRIC_NAMES)

    def as_dict(self):
        return asdict(self)


def _pair(ref: Raster, test: Raster):
    if ref.shape != test.shape:
        raise ShapeMismatch(f"reference {ref.shape} vs test {test.shape}")
    return ref.samples, test.samples


def mse(ref: Raster, test: Raster) -> float:
    a, b = _pair(ref, test)
    d = a.astype(np.float64) - b.astype(np.float64)
    return float(np.mean(d * d))


def _psnr_from_mse(m: float, data_range: float) -> float:
    if m == 0:
        return math.inf
    return 10.0 * math.log10(data_range * data_range / m)


def psnr(ref: Raster, test: Raster, cfg: MetricConfig = MetricConfig()) -> float:
    """Peak signal-to-noise ratio in dB; ``inf`` for identical images."""
    return _psnr_from_mse(mse(ref, test), cfg.data_range)


def _window_sums(a: np.ndarray, k: int) -> np.ndarray:
    """Sums over every valid k x k window of a 2-D int64 array."""
    c = np.zeros((a.shape[0] + 1, a.shape[1] + 1), dtype=np.int64)
    c[1:, 1:] = a.cumsum(0).cumsum(1)
    return c[k:, k:] - c[:-k, k:] - c[k:, :-k] + c[:-k, :-k]


def _ssim_channel(x: np.ndarray, y: np.ndarray, cfg: MetricConfig) -> float:
    k = cfg.ssim_window
    n = k * k
    x = x.astype(np.int64)
    y = y.astype(np.int64)
    sx, sy = _window_sums(x, k), _window_sums(y, k)
    sxx, syy, sxy = _window_sums(x * x, k), _window_sums(y * y, k), _window_sums(x * y, k)
    # exact integer numerators; sample (N - 1) normalization
    denom = float(n * (n - 1))
    vx = (n * sxx - sx * sx) / denom
    vy = (n * syy - sy * sy) / denom
    vxy = (n * sxy - sx * sy) / denom
    ux, uy = sx / n, sy / n
    c1 = (cfg.ssim_k1 * cfg.data_range) ** 2
    c2 = (cfg.ssim_k2 * cfg.data_range) ** 2
    s = ((2 * ux * uy + c1) * (2 * vxy + c2)) / ((ux * ux + uy * uy + c1) * (vx + vy + c2))
    return float(s.mean())


def ssim(ref: Raster, test: Raster, cfg: MetricConfig = MetricConfig()) -> float:
    """Mean structural similarity over all fully-contained windows, averaged over channels."""
    a, b = _pair(ref, test)
    if a.shape[0] < cfg.ssim_window or a.shape[1] < cfg.ssim_window:
        raise ImageTooSmall(f"{a.shape[1]}x{a.shape[0]} image, {cfg.ssim_window}x{cfg.ssim_window} window")
    return float(np.mean([_ssim_channel(a[:, :, c], b[:, :, c], cfg) for c in range(a.shape[2])]))


def nrmse(ref: Raster, test: Raster) -> float:
    """RMSE normalized by the reference's root-mean-square intensity."""
    m = mse(ref, test)
    a = ref.samples.astype(np.float64)
    energy = float(np.mean(a * a))
    if energy == 0:
        raise ZeroReference("reference image is all zero")
    return math.sqrt(m) / math.sqrt(energy)


def _entropy(counts: np.ndarray) -> float:
    p = counts[counts > 0] / counts.sum()
    return float(-np.sum(p * np.log(p)))


def joint_histogram(a: np.ndarray, b: np.ndarray, bins: int) -> np.ndarray:
    """Joint counts over ``bins`` equal-width bins spanning [0, 255]."""
    ia = np.minimum(a.astype(np.int64).ravel() * bins // 255, bins - 1)
    ib = np.minimum(b.astype(np.int64).ravel() * bins // 255, bins - 1)
    return np.bincount(ia * bins + ib, minlength=bins * bins).reshape(bins, bins)


def nmi(ref: Raster, test: Raster, cfg: MetricConfig = MetricConfig()) -> float:
    """(H(ref) + H(test)) / H(ref, test); 2 for identical, 1 for independent images.

    When both images are constant the joint entropy is zero and the score
    is defined as 1.
    """
    a, b = _pair(ref, test)
    joint = joint_histogram(a, b, cfg.nmi_bins)
    h12 = _entropy(joint)
    if h12 == 0:
        return 1.0
    return (_entropy(joint.sum(axis=1)) + _entropy(joint.sum(axis=0))) / h12


def evaluate(ref: Raster, test: Raster, cfg: MetricConfig = MetricConfig()) -> MetricVector:
    _pair(ref, test)
    m = mse(ref, test)
    return MetricVector(
        mse=m,
        ssim=ssim(ref, test, cfg),
        psnr=_psnr_from_mse(m, cfg.data_range),
        nrmse=nrmse(ref, test),
        nmi=nmi(ref, test, cfg),
    )
