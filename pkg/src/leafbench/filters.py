"""Linear convolution and the five denoising filters.

Borders are extended reflect-101 (``... p2 p1 | p0 p1 p2 ...``) everywhere.
Each filter works per channel in float64 and quantizes once at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

import numpy as np

from . import _kernels
from .errors import InvalidSigma, InvalidStrength, InvalidWindow, KernelTooLarge
from .imgcore import (
    Plane,
    Raster,
    from_luma_chroma,
    quantize_array,
    to_luma_chroma,
)

FILTER_KINDS = ("mean", "gaussian", "median", "bilateral", "nlm")
# Report label for nlm; the benchmark tables call it bm3d.
FILTER_LABELS = {"mean": "mean", "gaussian": "gaussian", "median": "median",
                 "bilateral": "bilateral", "nlm": "bm3d"}
_ALIASES = {"bm3d": "nlm", "blur": "mean", "box": "mean"}


# --------------------------------------------------------------------------
# Borders and kernels
# --------------------------------------------------------------------------


def reflect101_index(i: np.ndarray, n: int) -> np.ndarray:
    """Map any integer index onto ``[0, n)`` by reflect-101 extension."""
    i = np.asarray(i)
    if n == 1:
        return np.zeros_like(i)
    period = 2 * (n - 1)
    i = np.mod(i, period)
    return np.where(i >= n, period - i, i)


def pad_reflect101(a: np.ndarray, py: int, px: Optional[int] = None) -> np.ndarray:
    """Pad the first two axes of ``a`` by reflect-101, any pad width."""
    if px is None:
        px = py
    h, w = a.shape[:2]
    rows = reflect101_index(np.arange(-py, h + py), h)
    cols = reflect101_index(np.arange(-px, w + px), w)
    return a[rows][:, cols]


def _check_odd(k: int, name: str = "kernel size"):
    if k < 1 or k % 2 != 1:
        raise InvalidWindow(f"{name} must be a positive odd integer, got {k}")


def box_kernel(k: int) -> np.ndarray:
    _check_odd(k)
    return np.full((k, k), 1.0 / (k * k))


def auto_sigma(k: int) -> float:
    """Sigma derived from the kernel size when none is given."""
    return 0.3 * ((k - 1) * 0.5 - 1) + 0.8


def gaussian_taps(k: int, sigma: Optional[float] = None) -> np.ndarray:
    """Normalized 1-D Gaussian taps for an odd ``k``."""
    _check_odd(k)
    sigma = _resolve_sigma(k, sigma)
    i = np.arange(k) - (k - 1) / 2
    g = np.exp(-(i * i) / (2.0 * sigma * sigma))
    return g / g.sum()


def gaussian_kernel(k: int, sigma: Optional[float] = None) -> np.ndarray:
    g = gaussian_taps(k, sigma)
    return np.outer(g, g)


def _resolve_sigma(k: int, sigma) -> float:
    if sigma is None or sigma == "auto":
        return auto_sigma(k)
    sigma = float(sigma)
    if not math.isfinite(sigma) or sigma <= 0:
        raise InvalidSigma(f"sigma must be positive or 'auto', got {sigma}")
    return sigma


# --------------------------------------------------------------------------
# Convolution
# --------------------------------------------------------------------------


def convolve2d(p: Plane, k: np.ndarray) -> Plane:
    """Convolve a plane with a kernel (correlation with the flipped kernel).

    Output has the input's shape; borders are reflect-101.
    """
    p = np.asarray(p, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    kh, kw = k.shape
    if kh % 2 != 1 or kw % 2 != 1:
        raise InvalidWindow(f"kernel dimensions must be odd, got {k.shape}")
    h, w = p.shape
    if kh > h or kw > w:
        raise KernelTooLarge(f"{kh}x{kw} kernel on a {h}x{w} plane")
    ry, rx = kh // 2, kw // 2
    padded = pad_reflect101(p, ry, rx)
    flipped = k[::-1, ::-1]
    out = np.zeros_like(p)
    for i in range(kh):
        for j in range(kw):
            c = flipped[i, j]
            if c != 0.0:
                out += c * padded[i:i + h, j:j + w]
    return out


def convolve_separable(p: np.ndarray, ky: np.ndarray, kx: np.ndarray) -> np.ndarray:
    """Same as ``convolve2d(p, np.outer(ky, kx))`` in two 1-D passes.

    ``p`` may carry a trailing channel axis; channels are filtered independently.
    """
    p = np.asarray(p, dtype=np.float64)
    h, w = p.shape[:2]
    ky = np.asarray(ky, dtype=np.float64)[::-1]
    kx = np.asarray(kx, dtype=np.float64)[::-1]
    if len(ky) > h or len(kx) > w:
        raise KernelTooLarge(f"{len(ky)}x{len(kx)} kernel on a {h}x{w} plane")
    ry, rx = len(ky) // 2, len(kx) // 2
    padded = pad_reflect101(p, ry, 0)
    tmp = ky[0] * padded[0:h]
    for i in range(1, len(ky)):
        tmp += ky[i] * padded[i:i + h]
    padded = pad_reflect101(tmp, 0, rx)
    out = kx[0] * padded[:, 0:w]
    for j in range(1, len(kx)):
        out += kx[j] * padded[:, j:j + w]
    return out


def _separable(img: Raster, taps: np.ndarray) -> Raster:
    return img.with_samples(quantize_array(convolve_separable(img.samples, taps, taps)))


def _check_fits(img: Raster, k: int):
    if k > img.height or k > img.width:
        raise KernelTooLarge(f"{k}x{k} window on a {img.width}x{img.height} image")


# --------------------------------------------------------------------------
# Filters
# --------------------------------------------------------------------------


def mean_filter(img: Raster, k: int = 5) -> Raster:
    _check_odd(k)
    _check_fits(img, k)
    taps = np.full(k, 1.0 / k)
    return _separable(img, taps)


def gaussian_filter(img: Raster, k: int = 5, sigma: Union[float, str, None] = None) -> Raster:
    """Separable Gaussian blur; ``sigma=None`` derives it from ``k``."""
    taps = gaussian_taps(k, sigma)
    _check_fits(img, k)
    return _separable(img, taps)


def _batcher_pairs(n: int):
    """Batcher odd-even merge sort comparators for ``n`` (a power of two) wires."""
    pairs = []

    def merge(lo, hi, r):
        step = r * 2
        if step < hi - lo:
            merge(lo, hi, step)
            merge(lo + r, hi, step)
            pairs.extend((i, i + r) for i in range(lo + r, hi - r, step))
        else:
            pairs.append((lo, lo + r))

    def sort(lo, hi):
        if hi - lo >= 1:
            mid = lo + (hi - lo) // 2
            sort(lo, mid)
            sort(mid + 1, hi)
            merge(lo, hi, 1)

    sort(0, n - 1)
    return pairs


def sorting_network(n: int):
    """Comparators sorting ``n`` wires ascending (Batcher, truncated to n)."""
    if n <= 1:
        return []
    m = 1 << (n - 1).bit_length()
    # padding wires hold +inf, so comparators touching them are no-ops
    return [(i, j) for i, j in _batcher_pairs(m) if j < n]


@lru_cache(maxsize=None)
def median_network(k: int):
    """Comparators selecting the middle of a k x k window whose columns are pre-sorted.

    Wire ``c * k + a`` carries the ``a``-th smallest value of window column
    ``c``.  Comparators whose order is already implied by earlier ones, or
    that cannot influence the middle wire, are dropped.
    """
    n = k * k
    target = n // 2
    known = np.eye(n, dtype=bool)
    for c in range(k):
        for a in range(k):
            known[c * k + a, c * k + a:c * k + k] = True
    kept = []
    for i, j in sorting_network(n):
        if known[i, j]:
            continue
        kept.append((i, j))
        li, lj = known[i].copy(), known[j].copy()
        ci, cj = known[:, i].copy(), known[:, j].copy()
        # new i = min(a, b), new j = max(a, b)
        known[i] = li | lj
        known[:, i] = ci & cj
        known[j] = li & lj
        known[:, j] = ci | cj
        known[i, i] = known[j, j] = known[i, j] = True
        known[j, i] = False
    needed = {target}
    pruned = []
    for i, j in reversed(kept):
        if i in needed or j in needed:
            pruned.append((i, j))
            needed.update((i, j))
    return tuple(reversed(pruned))


def median_filter(img: Raster, k: int = 5) -> Raster:
    """Exact k x k median per channel.

    Vertical runs of ``k`` samples are sorted first, then a pruned selection
    network finishes each window.  The result is the exact middle order
    statistic, identical to sorting every window.
    """
    _check_odd(k)
    _check_fits(img, k)
    if k == 1:
        return img
    padded = np.ascontiguousarray(pad_reflect101(img.samples, k // 2))
    out = np.empty(img.shape, dtype=np.uint8)
    column_net = np.array(sorting_network(k), dtype=np.intp).reshape(-1, 2)
    window_net = np.array(median_network(k), dtype=np.intp).reshape(-1, 2)
    _kernels.median_rows(padded, k, column_net, window_net, out)
    return img.with_samples(out)


def bilateral_filter(img: Raster, diameter: int = 9, sigma_color: float = 75.0,
                     sigma_space: float = 75.0) -> Raster:
    """Edge-preserving average over a ``diameter`` x ``diameter`` square.

    Range distance is the L1 difference summed over channels, computed on
    the unfiltered input.
    """
    _check_odd(diameter, "diameter")
    if diameter < 3:
        raise InvalidWindow("diameter must be >= 3")
    for name, s in (("sigma_color", sigma_color), ("sigma_space", sigma_space)):
        if not math.isfinite(s) or s <= 0:
            raise InvalidSigma(f"{name} must be positive, got {s}")
    _check_fits(img, diameter)
    r = diameter // 2
    yy, xx = np.mgrid[-r:r + 1, -r:r + 1]
    spatial = np.exp(-(yy * yy + xx * xx) / (2.0 * sigma_space ** 2))
    d = np.arange(255 * img.channels + 1, dtype=np.float64)
    color_lut = np.exp(-(d * d) / (2.0 * sigma_color ** 2))
    padded = pad_reflect101(img.samples, r)
    out = np.empty(img.shape)
    kernel = _kernels.bilateral3 if img.channels == 3 else _kernels.bilateral
    kernel(padded, img.height, img.width, r, spatial, color_lut, out)
    return img.with_samples(quantize_array(out))


@lru_cache(maxsize=8)
def _nlm_lut(template: int, strength: float, sigma0: float) -> np.ndarray:
    t2 = template * template
    ssd = np.arange(t2 * 255 * 255 + 1, dtype=np.float64)
    lut = np.exp(-np.maximum(ssd / t2 - 2.0 * sigma0 * sigma0, 0.0) / (strength * strength))
    lut.flags.writeable = False
    return lut


def nlm_plane(plane: np.ndarray, strength: float, template_window: int, search_window: int,
              sigma0: float = 0.0) -> Plane:
    """Non-local means on one 8-bit plane; returns the float result."""
    tr, sr = template_window // 2, search_window // 2
    plane = np.asarray(plane, dtype=np.uint8)
    h, w = plane.shape
    padded = np.ascontiguousarray(pad_reflect101(plane, sr + tr))
    out = np.empty((h, w))
    _kernels.nlm_plane(padded, h, w, tr, sr, _nlm_lut(template_window, float(strength), float(sigma0)), out)
    return out


def nlm_filter(img: Raster, h: float = 10.0, h_color: float = 10.0, template_window: int = 7,
               search_window: int = 21) -> Raster:
    """Non-local means on a luma/chroma decomposition.

    Luma is filtered with strength ``h``, both chroma planes with
    ``h_color``.  Gray input is filtered directly with ``h``.
    """
    for name, v in (("template_window", template_window), ("search_window", search_window)):
        if v < 1 or v % 2 != 1:
            raise InvalidWindow(f"{name} must be a positive odd integer, got {v}")
    if template_window > search_window:
        raise InvalidWindow("template_window must not exceed search_window")
    for name, s in (("h", h), ("h_color", h_color)):
        if not math.isfinite(s) or s <= 0:
            raise InvalidStrength(f"{name} must be positive, got {s}")
    if img.space == "gray":
        out = nlm_plane(img.samples[:, :, 0], h, template_window, search_window)
        return img.with_samples(quantize_array(out))
    ycc = to_luma_chroma(img) if img.space == "srgb" else img
    planes = [
        nlm_plane(ycc.samples[:, :, c], h if c == 0 else h_color, template_window, search_window)
        for c in range(3)
    ]
    filtered = ycc.with_samples(quantize_array(np.stack(planes, axis=-1)))
    return from_luma_chroma(filtered) if img.space == "srgb" else filtered


# --------------------------------------------------------------------------
# Dispatch
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FilterSpec:
    kind: str
    kernel_size: int = 5
    sigma: Optional[float] = None
    diameter: int = 9
    sigma_color: float = 75.0
    sigma_space: float = 75.0
    h: float = 10.0
    h_color: float = 10.0
    template_window: int = 7
    search_window: int = 21

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        if kind not in FILTER_KINDS:
            raise ValueError(f"unknown filter kind {self.kind!r}; expected one of {FILTER_KINDS}")
        object.__setattr__(self, "kind", kind)
        if self.sigma == "auto":
            object.__setattr__(self, "sigma", None)
        if kind in ("mean", "gaussian", "median"):
            if self.kernel_size < 3 or self.kernel_size % 2 != 1:
                raise InvalidWindow("kernel_size must be odd and >= 3")
            if kind == "gaussian" and self.sigma is not None and not self.sigma > 0:
                raise InvalidSigma("sigma must be positive or auto")
        elif kind == "bilateral":
            if self.diameter < 3 or self.diameter % 2 != 1:
                raise InvalidWindow("diameter must be odd and >= 3")
            if not (self.sigma_color > 0 and self.sigma_space > 0):
                raise InvalidSigma("bilateral sigmas must be positive")
        else:
            t, s = self.template_window, self.search_window
            if t % 2 != 1 or s % 2 != 1 or t < 1 or t > s:
                raise InvalidWindow("windows must be odd with template <= search")
            if not (self.h > 0 and self.h_color > 0):
                raise InvalidStrength("nlm strengths must be positive")

    @property
    def label(self) -> str:
        return FILTER_LABELS[self.kind]


def default_filters():
    """The five filters with their tuned default parameters."""
    return [FilterSpec(kind) for kind in FILTER_KINDS]


def apply_filter(img: Raster, spec: FilterSpec) -> Raster:
    if spec.kind == "mean":
        return mean_filter(img, spec.kernel_size)
    if spec.kind == "gaussian":
        return gaussian_filter(img, spec.kernel_size, spec.sigma)
    if spec.kind == "median":
        return median_filter(img, spec.kernel_size)
    if spec.kind == "bilateral":
        return bilateral_filter(img, spec.diameter, spec.sigma_color, spec.sigma_space)
    return nlm_filter(img, spec.h, spec.h_color, spec.template_window, spec.search_window)
