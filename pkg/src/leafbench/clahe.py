"""Contrast limited adaptive histogram equalization.

Color images are equalized on the luma plane only; chroma passes through.
The image is padded (reflect-101, bottom/right) to a multiple of the tile
grid, each tile gets a clipped-histogram lookup table, and every pixel is a
bilinear blend of the lookups of the (up to) four nearest tile centers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import GridTooFine
from .filters import reflect101_index
from .imgcore import Raster, from_luma_chroma, quantize_array, round_half_away, to_luma_chroma

BINS = 256


@dataclass(frozen=True)
class ClaheParams:
    clip_limit: float = 2.0
    tile_grid: Tuple[int, int] = (8, 8)  # (gx, gy)

    def __post_init__(self):
        if not (math.isfinite(self.clip_limit) and self.clip_limit > 0):
            raise ValueError(f"clip_limit must be positive, got {self.clip_limit}")
        gx, gy = self.tile_grid
        if int(gx) != gx or int(gy) != gy or gx < 1 or gy < 1:
            raise ValueError(f"tile grid must be positive integers, got {self.tile_grid}")
        object.__setattr__(self, "tile_grid", (int(gx), int(gy)))

    @classmethod
    def parse(cls, clip: float, grid: str) -> "ClaheParams":
        """Build from a clip value and a ``"GXxGY"`` grid string such as ``"5x5"``."""
        try:
            gx, gy = (int(v) for v in grid.lower().split("x"))
        except ValueError:
            raise ValueError(f"grid must look like 8x8, got {grid!r}") from None
        return cls(float(clip), (gx, gy))

    @property
    def label(self) -> str:
        return f"({self.clip_limit:.1f},{self.tile_grid[0]})"


def equalization_lut(hist: np.ndarray) -> np.ndarray:
    """Histogram-equalization lookup for a 256-bin histogram.

    Maps v to round((cdf(v) - cdf_min) / (N - cdf_min) * 255), where cdf_min
    is the cdf at the lowest occupied bin.  A single occupied bin gives the
    identity.
    """
    hist = np.asarray(hist, dtype=np.int64)
    cdf = np.cumsum(hist)
    n = int(cdf[-1])
    occupied = np.flatnonzero(hist)
    if n == 0 or len(occupied) == 0:
        return np.arange(BINS, dtype=np.uint8)
    cdf_min = int(cdf[occupied[0]])
    if cdf_min == n:
        return np.arange(BINS, dtype=np.uint8)
    return quantize_array((cdf - cdf_min) / (n - cdf_min) * 255.0)


def histogram_equalize(img: Raster) -> Raster:
    if img.channels != 1:
        raise ValueError("histogram_equalize expects a single-channel raster")
    v = img.samples[:, :, 0]
    lut = equalization_lut(np.bincount(v.ravel(), minlength=BINS))
    return img.with_samples(lut[v])


def clip_threshold(params: ClaheParams, tile_area: int) -> int:
    """Absolute per-bin cap: max(1, round(clip_limit * tile_area / 256))."""
    if tile_area <= 0:
        raise ValueError("tile_area must be positive")
    return max(1, int(round_half_away(params.clip_limit * tile_area / BINS)))


def clip_histogram(hist: np.ndarray, limit: int) -> np.ndarray:
    """Cap every bin at ``limit`` and spread the excess over all bins.

    The excess is shared evenly in one pass; the remainder adds one count
    per bin starting from bin 0.
    """
    hist = np.asarray(hist, dtype=np.int64)
    excess = int(np.maximum(hist - limit, 0).sum())
    out = np.minimum(hist, limit)
    batch, residual = divmod(excess, BINS)
    out += batch
    out[:residual] += 1
    return out


def tile_lookup(tile: np.ndarray, limit: int) -> np.ndarray:
    hist = np.bincount(np.asarray(tile, dtype=np.uint8).ravel(), minlength=BINS)
    return equalization_lut(clip_histogram(hist, limit))


def _interp_taps(n: int, tile: int, grid: int):
    # fractional tile-center coordinate of each pixel center
    f = (np.arange(n) + 0.5) / tile - 0.5
    t0 = np.floor(f).astype(np.intp)
    frac = f - t0
    return np.clip(t0, 0, grid - 1), np.clip(t0 + 1, 0, grid - 1), frac


def clahe_plane(v: np.ndarray, params: ClaheParams) -> np.ndarray:
    """CLAHE on a 2-D uint8 array; returns the real-valued blended result."""
    h, w = v.shape
    gx, gy = params.tile_grid
    if h < gy or w < gx:
        raise GridTooFine(f"{gx}x{gy} grid on a {w}x{h} image")
    ph, pw = h + (-h) % gy, w + (-w) % gx
    th, tw = ph // gy, pw // gx
    if th < 2 or tw < 2:
        raise GridTooFine(f"tiles of {tw}x{th} pixels; need at least 2x2")
    padded = v[reflect101_index(np.arange(ph), h)][:, reflect101_index(np.arange(pw), w)]
    limit = clip_threshold(params, th * tw)
    luts = np.empty((gy, gx, BINS), dtype=np.float64)
    for ty in range(gy):
        for tx in range(gx):
            luts[ty, tx] = tile_lookup(padded[ty * th:(ty + 1) * th, tx * tw:(tx + 1) * tw], limit)
    y0, y1, fy = _interp_taps(h, th, gy)
    x0, x1, fx = _interp_taps(w, tw, gx)
    fy = fy[:, None]
    fx = fx[None, :]
    Y0, Y1 = y0[:, None], y1[:, None]
    X0, X1 = x0[None, :], x1[None, :]
    top = (1.0 - fx) * luts[Y0, X0, v] + fx * luts[Y0, X1, v]
    bottom = (1.0 - fx) * luts[Y1, X0, v] + fx * luts[Y1, X1, v]
    return (1.0 - fy) * top + fy * bottom


def clahe(img: Raster, params: ClaheParams) -> Raster:
    if img.space == "gray":
        return img.with_samples(quantize_array(clahe_plane(img.samples[:, :, 0], params)))
    ycc = to_luma_chroma(img) if img.space == "srgb" else img
    a = ycc.samples.copy()
    a[:, :, 0] = quantize_array(clahe_plane(a[:, :, 0], params))
    out = ycc.with_samples(a)
    return from_luma_chroma(out) if img.space == "srgb" else out
