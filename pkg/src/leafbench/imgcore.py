"""Raster type, PNG/JPEG I/O, resizing, color decomposition and quantization.

A :class:`Raster` is an immutable 8-bit image stored as a ``(height, width,
channels)`` uint8 array.  Intermediate filtering happens on real-valued 2-D
float64 arrays (planes); :func:`quantize` brings them back to 8 bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError, InvalidDimension, IoError, WrongColorSpace

SPACES = ("srgb", "gray", "luma_chroma")

# Plane: 2-D float64 array, working precision, un-clipped.
Plane = np.ndarray

PathLike = Union[str, Path]


@dataclass(frozen=True, eq=False)
class Raster:
    samples: np.ndarray
    space: str = "srgb"

    def __post_init__(self):
        a = np.asarray(self.samples)
        if a.ndim == 2:
            a = a[:, :, None]
        if a.ndim != 3 or a.shape[2] not in (1, 3):
            raise InvalidDimension(f"expected (h, w, 1|3) samples, got shape {a.shape}")
        if a.shape[0] == 0 or a.shape[1] == 0:
            raise InvalidDimension("raster dimensions must be positive")
        if a.dtype != np.uint8:
            if np.issubdtype(a.dtype, np.floating) and not np.all(np.isfinite(a)):
                raise ValueError("samples must be finite")
            if a.min() < 0 or a.max() > 255 or not np.array_equal(a, np.round(a)):
                raise ValueError("samples must be integers in [0, 255]")
            a = a.astype(np.uint8)
        if self.space not in SPACES:
            raise ValueError(f"unknown color space {self.space!r}")
        if self.space == "gray" and a.shape[2] != 1:
            raise WrongColorSpace("gray rasters have exactly one channel")
        if self.space != "gray" and a.shape[2] != 3:
            raise WrongColorSpace(f"{self.space} rasters have three channels")
        a = np.ascontiguousarray(a)
        a.flags.writeable = False
        object.__setattr__(self, "samples", a)

    @classmethod
    def gray(cls, samples) -> "Raster":
        return cls(samples, "gray")

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def channels(self) -> int:
        return self.samples.shape[2]

    @property
    def shape(self):
        return self.samples.shape

    def plane(self, c: int = 0) -> Plane:
        """Channel ``c`` as a float64 plane."""
        return self.samples[:, :, c].astype(np.float64)

    def with_samples(self, samples: np.ndarray) -> "Raster":
        return Raster(samples, self.space)

    def __eq__(self, other):
        if not isinstance(other, Raster):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.samples, other.samples)

    def __repr__(self):
        return f"Raster({self.width}x{self.height}x{self.channels}, {self.space})"


def round_half_away(x: np.ndarray) -> np.ndarray:
    """Round to nearest integer, ties away from zero."""
    x = np.asarray(x, dtype=np.float64)
    return np.copysign(np.floor(np.abs(x) + 0.5), x)


def quantize_array(x: np.ndarray) -> np.ndarray:
    """Round (ties away from zero) and clip to uint8, any shape."""
    return np.clip(round_half_away(x), 0, 255).astype(np.uint8)


def quantize(p: Plane) -> Raster:
    """Quantize a real-valued plane to a gray raster."""
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 2 or p.size == 0:
        raise InvalidDimension("quantize expects a non-empty 2-D plane")
    return Raster(quantize_array(p), "gray")


def stack_planes(planes, space: str) -> Raster:
    """Quantize a list of planes into one raster."""
    return Raster(np.stack([quantize_array(p) for p in planes], axis=-1), space)


# --------------------------------------------------------------------------
# I/O
# --------------------------------------------------------------------------


def load_image(path: PathLike) -> Raster:
    """Decode a PNG or JPEG file.

    Color images come back as 3-channel ``srgb``, single-channel ones as
    ``gray``.  Alpha is dropped.
    """
    path = Path(path)
    if not path.is_file():
        raise IoError(f"no such file: {path}")
    try:
        with Image.open(path) as im:
            im.load()
            if im.format not in ("PNG", "JPEG"):
                raise DecodeError(f"{path}: unsupported format {im.format}")
            mode = im.mode
            if mode in ("L", "LA", "1"):
                arr = np.asarray(im.convert("L"))
                return Raster(arr, "gray")
            if mode in ("RGB", "RGBA", "P", "PA", "CMYK", "YCbCr"):
                arr = np.asarray(im.convert("RGB"))
                return Raster(arr, "srgb")
            raise DecodeError(f"{path}: unsupported pixel mode {mode}")
    except DecodeError:
        raise
    except PermissionError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise DecodeError(f"{path}: {exc}") from exc


def save_image(img: Raster, path: PathLike) -> None:
    """Write ``img`` as a PNG (lossless)."""
    path = Path(path)
    a = img.samples
    pil = Image.fromarray(a[:, :, 0] if img.channels == 1 else a)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        pil.save(path, format="PNG")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


# --------------------------------------------------------------------------
# Geometry
# --------------------------------------------------------------------------


def _bilinear_taps(n_in: int, n_out: int):
    # Half-pixel-center alignment: source coord of output center i.
    scale = n_in / n_out
    src = (np.arange(n_out) + 0.5) * scale - 0.5
    src = np.clip(src, 0.0, n_in - 1)
    i0 = np.floor(src).astype(np.intp)
    i1 = np.minimum(i0 + 1, n_in - 1)
    frac = src - i0
    return i0, i1, frac


def resize_bilinear(img: Raster, w: int, h: int) -> Raster:
    """Resize to ``w`` x ``h`` with bilinear, half-pixel-center sampling."""
    if w <= 0 or h <= 0:
        raise InvalidDimension(f"target size must be positive, got {w}x{h}")
    if (w, h) == (img.width, img.height):
        return img
    a = img.samples.astype(np.float64)
    y0, y1, fy = _bilinear_taps(img.height, h)
    x0, x1, fx = _bilinear_taps(img.width, w)
    fy = fy[:, None, None]
    fx = fx[None, :, None]
    rows = a[y0] * (1.0 - fy) + a[y1] * fy
    out = rows[:, x0] * (1.0 - fx) + rows[:, x1] * fx
    return img.with_samples(quantize_array(out))


# --------------------------------------------------------------------------
# Color
# --------------------------------------------------------------------------

# BT.601 full range (JFIF).
_RGB_TO_YCC = np.array(
    [
        [0.299, 0.587, 0.114],
        [-0.168736, -0.331264, 0.5],
        [0.5, -0.418688, -0.081312],
    ]
)


def rgb_to_ycc(rgb: np.ndarray) -> np.ndarray:
    """Real-valued luma/chroma of an ``(..., 3)`` RGB array, chroma offset 128."""
    ycc = np.asarray(rgb, dtype=np.float64) @ _RGB_TO_YCC.T
    ycc[..., 1:] += 128.0
    return ycc


def ycc_to_rgb(ycc: np.ndarray) -> np.ndarray:
    ycc = np.asarray(ycc, dtype=np.float64)
    y = ycc[..., 0]
    cb = ycc[..., 1] - 128.0
    cr = ycc[..., 2] - 128.0
    r = y + 1.402 * cr
    g = y - 0.344136 * cb - 0.714136 * cr
    b = y + 1.772 * cb
    return np.stack([r, g, b], axis=-1)


def to_luma_chroma(img: Raster) -> Raster:
    if img.space != "srgb":
        raise WrongColorSpace(f"to_luma_chroma needs srgb input, got {img.space}")
    return Raster(quantize_array(rgb_to_ycc(img.samples)), "luma_chroma")


def from_luma_chroma(img: Raster) -> Raster:
    if img.space != "luma_chroma":
        raise WrongColorSpace(f"from_luma_chroma needs luma_chroma input, got {img.space}")
    return Raster(quantize_array(ycc_to_rgb(img.samples)), "srgb")
