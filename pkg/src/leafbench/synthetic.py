"""Procedural, seeded rice-leaf-like test images.

Each image is a smooth, softly lit background crossed by one to three
tapered green blades with a midrib, faint parallel veins and a few brown
lesions with darker rims.  Shapes are rendered at 2x and box-downsampled
for anti-aliased edges, then given a slight blur and a touch of sensor
grain, so the images look like close-up field photographs rather than
flat cartoons.
"""

from __future__ import annotations

from pathlib import Path
from typing import List

import numpy as np

from .filters import gaussian_filter
from .imgcore import Raster, quantize_array, save_image

SS = 2  # supersampling factor


def _smooth_field(rng: np.random.Generator, h: int, w: int, terms: int = 4) -> np.ndarray:
    """Sum of a few random low-frequency sinusoids, scaled to [-1, 1]."""
    yy, xx = np.mgrid[0:h, 0:w] / max(h, w)
    f = np.zeros((h, w))
    for _ in range(terms):
        fy, fx = rng.uniform(0.3, 2.0, 2) * rng.choice([-1, 1], 2)
        f += rng.uniform(0.3, 1.0) * np.sin(2 * np.pi * (fy * yy + fx * xx) + rng.uniform(0, 2 * np.pi))
    return f / (np.abs(f).max() + 1e-12)


def _blend(canvas: np.ndarray, mask: np.ndarray, color: np.ndarray):
    m = mask[:, :, None]
    canvas *= 1.0 - m
    canvas += m * color


def _blade(rng, canvas, h, w):
    """Draw one tapered blade; returns its local (u, v, half-width) frame for lesions."""
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    cy, cx = rng.uniform(0.3, 0.7) * h, rng.uniform(0.3, 0.7) * w
    theta = rng.uniform(0, np.pi)
    bend = rng.uniform(-0.6, 0.6) / max(h, w)
    dy, dx = yy - cy, xx - cx
    u = dx * np.cos(theta) + dy * np.sin(theta)  # along the blade
    v = -dx * np.sin(theta) + dy * np.cos(theta)  # across it
    v = v - bend * u * u
    length = rng.uniform(0.9, 1.6) * max(h, w)
    half = rng.uniform(0.07, 0.16) * min(h, w)
    t = np.clip(u / (length / 2), -1.0, 1.0)
    width = half * np.sqrt(np.clip(1.0 - t ** 4, 0.0, 1.0)) * (1.0 - 0.25 * t)
    inside = np.clip((width - np.abs(v)) / SS + 0.5, 0.0, 1.0) * np.clip(width / SS, 0.0, 1.0)

    base = np.array([rng.uniform(60, 110), rng.uniform(120, 175), rng.uniform(35, 75)])
    shade = 1.0 + 0.18 * _smooth_field(rng, h, w, 2)[:, :, None]
    across = (1.0 - 0.25 * (v / np.maximum(width, 1e-6)) ** 2)[:, :, None]
    color = base * shade * np.clip(across, 0.6, 1.0)
    # midrib: a lighter line along the centre
    rib = np.exp(-(v / (0.9 * SS)) ** 2 / 2)[:, :, None] * 0.35
    color = color * (1 - rib) + np.array([190.0, 215.0, 150.0]) * rib
    # faint parallel veins
    veins = 0.06 * np.cos(2 * np.pi * v / rng.uniform(5, 9) / SS)[:, :, None]
    color = color * (1.0 + veins)
    _blend(canvas, inside, color)
    return u, v, width, inside


def _lesions(rng, canvas, frame, count):
    u, v, width, inside = frame
    h, w = inside.shape
    for _ in range(count):
        candidates = np.argwhere(inside > 0.99)
        if len(candidates) == 0:
            return
        py, px = candidates[rng.integers(len(candidates))]
        yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
        a = rng.uniform(4, 18) * SS  # long axis, along the blade
        b = a * rng.uniform(0.3, 0.6)
        du, dv = u - u[py, px], v - v[py, px]
        r = np.sqrt((du / a) ** 2 + (dv / b) ** 2)
        core = np.clip((1.0 - r) * a / SS, 0.0, 1.0) * inside
        rim = np.clip(1.0 - np.abs(r - 1.0) * a / (1.5 * SS), 0.0, 1.0) * inside
        brown = np.array([rng.uniform(140, 190), rng.uniform(95, 130), rng.uniform(40, 70)])
        _blend(canvas, core, brown)
        _blend(canvas, 0.7 * rim, brown * 0.45)
        del yy, xx


def leaf_image(seed: int, size: int = 256) -> Raster:
    """One leaf-like ``size`` x ``size`` sRGB image, fully determined by ``seed``."""
    rng = np.random.default_rng(seed)
    h = w = size * SS
    bg_base = np.array([rng.uniform(120, 200), rng.uniform(110, 180), rng.uniform(80, 150)])
    canvas = bg_base * (1.0 + 0.2 * _smooth_field(rng, h, w)[:, :, None])
    for _ in range(int(rng.integers(1, 4))):
        frame = _blade(rng, canvas, h, w)
        _lesions(rng, canvas, frame, int(rng.integers(0, 5)))
    small = canvas.reshape(size, SS, size, SS, 3).mean(axis=(1, 3))
    img = Raster(quantize_array(small))
    img = gaussian_filter(img, 3, 0.6)
    grain = rng.normal(0.0, 1.0, img.shape)
    return img.with_samples(quantize_array(img.samples + grain))


def leaf_corpus(count: int, seed: int = 0, size: int = 256) -> List[Raster]:
    return [leaf_image(seed * 100003 + i, size) for i in range(count)]


def write_corpus(directory, count: int, seed: int = 0, size: int = 256) -> List[Path]:
    """Write ``count`` images as ``leaf_0000.png`` ... and return their paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, img in enumerate(leaf_corpus(count, seed, size)):
        p = directory / f"leaf_{i:04d}.png"
        save_image(img, p)
        paths.append(p)
    return paths
