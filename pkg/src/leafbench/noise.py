"""Seeded noise injectors: gaussian, salt-and-pepper, speckle, uniform.

Gaussian and speckle variances are on the normalized [0, 1] intensity scale,
so ``variance=0.01`` means a standard deviation of 25.5 levels.  All noise is
added in float64 and quantized once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .imgcore import Raster, quantize_array
from .rng import Stream, derive_stream

NOISE_KINDS = ("gaussian", "salt_pepper", "speckle", "uniform")


@dataclass(frozen=True)
class NoiseSpec:
    kind: str
    mean: float = 0.0
    variance: float = 0.01
    amount: float = 0.05
    lo: float = -20.0
    hi: float = 20.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}; expected one of {NOISE_KINDS}")
        if self.variance < 0:
            raise ValueError("variance must be >= 0")
        if not 0.0 <= self.amount <= 1.0:
            raise ValueError("amount must lie in [0, 1]")
        if self.lo > self.hi:
            raise ValueError("lo must not exceed hi")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def kind_index(self) -> int:
        return NOISE_KINDS.index(self.kind)


def default_noises(seed: int = 0):
    """The four noise models with their default strengths."""
    return [NoiseSpec(kind, seed=seed) for kind in NOISE_KINDS]


def add_gaussian(img: Raster, mean: float, variance: float, stream: Stream) -> Raster:
    if variance < 0:
        raise ValueError("variance must be >= 0")
    a = img.samples.astype(np.float64)
    z = stream.normal(a.size).reshape(a.shape)
    noisy = a + 255.0 * (mean + np.sqrt(variance) * z)
    return img.with_samples(quantize_array(noisy))


def add_salt_pepper(img: Raster, amount: float, stream: Stream) -> Raster:
    """Corrupt whole pixels with probability ``amount``; half become 0, half 255.

    Two uniforms are drawn per pixel, interleaved: one for selection, one
    for polarity.
    """
    if not 0.0 <= amount <= 1.0:
        raise ValueError("amount must lie in [0, 1]")
    h, w, _ = img.shape
    u = stream.random(2 * h * w).reshape(h, w, 2)
    hit = u[:, :, 0] < amount
    salt = u[:, :, 1] < 0.5
    out = img.samples.copy()
    out[hit & salt] = 255
    out[hit & ~salt] = 0
    return img.with_samples(out)


def add_speckle(img: Raster, variance: float, stream: Stream) -> Raster:
    if variance < 0:
        raise ValueError("variance must be >= 0")
    a = img.samples.astype(np.float64)
    z = stream.normal(a.size).reshape(a.shape)
    return img.with_samples(quantize_array(a + a * np.sqrt(variance) * z))


def add_uniform(img: Raster, lo: float, hi: float, stream: Stream) -> Raster:
    if lo > hi:
        raise ValueError("lo must not exceed hi")
    a = img.samples.astype(np.float64)
    u = stream.uniform(lo, hi, a.size).reshape(a.shape)
    return img.with_samples(quantize_array(a + u))


def noise_stream(seed: int, image_index: int, kind: str) -> Stream:
    """Stream for one (image, noise kind): the per-image stream jumped once per kind index.

    Keeping kinds on disjoint jump-separated substreams means the noise for
    one kind never depends on which other kinds are configured.
    """
    return derive_stream(seed, image_index).substream(NOISE_KINDS.index(kind))


def inject(img: Raster, spec: NoiseSpec, image_index: int = 0, stream: Stream | None = None) -> Raster:
    """Apply ``spec`` to ``img`` using the stream for ``(spec.seed, image_index, spec.kind)``."""
    if stream is None:
        stream = noise_stream(spec.seed, image_index, spec.kind)
    if spec.kind == "gaussian":
        return add_gaussian(img, spec.mean, spec.variance, stream)
    if spec.kind == "salt_pepper":
        return add_salt_pepper(img, spec.amount, stream)
    if spec.kind == "speckle":
        return add_speckle(img, spec.variance, stream)
    return add_uniform(img, spec.lo, spec.hi, stream)
