"""Noise, denoising, CLAHE and quality-metric toolkit for leaf-image benchmarks."""

from .clahe import ClaheParams, clahe, histogram_equalize
from .errors import LeafbenchError
from .filters import FilterSpec, apply_filter
from .imgcore import Raster, load_image, resize_bilinear, save_image
from .metrics import MetricConfig, MetricVector, evaluate
from .noise import NoiseSpec, inject
from .pipeline import EXPERIMENTS, GridSpec, run_cell, run_grid

__version__ = "0.1.0"

__all__ = [
    "ClaheParams", "clahe", "histogram_equalize", "LeafbenchError", "FilterSpec", "apply_filter",
    "Raster", "load_image", "resize_bilinear", "save_image", "MetricConfig", "MetricVector",
    "evaluate", "NoiseSpec", "inject", "EXPERIMENTS", "GridSpec", "run_cell", "run_grid",
]
