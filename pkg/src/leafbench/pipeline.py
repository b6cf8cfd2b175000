"""Experiment grid: noise x filter x {denoise, CLAHE-denoise, denoise-CLAHE}.

Every image is resized to 256x256, corrupted once per noise kind, pushed
through each experiment's stage list, and scored against the clean resized
original.  Cell aggregates are means of per-image metrics.
"""

from __future__ import annotations

import logging
import math
import os
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .clahe import ClaheParams, clahe
from .errors import EmptyImageList, LeafbenchError, StageError
from .filters import FILTER_KINDS, FilterSpec, apply_filter
from .imgcore import Raster, load_image, resize_bilinear
from .metrics import METRIC_NAMES, MetricConfig, MetricVector, evaluate
from .noise import NOISE_KINDS, NoiseSpec, inject

log = logging.getLogger(__name__)

IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg")
ORDERS = ("none", "clahe_then_denoise", "denoise_then_clahe")


@dataclass(frozen=True)
class ExperimentId:
    id: str
    clahe: Optional[ClaheParams]
    order: str

    def __post_init__(self):
        if self.order not in ORDERS:
            raise ValueError(f"unknown order {self.order!r}")
        if (self.order == "none") != (self.clahe is None):
            raise ValueError("CLAHE parameters are required exactly when an order is set")

    @property
    def label(self) -> str:
        if self.order == "none":
            return "Denoise"
        prefix = "CD" if self.order == "clahe_then_denoise" else "DC"
        return f"{prefix} {self.clahe.label}"


_CLAHE_SETTINGS = [
    ClaheParams(2.0, (8, 8)),
    ClaheParams(2.0, (5, 5)),
    ClaheParams(1.0, (5, 5)),
    ClaheParams(0.5, (5, 5)),
]

EXPERIMENTS: Dict[str, ExperimentId] = {"E01": ExperimentId("E01", None, "none")}
for _i, _p in enumerate(_CLAHE_SETTINGS):
    EXPERIMENTS[f"E{_i + 2:02d}"] = ExperimentId(f"E{_i + 2:02d}", _p, "clahe_then_denoise")
    EXPERIMENTS[f"E{_i + 6:02d}"] = ExperimentId(f"E{_i + 6:02d}", _p, "denoise_then_clahe")
EXPERIMENTS = dict(sorted(EXPERIMENTS.items()))
EXPERIMENT_IDS = tuple(EXPERIMENTS)


def experiment(eid: Union[str, ExperimentId]) -> ExperimentId:
    if isinstance(eid, ExperimentId):
        return eid
    try:
        return EXPERIMENTS[eid.upper()]
    except KeyError:
        raise ValueError(f"unknown experiment {eid!r}; expected one of {EXPERIMENT_IDS}") from None


@dataclass(frozen=True)
class Stage:
    name: str  # "noise" | "clahe" | "filter"
    clahe: Optional[ClaheParams] = None

    def __repr__(self):
        return f"clahe{self.clahe.label}" if self.name == "clahe" else self.name


def plan_experiment(eid: Union[str, ExperimentId]) -> List[Stage]:
    exp = experiment(eid)
    if exp.order == "none":
        return [Stage("noise"), Stage("filter")]
    if exp.order == "clahe_then_denoise":
        return [Stage("noise"), Stage("clahe", exp.clahe), Stage("filter")]
    return [Stage("noise"), Stage("filter"), Stage("clahe", exp.clahe)]


def _execute(clean: Raster, noise: NoiseSpec, filt: FilterSpec, plan: Sequence[Stage],
             image_index: int, cache: Optional[dict] = None) -> Raster:
    """Run ``plan`` on ``clean``; results of every stage prefix are memoized in ``cache``."""
    img = clean
    key: Tuple = ()
    for stage in plan:
        if stage.name == "noise":
            key += (("noise", noise),)
        elif stage.name == "filter":
            key += (("filter", filt),)
        else:
            key += (("clahe", stage.clahe),)
        if cache is not None and key in cache:
            img = cache[key]
            continue
        try:
            if stage.name == "noise":
                img = inject(img, noise, image_index)
            elif stage.name == "filter":
                img = apply_filter(img, filt)
            else:
                img = clahe(img, stage.clahe)
        except Exception as exc:
            raise StageError(repr(stage), exc) from exc
        if cache is not None:
            cache[key] = img
    return img


def run_cell(clean: Raster, noise: NoiseSpec, filt: FilterSpec, exp: Union[str, ExperimentId],
             image_index: int = 0, metric_config: MetricConfig = MetricConfig()):
    """Run one experiment cell; returns ``(enhanced, metrics vs clean)``."""
    out = _execute(clean, noise, filt, plan_experiment(exp), image_index)
    return out, evaluate(clean, out, metric_config)


# --------------------------------------------------------------------------
# Grid
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RunRecord:
    image_id: int
    noise: str
    filter: str
    experiment: str
    metrics: MetricVector


@dataclass(frozen=True)
class AggregateRow:
    noise: str
    filter: str
    experiment: str
    mse: float
    ssim: float
    psnr: float
    nrmse: float
    nmi: float
    n_images: int
    n_excluded_psnr: int = 0

    @property
    def key(self):
        return cell_key(self.noise, self.filter, self.experiment)


def cell_key(noise: str, filt: str, exp: str):
    """Canonical sort key: noise, filter and experiment in their declared order."""
    return (
        NOISE_KINDS.index(noise) if noise in NOISE_KINDS else len(NOISE_KINDS), noise,
        FILTER_KINDS.index(filt) if filt in FILTER_KINDS else len(FILTER_KINDS), filt,
        exp,
    )


@dataclass
class GridResult:
    records: List[RunRecord]
    aggregates: List[AggregateRow]
    failures: List[Tuple[int, str, str]] = field(default_factory=list)


@dataclass
class GridSpec:
    """What to run; ``RunConfig`` in the config module builds one of these."""

    noises: Sequence[NoiseSpec] = field(default_factory=lambda: [NoiseSpec(k) for k in NOISE_KINDS])
    filters: Sequence[FilterSpec] = field(default_factory=lambda: [FilterSpec(k) for k in FILTER_KINDS])
    experiments: Sequence[str] = EXPERIMENT_IDS
    master_seed: int = 0
    metric_config: MetricConfig = MetricConfig()
    image_size: Tuple[int, int] = (256, 256)
    threads: int = 1


def discover_images(corpus_dir: Union[str, Path]) -> List[Path]:
    """PNG/JPEG files under ``corpus_dir``, recursively, in lexicographic path order."""
    root = Path(corpus_dir)
    found = [p for p in root.rglob("*") if p.is_file() and p.suffix.lower() in IMAGE_EXTENSIONS]
    return sorted(found, key=lambda p: p.relative_to(root).as_posix())


def prepare(item: Union[Raster, str, Path], size: Tuple[int, int] = (256, 256)) -> Raster:
    img = item if isinstance(item, Raster) else load_image(item)
    return resize_bilinear(img, size[0], size[1])


def _run_image(index: int, item, spec: GridSpec) -> List[RunRecord]:
    clean = prepare(item, spec.image_size)
    exps = [experiment(e) for e in spec.experiments]
    records = []
    for noise in spec.noises:
        noise = replace(noise, seed=spec.master_seed)
        cache: dict = {}
        for filt in spec.filters:
            for exp in exps:
                out = _execute(clean, noise, filt, plan_experiment(exp), index, cache)
                metrics = evaluate(clean, out, spec.metric_config)
                records.append(RunRecord(index, noise.kind, filt.kind, exp.id, metrics))
    return records


def aggregate(records: Sequence[RunRecord]) -> List[AggregateRow]:
    """Per-cell means of per-image metrics; infinite PSNR values are left out and counted."""
    cells: Dict[tuple, List[RunRecord]] = {}
    for r in records:
        cells.setdefault((r.noise, r.filter, r.experiment), []).append(r)
    rows = []
    for (noise, filt, exp), rs in cells.items():
        rs = sorted(rs, key=lambda r: r.image_id)
        means = {}
        for name in METRIC_NAMES:
            vals = [getattr(r.metrics, name) for r in rs]
            if name == "psnr":
                finite = [v for v in vals if math.isfinite(v)]
                excluded = len(vals) - len(finite)
                vals = finite
            # fsum is exactly rounded, so means do not depend on corpus order
            means[name] = math.fsum(vals) / len(vals) if vals else math.inf
        rows.append(AggregateRow(noise, filt, exp, n_images=len(rs), n_excluded_psnr=excluded, **means))
    return sorted(rows, key=lambda r: r.key)


def run_grid(corpus: Sequence[Union[Raster, str, Path]], spec: GridSpec = GridSpec()) -> GridResult:
    """Evaluate every (noise, filter, experiment) cell on every corpus image.

    Images that fail (unreadable file, stage error) are logged, recorded in
    ``failures`` and skipped.
    """
    if len(corpus) == 0:
        raise EmptyImageList("corpus is empty")
    threads = max(1, int(spec.threads or 1))

    def work(index):
        item = corpus[index]
        t0 = time.perf_counter()
        try:
            recs = _run_image(index, item, spec)
        except (LeafbenchError, OSError, ValueError) as exc:
            log.warning("image %d (%s) failed: %s", index, item, exc)
            return index, None, f"{type(exc).__name__}: {exc}"
        log.info("image %d done in %.2fs", index, time.perf_counter() - t0)
        return index, recs, None

    if threads == 1:
        results = [work(i) for i in range(len(corpus))]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, range(len(corpus))))

    records, failures = [], []
    for index, recs, err in results:
        if recs is None:
            failures.append((index, str(corpus[index]), err))
        else:
            records.extend(recs)
    if not records:
        raise EmptyImageList("no corpus image could be processed")
    records.sort(key=lambda r: cell_key(r.noise, r.filter, r.experiment) + (r.image_id,))
    return GridResult(records, aggregate(records), failures)


# --------------------------------------------------------------------------
# Timing
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TimingRecord:
    filter: str
    image_count: int
    elapsed_min: float
    elapsed_max: float
    noise: Optional[str] = None
    checksum: int = 0


def benchmark_filter(spec: FilterSpec, images: Sequence[Raster], repetitions: int = 3,
                     noise: Optional[str] = None) -> TimingRecord:
    """Wall-clock time to filter every image, repeated; min and max are kept.

    One untimed warm-up call compiles any JIT kernels first.  Outputs are
    reduced to a CRC so the work cannot be skipped, then dropped.
    """
    if len(images) == 0:
        raise EmptyImageList("nothing to benchmark")
    if repetitions < 3:
        raise ValueError("repetitions must be >= 3")
    apply_filter(images[0], spec)
    times = []
    checksum = 0
    for _ in range(repetitions):
        crc = 0
        t0 = time.perf_counter()
        for img in images:
            crc = zlib.crc32(apply_filter(img, spec).samples, crc)
        times.append(time.perf_counter() - t0)
        checksum = crc
    return TimingRecord(spec.kind, len(images), min(times), max(times), noise, checksum)


def default_threads() -> int:
    return os.cpu_count() or 1
