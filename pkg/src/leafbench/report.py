"""CSV and Markdown serialization of aggregate rows and timing records."""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Iterable, List, Sequence

from .errors import IncompleteBlock, IoError
from .filters import FILTER_LABELS, _ALIASES
from .metrics import METRIC_NAMES
from .pipeline import EXPERIMENT_IDS, AggregateRow, TimingRecord, cell_key, experiment

HEADER = ("noise", "filter", "experiment") + METRIC_NAMES + ("n_images", "n_excluded_psnr")
NOISE_TITLES = {"gaussian": "Gaussian", "salt_pepper": "Salt-and-Pepper",
                "speckle": "Speckle", "uniform": "Random"}
METRIC_TITLES = {"mse": "MSE", "ssim": "SSIM", "psnr": "PSNR", "nrmse": "NRMSE", "nmi": "NMI"}


def fmt2(v: float) -> str:
    """Two-decimal display; infinities print as ``inf``."""
    return "inf" if math.isinf(v) else f"{v:.2f}"


def fmt_full(v: float) -> str:
    """Shortest text that parses back to exactly ``v``."""
    return repr(float(v))


def _sorted(rows: Iterable[AggregateRow]) -> List[AggregateRow]:
    rows = sorted(rows, key=lambda r: r.key)
    if not rows:
        raise ValueError("no rows to write")
    return rows


def _write(path, lines: Sequence[Sequence[str]]):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(lines)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _csv_lines(rows, fmt):
    yield HEADER
    for r in _sorted(rows):
        yield ((r.noise, FILTER_LABELS.get(r.filter, r.filter), r.experiment)
               + tuple(fmt(getattr(r, m)) for m in METRIC_NAMES)
               + (str(r.n_images), str(r.n_excluded_psnr)))


def emit_csv(rows: Iterable[AggregateRow], path, full_path=None) -> None:
    """Write the two-decimal CSV and, unless ``full_path`` is False, its full-precision companion.

    The companion defaults to ``<stem>_full.csv`` next to ``path``.
    """
    rows = _sorted(rows)
    _write(path, list(_csv_lines(rows, fmt2)))
    if full_path is not False:
        if full_path is None:
            p = Path(path)
            full_path = p.with_name(p.stem + "_full" + p.suffix)
        _write(full_path, list(_csv_lines(rows, fmt_full)))


def emit_full_csv(rows: Iterable[AggregateRow], path) -> None:
    _write(path, list(_csv_lines(rows, fmt_full)))


def read_csv(path) -> List[AggregateRow]:
    """Parse either CSV flavour back into rows (filter labels map back to kinds)."""
    path = Path(path)
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = tuple(next(reader, ()))
            if header != HEADER:
                raise ValueError(f"{path}: unexpected header {header}")
            out = []
            for line in reader:
                if not line:
                    continue
                if len(line) != len(HEADER):
                    raise ValueError(f"{path}: malformed line {line}")
                noise, filt, exp = line[:3]
                metrics = {m: float(v) for m, v in zip(METRIC_NAMES, line[3:8])}
                out.append(AggregateRow(noise, _ALIASES.get(filt, filt), exp, n_images=int(line[8]),
                                        n_excluded_psnr=int(line[9]), **metrics))
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    return out


def markdown_tables(rows: Iterable[AggregateRow], experiments: Sequence[str] = EXPERIMENT_IDS) -> str:
    """One table per (noise, filter): metric rows by experiment columns."""
    rows = _sorted(rows)
    exps = [experiment(e) for e in experiments]
    blocks = {}
    for r in rows:
        blocks.setdefault((r.noise, r.filter), {})[r.experiment] = r
    parts = []
    for (noise, filt) in sorted(blocks, key=lambda b: cell_key(b[0], b[1], "")):
        cells = blocks[(noise, filt)]
        missing = [e.id for e in exps if e.id not in cells]
        if missing:
            raise IncompleteBlock(f"{noise}/{filt}: missing {', '.join(missing)}")
        title = (f"Performance of {FILTER_LABELS.get(filt, filt)} filter denoising images "
                 f"with {NOISE_TITLES.get(noise, noise)} Noise")
        lines = [f"### {title}", "",
                 "| Metric | " + " | ".join(e.label for e in exps) + " |",
                 "|---|" + "---:|" * len(exps)]
        for m in METRIC_NAMES:
            vals = [fmt2(getattr(cells[e.id], m)) for e in exps]
            lines.append(f"| {METRIC_TITLES[m]} | " + " | ".join(vals) + " |")
        parts.append("\n".join(lines))
    return "\n\n".join(parts) + "\n"


def emit_markdown_tables(rows: Iterable[AggregateRow], path,
                         experiments: Sequence[str] = EXPERIMENT_IDS) -> None:
    text = markdown_tables(rows, experiments)
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


TIMING_HEADER = ("filter", "image_count", "elapsed_min", "elapsed_max", "noise", "checksum")


def emit_timing_csv(records: Iterable[TimingRecord], path) -> None:
    lines = [TIMING_HEADER]
    for t in records:
        lines.append((FILTER_LABELS.get(t.filter, t.filter), str(t.image_count), fmt_full(t.elapsed_min),
                      fmt_full(t.elapsed_max), t.noise or "", str(t.checksum)))
    _write(path, lines)
