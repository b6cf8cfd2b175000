"""``leafbench`` command line.

Exit status: 0 on success, 1 on usage or configuration errors, 2 when a
command fails at run time (unreadable image, failing stage, ...).
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import List, Optional

from . import report
from .clahe import ClaheParams, clahe
from .config import load_config
from .errors import ConfigError, LeafbenchError
from .filters import FILTER_KINDS, FilterSpec, apply_filter
from .imgcore import load_image, save_image
from .metrics import MetricConfig, evaluate
from .noise import NOISE_KINDS, NoiseSpec, inject
from .pipeline import (
    EXPERIMENT_IDS,
    benchmark_filter,
    default_threads,
    discover_images,
    prepare,
    run_grid,
)

log = logging.getLogger("leafbench")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _grid(text: str) -> str:
    try:
        ClaheParams.parse(1.0, text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text


def _fmt_metric(v: float) -> str:
    if v == 0:
        return "0"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(float(v))


def _io_pairs(src: Path, dst: Path):
    """(input, output) pairs: a single file, or every image under a directory."""
    if src.is_dir():
        return [(p, dst / p.relative_to(src).with_suffix(".png")) for p in discover_images(src)]
    if not src.exists():
        raise UsageError(f"input {src} does not exist")
    return [(src, dst)]


def _map_images(args, fn):
    pairs = _io_pairs(Path(args.input), Path(args.output))
    if not pairs:
        raise UsageError(f"no PNG/JPEG images under {args.input}")
    for index, (src, dst) in enumerate(pairs):
        img = load_image(src)
        if args.size:
            img = prepare(img, (args.size, args.size))
        dst.parent.mkdir(parents=True, exist_ok=True)
        save_image(fn(img, index), dst)
    return 0


def _spec(cls, *a, **kw):
    """Build a parameter object, reporting invalid values as usage errors."""
    try:
        return cls(*a, **kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _noise_spec(args) -> NoiseSpec:
    return _spec(NoiseSpec, args.kind, mean=args.mean, variance=args.variance, amount=args.amount,
                 lo=args.lo, hi=args.hi, seed=args.seed)


def _filter_spec(args) -> FilterSpec:
    try:
        sigma = None if args.sigma in (None, "auto") else float(args.sigma)
    except ValueError:
        raise UsageError(f"--sigma must be a number or 'auto', got {args.sigma!r}") from None
    return _spec(FilterSpec, args.kind, kernel_size=args.kernel_size, sigma=sigma,
                 diameter=args.diameter, sigma_color=args.sigma_color,
                 sigma_space=args.sigma_space, h=args.h, h_color=args.h_color,
                 template_window=args.template_window, search_window=args.search_window)


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------


def cmd_noise(args):
    spec = _noise_spec(args)
    return _map_images(args, lambda img, i: inject(img, spec, i))


def cmd_filter(args):
    spec = _filter_spec(args)
    return _map_images(args, lambda img, i: apply_filter(img, spec))


def cmd_clahe(args):
    params = _spec(ClaheParams.parse, args.clip, args.grid)
    return _map_images(args, lambda img, i: clahe(img, params))


def cmd_metrics(args):
    vec = evaluate(load_image(args.ref), load_image(args.test), MetricConfig())
    if args.header:
        print("mse,ssim,psnr,nrmse,nmi")
    print(",".join(_fmt_metric(v) for v in vec.as_tuple()))
    return 0


def cmd_run(args):
    cfg = load_config(args.config)
    corpus = discover_images(cfg.corpus_dir)
    if not corpus:
        raise ConfigError(f"corpus_dir: no PNG/JPEG images under {cfg.corpus_dir}")
    threads = args.threads or cfg.threads or default_threads()
    log.info("running %d images, %d threads", len(corpus), threads)
    result = run_grid(corpus, cfg.grid_spec(threads))
    out = Path(cfg.output_dir)
    report.emit_csv(result.aggregates, out / "results.csv", out / "results_full.csv")
    report.emit_markdown_tables(result.aggregates, out / "tables.md", cfg.experiments)
    for index, path, err in result.failures:
        print(f"skipped image {index} ({path}): {err}", file=sys.stderr)
    print(f"{len(result.aggregates)} cells, {len(corpus) - len(result.failures)} images -> {out}")
    return 0


def cmd_bench(args):
    if args.config:
        cfg = load_config(args.config)
        corpus_dir, seed, size = cfg.corpus_dir, cfg.master_seed, cfg.image_size
        count, reps, noise = cfg.timing.image_count, cfg.timing.repetitions, cfg.timing.noise
        filters = list(cfg.filters)
    else:
        if not args.corpus:
            raise UsageError("bench needs --config or --corpus")
        corpus_dir, seed, size = Path(args.corpus), args.seed, 256
        count, reps, noise = 500, 3, args.noise
        filters = [_spec(FilterSpec, k) for k in (args.filters or FILTER_KINDS)]
    count = args.count or count
    reps = args.repetitions or reps
    if count < 1 or reps < 3:
        raise UsageError("need --count >= 1 and --repetitions >= 3")
    paths = discover_images(corpus_dir)
    if not paths:
        raise ConfigError(f"corpus_dir: no PNG/JPEG images under {corpus_dir}")
    base = [prepare(p, (size, size)) for p in paths]
    # smaller corpora are cycled to reach the requested image count
    images = []
    for i in range(count):
        img = base[i % len(base)]
        if noise and noise != "none":
            img = inject(img, NoiseSpec(noise, seed=seed), i)
        images.append(img)
    records = []
    for spec in filters:
        rec = benchmark_filter(spec, images, reps, noise)
        records.append(rec)
        print(f"{spec.label:10s} {rec.image_count} images  min {rec.elapsed_min:.3f}s  max {rec.elapsed_max:.3f}s")
    if args.out:
        report.emit_timing_csv(records, args.out)
    return 0


def cmd_report(args):
    rows = report.read_csv(args.csv)
    exps = [e.strip() for e in args.experiments.split(",")] if args.experiments else EXPERIMENT_IDS
    if args.output:
        report.emit_markdown_tables(rows, args.output, exps)
    else:
        sys.stdout.write(report.markdown_tables(rows, exps))
    return 0


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------


def _add_io(p):
    p.add_argument("input", help="input image or directory")
    p.add_argument("output", help="output PNG (or directory when input is a directory)")
    p.add_argument("--size", type=int, default=None, help="resize to SIZE x SIZE first")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="leafbench", description="Leaf image noise / denoise / CLAHE benchmark.")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker cap for grid runs (default: number of CPUs)")
    parser.add_argument("-q", "--quiet", action="store_true", help="suppress per-image log lines")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("noise", help="inject one noise type")
    _add_io(p)
    p.add_argument("--kind", required=True, choices=NOISE_KINDS)
    p.add_argument("--mean", type=float, default=0.0)
    p.add_argument("--variance", type=float, default=0.01)
    p.add_argument("--amount", type=float, default=0.05)
    p.add_argument("--lo", type=float, default=-20.0)
    p.add_argument("--hi", type=float, default=20.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("filter", help="apply one denoising filter")
    _add_io(p)
    p.add_argument("--kind", required=True, choices=FILTER_KINDS + ("bm3d",))
    p.add_argument("--kernel-size", type=int, default=5)
    p.add_argument("--sigma", default=None, help="gaussian sigma, or 'auto'")
    p.add_argument("--diameter", type=int, default=9)
    p.add_argument("--sigma-color", type=float, default=75.0)
    p.add_argument("--sigma-space", type=float, default=75.0)
    p.add_argument("--h", type=float, default=10.0)
    p.add_argument("--h-color", type=float, default=10.0)
    p.add_argument("--template-window", type=int, default=7)
    p.add_argument("--search-window", type=int, default=21)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("clahe", help="contrast limited adaptive histogram equalization")
    _add_io(p)
    p.add_argument("--clip", type=float, default=2.0)
    p.add_argument("--grid", type=_grid, default="8x8", help="tile grid as GXxGY, e.g. 5x5")
    p.set_defaults(func=cmd_clahe)

    p = sub.add_parser("metrics", help="print mse,ssim,psnr,nrmse,nmi for one pair")
    p.add_argument("ref")
    p.add_argument("test")
    p.add_argument("--header", action="store_true")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("run", help="run the experiment grid from a JSON config")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bench", help="time each filter over a batch of images")
    p.add_argument("--config", default=None, help="take corpus, seed and timing settings from a config")
    p.add_argument("--corpus", default=None)
    p.add_argument("--count", type=int, default=None, help="number of images (default 500)")
    p.add_argument("--repetitions", type=int, default=None, help="timed passes (default 3)")
    p.add_argument("--noise", default="gaussian", choices=NOISE_KINDS + ("none",))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--filters", nargs="+", choices=FILTER_KINDS + ("bm3d",))
    p.add_argument("--out", default=None, help="timing CSV path")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("report", help="render Markdown tables from a results CSV")
    p.add_argument("csv")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--experiments", default=None, help="comma-separated columns (default: all nine)")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(message)s", stream=sys.stderr)
    if args.threads is not None and args.threads < 1:
        print("leafbench: error: --threads must be >= 1", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"leafbench {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except (LeafbenchError, OSError, ValueError) as exc:
        print(f"leafbench {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
