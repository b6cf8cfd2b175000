"""Run the noise x filter x experiment grid and print the headline comparisons.

    python3 scripts/run_grid.py configs/desk.json

Writes results.csv, results_full.csv and tables.md into the config's
output_dir, then prints, per noise kind, the filters ranked by mean PSNR
under plain denoising and the effect of each CLAHE placement.
"""

import argparse
import logging
import time
from pathlib import Path

from leafbench import report
from leafbench.config import load_config
from leafbench.filters import FILTER_LABELS
from leafbench.pipeline import discover_images, run_grid


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--threads", type=int, default=None)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    cfg = load_config(args.config)
    corpus = discover_images(cfg.corpus_dir)
    t0 = time.perf_counter()
    result = run_grid(corpus, cfg.grid_spec(args.threads))
    print(f"{len(corpus)} images, {len(result.aggregates)} cells, {time.perf_counter() - t0:.1f}s")

    out = Path(cfg.output_dir)
    report.emit_csv(result.aggregates, out / "results.csv", out / "results_full.csv")
    report.emit_markdown_tables(result.aggregates, out / "tables.md", cfg.experiments)

    psnr = {(r.noise, r.filter, r.experiment): r.psnr for r in result.aggregates}
    for noise in dict.fromkeys(r.noise for r in result.aggregates):
        ranked = sorted(((v, f) for (n, f, e), v in psnr.items() if n == noise and e == "E01"), reverse=True)
        print(f"\n{noise}: " + "  >  ".join(f"{FILTER_LABELS[f]} {v:.2f}" for v, f in ranked))
        for _, f in ranked:
            cells = " ".join(f"{e}:{psnr[(noise, f, e)]:6.2f}" for e in cfg.experiments if (noise, f, e) in psnr)
            print(f"  {FILTER_LABELS[f]:10s} {cells}")


if __name__ == "__main__":
    main()
