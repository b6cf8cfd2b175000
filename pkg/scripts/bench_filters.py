"""Time each filter over a batch of noisy 256x256 images (single-threaded).

    python3 scripts/bench_filters.py corpus/ --count 500 --out timing.csv

Corpora smaller than --count are cycled.  Prints elapsed min/max per filter
and the bilateral/median and nlm/bilateral ratios.
"""

import argparse

from leafbench import report
from leafbench.filters import FILTER_KINDS, FilterSpec
from leafbench.noise import NoiseSpec, inject
from leafbench.pipeline import benchmark_filter, discover_images, prepare


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("corpus")
    ap.add_argument("--count", type=int, default=500)
    ap.add_argument("--repetitions", type=int, default=3)
    ap.add_argument("--noise", default="gaussian")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    base = [prepare(p) for p in discover_images(args.corpus)]
    images = [inject(base[i % len(base)], NoiseSpec(args.noise, seed=args.seed), i) for i in range(args.count)]
    records = {}
    for kind in FILTER_KINDS:
        rec = benchmark_filter(FilterSpec(kind), images, args.repetitions, args.noise)
        records[kind] = rec
        print(f"{FilterSpec(kind).label:10s} min {rec.elapsed_min:8.3f}s  max {rec.elapsed_max:8.3f}s")
    t = {k: r.elapsed_min for k, r in records.items()}
    print(f"bilateral/median {t['bilateral'] / t['median']:.1f}x   nlm/bilateral {t['nlm'] / t['bilateral']:.1f}x")
    if args.out:
        report.emit_timing_csv(records.values(), args.out)


if __name__ == "__main__":
    main()
