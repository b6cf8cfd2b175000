"""Write the seeded synthetic leaf corpus used by the desk-scale experiments.

    python3 scripts/make_corpus.py corpus/ --count 50 --seed 0
"""

import argparse

from leafbench.synthetic import write_corpus


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("directory")
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--size", type=int, default=256)
    args = ap.parse_args()
    paths = write_corpus(args.directory, args.count, args.seed, args.size)
    print(f"wrote {len(paths)} images to {args.directory}")


if __name__ == "__main__":
    main()
