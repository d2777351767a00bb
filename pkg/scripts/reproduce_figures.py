"""Write the data table behind every figure into one directory.

    python scripts/reproduce_figures.py out/ [--threads 4]
"""
import argparse
import pathlib
import sys

from coherent_charging.cli import FIGURES, run


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("outdir", type=pathlib.Path)
    ap.add_argument("--threads", default="1")
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)
    for fig in FIGURES:
        target = args.outdir / f"fig{fig}.csv"
        code = run(["figure", fig, "--threads", args.threads, "--output", str(target)])
        print(f"{fig:12s} -> {target} (exit {code})")
        if code:
            sys.exit(code)
    run(["rus", "--p", "0.1", "--R", "10", "--trials", "1000000", "--seed", "1",
         "--output", str(args.outdir / "rus.csv")])


if __name__ == "__main__":
    main()
