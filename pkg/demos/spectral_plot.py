"""SVG plots of F^(lambda) - F^(0) for both sine processes, plus the CSV table.

    python demos/spectral_plot.py [outdir]
"""
import os
import sys

from pfaffpp.cli import main as cli


def main(outdir="."):
    os.makedirs(outdir, exist_ok=True)
    for proc in ("sine1", "sine4"):
        svg = os.path.join(outdir, f"fhat_{proc}.svg")
        csv = os.path.join(outdir, f"fhat_{proc}.csv")
        cli(["plot", "--process", proc, "--lmax", "2", "--count", "200", "--out", svg])
        cli(["spectral", "table", "--process", proc, "--lmax", "2", "--count", "40", "--out", csv])
        print("wrote", svg, csv)


if __name__ == "__main__":
    main(*sys.argv[1:])
