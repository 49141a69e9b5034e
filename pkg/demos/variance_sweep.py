"""Variance of the log-taper statistic for all four kernels, written as CSV.

    python demos/variance_sweep.py [out.csv]
"""
import sys

from pfaffpp.kernels import matrix_kernel
from pfaffpp.rigidity import variance_sweep, write_sweep_csv

T_LIST = [10.0, 30.0, 100.0, 300.0, 1000.0]


def main(path="variance_sweep.csv"):
    rows = []
    for name in ("sine1", "sine4", "bessel1", "bessel4"):
        K = matrix_kernel(name, 1.0 if name.startswith("bessel") else None)
        rows += variance_sweep(K, 1.0, T_LIST)
        print(name, " ".join(f"{r.variance:.5f}" for r in rows[-len(T_LIST):]))
    with open(path, "w") as fh:
        write_sweep_csv(rows, fh)
    print("wrote", path)


if __name__ == "__main__":
    main(*sys.argv[1:])
