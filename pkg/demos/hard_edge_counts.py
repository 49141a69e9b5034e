"""Monte Carlo count at the hard edge of the beta=4 Laguerre ensemble.

Mean number of rescaled eigenvalues in (0, X] against the integral of the
bessel4 one-point function, for a few X.

    python demos/hard_edge_counts.py [n_samples]
"""
import sys

import numpy as np

from pfaffpp.ensembles import (EnsembleSpec, HardEdge, bessel4_laguerre_exponent, counts_in,
                               rescale, sample_many)
from pfaffpp.kernels import matrix_kernel, rho1
from pfaffpp.quad import gl_panels


def main(n_samples="4000", s=1.0, N=100):
    n = int(n_samples)
    spec = EnsembleSpec(4, "laguerre", N, seed=1, a=bessel4_laguerre_exponent(s))
    conf = [rescale(c, HardEdge(N)) for c in sample_many(spec, n)]
    K = matrix_kernel("bessel4", s)
    print("X      mc_mean   stderr    limit")
    for X in (2.0, 10.0, 50.0, 200.0):
        c = counts_in(conf, (0.0, X))
        br = np.unique(np.concatenate([[0.0], X * np.geomspace(1e-8, 1.0, 60)]))
        x, w = gl_panels(br, 16)
        print(f"{X:<6g} {c.mean():.5f}  {c.std(ddof=1) / np.sqrt(n):.5f}  {w @ rho1(K, x):.5f}")


if __name__ == "__main__":
    main(*sys.argv[1:])
