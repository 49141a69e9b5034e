"""Independent reference implementations used only by the tests."""
import itertools
import math

import numpy as np


def pfaffian_by_matchings(a):
    """Pfaffian as the signed sum over perfect matchings (small sizes only)."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]

    def rec(idx):
        if not idx:
            return 1.0
        i = idx[0]
        total = 0.0
        for pos in range(1, len(idx)):
            j = idx[pos]
            rest = idx[1:pos] + idx[pos + 1:]
            # sign of moving j next to i
            total += (-1) ** (pos - 1) * a[i, j] * rec(rest)
        return total

    return rec(list(range(n)))


def j_series(nu, x, terms=40):
    """Power series of J_nu(x)."""
    return sum((-1) ** k * (x / 2) ** (2 * k + nu) / (math.factorial(k) * math.gamma(k + nu + 1))
               for k in range(terms))


def ks_distance(a, b):
    """Two-sample Kolmogorov-Smirnov statistic."""
    a, b = np.sort(a), np.sort(b)
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def matchings_count(n):
    return math.prod(range(1, n, 2))


__all__ = ["pfaffian_by_matchings", "j_series", "ks_distance", "matchings_count", "itertools"]
