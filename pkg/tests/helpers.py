"""Shared oracles for the test suite.

Everything here is deliberately independent of the package internals: the
root finder iterates Weierstrass corrections instead of calling LAPACK, the
characteristic polynomial is computed in exact rational arithmetic, and the
KS distance is the direct sup over the sorted sample.
"""

import math
from fractions import Fraction

import numpy as np


def ks_distance(sample, cdf) -> float:
    """sup_t |F_hat(t) - F(t)| for a 1-d sample against a callable CDF."""
    s = np.sort(np.asarray(sample, dtype=float))
    n = s.size
    u = np.asarray(cdf(s), dtype=float)
    upper = np.max(np.arange(1, n + 1) / n - u)
    lower = np.max(u - np.arange(0, n) / n)
    return float(max(upper, lower))


def char_poly_exact(M):
    """Monic characteristic polynomial of an integer matrix, exact.

    Faddeev-LeVerrier over Fractions; returns coefficients in descending
    powers, length n+1.
    """
    n = len(M)
    A = [[Fraction(v) for v in row] for row in M]
    coeffs = [Fraction(1)]
    Mk = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        if k > 1:
            prod = [[sum(A[i][t] * Mk[t][j] for t in range(n))
                     for j in range(n)] for i in range(n)]
            Mk = [[prod[i][j] + (coeffs[-1] if i == j else 0)
                   for j in range(n)] for i in range(n)]
        AM = [[sum(A[i][t] * Mk[t][j] for t in range(n))
               for j in range(n)] for i in range(n)]
        trace = sum(AM[i][i] for i in range(n))
        coeffs.append(-trace / k)
    return coeffs


def poly_roots(coeffs, iters: int = 400):
    """All complex roots of a monic polynomial by Durand-Kerner iteration."""
    c = [complex(x) for x in coeffs]
    d = len(c) - 1
    if d == 0:
        return []

    def p(z):
        acc = 0j
        for a in c:
            acc = acc * z + a
        return acc

    radius = 1.0 + max(abs(a) for a in c[1:])
    roots = [radius * np.exp(2j * math.pi * k / d + 0.4j) for k in range(d)]
    for _ in range(iters):
        new = []
        for i, r in enumerate(roots):
            denom = 1.0 + 0j
            for j, s in enumerate(roots):
                if i != j:
                    denom *= r - s
            new.append(r - p(r) / denom)
        shift = max(abs(a - b) for a, b in zip(new, roots))
        roots = new
        if shift < 1e-14 * radius:
            break
    return roots


def multiset_match_error(a, b) -> float:
    """Largest pairing distance between two complex multisets.

    Greedy nearest-neighbour matching; adequate when the sets agree far
    more closely than their internal separation.
    """
    a = list(map(complex, a))
    b = list(map(complex, b))
    assert len(a) == len(b)
    unused = list(range(len(b)))
    worst = 0.0
    for z in a:
        j = min(unused, key=lambda i: abs(z - b[i]))
        worst = max(worst, abs(z - b[j]))
        unused.remove(j)
    return worst


def exp_power_cdf(p: float, t_max: float = 8.0, points: int = 80001):
    """CDF of the density proportional to exp(-|t|^p), by quadrature.

    Trapezoid rule on a dense grid; the implied normalizer is checked by the
    caller against gamma(1 + 1/p).  Returns (cdf callable, half mass).
    """
    grid = np.linspace(0.0, t_max, points)
    dens = np.exp(-grid ** p)
    half = np.concatenate(
        [[0.0], np.cumsum((dens[1:] + dens[:-1]) * 0.5 * np.diff(grid))])
    z_half = half[-1]

    def cdf(t):
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(grid, np.abs(t)), 0, grid.size - 1)
        tail = half[idx] / (2.0 * z_half)
        return np.where(t >= 0, 0.5 + tail, 0.5 - tail)

    return cdf, float(z_half)
