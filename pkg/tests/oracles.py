"""Slow, independent reference implementations used as test oracles.

None of these import from the package under test; each takes the most
literal route to the answer (explicit loops, enumeration, inclusion-exclusion).
"""

from __future__ import annotations

import itertools
import math


def gaussian(x, y, sigma):
    return math.exp(-sum((a - b) ** 2 for a, b in zip(x, y)) / (2.0 * sigma**2))


def linear(x, y):
    return sum(a * b for a, b in zip(x, y))


def mmd_double_sum(X, Y, kern):
    """Biased empirical MMD^2 written as three explicit double sums."""
    m, n = len(X), len(Y)
    xx = sum(kern(X[i], X[j]) for i in range(m) for j in range(m)) / m**2
    yy = sum(kern(Y[i], Y[j]) for i in range(n) for j in range(n)) / n**2
    xy = sum(kern(X[i], Y[j]) for i in range(m) for j in range(n)) / (m * n)
    return xx + yy - 2.0 * xy


def median_pairwise(points):
    d = [math.dist(points[i], points[j])
         for i in range(len(points)) for j in range(i + 1, len(points))]
    d.sort()
    k = len(d)
    return d[k // 2] if k % 2 else 0.5 * (d[k // 2 - 1] + d[k // 2])


def dominates(a, b):
    return all(x <= y for x, y in zip(a, b)) and any(x < y for x, y in zip(a, b))


def brute_force_fronts(F):
    """Peel nondominated layers by checking every pair, O(N^3) overall."""
    remaining = list(range(len(F)))
    fronts = []
    while remaining:
        front = [i for i in remaining
                 if not any(dominates(F[j], F[i]) for j in remaining if j != i)]
        fronts.append(sorted(front))
        remaining = [i for i in remaining if i not in front]
    return fronts


def igd_brute(R, P):
    return sum(min(math.dist(r, p) for p in P) for r in R) / len(R)


def hv_inclusion_exclusion(P, ref):
    """Union volume of boxes [p, ref] by inclusion-exclusion over all subsets."""
    P = [p for p in P if all(a <= r for a, r in zip(p, ref))]
    total = 0.0
    for size in range(1, len(P) + 1):
        sign = 1.0 if size % 2 else -1.0
        for subset in itertools.combinations(P, size):
            corner = [max(c) for c in zip(*subset)]
            vol = 1.0
            for c, r in zip(corner, ref):
                vol *= max(r - c, 0.0)
            total += sign * vol
    return total

