"""Shared brute-force oracles for the test suite.

These deliberately avoid the library's internal fast paths: they work on raw
Fractions, point by point, so agreement with the package is a genuine
two-route check.
"""

from __future__ import annotations

import random
from fractions import Fraction

from kedgelab.geom import Point2, PointSet


def frac_orient(p, q, r) -> int:
    d = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)
    return (d > 0) - (d < 0)


def oracle_collinear_triple(points):
    """Exhaustive O(n^3) collinear-triple scan. Returns sorted id triple or None."""
    n = len(points)
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                if frac_orient(points[i], points[j], points[k]) == 0:
                    return (i, j, k)
    return None


def oracle_vertical_pair(points):
    n = len(points)
    for i in range(n):
        for j in range(i + 1, n):
            if points[i].x == points[j].x:
                return (i, j)
    return None


def oracle_below_counts(points):
    """Map (i, j) with i < j to the number of points strictly below line ij."""
    out = {}
    n = len(points)
    for i in range(n):
        for j in range(i + 1, n):
            p, q = points[i], points[j]
            if p.x == q.x:
                continue
            if p.x > q.x:
                p, q = q, p
            c = 0
            for r in range(n):
                if r in (i, j):
                    continue
                if frac_orient(p, q, points[r]) < 0:
                    c += 1
            out[(i, j)] = c
    return out


def random_rational_points(n, seed, box=1000):
    """n distinct random rational points with denominator 2^10, seeded."""
    rng = random.Random(seed)
    seen = set()
    pts = []
    while len(pts) < n:
        x = Fraction(rng.randrange(-box * 1024, box * 1024), 1024)
        y = Fraction(rng.randrange(-box * 1024, box * 1024), 1024)
        if (x, y) in seen:
            continue
        seen.add((x, y))
        pts.append(Point2(x, y))
    return PointSet(pts)


def oracle_segments_properly_cross(a, b, c, d) -> bool:
    """True iff open segments ab and cd cross in a single interior point."""
    o1 = frac_orient(a, b, c)
    o2 = frac_orient(a, b, d)
    o3 = frac_orient(c, d, a)
    o4 = frac_orient(c, d, b)
    return o1 * o2 < 0 and o3 * o4 < 0
