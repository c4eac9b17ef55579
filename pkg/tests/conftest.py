import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from emptystar.geom import PointSet

SQUARE = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
TRIANGLE_CENTROID = [(0.0, 0.0), (3.0, 0.0), (0.0, 3.0), (1.0, 1.0)]


@pytest.fixture
def square():
    return PointSet(SQUARE)


@pytest.fixture
def triangle_centroid():
    return PointSet(TRIANGLE_CENTROID)


def leibniz_sign(points):
    """Exact orientation by the permutation expansion over rationals."""
    p = [[Fraction(float(v)) for v in row] for row in points]
    d = len(p[0])
    rows = [[p[i + 1][j] - p[0][j] for j in range(d)] for i in range(d)]
    total = Fraction(0)
    for perm in itertools.permutations(range(d)):
        inv = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
        term = Fraction(-1 if inv % 2 else 1)
        for i, j in enumerate(perm):
            term *= rows[i][j]
        total += term
    return (total > 0) - (total < 0)


def brute_empty(points):
    """Empty simplices by rational orientation tests, for tiny inputs only."""
    pts = [tuple(p) for p in points]
    n, d = len(pts), len(pts[0])
    out = []
    for combo in itertools.combinations(range(n), d + 1):
        verts = [pts[i] for i in combo]
        base = leibniz_sign(verts)
        empty = True
        for m in range(n):
            if m in combo:
                continue
            inside = True
            for i in range(d + 1):
                swapped = list(verts)
                swapped[i] = pts[m]
                if leibniz_sign(swapped) != base:
                    inside = False
                    break
            if inside:
                empty = False
                break
        if empty:
            out.append(combo)
    return out


def uniform_instance(seed, n, d=2):
    return PointSet(np.random.default_rng(seed).random((n, d)))
