"""Exact-sign predicates, point sets and the point-set file format."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import _kernels


class GeometryError(ValueError):
    """Invalid geometric input."""


class DimensionMismatchError(GeometryError):
    pass


class DegenerateSimplexError(GeometryError):
    pass


class GeneralPositionError(GeometryError):
    """Raised when a point set is not in general position.

    ``subset`` holds the indices of a violating subset.
    """

    def __init__(self, subset: Sequence[int], message: str | None = None):
        self.subset = tuple(int(i) for i in subset)
        super().__init__(message or f"points {list(self.subset)} are not in general position")


_U = 2.0 ** -53


def _gamma(k: int) -> float:
    return k * _U / (1.0 - k * _U)


_PERMS: dict[int, list[tuple[tuple[int, ...], int]]] = {}


def _perms(d: int):
    if d not in _PERMS:
        out = []
        for p in itertools.permutations(range(d)):
            inversions = sum(1 for i in range(d) for j in range(i + 1, d) if p[i] > p[j])
            out.append((p, -1 if inversions % 2 else 1))
        _PERMS[d] = out
    return _PERMS[d]


def _exact_det_sign(rows: Sequence[Sequence[Fraction]]) -> int:
    m = [list(r) for r in rows]
    d = len(m)
    sign = 1
    for c in range(d):
        piv = next((r for r in range(c, d) if m[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        for r in range(c + 1, d):
            if m[r][c] != 0:
                f = m[r][c] / m[c][c]
                for k in range(c, d):
                    m[r][k] -= f * m[c][k]
        if m[c][c] < 0:
            sign = -sign
    return sign


def _exact_orientation(simplex: np.ndarray) -> int:
    base = [Fraction(float(v)) for v in simplex[0]]
    rows = [[Fraction(float(v)) - b for v, b in zip(p, base)] for p in simplex[1:]]
    return _exact_det_sign(rows)


def orientation_signs(simplices: np.ndarray) -> np.ndarray:
    """Exact orientation signs for a batch of simplices.

    ``simplices`` has shape (N, d+1, d).  The determinant of the edge vectors
    from the first vertex is evaluated as a signed permutation sum in floating
    point, together with a forward error bound; rows the bound cannot decide
    are recomputed with rational arithmetic.
    """
    s = np.asarray(simplices, dtype=float)
    if s.ndim != 3 or s.shape[1] != s.shape[2] + 1:
        raise DimensionMismatchError(f"expected shape (N, d+1, d), got {s.shape}")
    d = s.shape[2]
    edges = s[:, 1:, :] - s[:, :1, :]
    det = np.zeros(s.shape[0])
    perm = np.zeros(s.shape[0])
    for p, sgn in _perms(d):
        term = edges[:, 0, p[0]].copy()
        for i in range(1, d):
            term *= edges[:, i, p[i]]
        det += sgn * term
        perm += np.abs(term)
    bound = 2.0 * _gamma(2 * d + len(_perms(d))) * perm
    out = np.where(det > bound, 1, np.where(-det > bound, -1, 0)).astype(np.int8)
    # a repeated vertex makes the determinant exactly zero
    repeated = np.zeros(s.shape[0], dtype=bool)
    for i in range(d + 1):
        for j in range(i + 1, d + 1):
            repeated |= np.all(s[:, i, :] == s[:, j, :], axis=1)
    # tiny permanents may hide underflow; send them to the exact path too
    unsure = (out == 0) | ((perm > 0.0) & (perm < 1e-250))
    unsure &= ~repeated
    out[repeated] = 0
    for i in np.flatnonzero(unsure):
        out[i] = _exact_orientation(s[i])
    return out


def kernel_scaled(arr: np.ndarray, top: int = 500, floor: int = -440) -> np.ndarray | None:
    """Copy of ``arr`` times a power of two, for the compiled float predicates.

    Orientation signs are unchanged by the exact rescaling.  Afterwards the
    largest magnitude is near 2**top and every nonzero one is at least
    2**floor, so the filters and product expansions neither overflow nor
    underflow.  Returns None when the dynamic range is too wide for that.
    """
    a = np.abs(arr[arr != 0])
    if a.size == 0:
        return arr
    shift = top - int(np.frexp(a.max())[1])
    if int(np.frexp(a.min())[1]) + shift <= floor:
        return None
    return np.ldexp(arr, shift)


def _as_points(points, dim: int | None = None) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2:
        raise DimensionMismatchError("points must be a 2-D array of coordinates")
    if dim is not None and arr.shape[1] != dim:
        raise DimensionMismatchError(f"expected dimension {dim}, got {arr.shape[1]}")
    return arr


def orientation(points, dim: int | None = None) -> int:
    """Exact sign of det[p1-p0, ..., pd-p0] for d+1 points in R^d."""
    arr = _as_points(points, dim)
    d = arr.shape[1]
    if arr.shape[0] != d + 1:
        raise DimensionMismatchError(f"need {d + 1} points in dimension {d}, got {arr.shape[0]}")
    sc = kernel_scaled(arr) if d == 2 else None
    if sc is not None:
        return int(_kernels.orient2d_exact(sc[0, 0], sc[0, 1], sc[1, 0],
                                           sc[1, 1], sc[2, 0], sc[2, 1]))
    return int(orientation_signs(arr[None])[0])


def simplex_volume(points, dim: int | None = None) -> float:
    arr = _as_points(points, dim)
    d = arr.shape[1]
    if arr.shape[0] != d + 1:
        raise DimensionMismatchError(f"need {d + 1} points in dimension {d}, got {arr.shape[0]}")
    return abs(float(np.linalg.det(arr[1:] - arr[0]))) / math.factorial(d)


def point_in_open_simplex(p, simplex) -> bool:
    """True iff every barycentric coordinate of ``p`` is strictly positive."""
    s = _as_points(simplex)
    d = s.shape[1]
    if s.shape[0] != d + 1:
        raise DimensionMismatchError(f"need {d + 1} vertices in dimension {d}")
    p = np.asarray(p, dtype=float)
    if p.shape != (d,):
        raise DimensionMismatchError(f"point must have dimension {d}")
    return bool(points_in_open_simplex(p[None], s)[0])


def points_in_open_simplex(points, simplex) -> np.ndarray:
    """Vectorized open-interior test of many points against one simplex."""
    s = _as_points(simplex)
    pts = _as_points(points, s.shape[1])
    d = s.shape[1]
    base = orientation_signs(s[None])[0]
    if base == 0:
        raise DegenerateSimplexError("simplex is degenerate")
    inside = np.ones(pts.shape[0], dtype=bool)
    for i in range(d + 1):
        batch = np.repeat(s[None], pts.shape[0], axis=0)
        batch[:, i, :] = pts
        inside &= orientation_signs(batch) == base
    return inside


def max_edge_length(points) -> float:
    arr = _as_points(points)
    if arr.shape[0] < 2:
        raise GeometryError("need at least 2 points")
    return max(math.dist(a, b) for a, b in itertools.combinations(arr.tolist(), 2))


def find_degenerate_subset(coords: np.ndarray) -> tuple[int, ...] | None:
    """A subset witnessing failure of general position, or None."""
    arr = _as_points(coords)
    n, d = arr.shape
    if not np.all(np.isfinite(arr)):
        raise GeometryError("coordinates must be finite")
    _, first, counts = np.unique(arr, axis=0, return_index=True, return_counts=True)
    if np.any(counts > 1):
        dup = np.flatnonzero(np.all(arr == arr[first[np.argmax(counts)]], axis=1))
        return tuple(int(i) for i in dup[:2])
    if n <= d:
        if n >= 2 and _exact_affine_rank(arr) < n - 1:
            return tuple(range(n))
        return None
    sc = kernel_scaled(arr) if d == 2 else None
    if sc is not None:
        xs, ys = np.ascontiguousarray(sc[:, 0]), np.ascontiguousarray(sc[:, 1])
        bad = _kernels.planar_collinear_triple(xs, ys, np.lexsort((ys, xs)))
        return None if bad[0] < 0 else tuple(sorted(int(i) for i in bad))
    # walk the facet table in blocks so memory stays bounded for large n
    facets_all = colex_facets(n, d)
    step = max(1, (1 << 24) // n)
    for start in range(0, facets_all.shape[0], step):
        signs, facets = facet_signs(arr, facets_all[start:start + step])
        member = np.zeros(signs.shape, dtype=bool)
        member[np.arange(facets.shape[0])[:, None], facets] = True
        zero = (signs == 0) & ~member
        if np.any(zero):
            f, m = np.argwhere(zero)[0]
            return tuple(sorted([int(x) for x in facets[f]] + [int(m)]))
    return None


def _exact_affine_rank(points: np.ndarray) -> int:
    base = [Fraction(float(v)) for v in points[0]]
    m = [[Fraction(float(v)) - b for v, b in zip(r, base)] for r in points[1:]]
    rank = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(m)) if m[r][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][c] != 0:
                f = m[r][c] / m[rank][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def colex_facets(n: int, d: int) -> np.ndarray:
    """All sorted d-subsets of range(n), row i having colexicographic rank i."""
    if n < d:
        return np.empty((0, d), dtype=np.int64)
    lex = np.array(list(itertools.combinations(range(n), d)), dtype=np.int64).reshape(-1, d)
    rank = np.zeros(lex.shape[0], dtype=np.int64)
    for pos in range(d):
        rank += np.array([math.comb(int(v), pos + 1) for v in range(n)],
                         dtype=np.int64)[lex[:, pos]]
    out = np.empty_like(lex)
    out[rank] = lex
    return out


def binomial_table(n: int, k: int) -> np.ndarray:
    table = np.zeros((n + 1, k + 2), dtype=np.int64)
    for a in range(n + 1):
        for b in range(k + 2):
            table[a, b] = math.comb(a, b)
    return table


def facet_signs(coords: np.ndarray, facets: np.ndarray | None = None,
                chunk: int = 1 << 16) -> tuple[np.ndarray, np.ndarray]:
    """Exact orientation of every (d-subset, point) pair.

    Returns ``(signs, facets)`` where ``facets`` lists the d-subsets (all of
    them in colex order unless given) and ``signs[f, m]`` is the orientation
    of ``facets[f] + (m,)``.
    """
    arr = _as_points(coords)
    n, d = arr.shape
    if facets is None:
        facets = colex_facets(n, d)
    sc = kernel_scaled(arr, top=300, floor=-200) if d == 3 else None
    if sc is not None:
        signs = _kernels.facet_point_signs_3d(np.ascontiguousarray(sc), facets)
        unsure = np.argwhere(signs == _kernels.UNSURE)
        for f, m in unsure:
            signs[f, m] = _exact_orientation(np.vstack([arr[facets[f]], arr[m][None]]))
        return signs, facets
    signs = np.empty((facets.shape[0], n), dtype=np.int8)
    pairs = facets.shape[0] * n
    for start in range(0, pairs, chunk):
        idx = np.arange(start, min(pairs, start + chunk))
        f, m = np.divmod(idx, n)
        batch = np.concatenate([arr[facets[f]], arr[m][:, None, :]], axis=1)
        signs.reshape(-1)[idx] = orientation_signs(batch)
    return signs, facets


def is_general_position(points) -> bool:
    coords = points.coords if isinstance(points, PointSet) else _as_points(points)
    return find_degenerate_subset(coords) is None


class PointSet:
    """Immutable set of n points in R^d.

    Construction rejects non-finite coordinates and repeated points; pass
    ``check_general_position=True`` to also verify general position.
    """

    __slots__ = ("_coords", "general_position_checked", "__weakref__")

    def __init__(self, coords, check_general_position: bool = False):
        arr = np.array(coords, dtype=float)
        if arr.ndim != 2 or arr.shape[1] < 2:
            raise DimensionMismatchError("PointSet needs an (n, d) array with d >= 2")
        if not np.all(np.isfinite(arr)):
            raise GeometryError("coordinates must be finite")
        if arr.shape[0] > 1 and np.unique(arr, axis=0).shape[0] != arr.shape[0]:
            bad = find_degenerate_subset(arr)
            raise GeneralPositionError(bad or (), f"repeated point: indices {list(bad or ())}")
        arr.setflags(write=False)
        self._coords = arr
        self.general_position_checked = False
        if check_general_position:
            bad = find_degenerate_subset(arr)
            if bad is not None:
                raise GeneralPositionError(bad)
            self.general_position_checked = True

    @property
    def coords(self) -> np.ndarray:
        return self._coords

    @property
    def dim(self) -> int:
        return self._coords.shape[1]

    @property
    def n(self) -> int:
        return self._coords.shape[0]

    def __len__(self) -> int:
        return self.n

    def __iter__(self):
        return iter(self._coords)

    def __repr__(self) -> str:
        return f"PointSet(n={self.n}, dim={self.dim})"

    def require_general_position(self) -> "PointSet":
        if not self.general_position_checked:
            bad = find_degenerate_subset(self._coords)
            if bad is not None:
                raise GeneralPositionError(bad)
            self.general_position_checked = True
        return self


def as_point_set(points) -> PointSet:
    return points if isinstance(points, PointSet) else PointSet(points)


def convex_hull_2d(points) -> list[int]:
    """Indices of the hull vertices in counterclockwise order (monotone chain)."""
    arr = _as_points(points, 2)
    order = sorted(range(arr.shape[0]), key=lambda i: (arr[i, 0], arr[i, 1]))
    if len(order) < 3:
        return order

    sc = kernel_scaled(arr)

    def turn(o, a, b):
        if sc is None:
            return orientation(arr[[o, a, b]])
        return _kernels.orient2d_exact(sc[o, 0], sc[o, 1], sc[a, 0], sc[a, 1],
                                       sc[b, 0], sc[b, 1])

    lower: list[int] = []
    for i in order:
        while len(lower) >= 2 and turn(lower[-2], lower[-1], i) <= 0:
            lower.pop()
        lower.append(i)
    upper: list[int] = []
    for i in reversed(order):
        while len(upper) >= 2 and turn(upper[-2], upper[-1], i) <= 0:
            upper.pop()
        upper.append(i)
    return lower[:-1] + upper[:-1]


# ---------------------------------------------------------------------------
# file format: "d n" then n lines of d coordinates
# ---------------------------------------------------------------------------

def format_point_set(points) -> str:
    ps = as_point_set(points)
    lines = [f"{ps.dim} {ps.n}"]
    lines += [" ".join(repr(float(v)) for v in row) for row in ps.coords]
    return "\n".join(lines) + "\n"


def parse_point_set(text: str) -> PointSet:
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not lines or len(lines[0]) != 2:
        raise GeometryError("first line must be 'd n'")
    try:
        d, n = int(lines[0][0]), int(lines[0][1])
    except ValueError as exc:
        raise GeometryError("first line must be 'd n'") from exc
    rows = lines[1:]
    if len(rows) != n:
        raise GeometryError(f"header announces {n} points, found {len(rows)}")
    coords = np.empty((n, d))
    for i, row in enumerate(rows):
        if len(row) != d:
            raise DimensionMismatchError(f"line {i + 2}: expected {d} coordinates")
        try:
            coords[i] = [float(v) for v in row]
        except ValueError as exc:
            raise GeometryError(f"line {i + 2}: bad coordinate") from exc
    if n == 0:
        return PointSet(np.empty((0, d)))
    return PointSet(coords)


def read_point_set(path: str | Path) -> PointSet:
    return parse_point_set(Path(path).read_text())


def write_point_set(points, path: str | Path) -> None:
    Path(path).write_text(format_point_set(points))


def subsets(n: int, k: int) -> Iterable[tuple[int, ...]]:
    return itertools.combinations(range(n), k)
