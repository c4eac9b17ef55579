"""Empty simplices, k-degrees, stars and the short-base functionals.

All enumerators return simplices as sorted index tuples in lexicographic
order, so results are canonical regardless of how they were produced.
"""

from __future__ import annotations

import itertools
import math
import weakref
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from . import _kernels
from .geom import (
    GeneralPositionError,
    GeometryError,
    PointSet,
    as_point_set,
    binomial_table,
    facet_signs,
    kernel_scaled,
    orientation_signs,
)

# point sets are immutable, so enumeration results can be memoized per object
_CACHE: "weakref.WeakKeyDictionary[PointSet, np.ndarray]" = weakref.WeakKeyDictionary()


def _check_enumerable(ps: PointSet) -> None:
    if ps.n < ps.dim + 1:
        raise GeometryError(f"need at least d+1 = {ps.dim + 1} points, got {ps.n}")


def _canonical(simplices: np.ndarray, n: int | None = None) -> np.ndarray:
    simplices = np.sort(np.asarray(simplices, dtype=np.int64), axis=1)
    if simplices.shape[0] == 0:
        return simplices
    width = simplices.shape[1]
    if n is not None and width * math.log2(max(n, 2)) < 62:
        # sorting packed integer keys is much cheaper than a lexsort
        return _decode(np.sort(_encode(simplices, n)), n, width)
    order = np.lexsort(simplices.T[::-1])
    return simplices[order]


def _naive_array(ps: PointSet, chunk: int = 2048) -> np.ndarray:
    coords = ps.coords
    n, d = coords.shape
    combos = np.array(list(itertools.combinations(range(n), d + 1)), dtype=np.int64)
    keep = []
    for start in range(0, combos.shape[0], chunk):
        block = combos[start:start + chunk]
        verts = coords[block]                       # (c, d+1, d)
        base = orientation_signs(verts)
        if np.any(base == 0):
            raise GeneralPositionError(block[np.argmax(base == 0)])
        inside = np.ones((block.shape[0], n), dtype=bool)
        for i in range(d + 1):
            batch = np.repeat(verts[:, None], n, axis=1)   # (c, n, d+1, d)
            batch[:, :, i, :] = coords[None, :, :]
            s = orientation_signs(batch.reshape(-1, d + 1, d)).reshape(block.shape[0], n)
            inside &= s == base[:, None]
        keep.append(block[~inside.any(axis=1)])
    return _canonical(np.concatenate(keep)) if keep else np.empty((0, d + 1), np.int64)


def enumerate_empty_simplices_naive(X) -> list[tuple[int, ...]]:
    """Empty simplices straight from the definition.

    Every (d+1)-subset is tested against every point with the exact
    open-interior predicate: O(C(n, d+1) * n) predicate evaluations.  Kept as
    the reference the fast enumerators are checked against.
    """
    ps = as_point_set(X)
    _check_enumerable(ps)
    ps.require_general_position()
    return [tuple(int(i) for i in row) for row in _naive_array(ps)]


def _planar_array(ps: PointSet) -> np.ndarray:
    coords = kernel_scaled(ps.coords)
    if coords is None:
        # dynamic range beyond the compiled predicates; exact bitmask path
        return _bitmask_array(ps)
    xs, ys = np.ascontiguousarray(coords[:, 0]), np.ascontiguousarray(coords[:, 1])
    tri, bad = _kernels.planar_empty_triangles(xs, ys, np.lexsort((ys, xs)))
    if bad[0] >= 0:
        raise GeneralPositionError(sorted(int(i) for i in bad))
    ps.general_position_checked = True
    return _canonical(tri, ps.n)


def fast_planar_empty_triangles(X) -> list[tuple[int, int, int]]:
    """Output-sensitive planar enumeration, O(n^2 log n + T)."""
    ps = as_point_set(X)
    if ps.dim != 2:
        raise GeometryError("fast planar enumeration needs d = 2")
    _check_enumerable(ps)
    return [tuple(int(i) for i in row) for row in _planar_array(ps)]


def _bitmask_array(ps: PointSet) -> np.ndarray:
    coords = ps.coords
    n, d = coords.shape
    signs, facets = facet_signs(coords)
    member = np.zeros(signs.shape, dtype=bool)
    member[np.arange(facets.shape[0])[:, None], facets] = True
    zero = (signs == 0) & ~member
    if np.any(zero):
        f, m = np.argwhere(zero)[0]
        raise GeneralPositionError(sorted([int(x) for x in facets[f]] + [int(m)]))
    words = (n + 63) // 64
    pad = words * 64 - n

    def pack(mask):
        bits = np.packbits(np.pad(mask, ((0, 0), (0, pad))), axis=1, bitorder="little")
        return np.ascontiguousarray(bits).view("<u8").astype(np.uint64)

    pos = pack(signs > 0)
    neg = pack(signs < 0)
    simplices, bad = _kernels.bitmask_empty_simplices(n, d, signs, pos, neg,
                                                      binomial_table(n, d))
    if bad[0] >= 0:
        raise GeneralPositionError(bad.tolist())
    ps.general_position_checked = True
    return _canonical(simplices, n)


def empty_simplex_array(X) -> np.ndarray:
    """(T, d+1) array of empty simplices using the fastest exact route."""
    ps = as_point_set(X)
    cached = _CACHE.get(ps)
    if cached is not None:
        return cached
    _check_enumerable(ps)
    out = _planar_array(ps) if ps.dim == 2 else _bitmask_array(ps)
    out.setflags(write=False)
    _CACHE[ps] = out
    return out


# ---------------------------------------------------------------------------
# degrees
# ---------------------------------------------------------------------------

def _encode(tuples: np.ndarray, n: int) -> np.ndarray:
    key = np.zeros(tuples.shape[0], dtype=np.int64)
    for j in range(tuples.shape[1]):
        key = key * n + tuples[:, j]
    return key


def _decode(keys: np.ndarray, n: int, k: int) -> np.ndarray:
    out = np.empty((keys.shape[0], k), dtype=np.int64)
    rest = keys.copy()
    for j in range(k - 1, -1, -1):
        rest, out[:, j] = np.divmod(rest, n)
    return out


def tuple_degrees(simplices: np.ndarray, n: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Nonzero k-degrees from one pass over the empty simplices.

    Each empty simplex increments all C(d+1, k) of its k-subsets.  Returns
    the k-tuples in lexicographic order and their degrees.
    """
    width = simplices.shape[1]
    if not 1 <= k <= width - 1:
        raise ValueError(f"k must be in 1..{width - 1}")
    if simplices.shape[0] == 0:
        return np.empty((0, k), np.int64), np.empty(0, np.int64)
    parts = [_encode(simplices[:, list(cols)], n)
             for cols in itertools.combinations(range(width), k)]
    flat = np.concatenate(parts)
    if n ** k <= 1 << 26:
        dense = np.bincount(flat, minlength=n ** k)
        keys = np.flatnonzero(dense)
        counts = dense[keys]
    else:
        keys, counts = np.unique(flat, return_counts=True)
    return _decode(keys, n, k), counts.astype(np.int64)


def _max_degree(simplices: np.ndarray, n: int, k: int) -> tuple[int, tuple[int, ...]]:
    tuples, counts = tuple_degrees(simplices, n, k)
    if counts.size == 0:
        return 0, tuple(range(k))
    # np.unique sorts keys, so argmax lands on the lexicographically smallest tie
    best = int(np.argmax(counts))
    return int(counts[best]), tuple(int(i) for i in tuples[best])


@dataclass
class EmptySimplexReport:
    n: int
    dim: int
    total: int
    per_vertex_degree: np.ndarray
    k: int | None = None
    per_tuple_degree: dict[tuple[int, ...], int] | None = None
    witness_max: tuple[tuple[int, ...], int] | None = None

    def to_dict(self, include_tuples: bool = True) -> dict:
        out = {
            "n": self.n,
            "dim": self.dim,
            "total": self.total,
            "per_vertex_degree": [int(v) for v in self.per_vertex_degree],
            "k": self.k,
        }
        if self.witness_max is not None:
            out["witness_max"] = {"tuple": list(self.witness_max[0]),
                                  "degree": self.witness_max[1]}
        if include_tuples and self.per_tuple_degree is not None:
            out["per_tuple_degree"] = [[list(t), d] for t, d in self.per_tuple_degree.items()]
        return out


def count_empty_simplices(X, k: int | None = None) -> EmptySimplexReport:
    """N_triangle, per-vertex degrees and, for a requested k, all k-degrees."""
    ps = as_point_set(X)
    simplices = empty_simplex_array(ps)
    per_vertex = np.bincount(simplices.reshape(-1), minlength=ps.n).astype(np.int64)
    report = EmptySimplexReport(n=ps.n, dim=ps.dim, total=int(simplices.shape[0]),
                                per_vertex_degree=per_vertex)
    if k is not None:
        _check_k(k, ps.dim)
        tuples, counts = tuple_degrees(simplices, ps.n, k)
        report.k = k
        report.per_tuple_degree = {tuple(int(i) for i in t): int(c)
                                   for t, c in zip(tuples, counts)}
        value, witness = _max_degree(simplices, ps.n, k)
        report.witness_max = (witness, value)
    return report


def _check_k(k: int, d: int) -> None:
    if not 1 <= k <= d:
        raise ValueError(f"k must be in 1..{d}, got {k}")


def _normalize_key(S: Sequence[int], ps: PointSet) -> tuple[int, ...]:
    key = tuple(sorted(int(i) for i in S))
    _check_k(len(key), ps.dim)
    if len(set(key)) != len(key) or key[0] < 0 or key[-1] >= ps.n:
        raise ValueError(f"invalid simplex key {S!r} for n={ps.n}")
    return key


def star(S: Sequence[int], X) -> list[tuple[int, ...]]:
    """The empty simplices having S among their vertices."""
    ps = as_point_set(X)
    key = _normalize_key(S, ps)
    simplices = empty_simplex_array(ps)
    hit = np.ones(simplices.shape[0], dtype=bool)
    for v in key:
        hit &= np.any(simplices == v, axis=1)
    return [tuple(int(i) for i in row) for row in simplices[hit]]


def deg_tuple(S: Sequence[int], X) -> int:
    return len(star(S, X))


def deg_k_max(X, k: int) -> tuple[int, tuple[int, ...]]:
    """deg_k(X) and the lexicographically smallest k-tuple attaining it."""
    ps = as_point_set(X)
    _check_k(k, ps.dim)
    return _max_degree(empty_simplex_array(ps), ps.n, k)


# ---------------------------------------------------------------------------
# N_{gamma n} and F_{gamma n}
# ---------------------------------------------------------------------------

@dataclass
class GammaFunctionalResult:
    gamma: float
    threshold: float
    n_count: int
    f_value: int
    qualifying_bases: list[tuple[int, ...]] = field(default_factory=list)


def gamma_threshold(n: int, d: int, gamma: float) -> float:
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    return (gamma * n) ** (-1.0 / (d - 1))


def close_pairs(coords: np.ndarray, r: float) -> np.ndarray:
    """Sorted (i, j) pairs with Euclidean distance <= r."""
    coords = np.asarray(coords, dtype=float)
    tree = cKDTree(coords)
    pairs = tree.query_pairs(r * (1.0 + 1e-9), output_type="ndarray").astype(np.int64)
    if pairs.size == 0:
        return pairs.reshape(0, 2)
    diff = coords[pairs[:, 0]] - coords[pairs[:, 1]]
    pairs = pairs[np.sqrt(np.sum(diff * diff, axis=1)) <= r]
    pairs = np.sort(pairs, axis=1)
    return pairs[np.lexsort(pairs.T[::-1])]


def short_bases(coords: np.ndarray, d: int, r: float) -> list[tuple[int, ...]]:
    """d-subsets whose pairwise distances are all <= r (cliques of the r-graph)."""
    pairs = close_pairs(coords, r)
    if d == 2:
        return [tuple(int(v) for v in p) for p in pairs]
    adj: dict[int, set[int]] = {}
    for i, j in pairs.tolist():
        adj.setdefault(i, set()).add(j)
        adj.setdefault(j, set()).add(i)
    out: list[tuple[int, ...]] = []

    def grow(clique: list[int], cand: set[int]) -> None:
        if len(clique) == d:
            out.append(tuple(clique))
            return
        for v in sorted(cand):
            if v > clique[-1]:
                grow(clique + [v], cand & adj[v])

    for v in sorted(adj):
        grow([v], {u for u in adj[v] if u > v})
    return sorted(out)


def n_gamma_count(X, gamma: float) -> int:
    """N_{gamma n}(X) alone; needs no general position."""
    coords = X.coords if isinstance(X, PointSet) else np.asarray(X, dtype=float)
    n, d = coords.shape
    r = gamma_threshold(n, d, gamma)
    if d == 2:
        return int(close_pairs(coords, r).shape[0])
    return len(short_bases(coords, d, r))


def gamma_functionals(X, gamma: float) -> GammaFunctionalResult:
    ps = as_point_set(X)
    r = gamma_threshold(ps.n, ps.dim, gamma)
    bases = short_bases(ps.coords, ps.dim, r)
    f_value = 0
    if bases:
        tuples, counts = tuple_degrees(empty_simplex_array(ps), ps.n, ps.dim)
        lookup = dict(zip(_encode(tuples, ps.n).tolist(), counts.tolist()))
        keys = _encode(np.array(bases, dtype=np.int64), ps.n).tolist()
        f_value = int(sum(lookup.get(key, 0) for key in keys))
    else:
        ps.require_general_position()
    return GammaFunctionalResult(gamma=float(gamma), threshold=r, n_count=len(bases),
                                 f_value=f_value, qualifying_bases=bases)


def facet_extension_bound(n: int, hull_edges: int) -> int:
    """Lower bound 2 C(n,2) - h on 3 N_triangle for planar sets."""
    return 2 * math.comb(n, 2) - hull_edges
