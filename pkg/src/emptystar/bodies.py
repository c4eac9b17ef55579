"""Convex bodies: membership, uniform sampling and hyperplane sections.

Every body carries a ``center``.  Membership and sampling work in world
coordinates; hyperplanes passed to ``section_measure`` and ``support`` are
parametrized relative to the center, i.e. H = {x : <u, x - center> = t}.
"""

from __future__ import annotations

import math
import re
from abc import ABC, abstractmethod
from pathlib import Path

import numpy as np

from .geom import (
    DimensionMismatchError,
    GeneralPositionError,
    GeometryError,
    PointSet,
    find_degenerate_subset,
    orientation,
)
from .rng import RngStream, as_stream

MAX_REJECTIONS_PER_POINT = 1000
MAX_GP_REDRAWS = 100


def unit_ball_volume(d: int) -> float:
    return math.exp(0.5 * d * math.log(math.pi) - math.lgamma(0.5 * d + 1.0))


def _hyperplane_arrays(H, d: int) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(H, tuple):
        normal, offset = H
    else:
        normal, offset = H.normal, H.offset
    u = np.asarray(normal, dtype=float)
    if u.shape[-1] != d:
        raise DimensionMismatchError(f"hyperplane normal has dimension {u.shape[-1]}, body has {d}")
    return u, np.asarray(offset, dtype=float)


class ConvexBody(ABC):
    """A compact convex set with nonempty interior."""

    dim: int
    center: np.ndarray

    @property
    @abstractmethod
    def volume(self) -> float: ...

    @property
    @abstractmethod
    def diameter(self) -> float: ...

    @property
    @abstractmethod
    def inradius(self) -> float:
        """Radius of a ball around the center that lies inside the body."""

    @property
    @abstractmethod
    def bounding_radius(self) -> float:
        """Radius R of a ball around the center that contains the body."""

    @property
    @abstractmethod
    def label(self) -> str: ...

    @abstractmethod
    def _contains_local(self, q: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _sample_local(self, rng: RngStream, n: int) -> np.ndarray: ...

    @abstractmethod
    def section_measures(self, normals, offsets) -> np.ndarray:
        """(d-1)-volumes of K ∩ H for arrays of unit normals and offsets."""

    @abstractmethod
    def support(self, normals) -> np.ndarray:
        """Support function h(u) = max <u, x - center> over the body."""

    @abstractmethod
    def scaled(self, c: float) -> "ConvexBody":
        """The body dilated by c > 0 about its center."""

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.label}>"

    def _check(self, pts) -> np.ndarray:
        p = np.asarray(pts, dtype=float)
        if p.shape[-1] != self.dim:
            raise DimensionMismatchError(f"point has dimension {p.shape[-1]}, body has {self.dim}")
        return p

    def contains(self, p) -> bool:
        p = self._check(p)
        if p.ndim != 1:
            raise DimensionMismatchError("contains takes a single point")
        return bool(self._contains_local((p - self.center)[None, :])[0])

    def contains_many(self, pts) -> np.ndarray:
        p = self._check(pts)
        return self._contains_local(p.reshape(-1, self.dim) - self.center)

    def section_measure(self, H) -> float:
        u, t = _hyperplane_arrays(H, self.dim)
        return float(self.section_measures(u[None, :], np.atleast_1d(t))[0])

    def sample_points(self, rng, n: int) -> np.ndarray:
        """n uniform points as a raw (n, d) array, no general-position check."""
        if n < 1:
            raise ValueError("sample size must be at least 1")
        return self._sample_local(as_stream(rng), int(n)) + self.center

    def sample_uniform(self, rng, n: int, check_general_position: bool = True) -> PointSet:
        """n independent uniform points; the whole draw is repeated on degeneracy."""
        stream = as_stream(rng)
        for _ in range(MAX_GP_REDRAWS):
            pts = self.sample_points(stream, n)
            if not check_general_position:
                if np.unique(pts, axis=0).shape[0] == pts.shape[0]:
                    return PointSet(pts)
                continue
            if find_degenerate_subset(pts) is None:
                ps = PointSet(pts)
                ps.general_position_checked = True
                return ps
        raise GeneralPositionError((), f"no general-position draw after {MAX_GP_REDRAWS} attempts")


class Ball(ConvexBody):
    def __init__(self, d: int, radius: float = 1.0, center=None):
        if d < 2:
            raise ValueError("ball dimension must be at least 2")
        if not radius > 0:
            raise ValueError("radius must be positive")
        self.dim = int(d)
        self.radius = float(radius)
        self.center = np.zeros(d) if center is None else np.asarray(center, dtype=float)

    @property
    def volume(self) -> float:
        return unit_ball_volume(self.dim) * self.radius ** self.dim

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    @property
    def inradius(self) -> float:
        return self.radius

    @property
    def bounding_radius(self) -> float:
        return self.radius

    @property
    def label(self) -> str:
        if self.radius == 1.0 and not self.center.any():
            return "disk" if self.dim == 2 else f"ball{self.dim}"
        return f"ball{self.dim}(r={self.radius!r})"

    def _contains_local(self, q):
        return np.einsum("ij,ij->i", q, q) <= self.radius ** 2

    def _sample_local(self, rng, n):
        g = rng.normal((n, self.dim))
        g /= np.linalg.norm(g, axis=1)[:, None]
        r = self.radius * rng.random(n) ** (1.0 / self.dim)
        return g * r[:, None]

    def section_measures(self, normals, offsets):
        _, t = _hyperplane_arrays((normals, offsets), self.dim)
        h2 = np.clip(self.radius ** 2 - t * t, 0.0, None)
        return unit_ball_volume(self.dim - 1) * h2 ** ((self.dim - 1) / 2.0)

    def support(self, normals):
        u = np.asarray(normals, dtype=float)
        return np.full(u.shape[:-1], self.radius)

    def scaled(self, c):
        return Ball(self.dim, self.radius * c, self.center)


class Cube(ConvexBody):
    """Axis-parallel cube of the given side; default is [0, 1]^d."""

    # components below this are treated as zero in the section formula
    TINY = 1e-5

    def __init__(self, d: int, side: float = 1.0, center=None):
        if d < 2:
            raise ValueError("cube dimension must be at least 2")
        if not side > 0:
            raise ValueError("side must be positive")
        self.dim = int(d)
        self.side = float(side)
        self.center = (np.full(d, 0.5 * side) if center is None
                       else np.asarray(center, dtype=float))

    @property
    def volume(self) -> float:
        return self.side ** self.dim

    @property
    def diameter(self) -> float:
        return self.side * math.sqrt(self.dim)

    @property
    def inradius(self) -> float:
        return 0.5 * self.side

    @property
    def bounding_radius(self) -> float:
        return 0.5 * self.side * math.sqrt(self.dim)

    @property
    def label(self) -> str:
        if self.side == 1.0 and np.all(self.center == 0.5):
            return "square" if self.dim == 2 else f"cube{self.dim}"
        return f"cube{self.dim}(side={self.side!r})"

    def _contains_local(self, q):
        return np.all(np.abs(q) <= 0.5 * self.side, axis=1)

    def _sample_local(self, rng, n):
        return (rng.random((n, self.dim)) - 0.5) * self.side

    def section_measures(self, normals, offsets):
        u, t = _hyperplane_arrays((normals, offsets), self.dim)
        u = np.atleast_2d(np.abs(u))
        t = np.broadcast_to(np.abs(t), u.shape[:1]) / self.side
        out = np.empty(u.shape[0])
        live = u >= self.TINY
        # group rows by which components survive so each group is one formula
        patterns, inverse = np.unique(live, axis=0, return_inverse=True)
        for g, pattern in enumerate(patterns):
            rows = np.flatnonzero(inverse.reshape(-1) == g)
            out[rows] = _uniform_sum_density(u[rows][:, pattern], t[rows])
        return out * self.side ** (self.dim - 1)

    def support(self, normals):
        u = np.asarray(normals, dtype=float)
        return 0.5 * self.side * np.sum(np.abs(u), axis=-1)

    def scaled(self, c):
        return Cube(self.dim, self.side * c, self.center)


def _uniform_sum_density(a: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Density at t of sum a_i X_i with X_i iid uniform on [-1/2, 1/2].

    For a unit normal u this is the area of the slab {<u, x> = t} through
    the unit cube.  Uses the signed sum over the 2^m vertex offsets.
    """
    m = a.shape[1]
    if m == 0:
        return np.zeros_like(t)
    total = np.zeros_like(t)
    for signs in np.ndindex(*(2,) * m):
        eps = 1.0 - 2.0 * np.array(signs, dtype=float)
        shift = t + 0.5 * (a @ eps)
        if m == 1:
            term = (shift > 0).astype(float)
        else:
            term = np.clip(shift, 0.0, None) ** (m - 1)
        total += np.prod(eps) * term
    out = total / (math.factorial(m - 1) * np.prod(a, axis=1))
    # rounding can leave tiny negatives just outside the support
    return np.clip(out, 0.0, None)


class Ellipse(ConvexBody):
    def __init__(self, a: float, b: float, center=None):
        if not (a > 0 and b > 0):
            raise ValueError("ellipse semi-axes must be positive")
        self.dim = 2
        self.a, self.b = float(a), float(b)
        self.center = np.zeros(2) if center is None else np.asarray(center, dtype=float)

    @property
    def volume(self) -> float:
        return math.pi * self.a * self.b

    @property
    def diameter(self) -> float:
        return 2.0 * max(self.a, self.b)

    @property
    def inradius(self) -> float:
        return min(self.a, self.b)

    @property
    def bounding_radius(self) -> float:
        return max(self.a, self.b)

    @property
    def label(self) -> str:
        return f"ellipse:{self.a!r},{self.b!r}"

    def _contains_local(self, q):
        return (q[:, 0] / self.a) ** 2 + (q[:, 1] / self.b) ** 2 <= 1.0

    def _sample_local(self, rng, n):
        theta = rng.uniform(0.0, 2.0 * math.pi, n)
        r = np.sqrt(rng.random(n))
        return np.column_stack((self.a * r * np.cos(theta), self.b * r * np.sin(theta)))

    def section_measures(self, normals, offsets):
        u, t = _hyperplane_arrays((normals, offsets), 2)
        u = np.atleast_2d(u)
        h = self.support(u)
        s = np.clip(np.abs(t) / h, 0.0, 1.0)
        return 2.0 * np.sqrt(1.0 - s * s) * self.a * self.b / h

    def support(self, normals):
        u = np.asarray(normals, dtype=float)
        return np.hypot(self.a * u[..., 0], self.b * u[..., 1])

    def scaled(self, c):
        return Ellipse(self.a * c, self.b * c, self.center)


class Polygon(ConvexBody):
    """Strictly convex polygon given by counterclockwise vertices."""

    def __init__(self, vertices, source: str | None = None):
        v = np.array(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise GeometryError("polygon needs at least 3 planar vertices")
        if not np.all(np.isfinite(v)):
            raise GeometryError("polygon vertices must be finite")
        k = v.shape[0]
        for i in range(k):
            if orientation([v[i], v[(i + 1) % k], v[(i + 2) % k]]) != 1:
                raise GeometryError(f"polygon is not strictly convex and counterclockwise at vertex {(i + 1) % k}")
        edges = np.roll(v, -1, axis=0) - v
        nxt_edges = np.roll(edges, -1, axis=0)
        turning = np.arctan2(edges[:, 0] * nxt_edges[:, 1] - edges[:, 1] * nxt_edges[:, 0],
                             np.einsum("ij,ij->i", edges, nxt_edges))
        if abs(turning.sum() - 2.0 * math.pi) > 1e-6:
            raise GeometryError("polygon boundary winds more than once")
        self.dim = 2
        self.source = source
        nxt = np.roll(v, -1, axis=0)
        cross = v[:, 0] * nxt[:, 1] - nxt[:, 0] * v[:, 1]
        self._area = 0.5 * float(cross.sum())
        self.center = ((v + nxt) * cross[:, None]).sum(axis=0) / (6.0 * self._area)
        self.local = v - self.center
        self.local.setflags(write=False)

    @property
    def vertices(self) -> np.ndarray:
        return self.local + self.center

    @property
    def volume(self) -> float:
        return self._area

    @property
    def diameter(self) -> float:
        diff = self.local[:, None, :] - self.local[None, :, :]
        return float(np.sqrt(np.max(np.sum(diff * diff, axis=-1))))

    @property
    def inradius(self) -> float:
        p, q = self.local, np.roll(self.local, -1, axis=0)
        e = q - p
        cross = e[:, 0] * -p[:, 1] - e[:, 1] * -p[:, 0]
        return float(np.min(cross / np.linalg.norm(e, axis=1)))

    @property
    def bounding_radius(self) -> float:
        return float(np.max(np.linalg.norm(self.local, axis=1)))

    @property
    def label(self) -> str:
        return f"polygon:{self.source}" if self.source else f"polygon[{self.local.shape[0]}]"

    def _contains_local(self, q):
        p, nxt = self.local, np.roll(self.local, -1, axis=0)
        e = nxt - p
        rel = q[:, None, :] - p[None, :, :]
        cross = e[None, :, 0] * rel[:, :, 1] - e[None, :, 1] * rel[:, :, 0]
        return np.all(cross >= 0.0, axis=1)

    def _sample_local(self, rng, n):
        lo, hi = self.local.min(axis=0), self.local.max(axis=0)
        out = np.empty((n, 2))
        filled, drawn = 0, 0
        rate = self._area / float(np.prod(hi - lo))
        while filled < n:
            if drawn > MAX_REJECTIONS_PER_POINT * n:
                raise GeometryError("polygon rejection sampling exceeded its retry cap")
            batch = int((n - filled) / rate * 1.1) + 16
            cand = lo + (hi - lo) * rng.random((batch, 2))
            drawn += batch
            ok = cand[self._contains_local(cand)][: n - filled]
            out[filled:filled + ok.shape[0]] = ok
            filled += ok.shape[0]
        return out

    def section_measures(self, normals, offsets):
        u, t = _hyperplane_arrays((normals, offsets), 2)
        u = np.atleast_2d(u)
        t = np.broadcast_to(t, u.shape[:1])
        h = u @ self.local.T - t[:, None]                 # (N, k) signed heights
        h_next = np.roll(h, -1, axis=1)
        crossing = (h > 0) != (h_next > 0)
        with np.errstate(invalid="ignore", divide="ignore"):
            lam = np.where(crossing, h / (h - h_next), 0.0)
        # position of each crossing point along the line direction perp(u)
        w = np.column_stack((-u[:, 1], u[:, 0]))
        along = w @ self.local.T
        pos = along + lam * (np.roll(along, -1, axis=1) - along)
        hi = np.where(crossing, pos, -np.inf).max(axis=1)
        lo = np.where(crossing, pos, np.inf).min(axis=1)
        return np.where(crossing.any(axis=1), hi - lo, 0.0)

    def support(self, normals):
        u = np.asarray(normals, dtype=float)
        return np.max(u @ self.local.T, axis=-1)

    def scaled(self, c):
        out = Polygon(self.local * c + self.center)
        out.source = self.source
        return out


# ---------------------------------------------------------------------------
# files and specifiers
# ---------------------------------------------------------------------------

def parse_polygon(text: str, source: str | None = None) -> Polygon:
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not lines or len(lines[0]) != 2 or lines[0][0] != "polygon":
        raise GeometryError("polygon file must start with 'polygon k'")
    k = int(lines[0][1])
    rows = lines[1:]
    if len(rows) != k or any(len(r) != 2 for r in rows):
        raise GeometryError(f"polygon file declares {k} vertices but has {len(rows)} rows")
    return Polygon([[float(x) for x in r] for r in rows], source=source)


def read_polygon(path: str | Path) -> Polygon:
    return parse_polygon(Path(path).read_text(), source=str(path))


def format_polygon(poly: Polygon) -> str:
    rows = [f"{x!r} {y!r}" for x, y in poly.vertices.tolist()]
    return "\n".join([f"polygon {len(rows)}"] + rows) + "\n"


_NAMED = re.compile(r"^(ball|cube)(\d+)$")


def parse_body(spec: str, dim: int | None = None) -> ConvexBody:
    """Build a body from a CLI specifier.

    Accepted: disk, square, ball<d>, cube<d>, ellipse:a,b, polygon:path, and
    bare ball or cube with the dimension taken from ``dim``.
    """
    spec = spec.strip()
    if spec in ("ball", "cube"):
        if dim is None:
            raise ValueError(f"body {spec!r} needs a dimension")
        spec = f"{spec}{dim}"
    if spec == "disk":
        body: ConvexBody = Ball(2)
    elif spec == "square":
        body = Cube(2)
    elif m := _NAMED.match(spec):
        d = int(m.group(2))
        body = Ball(d) if m.group(1) == "ball" else Cube(d)
    elif spec.startswith("ellipse:"):
        try:
            a, b = (float(x) for x in spec[len("ellipse:"):].split(","))
        except ValueError as exc:
            raise ValueError(f"bad ellipse specifier {spec!r}; expected ellipse:a,b") from exc
        body = Ellipse(a, b)
    elif spec.startswith("polygon:"):
        body = read_polygon(spec[len("polygon:"):])
    else:
        raise ValueError(f"unknown body {spec!r}")
    if dim is not None and body.dim != dim:
        raise DimensionMismatchError(f"body {spec!r} has dimension {body.dim}, requested {dim}")
    return body
