"""Closed-form constants and Monte-Carlo integral geometry.

Hyperplanes are measured with the rigid-motion invariant measure normalized
so that the hyperplanes meeting the unit ball have mass 2.  In (u, t)
coordinates, with u on the unit sphere and t >= 0 the distance to the
origin, that is dmu = 2 / (d kappa_d) dt du.  Drawing u uniformly and t
uniformly on [0, R] therefore gives E[2R f(H)] = integral of f over the
hyperplanes at distance < R.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bodies import Ball, ConvexBody, Cube
from .rng import RngStream, as_stream
from .stats import EstimateSummary, estimate

BLOCK = 1 << 16
SCHEMA_VERSION = "1"


def kappa(d: float) -> float:
    """Volume of the d-dimensional unit ball."""
    if d < 1:
        raise ValueError("kappa needs d >= 1")
    return math.exp(0.5 * d * math.log(math.pi) - math.lgamma(0.5 * d + 1.0))


def beta_fn(a: float, b: float) -> float:
    if a <= 0 or b <= 0:
        raise ValueError("beta function needs positive arguments")
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


def planar_deg_constant() -> float:
    """Asymptotic lower constant for the maximal planar degree."""
    return 0.5 * math.exp(-1.5)


def appendix_bound(d: int, R: float) -> float:
    """Closed-form bound R d(d-1) k_d k_{d-1} / (d-2) B(d/2, 1/2) for d >= 3."""
    if d < 3:
        raise ValueError("the pair-intersection bound needs d >= 3")
    return R * d * (d - 1) * kappa(d) * kappa(d - 1) / (d - 2) * beta_fn(d / 2.0, 0.5)


@dataclass(frozen=True)
class ConstantTable:
    dim: int
    kappa: float
    lower_c: float
    upper_c: float
    section_ineq_c: float
    new_ineq_c: float
    planar_deg_c: float | None
    lemma1_c: float
    lemma1_exact: bool

    def appendix_bound(self, R: float = 1.0) -> float:
        return appendix_bound(self.dim, R)

    def to_dict(self) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "dim": self.dim,
            "kappa": self.kappa,
            "lower_c": self.lower_c,
            "upper_c": self.upper_c,
            "section_ineq_c": self.section_ineq_c,
            "new_ineq_c": self.new_ineq_c,
            "planar_deg_c": self.planar_deg_c,
            "lemma1_c": self.lemma1_c,
            "lemma1_c_kind": "exact" if self.lemma1_exact else "upper_bound",
        }
        out["appendix_bound_R1"] = self.appendix_bound(1.0) if self.dim >= 3 else None
        return out


def theorem2_constants(d: int) -> ConstantTable:
    """Limits and bounds for n^-d E N_triangle and related constants."""
    if d < 2:
        raise ValueError("constants are defined for d >= 2")
    kd = kappa(d)
    # classical bound on the (d+1)-st section moment, relative to vol^d
    ineq = math.exp((d + 1) * math.log(kappa(d - 1)) + math.log(kappa(d * d))
                    - d * math.log(kd) - math.log(kappa((d - 1) * (d + 1))))
    return ConstantTable(
        dim=d,
        kappa=kd,
        lower_c=2.0 / math.factorial(d),
        upper_c=d / (d + 1) * kd * ineq,
        section_ineq_c=ineq,
        new_ineq_c=2.0 * (d + 1) / (math.factorial(d) * d * kd),
        planar_deg_c=planar_deg_constant() if d == 2 else None,
        lemma1_c=kd ** (d - 1) / math.factorial(d),
        lemma1_exact=d == 2,
    )


# ---------------------------------------------------------------------------
# hyperplanes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Hyperplane:
    """H = {x : <normal, x> = offset} with the Monte-Carlo weight of its draw."""

    normal: np.ndarray
    offset: float
    mc_weight: float = 1.0

    def __post_init__(self):
        if abs(float(np.linalg.norm(self.normal)) - 1.0) > 1e-12:
            raise ValueError("hyperplane normal must be a unit vector")
        if self.offset < 0:
            raise ValueError("hyperplane offset must be nonnegative")


def random_directions(rng: RngStream, count: int, d: int) -> np.ndarray:
    g = rng.normal((count, d))
    return g / np.linalg.norm(g, axis=1)[:, None]


def sample_hyperplanes(R: float, d: int, rng, count: int) -> tuple[np.ndarray, np.ndarray, float]:
    """Unit normals (count, d), offsets in [0, R] and the common weight 2R."""
    if not R > 0:
        raise ValueError("R must be positive")
    stream = as_stream(rng)
    normals = random_directions(stream, count, d)
    offsets = stream.uniform(0.0, R, count)
    return normals, offsets, 2.0 * R


def sample_hyperplane(R: float, d: int, rng) -> Hyperplane:
    normals, offsets, w = sample_hyperplanes(R, d, rng, 1)
    return Hyperplane(normals[0], float(offsets[0]), w)


def _blocks(samples: int):
    start = 0
    index = 0
    while start < samples:
        size = min(BLOCK, samples - start)
        yield index, size
        start += size
        index += 1


def _mc(samples: int, rng, draw) -> tuple[np.ndarray, int]:
    """Concatenate per-block values; block b draws from substream b."""
    if samples < 1:
        raise ValueError("need at least one sample")
    stream = as_stream(rng)
    values = np.concatenate([draw(stream.substream(b), size) for b, size in _blocks(samples)])
    return values, stream.seed


def hitting_measure(K: ConvexBody, samples: int, rng, R: float | None = None) -> EstimateSummary:
    """MC estimate of mu({H : H meets K})."""
    R = K.bounding_radius if R is None else float(R)

    def draw(s, size):
        u, t, w = sample_hyperplanes(R, K.dim, s, size)
        return w * (t <= K.support(u))

    values, seed = _mc(samples, rng, draw)
    return estimate(values, seed=seed)


def section_integral(K: ConvexBody, m: int, samples: int, rng) -> EstimateSummary:
    """MC estimate of the m-th moment of (d-1)-volumes of hyperplane sections."""
    if m < 1:
        raise ValueError("exponent m must be at least 1")
    R = K.bounding_radius

    def draw(s, size):
        u, t, w = sample_hyperplanes(R, K.dim, s, size)
        return w * K.section_measures(u, t) ** m

    values, seed = _mc(samples, rng, draw)
    return estimate(values, seed=seed)


def section_integral_closed_form(K: ConvexBody, m: int) -> float | None:
    """Known values: every ball, and every planar body for m = 3."""
    d = K.dim
    if isinstance(K, Ball):
        return kappa(d - 1) ** m * K.radius ** ((d - 1) * m + 1) * beta_fn(0.5, (d - 1) * m / 2.0 + 1.0)
    if d == 2 and m == 3:
        return 3.0 / math.pi * K.volume ** 2
    return None


def _rhs_factor(K: ConvexBody) -> float:
    d = K.dim
    return d * kappa(d) / (d + 1) * K.volume ** (-d)


def theorem2_limit_rhs(K: ConvexBody, samples: int, rng) -> EstimateSummary:
    """lim n^-d E N_triangle = d k_d / (d+1) vol^-d * section moment of order d+1."""
    raw = section_integral(K, K.dim + 1, samples, rng)
    f = _rhs_factor(K)
    return EstimateSummary(mean=f * raw.mean, stderr=f * raw.stderr,
                           ci95=(f * raw.ci95[0], f * raw.ci95[1]),
                           trials=raw.trials, seed=raw.seed)


def theorem2_limit_closed_form(K: ConvexBody) -> float | None:
    if K.dim == 2:
        return 2.0
    if isinstance(K, Ball):
        return theorem2_constants(K.dim).upper_c
    return None


# ---------------------------------------------------------------------------
# short bases
# ---------------------------------------------------------------------------

def sample_ball_points(rng: RngStream, count: int, d: int) -> np.ndarray:
    g = random_directions(rng, count, d)
    return g * (rng.random(count) ** (1.0 / d))[:, None]


def estimate_cd(d: int, samples: int, rng) -> EstimateSummary:
    """c(d) = (d!)^-1 * volume of {(y_1..y_{d-1}) in (B^d)^{d-1} : |y_i - y_j| <= 1}."""
    if d < 2:
        raise ValueError("c(d) needs d >= 2")
    scale = kappa(d) ** (d - 1) / math.factorial(d)

    def draw(s, size):
        pts = sample_ball_points(s, size * (d - 1), d).reshape(size, d - 1, d)
        ok = np.ones(size, dtype=bool)
        for i in range(d - 1):
            for j in range(i + 1, d - 1):
                diff = pts[:, i] - pts[:, j]
                ok &= np.einsum("ij,ij->i", diff, diff) <= 1.0
        return scale * ok

    values, seed = _mc(samples, rng, draw)
    return estimate(values, seed=seed)


def lemma1_limit(d: int, gamma: float, vol: float, c: float | None = None,
                 samples: int = 1 << 20, rng=0) -> float:
    """lim E N_{gamma n} = c(d) gamma^-d vol^-(d-1).

    c(2) = pi/2 exactly; for d >= 3 the caller's c is used, or c(d) is
    estimated by Monte Carlo.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if vol <= 0:
        raise ValueError("volume must be positive")
    if c is None:
        c = math.pi / 2.0 if d == 2 else estimate_cd(d, samples, rng).mean
    return c * gamma ** (-d) * vol ** (-(d - 1))


# ---------------------------------------------------------------------------
# pairs of hyperplanes
# ---------------------------------------------------------------------------

def _flat_hits(K: ConvexBody, u1, t1, u2, t2, c) -> np.ndarray:
    """Does the (d-2)-flat H1 ∩ H2 meet K (coordinates relative to K's center)?"""
    if isinstance(K, Ball):
        # squared norm of the flat's closest point to the origin
        dist2 = (t1 * t1 - 2.0 * c * t1 * t2 + t2 * t2) / (1.0 - c * c)
        return dist2 <= K.radius ** 2
    if isinstance(K, Cube) and K.dim == 3:
        a = (t1 - c * t2) / (1.0 - c * c)
        b = (t2 - c * t1) / (1.0 - c * c)
        x0 = a[:, None] * u1 + b[:, None] * u2
        w = np.cross(u1, u2)
        half = 0.5 * K.side
        lo = np.full(len(t1), -np.inf)
        hi = np.full(len(t1), np.inf)
        ok = np.ones(len(t1), dtype=bool)
        for i in range(3):
            wi, xi = w[:, i], x0[:, i]
            flat = np.abs(wi) < 1e-300
            ok &= ~flat | (np.abs(xi) <= half)
            with np.errstate(divide="ignore", invalid="ignore"):
                s1 = (-half - xi) / wi
                s2 = (half - xi) / wi
            lo = np.where(flat, lo, np.maximum(lo, np.minimum(s1, s2)))
            hi = np.where(flat, hi, np.minimum(hi, np.maximum(s1, s2)))
        return ok & (lo <= hi)
    raise NotImplementedError(f"pair hit test is implemented for balls and the 3-cube, not {K.label}")


def appendix_I(d: int, R: float, K: ConvexBody, samples: int, rng) -> tuple[EstimateSummary, float]:
    """MC estimate of the pair integral of sin^-2(angle) over hyperplanes meeting in K.

    Returns the estimate and the closed-form bound.  The integrand has
    infinite variance, so the reported stderr is only a rough guide.
    """
    if d < 3:
        raise ValueError("the pair-intersection integral needs d >= 3")
    if K.dim != d:
        raise ValueError(f"body has dimension {K.dim}, expected {d}")
    if not R >= K.bounding_radius * (1 - 1e-12):
        raise ValueError("K must lie inside R B^d")
    weight = (2.0 * R) ** 2

    def draw(s, size):
        u1, t1, _ = sample_hyperplanes(R, d, s, size)
        u2, t2, _ = sample_hyperplanes(R, d, s, size)
        c = np.einsum("ij,ij->i", u1, u2)
        sin2 = 1.0 - c * c
        # near-parallel pairs are redrawn
        bad = np.flatnonzero(sin2 < 1e-24)
        while bad.size:
            u2[bad], t2[bad], _ = sample_hyperplanes(R, d, s, bad.size)
            c[bad] = np.einsum("ij,ij->i", u1[bad], u2[bad])
            sin2[bad] = 1.0 - c[bad] ** 2
            bad = bad[sin2[bad] < 1e-24]
        hit = _flat_hits(K, u1, t1, u2, t2, c)
        return np.where(hit, weight / sin2, 0.0)

    values, seed = _mc(samples, rng, draw)
    return estimate(values, seed=seed), appendix_bound(d, R)


def result_json(quantity: str, K: ConvexBody, samples: int, summary: EstimateSummary,
                closed_form: float | None, **extra) -> dict:
    out = {
        "schema_version": SCHEMA_VERSION,
        "quantity": quantity,
        "d": K.dim,
        "body": K.label,
        "samples": samples,
        "seed": summary.seed,
        "mean": summary.mean,
        "stderr": summary.stderr,
        "ci95": list(summary.ci95),
        "closed_form": closed_form,
    }
    out.update(extra)
    return out
