"""Seeded Monte-Carlo sweeps over the sample size n.

Trial t at the i-th sample size draws its points from the stream
RngStream(seed, mix(i, t)), so every instance is fixed by (seed, i, t) alone
and results do not depend on execution order or worker count.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bodies import MAX_GP_REDRAWS, ConvexBody
from .enumeration import (
    count_empty_simplices,
    deg_k_max,
    empty_simplex_array,
    n_gamma_count,
)
from .geom import GeneralPositionError, PointSet
from .integrals import (
    SCHEMA_VERSION,
    lemma1_limit,
    planar_deg_constant,
    theorem2_limit_closed_form,
)
from .rng import RngStream, mix
from .stats import EstimateSummary, estimate, tv_distance

QUANTITIES = ("empty_count", "max_degree", "typical_degree", "deg1_profile",
              "n_gamma", "poisson_gof")
NEEDS_K = ("max_degree", "typical_degree")
N_CAP = {2: 2000, 3: 80}
N_CAP_HIGH_DIM = 30

# the widened acceptance band and the narrower published range for E deg_2 / n
REMARK_BAND = (0.70, 0.95)


def normalize_quantity(name: str) -> str:
    q = name.strip().lower().replace("-", "_")
    if q not in QUANTITIES:
        raise ValueError(f"unknown quantity {name!r}; choose from {', '.join(QUANTITIES)}")
    return q


def n_cap(d: int) -> int:
    return N_CAP.get(d, N_CAP_HIGH_DIM)


def worker_count(requested: int | None = None) -> int:
    env = os.environ.get("EMPTYSTAR_THREADS")
    cap = max(1, int(env)) if env else (os.cpu_count() or 1)
    return max(1, min(requested or cap, cap))


def trial_stream(seed: int, n_index: int, trial: int) -> RngStream:
    return RngStream(seed, mix(n_index, trial))


@dataclass
class ExperimentConfig:
    quantity: str
    body: ConvexBody
    n_values: list[int]
    trials: int
    seed: int
    k: int | None = None
    gamma: float = 1.0
    threads: int | None = None

    def __post_init__(self):
        self.quantity = normalize_quantity(self.quantity)
        self.n_values = [int(n) for n in self.n_values]
        d = self.dim
        if not self.n_values:
            raise ValueError("need at least one n")
        if any(b <= a for a, b in zip(self.n_values, self.n_values[1:])):
            raise ValueError("n values must be strictly increasing")
        if self.n_values[0] < d + 1:
            raise ValueError(f"every n must be at least d+1 = {d + 1}")
        if self.n_values[-1] > n_cap(d):
            raise ValueError(f"n = {self.n_values[-1]} exceeds the cap {n_cap(d)} for d = {d}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.quantity in NEEDS_K:
            if self.k is None:
                raise ValueError(f"{self.quantity} needs k")
            if not 1 <= self.k <= d:
                raise ValueError(f"k must be in 1..{d}, got {self.k}")
        elif self.quantity != "deg1_profile":
            self.k = None
        else:
            self.k = 1
        if self.quantity in ("n_gamma", "poisson_gof") and not self.gamma > 0:
            raise ValueError("gamma must be positive")

    @property
    def dim(self) -> int:
        return self.body.dim

    @property
    def label(self) -> str:
        return f"{self.quantity}({self.k})" if self.k is not None and self.quantity in NEEDS_K else self.quantity

    def normalizer(self) -> str:
        d, q, k = self.dim, self.quantity, self.k
        if q == "empty_count":
            return f"n^{d}"
        if q in ("max_degree", "deg1_profile"):
            return f"n^{normalizer_exponent(d, k)}"
        return "1"

    def to_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "k": self.k,
            "body": self.body.label,
            "d": self.dim,
            "n_values": self.n_values,
            "trials": self.trials,
            "gamma": self.gamma if self.quantity in ("n_gamma", "poisson_gof") else None,
            "seed": self.seed,
        }


def normalizer_exponent(d: int, k: int) -> int:
    """deg_d is of order n, deg_k of order n^(d-k) for k < d."""
    return 1 if k == d else d - k


@dataclass
class TrialRecord:
    n: int
    trial: int
    value: float
    raw: float


@dataclass
class PoissonGof:
    n: int
    mean: float
    tv_distance: float
    p_zero_empirical: float
    p_zero_predicted: float
    histogram: list[int]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "mean": self.mean,
            "tv_distance": self.tv_distance,
            "p_zero_empirical": self.p_zero_empirical,
            "p_zero_predicted": self.p_zero_predicted,
            "histogram": self.histogram,
        }


@dataclass
class SweepResult:
    config: ExperimentConfig
    records: list[TrialRecord]
    summaries: list[EstimateSummary]
    target: float | None = None
    gof: list[PoissonGof] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def values(self, n: int) -> np.ndarray:
        return np.array([r.value for r in self.records if r.n == n])

    def raw_values(self, n: int) -> np.ndarray:
        return np.array([r.raw for r in self.records if r.n == n])

    def summary(self, n: int) -> EstimateSummary:
        return next(s for s in self.summaries if s.n == n)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["quantity", "d", "body", "n", "trial", "seed", "value"])
        c = self.config
        for r in self.records:
            w.writerow([c.label, c.dim, c.body.label, r.n, r.trial, c.seed, repr(float(r.value))])
        return buf.getvalue()

    def to_dict(self) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "config": self.config.to_dict(),
            "normalizer": self.config.normalizer(),
            "summaries": [s.to_dict() for s in self.summaries],
            "closed_form_target": self.target,
        }
        if self.gof:
            out["poisson_gof"] = [g.to_dict() for g in self.gof]
        if self.notes:
            out["notes"] = self.notes
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def draw_instance(body: ConvexBody, stream: RngStream, n: int, check: str = "enumerate"):
    """Points for one trial; degenerate draws are redrawn from the same stream.

    ``check`` is "none" (raw array, no validation), "enumerate" (the
    enumerator validates general position while it runs) or
    "general_position" (explicit exact check, no enumeration).
    """
    for _ in range(MAX_GP_REDRAWS):
        pts = body.sample_points(stream, n)
        if check == "none":
            return pts
        try:
            if check == "enumerate":
                ps = PointSet(pts)
                empty_simplex_array(ps)
                return ps
            return PointSet(pts, check_general_position=True)
        except GeneralPositionError:
            continue
    raise GeneralPositionError((), f"no general-position draw after {MAX_GP_REDRAWS} attempts")


def generate_points(body: ConvexBody, n: int, seed: int) -> PointSet:
    """The instance a one-trial sweep at this n and seed would analyze."""
    return draw_instance(body, trial_stream(seed, 0, 0), n, check="general_position")


def _measure(config: ExperimentConfig, n: int, X) -> tuple[float, float]:
    """(normalized value, raw value) of the configured quantity on one instance."""
    q, d, k = config.quantity, config.dim, config.k
    if q in ("n_gamma", "poisson_gof"):
        v = float(n_gamma_count(X, config.gamma))
        return v, v
    if q == "empty_count":
        total = float(empty_simplex_array(X).shape[0])
        return total / n ** d, total
    if q == "typical_degree":
        total = empty_simplex_array(X).shape[0]
        v = math.comb(d + 1, k) * total / math.comb(n, k)
        return v, v
    if q == "deg1_profile":
        report = count_empty_simplices(X)
        deg = float(report.per_vertex_degree.max())
        return deg / n ** normalizer_exponent(d, 1), deg
    deg = float(deg_k_max(X, k)[0])
    return deg / n ** normalizer_exponent(d, k), deg


def _target(config: ExperimentConfig) -> float | None:
    q, d, body = config.quantity, config.dim, config.body
    if q == "empty_count":
        return theorem2_limit_closed_form(body)
    if q == "typical_degree" and d == 2 and config.k == 2:
        return 12.0
    if q in ("n_gamma", "poisson_gof") and d == 2:
        return lemma1_limit(2, config.gamma, body.volume)
    return None


def _gof(n: int, values: np.ndarray) -> PoissonGof:
    counts = values.astype(np.int64)
    mean = float(np.mean(counts))
    tally = Counter(counts.tolist())
    hist = [tally.get(j, 0) for j in range(int(counts.max()) + 1)]
    return PoissonGof(n=n, mean=mean, tv_distance=tv_distance(hist, mean),
                      p_zero_empirical=hist[0] / counts.size,
                      p_zero_predicted=math.exp(-mean), histogram=hist)


def run_sweep_full(config: ExperimentConfig) -> SweepResult:
    check = "none" if config.quantity in ("n_gamma", "poisson_gof") else "enumerate"

    def task(job):
        i, n, t = job
        X = draw_instance(config.body, trial_stream(config.seed, i, t), n, check)
        value, raw = _measure(config, n, X)
        return TrialRecord(n=n, trial=t, value=value, raw=raw)

    jobs = [(i, n, t) for i, n in enumerate(config.n_values) for t in range(config.trials)]
    workers = worker_count(config.threads)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            records = list(pool.map(task, jobs))
    else:
        records = [task(j) for j in jobs]

    summaries, gof, notes = [], [], []
    for n in config.n_values:
        values = np.array([r.value for r in records if r.n == n])
        summaries.append(estimate(values, seed=config.seed, n=n, normalizer=config.normalizer()))
        if config.quantity == "poisson_gof":
            gof.append(_gof(n, values))
    if config.quantity == "max_degree" and config.dim == 2 and config.k == 2:
        lo, hi = REMARK_BAND
        for s in summaries:
            if not lo <= s.mean <= hi:
                notes.append(f"n={s.n}: mean deg_2/n = {s.mean!r} lies outside [{lo}, {hi}]")
            if s.mean < planar_deg_constant() or s.mean > 1.0:
                notes.append(f"n={s.n}: mean deg_2/n = {s.mean!r} outside [1/2 e^-3/2, 1]")
    return SweepResult(config=config, records=records, summaries=summaries,
                       target=_target(config), gof=gof, notes=notes)


def run_sweep(config: ExperimentConfig) -> list[EstimateSummary]:
    return run_sweep_full(config).summaries


def poisson_gof(config: ExperimentConfig) -> list[PoissonGof]:
    """Distribution of N_{gamma n} over trials against Poisson(empirical mean), per n."""
    if config.quantity != "poisson_gof":
        config = ExperimentConfig(**{**config.__dict__, "quantity": "poisson_gof"})
    return run_sweep_full(config).gof
