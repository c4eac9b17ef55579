"""Summary statistics for Monte-Carlo estimates."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
from scipy import stats

Z95 = 1.96


@dataclass(frozen=True)
class EstimateSummary:
    mean: float
    stderr: float
    ci95: tuple[float, float]
    trials: int
    seed: int | None = None
    n: int | None = None
    normalizer: str | None = None

    def to_dict(self) -> dict:
        out = asdict(self)
        out["ci95"] = list(self.ci95)
        return out

    def covers(self, value: float) -> bool:
        return self.ci95[0] <= value <= self.ci95[1]


def summarize(samples: Sequence[float]) -> tuple[float, float, tuple[float, float]]:
    """Sample mean, standard error and normal-approximation 95% interval.

    The mean uses math.fsum over the sorted values so the result does not
    depend on the order of the input.
    """
    x = np.sort(np.asarray(samples, dtype=float).reshape(-1))
    if x.size == 0:
        raise ValueError("cannot summarize an empty sample")
    mean = math.fsum(x) / x.size
    if x.size > 1:
        var = math.fsum((x - mean) ** 2) / (x.size - 1)
        stderr = math.sqrt(var / x.size)
    else:
        stderr = 0.0
    return mean, stderr, (mean - Z95 * stderr, mean + Z95 * stderr)


def estimate(samples: Sequence[float], **meta) -> EstimateSummary:
    mean, stderr, ci = summarize(samples)
    return EstimateSummary(mean=mean, stderr=stderr, ci95=ci, trials=len(samples), **meta)


def tv_distance(hist: Sequence[int], lam: float) -> float:
    """Total variation between an empirical histogram and Poisson(lam).

    ``hist[j]`` counts observations equal to j.  The Poisson mass beyond the
    histogram support enters as one tail term.
    """
    h = np.asarray(hist, dtype=float)
    if np.any(h < 0):
        raise ValueError("histogram counts must be nonnegative")
    total = h.sum()
    if total <= 0:
        raise ValueError("histogram is empty")
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    j = np.arange(h.size)
    pmf = stats.poisson.pmf(j, lam) if lam > 0 else (j == 0).astype(float)
    tail = float(stats.poisson.sf(h.size - 1, lam)) if lam > 0 else 0.0
    tv = 0.5 * (float(np.abs(h / total - pmf).sum()) + tail)
    return min(max(tv, 0.0), 1.0)
