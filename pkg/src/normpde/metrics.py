"""Wasserstein distances and convergence records."""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DegenerateWeightsError
from .gmm import quantile, sample

DEFAULT_RESOLUTION = 1024

METRICS_COLUMNS = ("time", "d_avg", "mass", "cluster_count", "mu_min", "mu_mean", "mu_max",
                   "sigma_min", "sigma_mean", "sigma_max", "clip_events")


@dataclass(frozen=True)
class MetricsRecord:
    time: float
    d_avg: float
    mass: float
    cluster_count: int
    mu_min: float
    mu_mean: float
    mu_max: float
    sigma_min: float
    sigma_mean: float
    sigma_max: float
    clip_events: int

    def row(self):
        return tuple(getattr(self, c) for c in METRICS_COLUMNS)


def midpoint_levels(n):
    if n < 16:
        raise ValueError("Wasserstein resolution must be at least 16")
    return (np.arange(n) + 0.5) / n


def wasserstein_1d(a, b, n=DEFAULT_RESOLUTION, sampled=False, seed=None):
    """W1 distance between two mixtures.

    By default this matches quantiles at the ``n`` mid-point levels, which is
    the deterministic limit of averaging ``|x_(j) - y_(j)|`` over ordered
    samples.  ``sampled=True`` draws ``n`` ordered samples from each instead.
    """
    if sampled:
        rng = np.random.default_rng(seed)
        sa, sb = rng.integers(0, 2**63 - 1, size=2)
        return float(np.mean(np.abs(sample(a, n, int(sa)) - sample(b, n, int(sb)))))
    p = midpoint_levels(n)
    return float(np.mean(np.abs(quantile(a, p) - quantile(b, p))))


class QuantileCache:
    """Memoises mid-point quantiles of mixtures reused across many distances."""

    def __init__(self, n=DEFAULT_RESOLUTION):
        self.n = n
        self.levels = midpoint_levels(n)
        self._store = {}

    def __call__(self, gmm):
        key = id(gmm)
        hit = self._store.get(key)
        if hit is None or hit[0] is not gmm:
            hit = (gmm, quantile(gmm, self.levels))
            self._store[key] = hit
        return hit[1]


def weighted_avg_distance(field, sinps, target, n=DEFAULT_RESOLUTION, cache=None):
    """Density-weighted mean W1 between tracked agents' beliefs and ``target``."""
    cache = cache or QuantileCache(n)
    nodes = sinps.nodes
    w = field.values[nodes]
    total = w.sum()
    if not total > 0:
        raise DegenerateWeightsError("tracked agents carry no density")
    qt = cache(target)
    d = np.array([np.mean(np.abs(cache(b) - qt)) for b in sinps.beliefs])
    return float(np.dot(w, d) / total)


def field_quantiles(field, levels):
    """Quantiles of the normalised density with a cell-wise linear CDF."""
    x = field.x
    P = np.clip(field.values, 0.0, None)
    cells = 0.5 * (P[1:] + P[:-1]) * np.diff(x)
    mass = cells.sum()
    if not mass > 0:
        raise DegenerateWeightsError("field has zero mass")
    F = np.concatenate([[0.0], np.cumsum(cells) / mass])
    # invert inside the first cell whose CDF reaches the level; empty cells
    # never qualify, so flat stretches of the CDF are skipped
    j = np.clip(np.searchsorted(F, levels, side="left"), 1, x.size - 1)
    frac = (levels - F[j - 1]) / (F[j] - F[j - 1])
    return x[j - 1] + frac * (x[j] - x[j - 1])


def field_vs_target_distance(field, target, n=DEFAULT_RESOLUTION):
    """W1 between the normalised population density and ``target``."""
    p = midpoint_levels(n)
    return float(np.mean(np.abs(field_quantiles(field, p) - quantile(target, p))))


def kernel_summary(kernel):
    mu = np.atleast_1d(kernel.mu)
    sigma = np.atleast_1d(kernel.sigma)
    return (float(mu.min()), float(mu.mean()), float(mu.max()),
            float(sigma.min()), float(sigma.mean()), float(sigma.max()))


def make_record(time, field_mass, clusters, kernel, clip_events, d_avg=math.nan):
    return MetricsRecord(float(time), float(d_avg), float(field_mass), int(clusters),
                         *kernel_summary(kernel), int(clip_events))
