"""One-dimensional Gaussian mixtures for target norms and agent beliefs."""

from dataclasses import dataclass, field
import math
from pathlib import Path

import numpy as np
from scipy.special import ndtr

from .errors import ConfigurationError

VARIANCE_FLOOR = 1e-3
WEIGHT_TOL = 1e-9
QUANTILE_ITERATIONS = 60


@dataclass(frozen=True, eq=False)
class GaussianMixture:
    """Mixture ``sum_k w_k N(mean_k, variance_k)``.

    Variances below :data:`VARIANCE_FLOOR` are raised to it and the mixture
    is flagged through ``clamped``.
    """

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    clamped: bool = field(default=False, init=False)

    def __post_init__(self):
        w = np.atleast_1d(np.array(self.weights, dtype=float))
        m = np.atleast_1d(np.array(self.means, dtype=float))
        v = np.atleast_1d(np.array(self.variances, dtype=float))
        if not (w.shape == m.shape == v.shape) or w.ndim != 1 or w.size == 0:
            raise ConfigurationError(
                "mixture needs matching, non-empty weight/mean/variance lists")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(m)) and np.all(np.isfinite(v))):
            raise ConfigurationError("mixture parameters must be finite")
        if np.any(w < 0):
            raise ConfigurationError("mixture weights must be non-negative")
        if abs(w.sum() - 1.0) > WEIGHT_TOL:
            raise ConfigurationError(f"mixture weights sum to {w.sum():.12g}, not 1")
        clamped = bool(np.any(v < VARIANCE_FLOOR))
        v = np.maximum(v, VARIANCE_FLOOR)
        for a in (w, m, v):
            a.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", m)
        object.__setattr__(self, "variances", v)
        object.__setattr__(self, "clamped", clamped)

    @classmethod
    def normalized(cls, weights, means, variances):
        """Build from unnormalised non-negative weights."""
        w = np.asarray(weights, dtype=float)
        return cls(w / w.sum(), means, variances)

    @classmethod
    def single(cls, mean, variance):
        return cls([1.0], [mean], [variance])

    def __eq__(self, other):
        if not isinstance(other, GaussianMixture):
            return NotImplemented
        return (np.array_equal(self.weights, other.weights)
                and np.array_equal(self.means, other.means)
                and np.array_equal(self.variances, other.variances))

    def __len__(self):
        return self.weights.size

    @property
    def stds(self):
        return np.sqrt(self.variances)

    @property
    def mean(self):
        return float(np.dot(self.weights, self.means))

    def shifted(self, delta):
        return GaussianMixture(self.weights, self.means + delta, self.variances)


def density(gmm, x):
    """Mixture density at ``x`` (scalar or array)."""
    x = np.asarray(x, dtype=float)
    z = (x[..., None] - gmm.means) / gmm.stds
    pdf = np.exp(-0.5 * z * z) / (math.sqrt(2.0 * math.pi) * gmm.stds)
    return pdf @ gmm.weights


def cdf(gmm, x):
    x = np.asarray(x, dtype=float)
    return ndtr((x[..., None] - gmm.means) / gmm.stds) @ gmm.weights


def quantile(gmm, p):
    """Inverse CDF by bisection; vectorised over ``p``."""
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0) | (p >= 1)) or not np.all(np.isfinite(p)):
        raise ValueError("quantile probabilities must lie in (0, 1)")
    reach = np.max(np.abs(gmm.means)) + 10.0 * np.max(gmm.stds)
    lo = np.full(p.shape, -reach)
    hi = np.full(p.shape, reach)
    for _ in range(QUANTILE_ITERATIONS):
        mid = 0.5 * (lo + hi)
        below = cdf(gmm, mid) < p
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out = 0.5 * (lo + hi)
    return float(out) if out.ndim == 0 else out


def sample(gmm, n, seed=None):
    """``n`` ordered draws; deterministic for a given seed."""
    if n < 1:
        raise ValueError("sample size must be at least 1")
    rng = np.random.default_rng(seed)
    comp = rng.choice(len(gmm), size=n, p=gmm.weights)
    draws = rng.normal(gmm.means[comp], gmm.stds[comp])
    return np.sort(draws)


def format_mixture(gmm, comment=None):
    lines = []
    if comment:
        lines.extend(f"# {line}" for line in comment.splitlines())
    lines.append("# weight mean variance")
    for w, m, v in zip(gmm.weights, gmm.means, gmm.variances):
        lines.append(f"{w:.17g} {m:.17g} {v:.17g}")
    return "\n".join(lines) + "\n"


def parse_mixture(text, source="<string>"):
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ConfigurationError(f"{source}:{lineno}: expected 'weight mean variance'")
        try:
            rows.append([float(s) for s in parts])
        except ValueError as exc:
            raise ConfigurationError(f"{source}:{lineno}: {exc}") from None
    if not rows:
        raise ConfigurationError(f"{source}: no mixture components")
    w, m, v = np.array(rows).T
    try:
        return GaussianMixture(w, m, v)
    except ConfigurationError as exc:
        raise ConfigurationError(f"{source}: {exc}") from None


def read_mixture(path):
    path = Path(path)
    return parse_mixture(path.read_text(), str(path))


def write_mixture(path, gmm, comment=None):
    Path(path).write_text(format_mixture(gmm, comment))
