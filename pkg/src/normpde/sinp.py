"""Per-position subjective norm perceptions (SINP agents).

Each tracked node holds a Gaussian-mixture belief about the local norm.  It
is built from the peaks of the density inside a window around the node:
normalised peak heights become weights, peak positions become means and
``(FWHM/2)^2`` (floored) become variances.  Updates apply the same mapping to
a Silverman-bandwidth KDE of density-weighted samples from the window, and
replace the previous belief outright.
"""

from dataclasses import dataclass
import math

import numpy as np

from .core import DEFAULT_MIN_REL_HEIGHT, find_peaks_1d
from .errors import DegenerateWindowError, DomainError
from .gmm import VARIANCE_FLOOR, GaussianMixture

WINDOW_FACTOR = 5.0
SILVERMAN_FACTOR = 1.06


@dataclass(frozen=True)
class SinpAgent:
    node_index: int
    belief: GaussianMixture
    window_radius: float

    def __post_init__(self):
        if not self.window_radius > 0:
            raise ValueError("window_radius must be positive")


@dataclass(frozen=True)
class SinpPopulation:
    agents: tuple
    stride: int = 4

    def __post_init__(self):
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        object.__setattr__(self, "agents", tuple(self.agents))

    @property
    def nodes(self):
        return np.array([a.node_index for a in self.agents], dtype=int)

    @property
    def beliefs(self):
        return [a.belief for a in self.agents]

    def __len__(self):
        return len(self.agents)


def window_radius(sigma_init, mu_init):
    return WINDOW_FACTOR * max(sigma_init, abs(mu_init))


def window_slice(grid, node, radius):
    """Index slice of the nodes within ``radius`` of node ``node``."""
    if not 0 <= node < grid.n_points:
        raise DomainError(f"node {node} outside grid of {grid.n_points} nodes")
    reach = int(math.floor(radius / grid.dx + 1e-9))
    return slice(max(node - reach, 0), min(node + reach, grid.n_points - 1) + 1)


def peaks_to_mixture(x, curve, min_rel_height=DEFAULT_MIN_REL_HEIGHT):
    """Map the peaks of ``curve`` onto a mixture (shared by init and update).

    Without peaks a single floor-variance component is placed at the
    (leftmost) maximum of the curve.
    """
    peaks = find_peaks_1d(x, curve, min_rel_height)
    if len(peaks) == 0:
        i = int(np.argmax(curve))
        return GaussianMixture([1.0], [x[i]], [VARIANCE_FLOOR])
    variances = np.maximum((0.5 * peaks.fwhm) ** 2, VARIANCE_FLOOR)
    return GaussianMixture.normalized(peaks.heights, peaks.positions, variances)


def sinp_initialize(field, node, sigma_init, mu_init, min_rel_height=DEFAULT_MIN_REL_HEIGHT):
    """Initial belief of the agent at ``node`` from the peaks of ``field`` nearby."""
    r = window_radius(sigma_init, mu_init)
    sl = window_slice(field.grid, node, r)
    belief = peaks_to_mixture(field.x[sl], field.values[sl], min_rel_height)
    return SinpAgent(int(node), belief, r)


def weighted_sample(field, node, radius, n, seed=None):
    """``n`` window node positions drawn with probability proportional to ``P``."""
    if n < 2:
        raise ValueError("need at least two samples")
    sl = window_slice(field.grid, node, radius)
    w = np.clip(field.values[sl], 0.0, None)
    total = w.sum()
    if not total > 0:
        raise DegenerateWindowError(f"window around node {node} carries no density")
    rng = np.random.default_rng(seed)
    picks = rng.choice(w.size, size=n, p=w / total)
    return field.x[sl][picks]


def silverman_bandwidth(data):
    data = np.asarray(data, dtype=float)
    return SILVERMAN_FACTOR * np.std(data, ddof=1) * data.size ** (-0.2)


def kde(data, x, h):
    """Gaussian kernel density estimate of ``data`` evaluated at ``x``."""
    values, counts = np.unique(np.asarray(data, dtype=float), return_counts=True)
    z = (np.asarray(x, dtype=float)[:, None] - values[None, :]) / h
    return (np.exp(-0.5 * z * z) @ counts) / (counts.sum() * h * math.sqrt(2.0 * math.pi))


def sinp_update(agent, data, grid, min_rel_height=DEFAULT_MIN_REL_HEIGHT):
    """Replace the agent's belief with the peak mixture of a KDE of ``data``.

    Degenerate samples (fewer than two points or zero spread) leave the
    belief unchanged.
    """
    data = np.asarray(data, dtype=float)
    if data.size < 2 or not np.std(data, ddof=1) > 0:
        return agent
    sl = window_slice(grid, agent.node_index, agent.window_radius)
    x = grid.x[sl]
    curve = kde(data, x, silverman_bandwidth(data))
    return SinpAgent(agent.node_index, peaks_to_mixture(x, curve, min_rel_height),
                     agent.window_radius)


def initialize_population(field, sigma_init, mu_init, stride=4,
                          min_rel_height=DEFAULT_MIN_REL_HEIGHT):
    nodes = range(0, field.grid.n_points, stride)
    agents = [sinp_initialize(field, i, sigma_init, mu_init, min_rel_height) for i in nodes]
    return SinpPopulation(agents, stride)


def update_population(population, field, n=500, seed=0, update_index=0,
                      min_rel_height=DEFAULT_MIN_REL_HEIGHT):
    """Resample every agent from ``field``; seeds derive from (seed, update, node)."""
    agents = []
    for agent in population.agents:
        sl = window_slice(field.grid, agent.node_index, agent.window_radius)
        if not np.any(field.values[sl] > 0):
            agents.append(agent)
            continue
        data = weighted_sample(field, agent.node_index, agent.window_radius, n,
                               seed=[seed, update_index, agent.node_index])
        agents.append(sinp_update(agent, data, field.grid, min_rel_height))
    return SinpPopulation(agents, population.stride)
