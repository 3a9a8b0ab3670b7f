"""Grid and population-field types, mass accounting and peak detection.

The opinion space is a uniform node grid ``x_i = x_min + i*dx``.  Two
topologies are supported:

* walls (default) -- nodes include both end points and the quadrature
  weights are trapezoidal, i.e. the boundary nodes own half cells.  This is
  the control-volume layout used by the conservative stepper.  Nonlocal
  operators see the density beyond a wall either mirrored about the wall
  node (``extension="mirror"``, the default) or held at its boundary value
  (``extension="clamp"``).
* periodic -- the node at ``x_max + dx`` is identified with ``x_min`` so the
  period is ``n_points*dx`` and every node owns a full cell.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

DEFAULT_MIN_REL_HEIGHT = 0.10
DEFAULT_MAX_WIDTH_FRACTION = 0.25
EXTENSIONS = ("mirror", "clamp")


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    n_points: int
    periodic: bool = False
    extension: str = "mirror"

    def __post_init__(self):
        if not np.isfinite(self.x_min) or not np.isfinite(self.x_max):
            raise ConfigurationError("grid bounds must be finite")
        if self.x_max <= self.x_min:
            raise ConfigurationError("grid requires x_max > x_min")
        if int(self.n_points) != self.n_points or self.n_points < 8:
            raise ConfigurationError("grid requires an integer n_points >= 8")
        if self.extension not in EXTENSIONS:
            raise ConfigurationError(f"grid extension must be one of {EXTENSIONS}")
        object.__setattr__(self, "n_points", int(self.n_points))
        object.__setattr__(self, "x_min", float(self.x_min))
        object.__setattr__(self, "x_max", float(self.x_max))

    @classmethod
    def periodic_domain(cls, x_min, period, n_points):
        """Periodic grid of ``n_points`` nodes covering one ``period``."""
        dx = period / n_points
        return cls(x_min, x_min + (n_points - 1) * dx, n_points, periodic=True)

    @property
    def dx(self):
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def x(self):
        return self.x_min + np.arange(self.n_points) * self.dx

    @property
    def width(self):
        """Length of the represented domain (the period when periodic)."""
        if self.periodic:
            return self.n_points * self.dx
        return self.x_max - self.x_min

    @property
    def weights(self):
        """Quadrature weights matching the stepper's control volumes."""
        w = np.full(self.n_points, self.dx)
        if not self.periodic:
            w[0] = w[-1] = 0.5 * self.dx
        return w

    def integrate(self, values):
        return float(np.dot(self.weights, values))

    def nearest_node(self, x):
        i = int(round((x - self.x_min) / self.dx))
        return min(max(i, 0), self.n_points - 1)


@dataclass(frozen=True)
class PopulationField:
    """Density ``P_i`` on ``grid`` at simulation ``time``."""

    grid: Grid
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.n_points,):
            raise ConfigurationError(
                f"field has {v.shape} values for a grid of {self.grid.n_points} nodes")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "time", float(self.time))

    @classmethod
    def uniform(cls, grid, level=1.0, time=0.0):
        return cls(grid, np.full(grid.n_points, float(level)), time)

    @classmethod
    def sinusoid(cls, grid, level=1.0, amplitude=0.01, omega=0.2, phase=0.0, time=0.0):
        """``level + amplitude*sin(omega*x + phase)``; the baseline initial state."""
        return cls(grid, level + amplitude * np.sin(omega * grid.x + phase), time)

    @property
    def x(self):
        return self.grid.x

    def with_values(self, values, time=None):
        return PopulationField(self.grid, values, self.time if time is None else time)

    def validate(self):
        v = self.values
        if not np.all(np.isfinite(v)):
            raise ConfigurationError("field contains non-finite values")
        if np.any(v < 0):
            raise ConfigurationError("field contains negative densities")
        if total_mass(self) <= 0:
            raise ConfigurationError("field has no mass")
        return self


@dataclass(frozen=True)
class PeakSet:
    """Local maxima of a sampled curve.

    ``resolved`` marks peaks whose half-maximum region closes on both sides
    inside the sampled interval and contains no higher point; those are the
    peaks counted as opinion clusters.
    """

    indices: np.ndarray
    positions: np.ndarray
    heights: np.ndarray
    fwhm: np.ndarray
    resolved: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.resolved is None:
            object.__setattr__(self, "resolved", np.ones(len(self.indices), dtype=bool))

    def __len__(self):
        return len(self.indices)


def total_mass(field):
    """Total population ``sum_i w_i P_i`` with the grid's quadrature weights."""
    return field.grid.integrate(field.values)


def center_of_mass(field):
    """Population-weighted mean opinion."""
    w = field.grid.weights * field.values
    return float(np.dot(w, field.x) / w.sum())


def _half_max_crossing(x, values, i, half, direction):
    """Position where ``values`` first drops below ``half`` walking from node ``i``.

    Returns ``(position, crossed, top)`` where ``top`` is the largest value met
    on the way.  Without a crossing the interval end is returned.
    """
    if direction < 0:
        seg = values[:i]
        below = np.flatnonzero(seg < half)
        if below.size == 0:
            top = seg.max() if seg.size else values[i]
            return x[0], False, max(top, values[i])
        j = below[-1]
        top = values[j + 1:i + 1].max()
        frac = (half - values[j]) / (values[j + 1] - values[j])
        return x[j] + frac * (x[j + 1] - x[j]), True, top
    seg = values[i + 1:]
    below = np.flatnonzero(seg < half)
    if below.size == 0:
        top = seg.max() if seg.size else values[i]
        return x[-1], False, max(top, values[i])
    j = i + 1 + below[0]
    top = values[i:j].max()
    frac = (values[j - 1] - half) / (values[j - 1] - values[j])
    return x[j - 1] + frac * (x[j] - x[j - 1]), True, top


def find_peaks_1d(x, values, min_rel_height=DEFAULT_MIN_REL_HEIGHT):
    """Peaks of the curve ``values`` sampled at uniformly spaced ``x``.

    A node is a peak when it is interior, strictly above its left neighbour,
    not below its right neighbour and at least ``min_rel_height * max``.  The
    asymmetric comparison makes a flat plateau report its leftmost top node.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(values, dtype=float)
    if v.size < 3:
        empty = np.array([], dtype=float)
        return PeakSet(np.array([], dtype=int), empty, empty, empty, np.array([], dtype=bool))
    mid = v[1:-1]
    mask = (mid > v[:-2]) & (mid >= v[2:]) & (mid >= min_rel_height * v.max())
    idx = np.flatnonzero(mask) + 1
    fwhm = np.empty(idx.size)
    resolved = np.empty(idx.size, dtype=bool)
    for n, i in enumerate(idx):
        half = 0.5 * v[i]
        left, lcross, ltop = _half_max_crossing(x, v, i, half, -1)
        right, rcross, rtop = _half_max_crossing(x, v, i, half, +1)
        fwhm[n] = right - left
        resolved[n] = lcross and rcross and max(ltop, rtop) <= v[i]
    return PeakSet(idx, x[idx], v[idx], fwhm, resolved)


def detect_peaks(field, min_rel_height=DEFAULT_MIN_REL_HEIGHT):
    """All peaks of a population field (see :func:`find_peaks_1d`)."""
    return find_peaks_1d(field.x, field.values, min_rel_height)


def count_clusters(field, min_rel_height=DEFAULT_MIN_REL_HEIGHT,
                   max_width_fraction=DEFAULT_MAX_WIDTH_FRACTION):
    """Number of localized opinion clusters.

    A peak counts when its density falls below half its height on both sides
    and its FWHM is at most ``max_width_fraction`` of the domain width.  This
    keeps ripples on a near-uniform state and a domain-wide compression hump
    out of the count.
    """
    peaks = detect_peaks(field, min_rel_height)
    narrow = peaks.fwhm <= max_width_fraction * field.grid.width
    return int(np.count_nonzero(peaks.resolved & narrow))
