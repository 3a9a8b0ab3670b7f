"""Explicit finite-volume integration of the transport equation

    dP/dt = d P_xx - d/dx [ P (c G(P) - V'(x)) ],   V(x) = k (x - x_target)^2.

Fluxes ``F = -d P_x + P v`` live on cell faces: diffusion is centred and the
advective part is first-order upwind with face velocities averaged from the
nodes.  Wall-bounded grids use zero-flux walls with half cells at the two
boundary nodes, so the trapezoidal mass is conserved to rounding.  The step
size is capped by a combined diffusion/advection bound under which every
update is a convex combination of neighbouring values and stays
non-negative.
"""

from dataclasses import dataclass, field as dc_field
import math

import numpy as np

from .core import count_clusters, total_mass
from .errors import CallbackError, ConfigurationError, NormPDEError, NumericalBlowupError
from .kernel import nonlocal_gradient

ACTIVATIONS = ("always", "never", "clusters")


@dataclass(frozen=True)
class PhysicsParams:
    d: float = 0.2
    c: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.d) and self.d >= 0):
            raise ConfigurationError("d: diffusion coefficient must be >= 0")
        if not math.isfinite(self.c):
            raise ConfigurationError("c: migration coefficient must be finite")


@dataclass(frozen=True)
class PotentialField:
    """Quadratic guidance ``k (x - x_target)^2``.

    ``activation`` is ``"always"``, ``"never"`` or ``"clusters"``; the last
    switches the potential on while at least ``threshold`` clusters exist.
    """

    k: float = 0.0
    x_target: float = 0.0
    activation: str = "always"
    threshold: int = 2

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k >= 0):
            raise ConfigurationError("k: potential strength must be >= 0")
        if self.activation not in ACTIVATIONS:
            raise ConfigurationError(f"activation must be one of {ACTIVATIONS}")
        if self.threshold < 1:
            raise ConfigurationError("threshold must be >= 1")

    def is_active(self, field):
        if self.k == 0 or self.activation == "never":
            return False
        if self.activation == "always":
            return True
        return count_clusters(field) >= self.threshold


NO_POTENTIAL = PotentialField(0.0, 0.0, "never")


@dataclass(frozen=True)
class StepControl:
    dt_max: float = 0.05
    cfl_safety: float = 0.9
    positivity: bool = True

    def __post_init__(self):
        if not 0 < self.cfl_safety <= 1:
            raise ConfigurationError("cfl_safety must lie in (0, 1]")
        if not self.dt_max > 0:
            raise ConfigurationError("dt_max must be positive")


def potential_gradient(x, pot):
    return 2.0 * pot.k * (np.asarray(x, dtype=float) - pot.x_target)


def compute_velocity(field, kernel, phys, pot=NO_POTENTIAL, active=None, method="auto"):
    """Node drift ``v = c G - V'`` and the perceived gradient ``G``."""
    G = nonlocal_gradient(field, kernel, method=method)
    v = phys.c * G
    if active is None:
        active = pot.is_active(field)
    if active:
        v = v - potential_gradient(field.x, pot)
    return v, G


def face_velocity(v, periodic):
    if periodic:
        return 0.5 * (v + np.roll(v, -1))
    return 0.5 * (v[:-1] + v[1:])


def stable_dt(dx, d, vmax, safety):
    """Largest step keeping the explicit update a convex combination."""
    rate = 2.0 * d / dx**2 + 2.0 * vmax / dx
    return math.inf if rate == 0 else safety / rate


def density_rate(P, v_face, d, grid):
    """``dP/dt`` from face fluxes."""
    dx = grid.dx
    if grid.periodic:
        right = np.roll(P, -1)
        F = -d * (right - P) / dx + np.where(v_face >= 0, P, right) * v_face
        return -(F - np.roll(F, 1)) / grid.weights
    F = -d * (P[1:] - P[:-1]) / dx + np.where(v_face >= 0, P[:-1], P[1:]) * v_face
    div = np.empty_like(P)
    div[0] = F[0]
    div[1:-1] = F[1:] - F[:-1]
    div[-1] = -F[-1]
    return -div / grid.weights


@dataclass
class StepResult:
    field: object
    dt: float
    clipped: bool
    G: np.ndarray
    potential_active: bool


def step(field, kernel, phys, pot, ctl, dt, step_index=0, method="auto"):
    """One explicit Euler step of at most ``dt`` (shortened to the stable bound)."""
    grid = field.grid
    P = field.values
    active = pot.is_active(field)
    v, G = compute_velocity(field, kernel, phys, pot, active, method)
    vf = face_velocity(v, grid.periodic)
    dt_actual = min(dt, ctl.dt_max, stable_dt(grid.dx, phys.d, float(np.max(np.abs(vf))),
                                              ctl.cfl_safety))
    new = P + dt_actual * density_rate(P, vf, phys.d, grid)
    if not np.all(np.isfinite(new)):
        raise NumericalBlowupError(step_index)
    clipped = False
    if ctl.positivity and np.any(new < 0):
        before = grid.integrate(new)
        new = np.clip(new, 0.0, None)
        after = grid.integrate(new)
        if after > 0:
            new *= before / after
        clipped = True
    return StepResult(field.with_values(new, field.time + dt_actual), dt_actual, clipped, G,
                      active)


class Callback:
    """Hook run by :func:`run`.

    With ``period=None`` it fires after every step; otherwise at
    ``start, start + period, ...``, the stepper landing exactly on those
    times.  ``func(state)`` may replace ``state.kernel``.
    """

    def __init__(self, func, period=None, start=0.0, name=None):
        if period is not None and not period > 0:
            raise ConfigurationError("callback period must be positive")
        self.func = func
        self.period = period
        self.start = float(start)
        self.name = name or getattr(func, "__name__", type(func).__name__)
        self.next_due = None

    def reset(self, t0):
        if self.period is None:
            self.next_due = None
            return
        due = self.start
        if due < t0:
            due += math.ceil((t0 - due) / self.period - 1e-9) * self.period
        self.next_due = due

    def __call__(self, state):
        try:
            self.func(state)
        except NormPDEError:
            raise
        except Exception as exc:
            raise CallbackError(self.name, state.time, exc) from exc


@dataclass
class RunState:
    field: object
    kernel: object
    phys: PhysicsParams
    pot: PotentialField
    steps: int = 0
    clip_events: int = 0
    dt: float = 0.0
    G: np.ndarray = None
    potential_active: bool = False
    extras: dict = dc_field(default_factory=dict)

    @property
    def time(self):
        return self.field.time


@dataclass
class Trajectory:
    state: RunState
    initial_mass: float

    @property
    def field(self):
        return self.state.field

    @property
    def steps(self):
        return self.state.steps

    @property
    def clip_events(self):
        return self.state.clip_events


def _fire_due(callbacks, state, eps):
    for cb in callbacks:
        if cb.period is not None and cb.next_due is not None and state.time >= cb.next_due - eps:
            cb(state)
            while cb.next_due <= state.time + eps:
                cb.next_due += cb.period


def run(field, kernel, phys, pot, ctl, t_end, callbacks=(), method="auto", state=None):
    """Integrate to ``t_end`` firing ``callbacks`` on their schedules."""
    state = state or RunState(field, kernel, phys, pot)
    traj = Trajectory(state, total_mass(state.field))
    t0 = state.time
    if t_end <= t0:
        return traj
    eps = 1e-9 * max(1.0, abs(t_end))
    callbacks = list(callbacks)
    for cb in callbacks:
        cb.reset(t0)
    _fire_due(callbacks, state, eps)
    while state.time < t_end - eps:
        horizon = t_end
        for cb in callbacks:
            if cb.next_due is not None and cb.next_due > state.time + eps:
                horizon = min(horizon, cb.next_due)
        res = step(state.field, state.kernel, state.phys, state.pot, ctl,
                   horizon - state.time, state.steps, method)
        f = res.field
        if abs(f.time - horizon) <= eps:
            f = f.with_values(f.values, horizon)
        state.field = f
        state.steps += 1
        state.dt = res.dt
        state.G = res.G
        state.potential_active = res.potential_active
        state.clip_events += int(res.clipped)
        for cb in callbacks:
            if cb.period is None:
                cb(state)
        _fire_due(callbacks, state, eps)
    return traj
