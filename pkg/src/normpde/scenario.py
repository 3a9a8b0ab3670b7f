"""Scenario files, experiment orchestration and CSV output.

A scenario is a flat ``section.key = value`` text file; ``#`` starts a
comment.  Sections are ``grid``, ``initial``, ``physics``, ``kernel``,
``potential``, ``adaptation``, ``schedule`` and ``output``.  Unknown keys
and duplicates are parse errors, and out-of-range values raise a
:class:`~normpde.errors.ValidationError` naming the ``section.key``.
Relative file paths are resolved against the scenario file's directory.

Periodic grids read ``grid.x_max`` as the end of the period, so the node
count covers ``[x_min, x_max)``.
"""

import csv
from dataclasses import dataclass, field, fields, replace
import math
import os
from pathlib import Path
import time

import numpy as np

from .adaptation import (CausalDrive, TargetDrivenConfig, _skip_guard,
                         causal_update, read_facts, target_driven_update)
from .core import EXTENSIONS, Grid, PopulationField, center_of_mass, count_clusters, total_mass
from .dynamics import (ACTIVATIONS, Callback, PhysicsParams, PotentialField, RunState,
                       StepControl, run)
from .errors import (ConfigurationError, DegenerateWeightsError, NumericalBlowupError,
                     ScenarioParseError, ValidationError)
from .gmm import GaussianMixture, density, read_mixture
from .kernel import SUPPORT_SIGMAS, KernelField, KernelParams
from .metrics import (METRICS_COLUMNS, QuantileCache, field_vs_target_distance, make_record,
                      weighted_avg_distance)
from .sinp import SinpAgent, SinpPopulation, initialize_population, update_population

OUTPUT_ENV = "NORMPDE_OUTPUT_DIR"
SCENARIO_DIR = Path(__file__).with_name("scenarios")
SECTIONS = ("grid", "initial", "physics", "kernel", "potential", "adaptation", "schedule",
            "output")


def _need(cond, key, message):
    if not cond:
        raise ValidationError(key, message)


@dataclass(frozen=True)
class GridSpec:
    x_min: float = -20.0
    x_max: float = 20.0
    n_points: int = 1000
    periodic: bool = False
    extension: str = "mirror"

    def __post_init__(self):
        _need(math.isfinite(self.x_min) and math.isfinite(self.x_max), "grid.x_min",
              "bounds must be finite")
        _need(self.x_max > self.x_min, "grid.x_max", "must exceed grid.x_min")
        _need(self.n_points >= 8, "grid.n_points", "must be at least 8")
        _need(self.extension in EXTENSIONS, "grid.extension", "must be mirror or clamp")

    def build(self):
        if self.periodic:
            return Grid.periodic_domain(self.x_min, self.x_max - self.x_min, self.n_points)
        return Grid(self.x_min, self.x_max, self.n_points, extension=self.extension)


@dataclass(frozen=True)
class InitialSpec:
    """``uniform``, ``sinusoid`` (``level + amplitude sin(omega x + phase)``) or
    ``mixture`` (``mass`` times the density of ``mixture_file``)."""

    kind: str = "sinusoid"
    level: float = 1.0
    amplitude: float = 0.01
    omega: float = 0.2
    phase: float = 0.0
    mixture_file: str = None
    mass: float = None

    def __post_init__(self):
        _need(self.kind in ("uniform", "sinusoid", "mixture"), "initial.kind",
              "must be uniform, sinusoid or mixture")
        if self.kind == "mixture":
            _need(self.mixture_file is not None, "initial.mixture_file",
                  "required for a mixture initial condition")
            _need(self.mass is None or self.mass > 0, "initial.mass", "must be positive")
        else:
            _need(self.level > 0, "initial.level", "must be positive")
        if self.kind == "sinusoid":
            _need(abs(self.amplitude) <= self.level, "initial.amplitude",
                  "must not exceed the level (density would go negative)")

    def build(self, grid, resolve):
        if self.kind == "uniform":
            return PopulationField.uniform(grid, self.level)
        if self.kind == "sinusoid":
            return PopulationField.sinusoid(grid, self.level, self.amplitude, self.omega,
                                            self.phase)
        mass = grid.width if self.mass is None else self.mass
        values = density(read_mixture(resolve(self.mixture_file)), grid.x)
        f = PopulationField(grid, values)
        return f.with_values(values * mass / total_mass(f)).validate()


@dataclass(frozen=True)
class PhysicsSpec:
    d: float = 0.2
    c: float = 1.0

    def __post_init__(self):
        _need(math.isfinite(self.d) and self.d >= 0, "physics.d", "must be >= 0")
        _need(math.isfinite(self.c), "physics.c", "must be finite")


@dataclass(frozen=True)
class KernelSpec:
    """Initial kernel.  ``per_node`` mode may add ``mu_amplitude cos(mu_wavenumber x)``."""

    mu: float = 0.5
    sigma: float = 1.0
    mu_min: float = -math.inf
    mu_max: float = math.inf
    sigma_min: float = 0.0
    sigma_max: float = math.inf
    mode: str = "scalar"
    mu_profile: str = "constant"
    mu_amplitude: float = 0.0
    mu_wavenumber: float = 0.0

    def __post_init__(self):
        _need(math.isfinite(self.sigma) and self.sigma > 0, "kernel.sigma", "must be positive")
        _need(math.isfinite(self.mu) and self.mu != 0, "kernel.mu",
              "must be finite and non-zero (the kernel is singular at mu = 0)")
        _need(self.mu_min <= self.mu_max, "kernel.mu_max", "must be >= kernel.mu_min")
        _need(0 <= self.sigma_min <= self.sigma_max, "kernel.sigma_max",
              "must be >= kernel.sigma_min >= 0")
        _need(self.sigma_min <= self.sigma <= self.sigma_max, "kernel.sigma",
              "outside [sigma_min, sigma_max]")
        _need(self.mu_min <= self.mu <= self.mu_max, "kernel.mu", "outside [mu_min, mu_max]")
        _need(self.mode in ("scalar", "per_node"), "kernel.mode", "must be scalar or per_node")
        _need(self.mu_profile in ("constant", "cosine"), "kernel.mu_profile",
              "must be constant or cosine")
        _need(self.mu_profile == "constant" or self.mode == "per_node", "kernel.mu_profile",
              "a spatial profile needs kernel.mode = per_node")

    @property
    def bounds(self):
        return (self.mu_min, self.mu_max, self.sigma_min, self.sigma_max)

    def build(self, grid):
        if self.mode == "scalar":
            return KernelParams(self.mu, self.sigma, *self.bounds)
        mu = np.full(grid.n_points, self.mu)
        if self.mu_profile == "cosine":
            mu = mu + self.mu_amplitude * np.cos(self.mu_wavenumber * grid.x)
        mu = _skip_guard(np.clip(mu, self.mu_min, self.mu_max), 0.0)
        try:
            return KernelField(mu, np.full(grid.n_points, self.sigma), *self.bounds)
        except ConfigurationError as exc:
            raise ValidationError("kernel.mu_amplitude", str(exc)) from None


@dataclass(frozen=True)
class PotentialSpec:
    k: float = 0.0
    x_target: float = 0.0
    activation: str = "always"
    threshold: int = 2

    def __post_init__(self):
        _need(math.isfinite(self.k) and self.k >= 0, "potential.k", "must be >= 0")
        _need(self.activation in ACTIVATIONS, "potential.activation",
              f"must be one of {', '.join(ACTIVATIONS)}")
        _need(self.threshold >= 1, "potential.threshold", "must be >= 1")

    def build(self):
        return PotentialField(self.k, self.x_target, self.activation, self.threshold)


@dataclass(frozen=True)
class AdaptationSpec:
    """``none``, ``target_driven`` or ``causal``.

    ``target_file`` is required for target-driven runs and optional
    otherwise, where it only feeds the distance metrics.  A causal drive
    takes either ``facts_file`` or ``delta_mu``, always with ``delta_sigma``.
    """

    regime: str = "none"
    activation_time: float = 0.0
    target_file: str = None
    eta: float = None
    tau: float = None
    facts_file: str = None
    delta_mu: float = None
    delta_sigma: float = None

    def __post_init__(self):
        _need(self.regime in ("none", "target_driven", "causal"), "adaptation.regime",
              "must be none, target_driven or causal")
        _need(math.isfinite(self.activation_time) and self.activation_time >= 0,
              "adaptation.activation_time", "must be >= 0")
        if self.regime == "target_driven":
            _need(self.target_file is not None, "adaptation.target_file",
                  "required for target-driven adaptation")
            _need(self.eta is not None and self.eta > 0, "adaptation.eta", "must be positive")
            _need(self.tau is not None and self.tau >= 0, "adaptation.tau", "must be >= 0")
        if self.regime == "causal":
            _need(not (self.facts_file is not None and self.delta_mu is not None),
                  "adaptation.delta_mu", "give either adaptation.facts_file or delta_mu, not both")
            _need(self.facts_file is not None or self.delta_mu is not None,
                  "adaptation.delta_mu", "a causal drive needs facts_file or delta_mu")
            _need(self.delta_sigma is not None, "adaptation.delta_sigma",
                  "must be stated explicitly for a causal drive")
        for key in ("delta_mu", "delta_sigma"):
            v = getattr(self, key)
            _need(v is None or math.isfinite(v), f"adaptation.{key}", "must be finite")


@dataclass(frozen=True)
class ScheduleSpec:
    """Run length, step control and callback cadences (a period of 0 disables)."""

    t_end: float = 200.0
    dt_max: float = 0.05
    cfl_safety: float = 0.9
    positivity: bool = True
    method: str = "auto"
    metrics_period: float = 5.0
    snapshot_period: float = 0.0
    sinp_period: float = 5.0
    sinp_stride: int = 4
    sinp_samples: int = 500
    wasserstein_n: int = 1024
    min_rel_height: float = 0.1
    seed: int = 0

    def __post_init__(self):
        _need(math.isfinite(self.t_end) and self.t_end > 0, "schedule.t_end", "must be positive")
        _need(self.dt_max > 0, "schedule.dt_max", "must be positive")
        _need(0 < self.cfl_safety <= 1, "schedule.cfl_safety", "must lie in (0, 1]")
        _need(self.method in ("auto", "direct", "spectral"), "schedule.method",
              "must be auto, direct or spectral")
        for key in ("metrics_period", "snapshot_period", "sinp_period"):
            _need(getattr(self, key) >= 0, f"schedule.{key}", "must be >= 0")
        _need(self.sinp_stride >= 1, "schedule.sinp_stride", "must be >= 1")
        _need(self.sinp_samples >= 2, "schedule.sinp_samples", "must be >= 2")
        _need(self.wasserstein_n >= 16, "schedule.wasserstein_n", "must be >= 16")
        _need(0 <= self.min_rel_height <= 1, "schedule.min_rel_height", "must lie in [0, 1]")
        _need(self.seed >= 0, "schedule.seed", "must be >= 0")


@dataclass(frozen=True)
class OutputSpec:
    """``dir = none`` keeps everything in memory."""

    dir: str = None
    metrics: bool = True
    snapshots: bool = False
    beliefs: bool = False


_SECTION_TYPES = {"grid": GridSpec, "initial": InitialSpec, "physics": PhysicsSpec,
                  "kernel": KernelSpec, "potential": PotentialSpec,
                  "adaptation": AdaptationSpec, "schedule": ScheduleSpec, "output": OutputSpec}


@dataclass(frozen=True)
class ScenarioConfig:
    grid: GridSpec = field(default_factory=GridSpec)
    initial: InitialSpec = field(default_factory=InitialSpec)
    physics: PhysicsSpec = field(default_factory=PhysicsSpec)
    kernel: KernelSpec = field(default_factory=KernelSpec)
    potential: PotentialSpec = field(default_factory=PotentialSpec)
    adaptation: AdaptationSpec = field(default_factory=AdaptationSpec)
    schedule: ScheduleSpec = field(default_factory=ScheduleSpec)
    output: OutputSpec = field(default_factory=OutputSpec)
    name: str = field(default="scenario", compare=False)
    base_dir: Path = field(default=Path("."), compare=False)

    def resolve(self, path):
        p = Path(path)
        return p if p.is_absolute() else Path(self.base_dir) / p

    def validate(self):
        """Cross-section checks, including that referenced files exist."""
        for key, path in (("initial.mixture_file", self.initial.mixture_file),
                          ("adaptation.target_file", self.adaptation.target_file),
                          ("adaptation.facts_file", self.adaptation.facts_file)):
            if path is not None:
                _need(self.resolve(path).is_file(), key, f"file not found: {path}")
        grid = self.grid.build()
        _need(abs(self.kernel.mu) + SUPPORT_SIGMAS * self.kernel.sigma <= grid.width,
              "kernel.sigma", "kernel support exceeds the domain width")
        _need(self.adaptation.regime != "target_driven" or self.schedule.sinp_period > 0,
              "schedule.sinp_period", "target-driven adaptation needs SINP updates")
        return self

    def with_changes(self, **sections):
        """Copy with some sections' keys replaced, e.g. ``grid={"n_points": 256}``."""
        out = {}
        for name, changes in sections.items():
            if name in _SECTION_TYPES:
                out[name] = replace(getattr(self, name), **changes)
            else:
                out[name] = changes
        return replace(self, **out)


def _convert(text, typ, key, optional):
    low = text.strip().lower()
    if low == "none" and optional:
        return None
    if typ in ("float", float):
        return float(low)
    if typ in ("int", int):
        if not low.lstrip("+-").isdigit():
            raise ValueError(f"{key} needs an integer")
        return int(low)
    if typ in ("bool", bool):
        if low in ("true", "yes", "on", "1"):
            return True
        if low in ("false", "no", "off", "0"):
            return False
        raise ValueError(f"{key} needs true or false")
    return text.strip()


def parse_scenario(text, source="<string>", base_dir=Path("."), name="scenario"):
    """Parse scenario ``text``; see the module docstring for the format."""
    values = {s: {} for s in SECTIONS}
    types = {s: {f.name: f.type for f in fields(t)} for s, t in _SECTION_TYPES.items()}
    optional = {s: {f.name for f in fields(t) if f.default is None}
                for s, t in _SECTION_TYPES.items()}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioParseError(source, lineno, "expected 'section.key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        section, _, name_ = key.partition(".")
        if section not in values or name_ not in types[section]:
            raise ScenarioParseError(source, lineno, f"unknown key {key!r}")
        if name_ in values[section]:
            raise ScenarioParseError(source, lineno, f"duplicate key {key!r}")
        try:
            values[section][name_] = _convert(value, types[section][name_], key,
                                              name_ in optional[section])
        except ValueError:
            raise ScenarioParseError(source, lineno, f"bad value {value!r} for {key}") from None
    sections = {s: _SECTION_TYPES[s](**kw) for s, kw in values.items()}
    return ScenarioConfig(**sections, name=name, base_dir=Path(base_dir)).validate()


def load_scenario(path):
    """Load and validate a scenario file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read scenario {path}: {exc}") from None
    return parse_scenario(text, str(path), path.parent, path.stem)


def _format_value(v):
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(v) if isinstance(v, float) else str(v)


def dump_scenario(cfg):
    """Scenario text that loads back to an equal config."""
    lines = []
    for s in SECTIONS:
        sec = getattr(cfg, s)
        lines.extend(f"{s}.{f.name} = {_format_value(getattr(sec, f.name))}"
                     for f in fields(sec))
        lines.append("")
    return "\n".join(lines)


def write_scenario(path, cfg):
    Path(path).write_text(dump_scenario(cfg))


def shipped_scenarios():
    """Paths of the scenario files bundled with the package."""
    return sorted(SCENARIO_DIR.glob("*.scn"))


def shipped_scenario(name):
    path = SCENARIO_DIR / f"{name}.scn"
    if not path.is_file():
        raise ConfigurationError(f"no shipped scenario named {name!r}")
    return path


def desk_scale(cfg, n_points=256, t_end=None):
    """Reduced-resolution copy of ``cfg`` for quick checks."""
    sched = {} if t_end is None else {"t_end": t_end}
    return cfg.with_changes(grid={"n_points": n_points}, schedule=sched)


# -- CSV output ---------------------------------------------------------------

def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


class _CsvSink:
    """Newline-terminated CSV with shortest round-trip numbers."""

    def __init__(self, path, header):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = self.path.open("w", newline="")
        self._w = csv.writer(self._fh, lineterminator="\n")
        self._w.writerow(header)

    def write(self, row):
        self._w.writerow([_fmt(v) for v in row])

    def close(self):
        self._fh.close()


def write_snapshot_csv(path, field, mode="w"):
    """Rows ``t, x, P`` for one field."""
    path = Path(path)
    new = mode == "w" or not path.exists()
    with path.open(mode, newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if new:
            w.writerow(["t", "x", "P"])
        for x, p in zip(field.x, field.values):
            w.writerow([_fmt(field.time), _fmt(x), _fmt(p)])


def _belief_row(t, x, gmm):
    row = [t, x]
    for w, m, v in zip(gmm.weights, gmm.means, gmm.variances):
        row.extend((w, m, v))
    return row


BELIEF_HEADER = ["t", "x", "weight", "mean", "variance"]


def write_dispersion_csv(path_or_fh, scan):
    own = not hasattr(path_or_fh, "write")
    fh = open(path_or_fh, "w", newline="") if own else path_or_fh
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["omega", "q", "lambda", "unstable"])
        for p in scan.points:
            w.writerow([_fmt(p.omega), _fmt(p.q_value), _fmt(p.growth_rate), int(p.unstable)])
    finally:
        if own:
            fh.close()


# -- orchestration --------------------------------------------------------------

@dataclass
class RunReport:
    final_time: float
    final_d_avg: float
    final_cluster_count: int
    steps: int
    clip_events: int
    wall_time: float
    initial_mass: float
    final_mass: float
    records: list
    d_avg_history: list
    snapshots: list
    field: PopulationField
    kernel: object
    output_dir: Path = None

    @property
    def mass_drift(self):
        return abs(self.final_mass - self.initial_mass) / self.initial_mass

    def summary(self):
        lines = [f"final time      {self.final_time:g}",
                 f"steps           {self.steps}",
                 f"clusters        {self.final_cluster_count}",
                 f"clip events     {self.clip_events}",
                 f"mass drift      {self.mass_drift:.3e}",
                 f"wall time       {self.wall_time:.2f} s"]
        if not math.isnan(self.final_d_avg):
            lines.insert(3, f"d_avg           {self.final_d_avg:.6g}")
        if self.output_dir is not None:
            lines.append(f"output          {self.output_dir}")
        return "\n".join(lines)


def causal_drive(adapt, resolve):
    if adapt.facts_file is not None:
        return CausalDrive.from_facts(read_facts(resolve(adapt.facts_file)), adapt.delta_sigma)
    return CausalDrive(adapt.delta_mu, adapt.delta_sigma)


def output_directory(cfg, override=None):
    """Where a run writes: explicit override, then the environment, then the config."""
    if override is not None:
        return Path(override)
    env = os.environ.get(OUTPUT_ENV)
    if env:
        return Path(env)
    return None if cfg.output.dir is None else Path(cfg.output.dir)


def run_scenario(cfg, output_dir=None, keep_snapshots=True):
    """Execute ``cfg`` and return a :class:`RunReport`.

    On numerical blow-up the last good field is written to
    ``last_good_snapshot.csv`` (when an output directory is set) before the
    error propagates.
    """
    t_wall = time.perf_counter()
    sched, adapt = cfg.schedule, cfg.adaptation
    grid = cfg.grid.build()
    field0 = cfg.initial.build(grid, cfg.resolve)
    kernel = cfg.kernel.build(grid)
    phys = PhysicsParams(cfg.physics.d, cfg.physics.c)
    pot = cfg.potential.build()
    ctl = StepControl(sched.dt_max, sched.cfl_safety, sched.positivity)
    target = read_mixture(cfg.resolve(adapt.target_file)) if adapt.target_file else None
    out = output_directory(cfg, output_dir)
    state = RunState(field0, kernel, phys, pot)
    eps = 1e-9 * max(1.0, sched.t_end)

    sinks = {}
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        if cfg.output.metrics:
            sinks["metrics"] = _CsvSink(out / "metrics.csv", METRICS_COLUMNS)
        if cfg.output.snapshots and sched.snapshot_period > 0:
            sinks["snapshots"] = _CsvSink(out / "snapshots.csv", ["t", "x", "P"])
        if cfg.output.beliefs and target is not None:
            sinks["beliefs"] = _CsvSink(out / "beliefs.csv", BELIEF_HEADER)

    records, d_hist, snaps = [], [], []
    cache = {"q": QuantileCache(sched.wasserstein_n)}
    pop = {"sinps": None, "updates": 0}
    if target is not None:
        pop["sinps"] = initialize_population(field0, cfg.kernel.sigma, cfg.kernel.mu,
                                             sched.sinp_stride, sched.min_rel_height)

    def d_avg_now(st):
        if pop["sinps"] is None:
            return math.nan
        try:
            return weighted_avg_distance(st.field, pop["sinps"], target, sched.wasserstein_n,
                                         cache["q"])
        except DegenerateWeightsError:
            return math.nan

    def write_beliefs(st):
        if "beliefs" in sinks:
            for agent in pop["sinps"].agents:
                sinks["beliefs"].write(_belief_row(st.time, grid.x[agent.node_index],
                                                   agent.belief))

    def on_sinp(st):
        if st.time > 0:
            pop["updates"] += 1
            pop["sinps"] = update_population(pop["sinps"], st.field, sched.sinp_samples,
                                             sched.seed, pop["updates"], sched.min_rel_height)
            cache["q"] = QuantileCache(sched.wasserstein_n)
        d = d_avg_now(st)
        d_hist.append((st.time, d))
        st.extras["d_avg"] = d
        write_beliefs(st)
        if (adapt.regime == "target_driven" and st.time >= adapt.activation_time - eps
                and not math.isnan(d)):
            st.kernel = target_driven_update(st.kernel, d, TargetDrivenConfig(
                adapt.eta, adapt.tau, adapt.activation_time))

    drive = causal_drive(adapt, cfg.resolve) if adapt.regime == "causal" else None

    def on_step(st):
        t_start = st.time - st.dt
        if t_start >= adapt.activation_time - eps:
            st.kernel = causal_update(st.kernel, drive, st.G, st.dt,
                                      max(t_start - adapt.activation_time, 0.0), grid.dx,
                                      grid.periodic)

    def on_metrics(st):
        rec = make_record(st.time, total_mass(st.field),
                          count_clusters(st.field, sched.min_rel_height), st.kernel,
                          st.clip_events, d_avg_now(st))
        records.append(rec)
        if "metrics" in sinks:
            sinks["metrics"].write(rec.row())

    def on_snapshot(st):
        if keep_snapshots:
            snaps.append(st.field)
        if "snapshots" in sinks:
            for x, p in zip(grid.x, st.field.values):
                sinks["snapshots"].write((st.time, x, p))

    callbacks = []
    if target is not None and sched.sinp_period > 0:
        callbacks.append(Callback(on_sinp, sched.sinp_period, 0.0, "sinp"))
    if drive is not None:
        callbacks.append(Callback(on_step, None, name="causal"))
    if adapt.activation_time > 0:
        # lands a step exactly on the phase switch
        callbacks.append(Callback(lambda st: None, 2.0 * sched.t_end + adapt.activation_time,
                                  adapt.activation_time, "phase"))
    if sched.metrics_period > 0:
        callbacks.append(Callback(on_metrics, sched.metrics_period, 0.0, "metrics"))
    if sched.snapshot_period > 0:
        callbacks.append(Callback(on_snapshot, sched.snapshot_period, 0.0, "snapshot"))

    try:
        traj = run(field0, kernel, phys, pot, ctl, sched.t_end, callbacks, sched.method, state)
    except NumericalBlowupError:
        if out is not None:
            write_snapshot_csv(out / "last_good_snapshot.csv", state.field)
        raise
    finally:
        for s in sinks.values():
            s.close()

    final = traj.field
    d_final = d_hist[-1][1] if d_hist else math.nan
    if records and records[-1].time == final.time:
        d_final = records[-1].d_avg if target is not None else math.nan
    elif target is not None:
        d_final = d_avg_now(state)
    return RunReport(final.time, d_final, count_clusters(final, sched.min_rel_height),
                     traj.steps, traj.clip_events, time.perf_counter() - t_wall,
                     traj.initial_mass, total_mass(final), records, d_hist, snaps, final,
                     state.kernel, out)


def run_scenario_file(path, output_dir=None):
    return run_scenario(load_scenario(path), output_dir)


# -- analysis -------------------------------------------------------------------

def read_snapshot(path, at_time=None):
    """Field stored in a ``t, x, P`` snapshot CSV (the last time unless ``at_time``)."""
    path = Path(path)
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, ValueError) as exc:
        raise ConfigurationError(f"{path}: unreadable snapshot ({exc})") from None
    if data.shape[1] != 3 or data.shape[0] == 0:
        raise ConfigurationError(f"{path}: expected columns t, x, P")
    times = np.unique(data[:, 0])
    t = times[-1] if at_time is None else at_time
    rows = data[np.isclose(data[:, 0], t, rtol=0, atol=1e-12 * max(1.0, abs(t)))]
    if rows.size == 0:
        raise ConfigurationError(f"{path}: no snapshot at t={t}")
    x, P = rows[:, 1], rows[:, 2]
    grid = Grid(x[0], x[-1], x.size)
    if not np.allclose(x, grid.x, rtol=0, atol=1e-9 * max(1.0, grid.width)):
        raise ConfigurationError(f"{path}: snapshot nodes are not uniformly spaced")
    return PopulationField(grid, P, float(t))


def read_beliefs(path, at_time=None):
    """``(time, x, mixtures)`` from a belief CSV (the last time unless ``at_time``)."""
    rows = []
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        next(reader, None)
        for n, row in enumerate(reader, 2):
            vals = [float(v) for v in row]
            if len(vals) < 5 or (len(vals) - 2) % 3:
                raise ConfigurationError(f"{path}:{n}: malformed belief row")
            rows.append(vals)
    if not rows:
        raise ConfigurationError(f"{path}: no belief rows")
    t = max(r[0] for r in rows) if at_time is None else at_time
    sel = [r for r in rows if abs(r[0] - t) <= 1e-12 * max(1.0, abs(t))]
    xs = np.array([r[1] for r in sel])
    mixtures = [GaussianMixture(r[2::3], r[3::3], r[4::3]) for r in sel]
    return t, xs, mixtures


@dataclass(frozen=True)
class Analysis:
    time: float
    field_distance: float
    d_avg: float = math.nan
    center_of_mass: float = math.nan


def analyze(snapshot_path, target_path, beliefs_path=None, n=1024, at_time=None):
    """Distances of a stored snapshot (and optional beliefs) to a target mixture."""
    field = read_snapshot(snapshot_path, at_time)
    target = read_mixture(target_path)
    dist = field_vs_target_distance(field, target, n)
    d_avg = math.nan
    if beliefs_path is not None and Path(beliefs_path).is_file():
        _, xs, mixtures = read_beliefs(beliefs_path, field.time)
        nodes = np.rint((xs - field.grid.x_min) / field.grid.dx).astype(int)
        if (np.any(nodes < 0) or np.any(nodes >= field.grid.n_points)
                or not np.allclose(field.x[np.clip(nodes, 0, field.grid.n_points - 1)], xs,
                                   rtol=0, atol=1e-6 * field.grid.dx)):
            raise ConfigurationError("belief positions do not lie on the snapshot grid")
        pop = SinpPopulation([SinpAgent(int(i), m, 1.0) for i, m in zip(nodes, mixtures)])
        d_avg = weighted_avg_distance(field, pop, target, n)
    return Analysis(field.time, dist, d_avg, center_of_mass(field))
