"""Acceptance gate: twelve end-to-end criteria at their stated tolerances.

Each test records one PASS/FAIL line; the lines are printed together in the
terminal summary (see ``conftest.py``).  Runnable on its own with
``pytest tests/test_acceptance.py``.
"""

import math
import time

import numpy as np
import pytest

from normpde import (CausalDrive, GaussianMixture, Grid, KernelParams, PhysicsParams,
                     PopulationField, growth_rate)
from normpde.adaptation import (TargetDrivenConfig, adaptation_factor, causal_update,
                                target_driven_update, time_amplification)
from normpde.core import center_of_mass, count_clusters, total_mass
from normpde.dynamics import NO_POTENTIAL, Callback, RunState, StepControl, run
from normpde.growth import periodic_growth_rate, potential_growth_rate
from normpde.kernel import nonlocal_gradient
from normpde.metrics import wasserstein_1d
from normpde.scenario import load_scenario, run_scenario, shipped_scenario
from normpde.sinp import sinp_initialize, sinp_update
from normpde.stability import critical_migration, q_closed_form, q_function

RESULTS = {}

pytestmark = pytest.mark.acceptance


def record(number, title, ok, detail):
    RESULTS[number] = (title, bool(ok), detail)
    assert ok, f"criterion {number} ({title}): {detail}"


def desk(name, **changes):
    cfg = load_scenario(shipped_scenario(f"{name}_desk"))
    return cfg.with_changes(output={"dir": None}, **changes)


def test_01_dispersion_fidelity():
    t0 = time.perf_counter()
    base = KernelParams(0.5, 1.0)
    errors = {}

    unstable = PhysicsParams(0.2, 1.0)
    lam = growth_rate(0.2, base, unstable)
    rate = periodic_growth_rate(0.2, base, unstable, expected_rate=lam).rate
    errors["unstable"] = rate / lam - 1

    # exactly marginal has lambda = 0, so sit a quarter above the critical c
    c_marg = critical_migration(0.3, base, 0.2)
    near = PhysicsParams(0.2, 1.25 * c_marg)
    lam = growth_rate(0.3, base, near)
    errors["near-marginal"] = periodic_growth_rate(0.3, base, near,
                                                   expected_rate=lam).rate / lam - 1

    # a potential cannot live on a periodic grid; measured on a wall grid
    stable = PhysicsParams(2.0, 1.0)
    lam = growth_rate(0.2, base, stable, k=0.01)
    rate = potential_growth_rate(0.2, base, stable, 0.01, x_target=-10.0).rate
    errors["stable"] = rate / lam - 1

    elapsed = time.perf_counter() - t0
    worst = max(abs(e) for e in errors.values())
    detail = ", ".join(f"{k} {100 * e:+.2f}%" for k, e in errors.items()) + f"; {elapsed:.1f} s"
    record(1, "dispersion-relation fidelity", worst <= 0.05 and elapsed <= 60, detail)


def test_02_q_oracle():
    t0 = time.perf_counter()
    omegas = np.linspace(0.05, 5.0, 10)
    mus = np.array([-3.0, -1.7, -0.9, -0.4, -0.1, 0.1, 0.4, 0.9, 1.7, 3.0])
    sigmas = np.linspace(0.1, 3.0, 10)
    worst, qmax = 0.0, 0.0
    for om in omegas:
        for mu in mus:
            for s in sigmas:
                p = KernelParams(mu, s)
                quad = q_function(om, p)
                closed = float(q_closed_form(om, mu, s))
                worst = max(worst, abs(quad - closed))
                qmax = max(qmax, abs(quad), abs(closed))
    dense = q_closed_form(np.linspace(1e-6, 50.0, 200001), 0.5, 1.0)
    qmax = max(qmax, float(np.max(np.abs(dense))))
    q_small = q_function(1e-4, KernelParams(0.5, 1.0))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and abs(q_small - 1) <= 1e-6 and qmax <= 1 and elapsed <= 5
    record(2, "Q oracle agreement", ok,
           f"max |quad - closed| {worst:.2e} over 1000 points, Q(1e-4) - 1 = {q_small - 1:.2e}, "
           f"max |Q| {qmax:.6f}; {elapsed:.1f} s")


def test_03_conservation_positivity():
    t0 = time.perf_counter()
    cfg = desk("baseline_rootlike", schedule={"t_end": 50.0, "positivity": False})
    grid = cfg.grid.build()
    field0 = cfg.initial.build(grid, cfg.resolve)
    s = cfg.schedule
    ctl = StepControl(s.dt_max, s.cfl_safety, positivity=False)
    lowest = [float(field0.values.min())]
    state = RunState(field0, cfg.kernel.build(grid),
                     PhysicsParams(cfg.physics.d, cfg.physics.c), cfg.potential.build())
    traj = run(field0, state.kernel, state.phys, state.pot, ctl, 50.0,
               [Callback(lambda st: lowest.append(float(st.field.values.min())))], state=state)
    drift = abs(total_mass(traj.field) - traj.initial_mass) / traj.initial_mass

    # the same run with the positivity safeguard armed: it must never fire
    armed = run_scenario(cfg.with_changes(schedule={"positivity": True}))
    elapsed = time.perf_counter() - t0
    ok = drift <= 1e-9 and armed.clip_events == 0 and min(lowest) >= 0 and elapsed <= 30
    record(3, "conservation and positivity", ok,
           f"drift {drift:.2e}, min P {min(lowest):.4f} over {traj.steps} steps, "
           f"clip events {armed.clip_events}; {elapsed:.1f} s")


def test_04_degenerate_kernel_limit():
    grid = Grid(-20.0, 20.0, 4001)
    x = grid.x
    fields = {
        "gaussian": np.exp(-x**2 / 18.0),
        "sinusoid": 1.0 + 0.3 * np.sin(0.4 * x),
        "two bumps": np.exp(-(x + 5)**2 / 8.0) + 0.5 * np.exp(-(x - 6)**2 / 4.0),
    }
    params = KernelParams(0.02, 0.02)
    worst = {}
    for name, P in fields.items():
        G = nonlocal_gradient(PopulationField(grid, P), params)
        fd = np.gradient(P, grid.dx)
        inner = slice(200, -200)
        scale = np.max(np.abs(fd[inner]))
        worst[name] = float(np.max(np.abs(G[inner] - fd[inner])) / scale)
    ok = max(worst.values()) <= 0.01
    record(4, "degenerate-kernel limit", ok,
           ", ".join(f"{k} {100 * v:.3f}%" for k, v in worst.items()))


def test_05_pattern_threshold():
    t0 = time.perf_counter()
    kernel = KernelParams(0.5, 1.0)
    omega, d = 0.8, 0.2
    # one wavelength per period: Q decreases over the admissible modes, so
    # the seeded mode carries the domain's threshold
    c_star = critical_migration(omega, kernel, d)
    grid = Grid.periodic_domain(0.0, 2 * math.pi / omega, 256)
    seed = PopulationField(grid, 1.0 + 0.01 * np.sin(omega * grid.x))
    l2_0 = np.linalg.norm(seed.values - 1.0)
    lines, ok = [], True
    for factor in (0.5, 0.8, 1.5, 2.0):
        traj = run(seed, kernel, PhysicsParams(d, factor * c_star), NO_POTENTIAL,
                   StepControl(dt_max=0.05, positivity=False), 100.0)
        P = traj.field.values
        n = count_clusters(traj.field)
        ratio = np.linalg.norm(P - P.mean()) / l2_0
        if factor < 1:
            ok &= n == 0 and ratio <= 0.1
            lines.append(f"{factor}c*: {n} clusters, L2 x{ratio:.3g}")
        else:
            ok &= n >= 1
            lines.append(f"{factor}c*: {n} clusters")
    elapsed = time.perf_counter() - t0
    record(5, "pattern-formation threshold", ok and elapsed <= 120,
           f"c* = {c_star:.4f}; " + ", ".join(lines) + f"; {elapsed:.1f} s")


def test_06_potential_compression():
    rep = run_scenario(desk("compression", schedule={"snapshot_period": 1.0}))
    com = np.array([center_of_mass(f) for f in rep.snapshots])
    clusters = max(r.cluster_count for r in rep.records)
    toward = -10.0
    monotone = bool(np.all(np.diff(np.abs(com - toward)) < 0))
    displacement = abs(com[-1] - com[0])
    half_width = 20.0
    ok = clusters == 0 and monotone and displacement > 0.05 * half_width
    record(6, "potential compression", ok,
           f"max clusters {clusters}, centre of mass {com[0]:.3f} -> {com[-1]:.3f} "
           f"(monotone {monotone}), displacement {displacement:.2f}")


def test_07_rootlike_baseline():
    rep = run_scenario(desk("baseline_rootlike"))
    com0 = center_of_mass(rep.snapshots[0])
    com1 = center_of_mass(rep.field)
    clusters = max(r.cluster_count for r in rep.records)
    ok = clusters >= 2 and abs(com1 - 5.0) < abs(com0 - 5.0)
    record(7, "root-like baseline", ok,
           f"up to {clusters} clusters by t={rep.final_time:g}, "
           f"|com - 5|: {abs(com0 - 5):.4f} -> {abs(com1 - 5):.4f}")


def test_08_experiment1_shape():
    rep = run_scenario(desk("exp1_synthetic_target"))
    hist = dict(rep.d_avg_history)
    d_act = hist[150.0]
    d_end = rep.final_d_avg

    k = KernelParams(-3.0, 0.5, mu_min=-5.0, mu_max=-1.0, sigma_min=0.1, sigma_max=1.0)
    fixed = target_driven_update(k, 0.4, TargetDrivenConfig(0.01, tau=0.5)) is k
    # scenario-level: a threshold above every running d_avg freezes the kernel
    frozen = run_scenario(desk("exp1_synthetic_target", schedule={"t_end": 180.0},
                               adaptation={"tau": 1e6}))
    fixed &= (frozen.kernel.mu, frozen.kernel.sigma) == (-5.0, 0.1)
    ok = d_end < d_act / 3 and fixed
    record(8, "experiment-1 shape", ok,
           f"d_avg {d_act:.4f} at t=150 -> {d_end:.4f} at t={rep.final_time:g} "
           f"(ratio {d_end / d_act:.3f}), fixed point {fixed}")


def test_09_experiment3_shape():
    rep = run_scenario(desk("exp3_autonomous"))
    mu = np.asarray(rep.kernel.mu)
    pos = mu > 0
    regions = int(np.count_nonzero(np.diff(pos.astype(int)) == 1) + pos[0])
    min_p = min(float(f.values.min()) for f in rep.snapshots + [rep.field])
    ok = (rep.final_cluster_count >= 2 and regions >= 2 and min_p >= 0
          and rep.mass_drift <= 1e-9)
    record(9, "experiment-3 shape", ok,
           f"{rep.final_cluster_count} clusters, {regions} disjoint mu > 0 regions, "
           f"min P {min_p:.2e}, mass drift {rep.mass_drift:.1e}")


def test_10_metrics_oracles():
    far = wasserstein_1d(GaussianMixture.single(-7.0, 1.0), GaussianMixture.single(4.0, 1.0))
    unit = wasserstein_1d(GaussianMixture.single(0.0, 1.0), GaussianMixture.single(0.0, 4.0))
    rng = np.random.default_rng(7)

    def mixture():
        k = rng.integers(1, 4)
        return GaussianMixture(rng.dirichlet(np.ones(k)), rng.uniform(-10, 10, k),
                               rng.uniform(0.1, 9.0, k))

    slack = 0.0
    for _ in range(100):
        a, b, c = mixture(), mixture(), mixture()
        slack = max(slack, wasserstein_1d(a, c) - wasserstein_1d(a, b) - wasserstein_1d(b, c))
    ok = abs(far - 11.0) <= 1e-3 and abs(unit - math.sqrt(2 / math.pi)) <= 1e-3 and slack <= 1e-9
    record(10, "metrics oracles", ok,
           f"far pair err {far - 11:.1e}, sqrt(2/pi) err {unit - math.sqrt(2 / math.pi):.1e}, "
           f"worst triangle slack {slack:.1e}")


def test_11_sinp_oracles():
    sigma_true = 1.5
    grid = Grid(-20.0, 20.0, 1601)
    assert grid.dx <= sigma_true / 10
    x = grid.x
    uni = PopulationField(grid, np.exp(-0.5 * (x / sigma_true) ** 2))
    b1 = sinp_initialize(uni, grid.nearest_node(0.0), 1.0, -0.5).belief
    var_err = b1.variances[0] / (2 * math.log(2) * sigma_true**2) - 1

    two = PopulationField(grid, np.exp(-0.5 * ((x + 3) / 0.7) ** 2)
                          + np.exp(-0.5 * ((x - 3) / 0.7) ** 2))
    b2 = sinp_initialize(two, grid.nearest_node(0.0), 1.0, -1.0).belief
    weight_err = float(np.max(np.abs(b2.weights - 0.5))) if len(b2.weights) == 2 else math.inf

    rng = np.random.default_rng(2024)
    agent = sinp_initialize(uni, grid.nearest_node(0.0), 1.0, -0.5)
    lowest = math.inf
    for _ in range(10_000):
        n = int(rng.integers(2, 40))
        centre = rng.uniform(-15, 15)
        data = centre + rng.choice([1e-9, 1e-3, 0.5, 3.0]) * rng.standard_normal(n)
        agent = sinp_update(agent, data, grid)
        lowest = min(lowest, float(agent.belief.variances.min()))
    ok = (len(b1.weights) == 1 and abs(var_err) <= 0.05 and len(b2.weights) == 2
          and weight_err <= 1e-6 and lowest >= 1e-3)
    record(11, "SINP oracles", ok,
           f"K={len(b1.weights)} variance err {100 * var_err:+.2f}%, K={len(b2.weights)} "
           f"weight err {weight_err:.1e}, min variance over 1e4 updates {lowest:.2e}")


def test_12_adaptation_arithmetic():
    amp, fac = time_amplification(100.0), adaptation_factor(0.5)
    # constant drive: mu(T) = mu0 + a f (T + 0.005 T^2)
    drive = CausalDrive(0.02, 0.0)
    grid = Grid(-20.0, 20.0, 201)
    G = np.zeros(grid.n_points)
    k = KernelParams(0.5, 1.0, mu_min=-100.0, mu_max=100.0)
    dt, T = 0.01, 50.0
    for n in range(int(round(T / dt))):
        k = causal_update(k, drive, G, dt, n * dt, grid.dx)
    exact = 0.5 + 0.02 * adaptation_factor(0.0) * (T + 0.005 * T**2)
    rel = abs(k.mu - exact) / abs(exact - 0.5)
    ok = amp == 2.0 and fac == 0.5 and rel <= 0.005
    record(12, "adaptation arithmetic", ok,
           f"time_amplification(100) = {amp!r}, adaptation_factor(0.5) = {fac!r}, "
           f"causal accumulation rel err {rel:.1e}")
