"""Command line entry point: ``normpde run | stability | analyze | sweep``.

Exit status is 0 on success, 2 for invalid input and 3 when a run blows up.
"""

import argparse
from concurrent.futures import ProcessPoolExecutor
import math
import os
from pathlib import Path
import sys

from .dynamics import PhysicsParams
from .errors import ConfigurationError, NormPDEError, NumericalBlowupError
from .kernel import KernelParams
from .scenario import (OUTPUT_ENV, analyze, load_scenario, run_scenario, shipped_scenario,
                       write_dispersion_csv)
from .stability import dispersion_scan

EXIT_OK, EXIT_INVALID, EXIT_BLOWUP = 0, 2, 3

# (mu, sigma, d, c, p_h, k)
PRESETS = {
    "baseline": (0.5, 1.0, 0.2, 1.0, 1.0, 0.0),
    "compression": (0.5, 1.0, 2.0, 1.0, 1.0, 0.01),
}


def _scenario_path(arg):
    p = Path(arg)
    if p.is_file() or p.suffix:
        return p
    return shipped_scenario(arg)


def cmd_run(args):
    cfg = load_scenario(_scenario_path(args.scenario))
    if args.desk:
        cfg = cfg.with_changes(grid={"n_points": 256})
    if args.t_end is not None:
        cfg = cfg.with_changes(schedule={"t_end": args.t_end})
    report = run_scenario(cfg, args.output)
    print(report.summary())
    return EXIT_OK


def cmd_stability(args):
    mu, sigma, d, c, p_h, k = PRESETS[args.preset] if args.preset else PRESETS["baseline"]
    mu = mu if args.mu is None else args.mu
    sigma = sigma if args.sigma is None else args.sigma
    d = d if args.d is None else args.d
    c = c if args.c is None else args.c
    p_h = p_h if args.p_h is None else args.p_h
    k = k if args.k is None else args.k
    params = KernelParams(mu, sigma)
    phys = PhysicsParams(d, c)
    # below the domain's fundamental 2 pi / width a "mode" only describes the
    # background, which the 2k term lifts uniformly
    omega_min = 2.0 * math.pi / args.width if args.omega_min is None else args.omega_min
    omega_max = args.omega_max
    if args.dx is not None:
        omega_max = math.pi / args.dx
    scan = dispersion_scan((omega_min, omega_max), args.n_points, params, phys, p_h, k,
                           quadrature=args.quadrature)
    if args.output:
        write_dispersion_csv(args.output, scan)
    band = scan.unstable_band()
    if band is None:
        print(f"stable at all omega in [{omega_min:.6g}, {omega_max:g}]")
    else:
        best = scan.most_unstable
        print(f"unstable band: omega in [{band[0]:.6g}, {band[1]:.6g}]")
        print(f"most unstable: omega = {best.omega:.6g}, lambda = {best.growth_rate:.6g}")
    return EXIT_OK


def cmd_analyze(args):
    beliefs = args.beliefs
    if beliefs is None:
        candidate = Path(args.snapshot).with_name("beliefs.csv")
        beliefs = candidate if candidate.is_file() else None
    res = analyze(args.snapshot, args.target, beliefs, args.n, args.time)
    print(f"time            {res.time:g}")
    print(f"field distance  {res.field_distance:.9g}")
    if not math.isnan(res.d_avg):
        print(f"weighted d_avg  {res.d_avg:.9g}")
    return EXIT_OK


def _sweep_one(job):
    path, out = job
    try:
        report = run_scenario(load_scenario(path), out)
    except NumericalBlowupError as exc:
        return path, EXIT_BLOWUP, str(exc)
    except NormPDEError as exc:
        return path, EXIT_INVALID, str(exc)
    return path, EXIT_OK, f"t={report.final_time:g} clusters={report.final_cluster_count}"


def cmd_sweep(args):
    files = sorted(Path(args.directory).glob("*.scn"))
    if not files:
        raise ConfigurationError(f"no *.scn files in {args.directory}")
    base = Path(args.output or os.environ.get(OUTPUT_ENV) or "runs")
    jobs = [(str(f), str(base / f.stem)) for f in files]
    worst = EXIT_OK
    with ProcessPoolExecutor(max_workers=args.workers) as pool:
        for path, code, message in pool.map(_sweep_one, jobs):
            print(f"{'ok' if code == EXIT_OK else 'FAILED'}  {path}  {message}")
            worst = max(worst, code)
    return worst


def build_parser():
    p = argparse.ArgumentParser(prog="normpde", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a scenario file (or a shipped scenario by name)")
    r.add_argument("scenario")
    r.add_argument("-o", "--output", help="output directory (overrides the scenario)")
    r.add_argument("--desk", action="store_true", help="256-node grid for a quick look")
    r.add_argument("--t-end", type=float, help="override schedule.t_end")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("stability", help="dispersion relation of the homogeneous state")
    s.add_argument("--preset", choices=sorted(PRESETS))
    for name in ("mu", "sigma", "d", "c", "p-h", "k"):
        s.add_argument(f"--{name}", type=float)
    s.add_argument("--width", type=float, default=40.0,
                   help="domain width; the scan starts at 2 pi / width")
    s.add_argument("--omega-min", type=float, help="override the scan start")
    s.add_argument("--omega-max", type=float, default=5.0)
    s.add_argument("--dx", type=float, help="scan up to the grid cutoff pi/dx")
    s.add_argument("--n-points", type=int, default=500)
    s.add_argument("--quadrature", action="store_true", help="evaluate Q by quadrature")
    s.add_argument("-o", "--output", help="write omega,q,lambda,unstable CSV here")
    s.set_defaults(func=cmd_stability)

    a = sub.add_parser("analyze", help="distance of a stored snapshot to a target mixture")
    a.add_argument("snapshot")
    a.add_argument("target")
    a.add_argument("--beliefs", help="belief CSV (default: beliefs.csv beside the snapshot)")
    a.add_argument("--time", type=float, help="snapshot time (default: the last)")
    a.add_argument("-n", type=int, default=1024, help="quantile resolution")
    a.set_defaults(func=cmd_analyze)

    w = sub.add_parser("sweep", help="run every scenario in a directory in parallel")
    w.add_argument("directory")
    w.add_argument("-o", "--output", help="base output directory")
    w.add_argument("-j", "--workers", type=int, default=None)
    w.set_defaults(func=cmd_sweep)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NumericalBlowupError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except (NormPDEError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
