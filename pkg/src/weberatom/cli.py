"""Command-line entry points.

Four subcommands produce the reproduction artifacts:

``field-map``   transverse intensity / scalar-profile map as CSV
``um-curve``    first-envelope-maximum coordinate u_M versus order a
``simulate``    falling-cloud ensemble: trajectory CSV + JSON summary
``validate``    quick oracle & invariant battery with pass/fail exit code

Every command resolves the run configuration (file + flag overrides),
creates the output directory, and writes ``run_metadata.json`` recording
the fully resolved config, seed, code version, and the amplitude
calibration scale actually used — the irradiance normalization is a
convention, so results are meaningless without it.

Exit codes: 0 success, 1 usage/config error, 2 validation failure,
3 runtime numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .backend import backend_name
from .beams import calibrate_amplitude, find_um, intensity_grid
from .config import (
    ConfigError,
    RunConfig,
    config_as_dict,
    parse_config_file,
    with_overrides,
)
from .dynamics import (
    DEFAULT_X_EXIT,
    direct_kernel,
    observables,
    run_ensemble,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems through the exit-code contract."""

    def error(self, message):
        raise _UsageError(message)


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="run configuration file (default: all defaults)")
    common.add_argument("--seed", type=lambda s: int(s, 0), default=None,
                        help="override cloud.seed")
    common.add_argument("--out", metavar="DIR", default=None,
                        help="override output.directory")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads for the ensemble (default: auto)")

    parser = _Parser(prog="weberatom",
                     description="vector beam / falling-atom simulation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("field-map", parents=[common],
                       help="export intensity and scalar profile on a grid")
    p.add_argument("--window", type=float, default=200.0,
                   help="half width of the square grid in wavelengths")
    p.add_argument("--resolution", type=int, default=256,
                   help="points per axis")
    p.set_defaults(func=cmd_field_map)

    p = sub.add_parser("um-curve", parents=[common],
                       help="export u_M as a function of the order a")
    p.add_argument("--a-min", type=float, default=-10.0)
    p.add_argument("--a-max", type=float, default=10.0)
    p.add_argument("--a-step", type=float, default=0.5)
    p.set_defaults(func=cmd_um_curve)

    p = sub.add_parser("simulate", parents=[common],
                       help="integrate a falling-atom ensemble")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", parents=[common],
                       help="run the oracle/invariant battery")
    p.set_defaults(func=cmd_validate)
    return parser


def _load_config(args):
    if args.config:
        config = parse_config_file(args.config)
    else:
        config = RunConfig()
    return with_overrides(config, seed=args.seed, out_dir=args.out)


def _resolve_beam(config):
    """Calibrated beam and the calibration scale that was applied.

    ``beam.amplitude_scale`` from the config acts as a multiplier on top
    of the irradiance calibration (1.0 means exactly calibrated).
    """
    base = config.beam
    cal = calibrate_amplitude(base)
    return base.with_scale(base.amplitude_scale * cal), cal


def _prepare_out(config):
    out_dir = config.output.directory
    os.makedirs(out_dir, exist_ok=True)
    return out_dir


def _write_metadata(out_dir, config, calibration_scale):
    meta = {
        "version": __version__,
        "backend": backend_name,
        "seed": config.cloud.seed,
        "calibration_scale": repr(float(calibration_scale)),
        "config": config_as_dict(config),
    }
    path = os.path.join(out_dir, "run_metadata.json")
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(meta, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return path


def _csv_writer(handle):
    return csv.writer(handle, lineterminator="\n")


def _r(value):
    """Full round-trip decimal formatting for CSV cells."""
    return repr(float(value))


def cmd_field_map(args, config):
    spec, cal = _resolve_beam(config)
    out_dir = _prepare_out(config)
    xs, ys, inten, psi = intensity_grid(spec, half_width=args.window,
                                        n=args.resolution)
    path = os.path.join(out_dir, "field_map.csv")
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = _csv_writer(handle)
        writer.writerow(["x_lambda", "y_lambda", "intensity_W_cm2",
                         "re_psi", "im_psi"])
        # row-major: x varies fastest within each y row; psi is the
        # unit-amplitude scalar profile (real in this convention)
        for iy in range(len(ys)):
            for ix in range(len(xs)):
                writer.writerow([_r(xs[ix]), _r(ys[iy]), _r(inten[iy, ix]),
                                 _r(psi[iy, ix]), _r(0.0)])
    _write_metadata(out_dir, config, cal)
    print(f"field-map: {len(xs)}x{len(ys)} grid -> {path}")
    return 0


def cmd_um_curve(args, config):
    if args.a_step <= 0.0:
        raise _UsageError("--a-step must be positive")
    if args.a_max < args.a_min:
        raise _UsageError("--a-max must be >= --a-min")
    spec, cal = _resolve_beam(config)
    out_dir = _prepare_out(config)
    count = int(math.floor((args.a_max - args.a_min) / args.a_step + 1e-9)) + 1
    path = os.path.join(out_dir, "um_curve.csv")
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = _csv_writer(handle)
        writer.writerow(["a", "u_M"])
        for i in range(count):
            a = args.a_min + i * args.a_step
            u_m = find_um(replace(spec, order_a=a))
            writer.writerow([_r(a), _r(u_m)])
    _write_metadata(out_dir, config, cal)
    print(f"um-curve: {count} orders -> {path}")
    return 0


def cmd_simulate(args, config):
    spec, cal = _resolve_beam(config)
    setup, cloud, sim = config.setup, config.cloud, config.sim
    out_dir = _prepare_out(config)
    kern = None
    if not sim.grid:
        kern = direct_kernel(spec, setup, denominator=sim.force_denominator,
                             x_window=sim.x_window)
    result = run_ensemble(spec, setup, cloud, t_max=sim.t_max, tol=sim.tol,
                          cadence=config.output.cadence, x_exit=DEFAULT_X_EXIT,
                          denominator=sim.force_denominator,
                          x_window=sim.x_window, threads=args.threads,
                          kern=kern)

    traj_path = os.path.join(out_dir, "trajectories.csv")
    with open(traj_path, "w", encoding="utf-8", newline="") as handle:
        writer = _csv_writer(handle)
        writer.writerow(["atom_id", "t", "x", "y", "z", "vx", "vy", "vz",
                         "theta_d", "A_atomic", "Kx_uK", "Kyz_uK"])
        for rec in result.records:
            if rec is None:
                continue
            obs = observables(rec, spec, setup)
            for j, state in enumerate(rec.states):
                writer.writerow(
                    [str(rec.atom_id), _r(rec.times[j])]
                    + [_r(v) for v in state]
                    + [_r(obs["theta_d"][j]), _r(obs["a_atomic"][j]),
                       _r(obs["kx_uK"][j]), _r(obs["kyz_uK"][j])])

    summary = result.summary(spec, setup)
    summary["failures"] = [[i, msg] for i, msg in result.failures]
    summary_path = os.path.join(out_dir, "summary.json")
    with open(summary_path, "w", encoding="utf-8") as handle:
        json.dump(summary, handle, indent=2, sort_keys=True)
        handle.write("\n")
    _write_metadata(out_dir, config, cal)
    print(f"simulate: {summary['n_atoms']} atoms "
          f"({summary['n_failed']} failed) -> {traj_path}")
    print("classes: " + ", ".join(f"{k}={v}"
                                  for k, v in summary["classes"].items()))
    return 0


def cmd_validate(args, config):
    """Fast oracle/invariant battery; exit 0 only if every check passes."""
    from . import force as force_mod
    from .beams import scalar_psi
    from .parabolic import cart_to_parabolic
    from .spectrum import scalar_psi_spectrum

    spec, cal = _resolve_beam(config)
    setup = config.setup
    out_dir = _prepare_out(config)
    checks = []

    def check(name, passed, detail):
        checks.append((name, bool(passed), detail))

    # 1. product-form field vs independent angular-spectrum synthesis
    rng = np.random.default_rng(2024)
    pts = [(float(x), float(y))
           for x, y in rng.uniform(-8.0, 8.0, size=(4, 2))]
    worst = 0.0
    for parity in ("even", "odd"):
        probe = replace(spec, parity=parity)
        ratio = None
        for x, y in pts:
            ref = scalar_psi_spectrum(probe, x, y)
            val = scalar_psi(probe, cart_to_parabolic(x, y)).psi
            if ratio is None:
                if abs(ref) < 1e-12 or abs(val) < 1e-12:
                    continue
                ratio = ref / val
                continue
            err = abs(val * ratio - ref) / max(abs(ref), 1e-30)
            worst = max(worst, err)
    check("field-synthesis", worst <= 1e-6, f"max rel residual {worst:.3e}")

    # 2. mirror symmetry of |psi|
    worst = 0.0
    for x, y in rng.uniform(-20.0, 20.0, size=(24, 2)):
        p1 = scalar_psi(spec, cart_to_parabolic(float(x), float(y))).psi
        p2 = scalar_psi(spec, cart_to_parabolic(float(x), -float(y))).psi
        worst = max(worst, abs(abs(p1) - abs(p2)))
    check("mirror-symmetry", worst <= 1e-10, f"max |psi| asymmetry {worst:.3e}")

    # 3. v = 0 force reduction
    worst = 0.0
    skipped = 0
    for x, y in rng.uniform(-30.0, 30.0, size=(20, 2)):
        p = cart_to_parabolic(float(x), float(y))
        full = force_mod.mean_force(spec, setup, p)
        rest = force_mod.mean_force_at_rest(spec, setup, p)
        if full.sentinel or rest.sentinel:
            skipped += 1
            continue
        num = math.sqrt(sum((a - b) ** 2
                            for a, b in zip(full.force, rest.force)))
        den = max(math.sqrt(sum(b * b for b in rest.force)), 1e-300)
        worst = max(worst, num / den)
    check("rest-force-reduction", worst <= 1e-12,
          f"max rel diff {worst:.3e} ({skipped} nodal points skipped)")

    # 4. gravity-only closed form (zero amplitude)
    from .dynamics import AtomState, integrate as integrate_one
    dark = replace(spec, amp_te=0j, amp_tm=0j, amplitude_scale=1.0)
    state = AtomState(150.0, 30.0, 0.0, -6e-4, 2e-5, 0.0)
    rec = integrate_one(dark, setup, state, t_max=5e4, tol=1e-10)
    g = setup.gravity_natural
    t_end = rec.times[-1]
    x_ref = state.x + state.vx * t_end - 0.5 * g * t_end**2
    y_ref = state.y + state.vy * t_end
    err = max(abs(rec.final_state[0] - x_ref), abs(rec.final_state[1] - y_ref))
    check("free-fall-closed-form", err <= 1e-6, f"max position err {err:.3e}")

    # 5. determinism: same seed twice, bitwise
    cloud = replace(config.cloud, n_atoms=5)
    runs = []
    for _ in range(2):
        res = run_ensemble(spec, setup, cloud, t_max=2e4, threads=2)
        runs.append([r.final_state for r in res.records])
    check("seed-determinism", runs[0] == runs[1],
          "identical reruns" if runs[0] == runs[1] else "reruns differ")

    # 6. compiled/pure backend agreement (when both are available)
    from .backend import available_backends, get_kernel
    if len(available_backends()) > 1:
        from .dynamics import build_kernel_params
        par = build_kernel_params(spec, setup)
        k_c = get_kernel("cython")
        k_p = get_kernel("python")
        same = True
        for x, y in rng.uniform(-40.0, 40.0, size=(50, 2)):
            a = k_c.force_eval(par, float(x), float(y), -1e-3, 1e-5, 0.0)
            b = k_p.force_eval(par, float(x), float(y), -1e-3, 1e-5, 0.0)
            if a != b:
                same = False
                break
        check("backend-parity", same,
              "bitwise equal" if same else f"mismatch at ({x}, {y})")
    else:
        check("backend-parity", True, "single backend present (skipped)")

    lines = []
    ok = True
    for name, passed, detail in checks:
        ok = ok and passed
        line = f"{'PASS' if passed else 'FAIL'} {name}: {detail}"
        lines.append(line)
        print(line)
    report = os.path.join(out_dir, "validate_report.txt")
    with open(report, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")
    _write_metadata(out_dir, config, cal)
    print(("validate: all checks passed" if ok
           else "validate: FAILURES present") + f" -> {report}")
    return 0 if ok else 2


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 1
    try:
        config = _load_config(args)
    except (ConfigError, OSError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return 1
    try:
        return args.func(args, config)
    except _UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 1
    except Exception as err:  # runtime numerical failure
        print(f"runtime error: {type(err).__name__}: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
