"""Compare the compiled and pure-Python trajectory kernels.

Times single-point force evaluation and whole-trajectory integration on
identical inputs, checks the results agree bitwise, and prints a small
table.  Run from the repository root:

    python3 benchmarks/bench_backends.py [n_atoms]
"""

import sys
import time

import numpy as np

from weberatom.backend import available_backends, get_kernel
from weberatom.beams import BeamSpec, calibrate_amplitude
from weberatom.dynamics import CloudConfig, build_kernel_params, sample_cloud
from weberatom.units import PhysicalSetup


def time_force(kern, params, points, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        for x, y in points:
            kern.force_eval(params, x, y, -1.0e-3, 2.0e-5, 1.0e-5)
        best = min(best, time.perf_counter() - start)
    return best / len(points)


def time_integrate(kern, params, states, t_max=4.0e4):
    start = time.perf_counter()
    out = []
    for st in states:
        out.append(kern.integrate(params, st, t_max, 1e-8, 1000.0, -150.0))
    return time.perf_counter() - start, out


def main():
    n_atoms = int(sys.argv[1]) if len(sys.argv) > 1 else 20
    backends = available_backends()
    print(f"available backends: {', '.join(backends)}")
    if len(backends) < 2:
        print("compiled kernel not built; nothing to compare")
        return 1

    setup = PhysicalSetup()
    base = BeamSpec()
    spec = base.with_scale(calibrate_amplitude(base))
    params = build_kernel_params(spec, setup)

    rng = np.random.default_rng(99)
    points = [(float(x), float(y))
              for x, y in rng.uniform(-120.0, 120.0, size=(400, 2))]
    states = [s.as_tuple() for s in sample_cloud(
        CloudConfig(n_atoms=n_atoms, seed=17), spec, setup)]

    rows = []
    results = {}
    for name in backends:
        kern = get_kernel(name)
        t_force = time_force(kern, params, points)
        t_int, out = time_integrate(kern, params, states)
        results[name] = out
        rows.append((name, t_force * 1e6, t_int))

    forces_equal = all(
        get_kernel("cython").force_eval(params, x, y, -1e-3, 2e-5, 1e-5)
        == get_kernel("python").force_eval(params, x, y, -1e-3, 2e-5, 1e-5)
        for x, y in points)
    traj_equal = all(
        a[0] == b[0] and a[1] == b[1]
        for a, b in zip(results["cython"], results["python"]))

    print(f"\n{'backend':<10}{'force_eval us/call':>20}"
          f"{'integrate s/%d atoms' % n_atoms:>24}")
    for name, us, sec in rows:
        print(f"{name:<10}{us:>20.3f}{sec:>24.3f}")
    by = {name: sec for name, _, sec in rows}
    print(f"\nspeedup (integrate): {by['python'] / by['cython']:.1f}x")
    print(f"bitwise agreement:   forces {'yes' if forces_equal else 'NO'}, "
          f"trajectories {'yes' if traj_equal else 'NO'}")
    return 0 if (forces_equal and traj_equal) else 1


if __name__ == "__main__":
    sys.exit(main())
