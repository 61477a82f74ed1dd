"""End-to-end acceptance gate: eight criteria, one PASS/FAIL line each.

Criteria 1, 2, 7, 8 are strict numerical equivalences and hold tightly.
Criteria 3-6 run 1000-atom ensembles against target deflection and
energy-transfer magnitudes.  At the documented irradiance normalization
(peak intensity over the sampled window equals the configured irradiance,
see README) the optical channel wall is far shallower than those targets
assume, so the deflection-magnitude clauses fail and are EXPECTED to
fail here; each one reports the measured value next to the target.  The
analysis lives in README under "Known failing criteria".  Nothing in
this file is tuned to force a pass.
"""

import math
import time
from dataclasses import replace

import numpy as np
import pytest

from weberatom.beams import (
    BeamSpec,
    calibrate_amplitude,
    em_fields,
    find_um,
    max_deflection_angle,
    scalar_psi,
)
from weberatom.dynamics import (
    AtomState,
    CloudConfig,
    a_atomic,
    deflection_angle,
    integrate,
    run_ensemble,
    sample_cloud,
)
from weberatom.force import (
    coupling_sample,
    mean_force,
    mean_force_at_rest,
    node_threshold_g2,
)
from weberatom.parabolic import ParabolicPoint, cart_to_parabolic, transverse_gradient
from weberatom.spectrum import scalar_psi_spectrum
from weberatom.units import kinetic_temperature

X0 = 150.0
N_ATOMS = 1000
SEED = 7

PROBE_10 = [(3.0, 4.0), (-8.0, 9.0), (25.0, 1.5), (-2.0, -6.0), (14.0, -3.0),
            (0.5, 7.0), (-20.0, 12.0), (9.0, -11.0), (-5.5, -2.5), (30.0, 6.0)]


def _report(criterion, clauses):
    ok = all(flag for flag, _ in clauses)
    detail = "; ".join(("[ok] " if flag else "[FAIL] ") + text
                       for flag, text in clauses)
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} -- {detail}"
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def low_run(setup):
    """1000 atoms falling through the calibrated 1.725 W/cm^2 beam."""
    base = BeamSpec()
    sp = base.with_scale(calibrate_amplitude(base))
    res = run_ensemble(sp, setup, CloudConfig(n_atoms=N_ATOMS, seed=SEED),
                       threads=1)
    assert not res.failures
    return sp, res


@pytest.fixture(scope="module")
def high_run(setup):
    """Same cloud at 6 W/cm^2, integrated until the exit plane."""
    base = BeamSpec(irradiance=6.0)
    sp = base.with_scale(calibrate_amplitude(base))
    res = run_ensemble(sp, setup, CloudConfig(n_atoms=N_ATOMS, seed=SEED),
                       t_max=2.4e5, threads=1)
    assert not res.failures
    return sp, res


def _angle_arrays(res):
    """Initial y plus attained-maximum and final velocity deflection angles."""
    y0, peak, final = [], [], []
    for rec in res.records:
        arr = np.asarray(rec.states)
        y0.append(arr[0, 1])
        peak.append(np.max(np.arctan2(np.abs(arr[:, 4]), np.abs(arr[:, 3]))))
        final.append(deflection_angle(arr[-1, 3], arr[-1, 4]))
    return np.array(y0), np.array(peak), np.array(final)


def _shrink_after_crossing(rec):
    """|y| at the end minus |y| where the trajectory first crossed x = 0."""
    states = rec.states
    prev = states[0]
    for cur in states[1:]:
        if prev[0] >= 0.0 > cur[0]:
            frac = prev[0] / (prev[0] - cur[0])
            y_cross = prev[1] + frac * (cur[1] - prev[1])
            return abs(states[-1][1]) - abs(y_cross)
        prev = cur
    return None


def test_c1_field_synthesis_equivalence():
    t0 = time.monotonic()
    worst = 0.0
    for parity in ("even", "odd"):
        for a in (-5.0, -2.0, 0.0, 5.0):
            sp = BeamSpec(parity=parity, order_a=a)
            sv = np.array([scalar_psi_spectrum(sp, x, y) for x, y in PROBE_10])
            hv = np.array([scalar_psi(sp, cart_to_parabolic(x, y)).psi
                           for x, y in PROBE_10])
            c = np.vdot(hv, sv) / np.vdot(hv, hv)
            worst = max(worst, float(np.max(np.abs(sv - c * hv))
                                     / np.max(np.abs(sv))))
    elapsed = time.monotonic() - t0
    _report(1, [
        (worst <= 1e-6,
         f"plane-wave synthesis vs product form: fitted-constant residual "
         f"{worst:.2e} <= 1e-6 over 8 (parity, order) combos x 10 points"),
        (elapsed < 60.0, f"elapsed {elapsed:.1f}s < 60s"),
    ])


def test_c2_dark_region_geometry():
    t0 = time.monotonic()
    um5 = find_um(BeamSpec(order_a=-5.0))
    width = 2.0 * um5 * um5
    ums = [find_um(BeamSpec(order_a=float(a))) for a in (0, 1, 2, 5, 10)]
    grows = all(b > a for a, b in zip(ums, ums[1:]))
    elapsed = time.monotonic() - t0
    _report(2, [
        (40.0 <= width <= 60.0,
         f"dark-zone width 2 u_M^2 = {width:.2f} lambda inside 50 +-20%"),
        (grows, "u_M strictly increasing over |a| in {0,1,2,5,10}: "
         + ", ".join(f"{u:.3f}" for u in ums)),
        (elapsed < 60.0, f"elapsed {elapsed:.1f}s < 60s"),
    ])


def test_c3_low_irradiance_split(low_run):
    _, res = low_run
    y0, peak, final = _angle_arrays(res)
    dark = (np.abs(y0) > 1.0) & (np.abs(y0) < 50.0)
    outer = (np.abs(y0) > 80.0) & (np.abs(y0) < 150.0)
    peak_dark = float(peak[dark].max())
    end_outer = float(final[outer].max())
    _report(3, [
        (0.17 * 0.65 <= peak_dark <= 0.17 * 1.35,
         f"dark-band (1 < |y0| < 50, n={int(dark.sum())}) attained max "
         f"deflection {peak_dark:.4f} rad vs target 0.17 +-35%"),
        (end_outer < 0.05,
         f"outer band (80 < |y0| < 150, n={int(outer.sum())}) ends nearly "
         f"vertical: max final deflection {end_outer:.4f} < 0.05 rad"),
    ])


def test_c4_high_irradiance_split(high_run):
    sp, res = high_run
    y0, peak, _ = _angle_arrays(res)
    um = find_um(sp)
    dark = (np.abs(y0) > 1.0) & (np.abs(y0) < 2.0 * um * um)
    peak_dark = float(peak[dark].max())
    bound = max_deflection_angle(um, X0)
    overall = float(peak.max())
    band = (np.abs(y0) > 80.0) & (np.abs(y0) < 120.0)
    shrinks = [s for rec, in_band in zip(res.records, band) if in_band
               for s in [_shrink_after_crossing(rec)] if s is not None]
    mean_shrink = float(np.mean(shrinks))
    _report(4, [
        (0.35 * 0.65 <= peak_dark <= 0.35 * 1.35,
         f"dark-zone attained max deflection {peak_dark:.4f} rad vs target "
         f"0.35 +-35%"),
        (overall <= 1.15 * bound,
         f"no atom exceeds the geometric bound: max {overall:.4f} <= "
         f"1.15 x {bound:.4f} rad"),
        (mean_shrink < 0.0,
         f"net focusing for 80 < |y0| < 120 after crossing x = 0: mean "
         f"d|y| = {mean_shrink:+.3f} lambda over n={len(shrinks)} atoms"),
    ])


def test_c5_angular_momentum_transfer(low_run, setup):
    sp, res = low_run
    initial = [abs(a_atomic(sp, setup, s[0], s[1], s[3], s[4]))
               for s in (rec.states[0] for rec in res.records)]
    cap = max(initial)
    deflected = [rec for rec in res.records if rec.outcome == "dark_deflected"]
    if deflected:
        finals = [abs(a_atomic(sp, setup, s[0], s[1], s[3], s[4]))
                  for s in (rec.final_state for rec in deflected)]
        frac = float(np.mean([1e3 <= v <= 1e4 for v in finals]))
    else:
        frac = 0.0
    _report(5, [
        (cap <= 150.0,
         f"initial |A| <= 150 for every atom (sampled max {cap:.1f})"),
        (len(deflected) > 0 and frac >= 0.80,
         f"dark_deflected class n={len(deflected)}; fraction ending with "
         f"|A| in [1e3, 1e4] = {frac:.2f} (need >= 0.80 of a non-empty "
         f"class)"),
    ])


def test_c6_energy_budget(low_run, setup):
    sp, res = low_run
    y0 = np.array([rec.states[0][1] for rec in res.records])
    finals = [rec.final_state for rec in res.records]
    kx = np.array([kinetic_temperature(setup, s[3]) * 1e6 for s in finals])
    kyz = np.array([kinetic_temperature(setup, math.hypot(s[4], s[5])) * 1e6
                    for s in finals])
    um = find_um(sp)
    hi = 2.0 * um * um
    dark = (np.abs(y0) > 1.0) & (np.abs(y0) < hi)
    bright = (np.abs(y0) > hi) & (np.abs(y0) <= 150.0)
    _report(6, [
        (10.0 <= float(kx.mean()) <= 30.0,
         f"mean final K_x = {kx.mean():.2f} uK inside 20 +-50%"),
        (float(kyz[dark].max()) < 1.0,
         f"dark-zone final K_yz stays cold: max {kyz[dark].max():.4f} < 1 uK"),
        (float(kyz[dark].std()) < float(kyz[bright].std()),
         f"K_yz spread dark {kyz[dark].std():.2e} vs bright "
         f"{kyz[bright].std():.2e} uK (need dark < bright)"),
    ])


def test_c7_property_suite(spec, setup):
    pts = [(3.0, 4.0), (-8.0, 9.0), (40.0, 12.0)]
    clauses = []

    w = max(abs(em_fields(spec, cart_to_parabolic(x, -y)).intensity
                - em_fields(spec, cart_to_parabolic(x, y)).intensity)
            / em_fields(spec, cart_to_parabolic(x, y)).intensity
            for x, y in pts)
    clauses.append((w < 1e-10, f"mirror symmetry of intensity in y, rel {w:.1e}"))

    flipped = replace(spec, order_a=-spec.order_a)
    w = 0.0
    for x, y in pts:
        p = cart_to_parabolic(x, y)
        direct = scalar_psi(spec, p).psi
        swapped = scalar_psi(flipped, ParabolicPoint(u=p.v, v=p.u)).psi
        w = max(w, abs(swapped - direct) / abs(direct))
    clauses.append((w < 1e-12, f"order reflection a -> -a, rel {w:.1e}"))

    def fd_worst(h):
        w = 0.0
        for x, y in pts:
            p = cart_to_parabolic(x, y)
            d = scalar_psi(spec, p)
            gx, gy = transverse_gradient(d.dpsi_du, d.dpsi_dv, p.u, p.v)
            fx = (scalar_psi(spec, cart_to_parabolic(x + h, y)).psi
                  - scalar_psi(spec, cart_to_parabolic(x - h, y)).psi) / (2 * h)
            fy = (scalar_psi(spec, cart_to_parabolic(x, y + h)).psi
                  - scalar_psi(spec, cart_to_parabolic(x, y - h)).psi) / (2 * h)
            scale = math.hypot(abs(gx), abs(gy))
            w = max(w, abs(fx - gx) / scale, abs(fy - gy) / scale)
        return w

    coarse, fine = fd_worst(1e-3), fd_worst(5e-4)
    clauses.append((fine < 1e-7 and 3.0 < coarse / fine < 5.0,
                    f"analytic gradient vs central differences: fine error "
                    f"{fine:.1e}, halving ratio {coarse / fine:.2f}"))

    h = 1e-3
    w = 0.0
    for x, y in pts:
        def e_at(xx, yy):
            return em_fields(spec, cart_to_parabolic(xx, yy)).e_cartesian
        ex = (e_at(x + h, y)[0] - e_at(x - h, y)[0]) / (2 * h)
        ey = (e_at(x, y + h)[1] - e_at(x, y - h)[1]) / (2 * h)
        e0 = e_at(x, y)
        div = ex + ey + 1j * spec.kz_natural * e0[2]
        w = max(w, abs(div) / (spec.k_natural * max(abs(c) for c in e0)))
    clauses.append((w <= 1e-6, f"div E = 0, rel {w:.1e}"))

    s = coupling_sample(spec, setup, cart_to_parabolic(-8.0, 9.0))
    clauses.append((s.p_prime == s.p, "p'(v = 0) == p bitwise"))

    dead = spec.with_scale(0.0)
    rec = integrate(dead, setup,
                    AtomState(X0, 10.0, 0.0, -0.6e-3, 0.0, 0.0), t_max=6e4)
    t = rec.times[-1]
    g = setup.gravity_natural
    err = abs(rec.final_state[0] - (X0 - 0.6e-3 * t - 0.5 * g * t * t))
    clauses.append((err < 1e-9 and rec.final_state[4] == 0.0,
                    f"gravity-only trajectory vs closed form, abs {err:.1e}"))

    cc = CloudConfig(n_atoms=50, seed=123)
    same_cloud = (sample_cloud(cc, spec=spec, setup=setup)
                  == sample_cloud(cc, spec=spec, setup=setup))
    clauses.append((same_cloud, "cloud sampling is seed-deterministic bitwise"))

    small = CloudConfig(n_atoms=12, seed=5)
    r1 = run_ensemble(spec, setup, small, t_max=4e4, threads=1)
    r2 = run_ensemble(spec, setup, small, t_max=4e4, threads=3)
    same_runs = all(a.times == b.times and a.states == b.states
                    for a, b in zip(r1.records, r2.records))
    clauses.append((same_runs, "threaded ensemble bitwise equals sequential"))

    _report(7, clauses)


def test_c8_rest_reduction_and_attraction(spec, setup):
    rng = np.random.default_rng(2024)
    worst = 0.0
    sentinels_agree = True
    for x, y in rng.uniform(-150.0, 150.0, size=(100, 2)):
        p = cart_to_parabolic(x, y)
        full = mean_force(spec, setup, p)
        rest = mean_force_at_rest(spec, setup, p)
        if full.sentinel or rest.sentinel:
            sentinels_agree &= (full.sentinel == rest.sentinel
                                and full.force == rest.force == (0.0, 0.0, 0.0))
            continue
        scale = max(abs(c) for c in rest.force)
        worst = max(worst, max(abs(a - b) for a, b
                               in zip(full.force, rest.force)) / scale)

    rng2 = np.random.default_rng(77)
    checked = attracted = 0
    while checked < 100:
        x, y = rng2.uniform(-150.0, 150.0, size=2)
        p = cart_to_parabolic(x, y)
        s = coupling_sample(spec, setup, p)
        if abs(s.g) ** 2 < node_threshold_g2(setup):
            continue
        checked += 1
        f = mean_force_at_rest(spec, setup, p)
        if f.force[0] * s.alpha[0] + f.force[1] * s.alpha[1] > 0.0:
            attracted += 1
    _report(8, [
        (worst <= 1e-12 and sentinels_agree,
         f"general force at v = 0 vs independent rest reduction: worst rel "
         f"{worst:.2e} <= 1e-12 over 100 points (sentinels agree: "
         f"{sentinels_agree})"),
        (attracted == checked,
         f"red-detuned rest force points up the |g| gradient at "
         f"{attracted}/{checked} non-nodal points"),
    ])
