"""Falling-atom ensembles in the structured beam.

Atoms are released at x0 with a fixed downward speed and small random
transverse velocities, fall under gravity (along -x) plus the mean optical
force, and are classified by how the beam redistributed them: deflected out
of the dark channel, kicked at the bright envelope, focused toward the axis
past the vertex, or essentially undisturbed.

Trajectories are integrated by the selected kernel (see backend.py) on the
precomputed profile tables; `validate_fraction` re-runs a subsample with
direct profile evaluation through an independent integrator and checks
final positions to 1e-3 length units.

Native units throughout: lengths in laser wavelengths, times in inverse
linewidths, velocities in lambda*Gamma.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import force as force_mod
from .backend import KernelParams, kernel as default_kernel
from .beams import dark_parabola, find_um
from .parabolic import cart_to_parabolic
from .tables import FieldTables
from .units import BOLTZMANN, HBAR, detuning_natural, kinetic_temperature

DEFAULT_T_MAX = 1.3e5
DEFAULT_X_EXIT = -150.0
DEFAULT_TOL = 1e-8
DEFAULT_CADENCE = 1000.0

# Initial angular-momentum-transfer cap enforced by the sampler, in units
# of hbar^2 k_perp (|A(0)| <= this for every released atom).
A_INITIAL_CAP = 150.0

# Final velocity-direction threshold separating "deflected" outcomes from
# "weak" ones, radians.
DEFLECTION_THRESHOLD = 0.05

_MAX_REDRAWS = 100_000


@dataclass(frozen=True)
class AtomState:
    x: float
    y: float
    z: float
    vx: float
    vy: float
    vz: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in self.as_tuple()):
            raise ValueError("atom state must be finite")

    def as_tuple(self):
        return (self.x, self.y, self.z, self.vx, self.vy, self.vz)


@dataclass(frozen=True)
class CloudConfig:
    """Release parameters for the falling cloud.

    speed_x is the signed downward velocity (negative).  Transverse
    velocities are isotropic in the y-z plane with magnitude uniform in
    [0, perp_ratio_cap*|speed_x|], so |v_x| >= 10 v_perp holds by
    construction at the default cap.  temperature_equiv is a label tagged
    onto reports (microkelvin); it does not enter the sampling.
    """

    n_atoms: int = 1000
    x0: float = 150.0
    y_band: tuple = (-150.0, 150.0)
    z_band: tuple = (-10.0, 10.0)
    speed_x: float = -0.6e-3
    perp_ratio_cap: float = 0.1
    temperature_equiv: float = 1.5
    seed: int = 7

    def __post_init__(self):
        if self.n_atoms < 1:
            raise ValueError("n_atoms must be at least 1")
        if self.y_band[0] > self.y_band[1] or self.z_band[0] > self.z_band[1]:
            raise ValueError("empty band")
        if self.speed_x >= 0.0:
            raise ValueError("speed_x must be negative (atoms fall toward -x)")
        if not 0.0 <= self.perp_ratio_cap < 1.0:
            raise ValueError("perp_ratio_cap must be in [0, 1)")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")


def a_atomic_coefficient(spec, setup):
    """(L_z P_y)/(hbar^2 k_perp) per unit of the natural-unit product.

    A = m(x v_y - y v_x) * m v_y in natural units times this coefficient
    gives A in hbar^2 k_perp units.
    """
    m = setup.atom_mass
    lam = setup.length_unit
    gamma = setup.gamma
    return (m * m * lam**4 * gamma * gamma) / (HBAR * HBAR * spec.kperp_natural)


def a_atomic(spec, setup, x, y, vx, vy):
    return a_atomic_coefficient(spec, setup) * (x * vy - y * vx) * vy


def _sample_one(config, index, a_coeff):
    """Draw one atom from its private counter-based stream.

    Velocity draws are rejected (position kept) until the initial
    |A_atomic| cap holds, so the y marginal stays exactly uniform.
    """
    rng = np.random.Generator(np.random.Philox(
        key=np.array([config.seed, index], dtype=np.uint64)))
    y0 = float(rng.uniform(config.y_band[0], config.y_band[1]))
    z0 = float(rng.uniform(config.z_band[0], config.z_band[1]))
    cap = config.perp_ratio_cap * abs(config.speed_x)
    for _ in range(_MAX_REDRAWS):
        phi = float(rng.uniform(0.0, 2.0 * math.pi))
        mag = float(rng.uniform(0.0, cap))
        vy = mag * math.cos(phi)
        vz = mag * math.sin(phi)
        transfer = abs(config.x0 * vy - y0 * config.speed_x) * abs(vy)
        if a_coeff * transfer <= A_INITIAL_CAP:
            return AtomState(config.x0, y0, z0, config.speed_x, vy, vz)
    raise RuntimeError(f"atom {index}: could not satisfy the initial "
                       f"angular-transfer cap after {_MAX_REDRAWS} draws")


def sample_cloud(config, spec=None, setup=None):
    """Initial states for the cloud; deterministic for a fixed seed.

    Positions: x = x0, y uniform over y_band, z uniform over z_band.
    Velocities: v_x = speed_x; (v_y, v_z) isotropic with uniform magnitude.
    Each atom draws from a Philox stream keyed by (seed, atom index), so
    the cloud is independent of iteration or thread order.
    """
    if spec is None:
        from .beams import BeamSpec
        spec = BeamSpec()
    if setup is None:
        from .units import PhysicalSetup
        setup = PhysicalSetup()
    a_coeff = a_atomic_coefficient(spec, setup)
    return [_sample_one(config, i, a_coeff) for i in range(config.n_atoms)]


def build_kernel_params(spec, setup, sign="+", denominator="as_printed",
                        x_window=None, tables=None):
    """Flatten beam+setup context into the kernel parameter pack."""
    if tables is None:
        tables = FieldTables.for_spec(spec)
    pref = force_mod.coupling_prefactor(spec, setup, sign)
    lo, hi = x_window if x_window is not None else (-math.inf, math.inf)
    return KernelParams(
        coeff_u=tables.coeff_u, coeff_v=tables.coeff_v, ds=tables.ds,
        parity_odd=1 if spec.parity == "odd" else 0,
        kz=spec.kz_natural, kg=abs(pref) ** 2,
        delta=detuning_natural(setup),
        eps_g2=force_mod.node_threshold_g2(setup),
        eps_den=force_mod.DEN_FLOOR,
        recoil=setup.recoil_parameter, gravity=setup.gravity_natural,
        den_standard=0 if denominator == "as_printed" else 1,
        sign_minus=1 if sign == "-" else 0,
        x_win_lo=lo, x_win_hi=hi)


def acceleration(spec, setup, state, sign="+", denominator="as_printed"):
    """Total acceleration on an atom: optical mean force plus gravity.

    Direct (table-free) evaluation; the integrator uses the tabulated
    equivalent.  Sentinel regions contribute zero optical force.
    """
    r = math.sqrt(state.x * state.x + state.y * state.y)
    if r == 0.0:
        fx = fy = fz = 0.0
    else:
        p = cart_to_parabolic(state.x, state.y)
        res = force_mod.mean_force(spec, setup, p,
                                   velocity=(state.vx, state.vy, state.vz),
                                   z=state.z, sign=sign,
                                   denominator=denominator)
        fx, fy, fz = res.force
    return (fx - setup.gravity_natural, fy, fz)


@dataclass
class TrajectoryRecord:
    """One atom's sampled trajectory plus derived series and outcome."""

    atom_id: int
    times: list
    states: list                  # 6-tuples at the output cadence
    outcome: str = ""
    stats: dict = field(default_factory=dict)

    @property
    def final_state(self):
        return self.states[-1]

    @property
    def arrival_y(self):
        return self.states[0][1]


def deflection_angle(vx, vy):
    """Angle of the velocity from the vertical fall direction, x-y plane."""
    return math.atan2(abs(vy), abs(vx))


def observables(record, spec, setup):
    """Derived series for one record.

    theta_d is the position angle arctan(y/x) evaluated with the
    two-argument arctangent (so x = 0 maps to +-pi/2); a_atomic is
    L_z P_y in hbar^2 k_perp; k_x and k_yz are the per-axis kinetic
    temperatures in microkelvin.
    """
    if not record.states:
        raise ValueError("empty record")
    arr = np.asarray(record.states)
    x, y, vx, vy, vz = arr[:, 0], arr[:, 1], arr[:, 3], arr[:, 4], arr[:, 5]
    coeff = a_atomic_coefficient(spec, setup)
    kelvin = lambda w2: (0.5 * setup.atom_mass * w2 * setup.velocity_unit**2
                         / BOLTZMANN * 1e6)
    return {
        "t": np.asarray(record.times),
        "theta_d": np.arctan2(y, x),
        "a_atomic": coeff * (x * vy - y * vx) * vy,
        "kx_uK": kelvin(vx * vx),
        "kyz_uK": kelvin(vy * vy + vz * vz),
    }


def classify(record, u_m, x0):
    """Outcome taxonomy for one trajectory.

    dark_deflected:  arrival |y| < 2 u_M^2 and final velocity direction
                     more than DEFLECTION_THRESHOLD off vertical;
    bright_strong:   arrival within 2 length units of the delimiting
                     parabola and deflected past the same threshold;
    focused_channel: crossed to x < 0 with |y| shrinking since the crossing
                     and a resolvable transverse impulse (ballistic drift
                     alone keeps v_y constant and must stay "weak");
    weak:            everything else.
    """
    y0 = record.arrival_y
    xf, yf = record.final_state[0], record.final_state[1]
    theta_v = deflection_angle(record.final_state[3], record.final_state[4])
    if abs(y0) < 2.0 * u_m * u_m and theta_v > DEFLECTION_THRESHOLD:
        return "dark_deflected"
    edge = dark_parabola(u_m, x0)
    if (math.isfinite(edge) and abs(abs(y0) - edge) <= 2.0
            and theta_v > DEFLECTION_THRESHOLD):
        return "bright_strong"
    if xf < 0.0 and abs(record.final_state[4] - record.states[0][4]) > 1e-9:
        y_cross = _y_at_crossing(record)
        if y_cross is not None and abs(yf) < abs(y_cross):
            return "focused_channel"
    return "weak"


def _y_at_crossing(record):
    """|y| interpolated where the trajectory first crosses x = 0."""
    prev = record.states[0]
    for cur in record.states[1:]:
        if prev[0] >= 0.0 > cur[0]:
            frac = prev[0] / (prev[0] - cur[0])
            return prev[1] + frac * (cur[1] - prev[1])
        prev = cur
    return None


def integrate(spec, setup, state, t_max=DEFAULT_T_MAX, tol=DEFAULT_TOL,
              cadence=DEFAULT_CADENCE, x_exit=DEFAULT_X_EXIT, sign="+",
              denominator="as_printed", x_window=None, params=None,
              kern=None, atom_id=0):
    """Integrate one atom and return its TrajectoryRecord.

    Adaptive embedded Runge-Kutta 5(4) with PI step control; output states
    are clipped onto the cadence grid plus the final state.  Integration
    ends at t_max or when the atom falls below x_exit.
    """
    if not 1e-12 <= tol <= 1e-4:
        raise ValueError("tol must lie in [1e-12, 1e-4]")
    if t_max <= 0.0:
        raise ValueError("t_max must be positive")
    if params is None:
        params = build_kernel_params(spec, setup, sign=sign,
                                     denominator=denominator,
                                     x_window=x_window)
    if kern is None:
        kern = default_kernel
    times, states, stats = kern.integrate(params, state.as_tuple(), t_max,
                                          tol, cadence, x_exit)
    if stats.get("step_underflow"):
        stats = dict(stats)
        stats["abort_state"] = states[-1]
    rec = TrajectoryRecord(atom_id=atom_id, times=times, states=states,
                           stats=stats)
    u_m = find_um(spec)
    rec.outcome = classify(rec, u_m, state.x)
    return rec


@dataclass
class EnsembleResult:
    records: list                 # TrajectoryRecord or None per atom
    failures: list                # (atom_id, message)
    counts: dict
    diagnostics: dict
    validation: dict = field(default_factory=dict)

    def summary(self, spec=None, setup=None):
        """JSON-shaped aggregate: class counts, deflection quantiles,
        energy statistics, diagnostics."""
        out = {
            "n_atoms": len(self.records),
            "n_failed": len(self.failures),
            "classes": dict(self.counts),
            "diagnostics": dict(self.diagnostics),
        }
        finals = [(r.final_state, r.arrival_y) for r in self.records
                  if r is not None]
        if finals:
            thetas = np.array([deflection_angle(s[3], s[4])
                               for s, _ in finals])
            out["deflection_rad"] = {
                "max": float(thetas.max()),
                "p50": float(np.quantile(thetas, 0.50)),
                "p90": float(np.quantile(thetas, 0.90)),
                "p99": float(np.quantile(thetas, 0.99)),
            }
            zs = np.array([abs(s[2]) for s, _ in finals])
            out["z_excursion_max"] = float(zs.max())
        if spec is not None and setup is not None and finals:
            kx = np.array([kinetic_temperature(setup, s[3]) * 1e6
                           for s, _ in finals])
            kyz = np.array([kinetic_temperature(
                setup, math.sqrt(s[4]**2 + s[5]**2)) * 1e6 for s, _ in finals])
            out["kinetic_uK"] = {
                "kx_mean": float(kx.mean()), "kx_std": float(kx.std()),
                "kyz_mean": float(kyz.mean()), "kyz_std": float(kyz.std()),
            }
        if self.validation:
            out["validation"] = dict(self.validation)
        return out


def run_ensemble(spec, setup, cloud, t_max=DEFAULT_T_MAX, tol=DEFAULT_TOL,
                 cadence=DEFAULT_CADENCE, x_exit=DEFAULT_X_EXIT, sign="+",
                 denominator="as_printed", x_window=None, threads=None,
                 validate_fraction=0.0, kern=None):
    """Integrate a whole cloud; deterministic regardless of thread count.

    `cloud` is a CloudConfig (sampled here) or an explicit list of
    AtomState.  Atoms run as independent tasks over a shared read-only
    context; results are reduced in atom order, so concurrent and
    sequential runs are observationally identical.  Per-atom failures are
    recorded and never abort the ensemble.
    """
    if isinstance(cloud, CloudConfig):
        states = sample_cloud(cloud, spec=spec, setup=setup)
    else:
        states = list(cloud)
    if not states:
        raise ValueError("cloud is empty")
    params = build_kernel_params(spec, setup, sign=sign,
                                 denominator=denominator, x_window=x_window)
    if kern is None:
        kern = default_kernel
    u_m = find_um(spec)
    x0 = states[0].x

    def one(i):
        st = states[i]
        rec = TrajectoryRecord(atom_id=i, times=[], states=[])
        times, st_list, stats = kern.integrate(params, st.as_tuple(), t_max,
                                               tol, cadence, x_exit)
        rec.times, rec.states, rec.stats = times, st_list, stats
        rec.outcome = classify(rec, u_m, x0)
        return rec

    n = len(states)
    records = [None] * n
    failures = []
    if threads is None:
        import os
        threads = min(8, os.cpu_count() or 1)
    if threads <= 1:
        for i in range(n):
            try:
                records[i] = one(i)
            except Exception as err:  # per-atom isolation
                failures.append((i, f"{type(err).__name__}: {err}"))
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(one, i) for i in range(n)]
        for i, fut in enumerate(futures):
            try:
                records[i] = fut.result()
            except Exception as err:  # per-atom isolation
                failures.append((i, f"{type(err).__name__}: {err}"))

    counts = {"dark_deflected": 0, "bright_strong": 0,
              "focused_channel": 0, "weak": 0}
    diag = {"steps": 0, "rejected": 0, "node_sentinels": 0,
            "den_sentinels": 0, "range_sentinels": 0, "underflows": 0}
    for rec in records:
        if rec is None:
            continue
        counts[rec.outcome] += 1
        diag["steps"] += rec.stats.get("steps", 0)
        diag["rejected"] += rec.stats.get("rejected", 0)
        for key in ("node_sentinels", "den_sentinels", "range_sentinels"):
            diag[key] += rec.stats.get(key, 0)
        if rec.stats.get("step_underflow"):
            diag["underflows"] += 1
    result = EnsembleResult(records=records, failures=failures,
                            counts=counts, diagnostics=diag)
    if validate_fraction > 0.0:
        result.validation = _validate_subsample(
            spec, setup, states, records, validate_fraction, tol, sign,
            denominator, x_window)
    return result


class _DirectKernel:
    """Kernel-protocol adapter driving the table-free force evaluation.

    Drop-in for the compiled/pure kernels (the ``kern`` argument of
    run_ensemble/integrate) when the interpolation grid is switched off.
    Orders of magnitude slower; sentinel diagnostics are not tracked on
    this path.
    """

    def __init__(self, spec, setup, sign="+", denominator="as_printed",
                 x_window=None):
        self.spec = spec
        self.setup = setup
        self.sign = sign
        self.denominator = denominator
        self.x_window = x_window

    def integrate(self, params, state0, t_max, tol, cadence, x_exit):
        from scipy.integrate import solve_ivp

        g_nat = self.setup.gravity_natural
        lo, hi = (self.x_window if self.x_window is not None
                  else (-math.inf, math.inf))
        spec, setup = self.spec, self.setup
        sign, denominator = self.sign, self.denominator

        def rhs(_t, yv):
            x, y, z, vx, vy, vz = yv
            if x < lo or x > hi or (x == 0.0 and y == 0.0):
                return [vx, vy, vz, -g_nat, 0.0, 0.0]
            p = cart_to_parabolic(x, y)
            res = force_mod.mean_force(spec, setup, p, velocity=(vx, vy, vz),
                                       z=z, sign=sign, denominator=denominator)
            fx, fy, fz = res.force
            return [vx, vy, vz, fx - g_nat, fy, fz]

        def hit_exit(_t, yv):
            return yv[0] - x_exit

        hit_exit.terminal = True
        hit_exit.direction = -1.0

        grid = np.arange(0.0, t_max, cadence)
        t_eval = np.append(grid, t_max)
        sol = solve_ivp(rhs, (0.0, t_max), list(state0), method="RK45",
                        rtol=tol, atol=[tol * 1e-2] * 3 + [tol * 1e-5] * 3,
                        t_eval=t_eval, events=hit_exit)
        if not sol.success:
            raise RuntimeError(f"direct integration failed: {sol.message}")
        times = [float(t) for t in sol.t]
        states = [tuple(float(v) for v in sol.y[:, j])
                  for j in range(sol.y.shape[1])]
        if sol.status == 1:  # stopped on the x_exit event
            t_ev = float(sol.t_events[0][0])
            if not times or times[-1] < t_ev:
                times.append(t_ev)
                states.append(tuple(float(v) for v in sol.y_events[0][0]))
        stats = {"steps": int(sol.nfev // 6), "rejected": 0,
                 "node_sentinels": 0, "den_sentinels": 0,
                 "range_sentinels": 0, "step_underflow": 0}
        return times, states, stats


def direct_kernel(spec, setup, sign="+", denominator="as_printed",
                  x_window=None):
    """Table-free integration backend (the ``grid = off`` switch)."""
    return _DirectKernel(spec, setup, sign=sign, denominator=denominator,
                         x_window=x_window)


def _validate_subsample(spec, setup, states, records, fraction, tol, sign,
                        denominator, x_window):
    """Re-run a trajectory subsample with direct field evaluation.

    Independent check on the interpolation tables and the kernel: an
    off-the-shelf adaptive integrator drives the table-free force to the
    same final time, and final positions must agree within 1e-3 length
    units.
    """
    from scipy.integrate import solve_ivp

    stride = max(1, int(round(1.0 / fraction)))
    g_nat = setup.gravity_natural
    lo, hi = x_window if x_window is not None else (-math.inf, math.inf)

    def rhs(_t, yv):
        x, y, z, vx, vy, vz = yv
        if x < lo or x > hi or (x == 0.0 and y == 0.0):
            return [vx, vy, vz, -g_nat, 0.0, 0.0]
        p = cart_to_parabolic(x, y)
        res = force_mod.mean_force(spec, setup, p, velocity=(vx, vy, vz),
                                   z=z, sign=sign, denominator=denominator)
        fx, fy, fz = res.force
        return [vx, vy, vz, fx - g_nat, fy, fz]

    checked = 0
    worst = 0.0
    for i in range(0, len(states), stride):
        rec = records[i]
        if rec is None or not rec.times:
            continue
        t_end = rec.times[-1]
        sol = solve_ivp(rhs, (0.0, t_end), list(states[i].as_tuple()),
                        method="RK45", rtol=tol,
                        atol=[tol * 1e-2] * 3 + [tol * 1e-5] * 3)
        if not sol.success:
            return {"checked": checked, "max_position_diff": math.inf,
                    "ok": False, "failed_atom": i}
        final = sol.y[:, -1]
        diff = max(abs(final[j] - rec.final_state[j]) for j in range(3))
        worst = max(worst, diff)
        checked += 1
    return {"checked": checked, "max_position_diff": worst,
            "ok": worst <= 1e-3}
