"""Pure-Python trajectory kernel, mirror of the compiled extension.

Same algorithm, same arithmetic, same operation order as _kernel.pyx, so on
IEEE-754 hardware the two produce bitwise-identical trajectories (the
extension is built with floating-point contraction disabled).  Roughly two
orders of magnitude slower; selected when the extension is missing or
WEBERATOM_FORCE_PYTHON=1 is set.

The right-hand side is gravity along -x plus the mean optical force
evaluated from the piecewise-quintic profile tables; see force.py for the
formula and tables.py for the interpolant.  All arithmetic is real: the
complex log-gradient is carried as explicit (re, im) pairs.
"""

import math


class KernelParams:
    """Flat parameter pack shared by both kernel implementations."""

    __slots__ = ("coeff_u", "coeff_v", "ds", "n_int", "parity_odd", "kz",
                 "kg", "delta", "eps_g2", "eps_den", "recoil", "gravity",
                 "den_standard", "sign_minus", "x_win_lo", "x_win_hi")

    def __init__(self, coeff_u, coeff_v, ds, parity_odd, kz, kg, delta,
                 eps_g2, eps_den, recoil, gravity, den_standard, sign_minus,
                 x_win_lo, x_win_hi):
        self.coeff_u = coeff_u
        self.coeff_v = coeff_v
        self.ds = ds
        self.n_int = coeff_u.shape[0]
        self.parity_odd = parity_odd
        self.kz = kz
        self.kg = kg
        self.delta = delta
        self.eps_g2 = eps_g2
        self.eps_den = eps_den
        self.recoil = recoil
        self.gravity = gravity
        self.den_standard = den_standard
        self.sign_minus = sign_minus
        self.x_win_lo = x_win_lo
        self.x_win_hi = x_win_hi


# sentinel codes returned by the force evaluation
OK, NODE, DEN, RANGE = 0, 1, 2, 3


def _eval_branch(coeff, ds, n_int, parity_odd, s):
    """Profile (q, q', q'') at signed s from monomial table coefficients."""
    sa = -s if s < 0.0 else s
    i = int(sa / ds)
    if i >= n_int:
        return 0.0, 0.0, 0.0, False
    xi = sa / ds - i
    c0 = coeff[i, 0]
    c1 = coeff[i, 1]
    c2 = coeff[i, 2]
    c3 = coeff[i, 3]
    c4 = coeff[i, 4]
    c5 = coeff[i, 5]
    q = ((((c5 * xi + c4) * xi + c3) * xi + c2) * xi + c1) * xi + c0
    d = (((5.0 * c5 * xi + 4.0 * c4) * xi + 3.0 * c3) * xi + 2.0 * c2) * xi + c1
    d2 = ((20.0 * c5 * xi + 12.0 * c4) * xi + 6.0 * c3) * xi + 2.0 * c2
    d = d / ds
    d2 = d2 / (ds * ds)
    if s < 0.0:
        if parity_odd:
            q = -q
            d2 = -d2
        else:
            d = -d
    return q, d, d2, True


def force_eval(par, x, y, vx, vy, vz):
    """Optical acceleration (ax, ay, az, code) in natural units; no gravity."""
    if x < par.x_win_lo or x > par.x_win_hi:
        return 0.0, 0.0, 0.0, OK
    # not math.hypot: CPython's hypot carries an extra correction step that
    # libm's does not, which would break bitwise parity with the extension
    r = math.sqrt(x * x + y * y)
    if r == 0.0:
        return 0.0, 0.0, 0.0, NODE
    if x >= 0.0:
        uu = math.sqrt(r + x)
        v = abs(y) / uu
        u = -uu if y < 0.0 else uu
    else:
        v = math.sqrt(r - x)
        u = y / v
    qu, du, d2u, ok_u = _eval_branch(par.coeff_u, par.ds, par.n_int,
                                     par.parity_odd, u)
    qv, dv, d2v, ok_v = _eval_branch(par.coeff_v, par.ds, par.n_int,
                                     par.parity_odd, v)
    if not (ok_u and ok_v):
        return 0.0, 0.0, 0.0, RANGE
    psi_u = du * qv
    psi_v = qu * dv
    psi_uu = d2u * qv
    psi_uv = du * dv
    psi_vv = qu * d2v

    h2 = u * u + v * v
    s2 = psi_u * psi_u + psi_v * psi_v
    g2 = par.kg * s2 / h2
    if g2 < par.eps_g2:
        return 0.0, 0.0, 0.0, NODE

    # log-gradient of g = C * W * S * e^{i kz z}; all real arithmetic.
    # sign '+': W = 1/(u - iv), S = psi_v - i psi_u; sign '-' conjugates
    # the transverse part (alpha unchanged, transverse beta negated).
    ru = (psi_uv * psi_v + psi_uu * psi_u) / s2
    iu = (psi_uv * psi_u - psi_uu * psi_v) / s2
    rv = (psi_vv * psi_v + psi_uv * psi_u) / s2
    iv = (psi_vv * psi_u - psi_uv * psi_v) / s2
    if par.sign_minus:
        iu = -iu
        iv = -iv
    lure = -u / h2 + ru
    lvre = -v / h2 + rv
    if par.sign_minus:
        luim = v / h2 + iu
        lvim = -u / h2 + iv
    else:
        luim = -v / h2 + iu
        lvim = u / h2 + iv
    ax_ = (u * lure - v * lvre) / h2
    ay_ = (v * lure + u * lvre) / h2
    bx_ = (u * luim - v * lvim) / h2
    by_ = (v * luim + u * lvim) / h2
    bz_ = par.kz

    delta = par.delta
    p = 2.0 * g2 / (0.25 + delta * delta)
    dpop = 1.0 / (1.0 + p)
    va = vx * ax_ + vy * ay_
    vb = vx * bx_ + vy * by_ + vz * bz_
    gre = va * (1.0 - p) / (1.0 + p) + 0.5
    gim = vb - delta
    pp = 2.0 * g2 / (gre * gre + gim * gim)
    if par.den_standard:
        lead = 1.0 + pp
    else:
        lead = 1.0 - pp
    den = lead / pp + 2.0 * dpop * va * (1.0 - p / pp - p)
    if den < par.eps_den and den > -par.eps_den:
        return 0.0, 0.0, 0.0, DEN
    cb = dpop * (1.0 - p) * va + 0.5
    ca = vb - delta
    scale = par.recoil / den
    return (scale * (cb * bx_ + ca * ax_),
            scale * (cb * by_ + ca * ay_),
            scale * (cb * bz_), OK)


def _rhs(par, x, y, vx, vy, vz, counts):
    fx, fy, fz, code = force_eval(par, x, y, vx, vy, vz)
    if code != OK:
        counts[code] += 1
    return fx - par.gravity, fy, fz


# Dormand-Prince 5(4) tableau, FSAL form.
_A21 = 0.2
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = (19372.0 / 6561.0, -25360.0 / 2187.0,
                          64448.0 / 6561.0, -212.0 / 729.0)
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0,
                                46732.0 / 5247.0, 49.0 / 176.0,
                                -5103.0 / 18656.0)
_A71, _A73, _A74, _A75, _A76 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                                -2187.0 / 6784.0, 11.0 / 84.0)
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0,
                                71.0 / 1920.0, -17253.0 / 339200.0,
                                22.0 / 525.0, -1.0 / 40.0)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_VEL_WEIGHT = 1e-3


def integrate(par, state0, t_max, tol, cadence, x_exit):
    """Integrate one atom; returns (times, states, stats).

    times: list of floats; states: list of 6-tuples sampled at the output
    cadence (steps are clipped so samples land exactly on the grid) plus
    the final state; stats: dict of step/sentinel counters.  Terminates at
    t_max or when x drops below x_exit.
    """
    x, y, z, vx, vy, vz = state0
    t = 0.0
    counts = [0, 0, 0, 0]
    n_steps = 0
    n_rejected = 0
    times = [t]
    states = [(x, y, z, vx, vy, vz)]
    rec_index = 1

    k1x, k1y, k1z = _rhs(par, x, y, vx, vy, vz, counts)
    h = 1.0
    err_prev = 1.0
    failed = False
    while t < t_max:
        next_rec = cadence * rec_index
        stop = next_rec if next_rec < t_max else t_max
        clipped = False
        if t + h >= stop:
            h = stop - t
            clipped = True
        if h <= 0.0 or (not clipped and h < 1e-13 * (t + 1.0)):
            failed = True
            break

        # stage 2
        bx = x + h * _A21 * vx
        by = y + h * _A21 * vy
        bz = z + h * _A21 * vz
        bvx = vx + h * _A21 * k1x
        bvy = vy + h * _A21 * k1y
        bvz = vz + h * _A21 * k1z
        k2x, k2y, k2z = _rhs(par, bx, by, bvx, bvy, bvz, counts)
        v2x, v2y, v2z = bvx, bvy, bvz
        # stage 3
        bx = x + h * (_A31 * vx + _A32 * v2x)
        by = y + h * (_A31 * vy + _A32 * v2y)
        bz = z + h * (_A31 * vz + _A32 * v2z)
        bvx = vx + h * (_A31 * k1x + _A32 * k2x)
        bvy = vy + h * (_A31 * k1y + _A32 * k2y)
        bvz = vz + h * (_A31 * k1z + _A32 * k2z)
        k3x, k3y, k3z = _rhs(par, bx, by, bvx, bvy, bvz, counts)
        v3x, v3y, v3z = bvx, bvy, bvz
        # stage 4
        bx = x + h * (_A41 * vx + _A42 * v2x + _A43 * v3x)
        by = y + h * (_A41 * vy + _A42 * v2y + _A43 * v3y)
        bz = z + h * (_A41 * vz + _A42 * v2z + _A43 * v3z)
        bvx = vx + h * (_A41 * k1x + _A42 * k2x + _A43 * k3x)
        bvy = vy + h * (_A41 * k1y + _A42 * k2y + _A43 * k3y)
        bvz = vz + h * (_A41 * k1z + _A42 * k2z + _A43 * k3z)
        k4x, k4y, k4z = _rhs(par, bx, by, bvx, bvy, bvz, counts)
        v4x, v4y, v4z = bvx, bvy, bvz
        # stage 5
        bx = x + h * (_A51 * vx + _A52 * v2x + _A53 * v3x + _A54 * v4x)
        by = y + h * (_A51 * vy + _A52 * v2y + _A53 * v3y + _A54 * v4y)
        bz = z + h * (_A51 * vz + _A52 * v2z + _A53 * v3z + _A54 * v4z)
        bvx = vx + h * (_A51 * k1x + _A52 * k2x + _A53 * k3x + _A54 * k4x)
        bvy = vy + h * (_A51 * k1y + _A52 * k2y + _A53 * k3y + _A54 * k4y)
        bvz = vz + h * (_A51 * k1z + _A52 * k2z + _A53 * k3z + _A54 * k4z)
        k5x, k5y, k5z = _rhs(par, bx, by, bvx, bvy, bvz, counts)
        v5x, v5y, v5z = bvx, bvy, bvz
        # stage 6
        bx = x + h * (_A61 * vx + _A62 * v2x + _A63 * v3x + _A64 * v4x + _A65 * v5x)
        by = y + h * (_A61 * vy + _A62 * v2y + _A63 * v3y + _A64 * v4y + _A65 * v5y)
        bz = z + h * (_A61 * vz + _A62 * v2z + _A63 * v3z + _A64 * v4z + _A65 * v5z)
        bvx = vx + h * (_A61 * k1x + _A62 * k2x + _A63 * k3x + _A64 * k4x + _A65 * k5x)
        bvy = vy + h * (_A61 * k1y + _A62 * k2y + _A63 * k3y + _A64 * k4y + _A65 * k5y)
        bvz = vz + h * (_A61 * k1z + _A62 * k2z + _A63 * k3z + _A64 * k4z + _A65 * k5z)
        k6x, k6y, k6z = _rhs(par, bx, by, bvx, bvy, bvz, counts)
        v6x, v6y, v6z = bvx, bvy, bvz
        # 5th-order solution (= stage 7 point, FSAL)
        nx = x + h * (_A71 * vx + _A73 * v3x + _A74 * v4x + _A75 * v5x + _A76 * v6x)
        ny = y + h * (_A71 * vy + _A73 * v3y + _A74 * v4y + _A75 * v5y + _A76 * v6y)
        nz = z + h * (_A71 * vz + _A73 * v3z + _A74 * v4z + _A75 * v5z + _A76 * v6z)
        nvx = vx + h * (_A71 * k1x + _A73 * k3x + _A74 * k4x + _A75 * k5x + _A76 * k6x)
        nvy = vy + h * (_A71 * k1y + _A73 * k3y + _A74 * k4y + _A75 * k5y + _A76 * k6y)
        nvz = vz + h * (_A71 * k1z + _A73 * k3z + _A74 * k4z + _A75 * k5z + _A76 * k6z)
        k7x, k7y, k7z = _rhs(par, nx, ny, nvx, nvy, nvz, counts)

        # embedded error estimate
        ex = h * (_E1 * vx + _E3 * v3x + _E4 * v4x + _E5 * v5x + _E6 * v6x + _E7 * nvx)
        ey = h * (_E1 * vy + _E3 * v3y + _E4 * v4y + _E5 * v5y + _E6 * v6y + _E7 * nvy)
        ez = h * (_E1 * vz + _E3 * v3z + _E4 * v4z + _E5 * v5z + _E6 * v6z + _E7 * nvz)
        evx = h * (_E1 * k1x + _E3 * k3x + _E4 * k4x + _E5 * k5x + _E6 * k6x + _E7 * k7x)
        evy = h * (_E1 * k1y + _E3 * k3y + _E4 * k4y + _E5 * k5y + _E6 * k6y + _E7 * k7y)
        evz = h * (_E1 * k1z + _E3 * k3z + _E4 * k4z + _E5 * k5z + _E6 * k6z + _E7 * k7z)
        err = 0.0
        sc = tol + tol * (abs(x) if abs(x) > abs(nx) else abs(nx))
        err += (ex / sc) * (ex / sc)
        sc = tol + tol * (abs(y) if abs(y) > abs(ny) else abs(ny))
        err += (ey / sc) * (ey / sc)
        sc = tol + tol * (abs(z) if abs(z) > abs(nz) else abs(nz))
        err += (ez / sc) * (ez / sc)
        sc = tol * _VEL_WEIGHT + tol * (abs(vx) if abs(vx) > abs(nvx) else abs(nvx))
        err += (evx / sc) * (evx / sc)
        sc = tol * _VEL_WEIGHT + tol * (abs(vy) if abs(vy) > abs(nvy) else abs(nvy))
        err += (evy / sc) * (evy / sc)
        sc = tol * _VEL_WEIGHT + tol * (abs(vz) if abs(vz) > abs(nvz) else abs(nvz))
        err += (evz / sc) * (evz / sc)
        err = math.sqrt(err / 6.0)

        if err <= 1.0:
            t = stop if clipped else t + h
            x, y, z, vx, vy, vz = nx, ny, nz, nvx, nvy, nvz
            k1x, k1y, k1z = k7x, k7y, k7z
            n_steps += 1
            if clipped and stop == next_rec:
                times.append(t)
                states.append((x, y, z, vx, vy, vz))
                rec_index += 1
            if x < x_exit:
                break
            if err < 1e-10:
                factor = _MAX_FACTOR
            else:
                factor = _SAFETY * err ** -0.14 * err_prev ** 0.08
                if factor > _MAX_FACTOR:
                    factor = _MAX_FACTOR
                elif factor < _MIN_FACTOR:
                    factor = _MIN_FACTOR
            err_prev = err if err > 1e-4 else 1e-4
            h = h * factor
        else:
            n_rejected += 1
            factor = _SAFETY * err ** -0.2
            if factor < _MIN_FACTOR:
                factor = _MIN_FACTOR
            h = h * factor

    if times[-1] != t:
        times.append(t)
        states.append((x, y, z, vx, vy, vz))
    stats = {"steps": n_steps, "rejected": n_rejected,
             "node_sentinels": counts[NODE], "den_sentinels": counts[DEN],
             "range_sentinels": counts[RANGE], "step_underflow": failed}
    return times, states, stats
