# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled trajectory kernel; algorithmic mirror of _kernel_py.py.

Keep the two files in lockstep: every arithmetic expression here is a
transcription of the Python version in the same order, so the backends
agree bitwise (the build disables floating-point contraction).
"""

from libc.math cimport sqrt, fabs, pow

OK, NODE, DEN, RANGE = 0, 1, 2, 3

cdef int _OK = 0
cdef int _NODE = 1
cdef int _DEN = 2
cdef int _RANGE = 3

# Dormand-Prince 5(4) tableau, FSAL form.
cdef double A21 = 0.2
cdef double A31 = 3.0 / 40.0
cdef double A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0
cdef double A42 = -56.0 / 15.0
cdef double A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0
cdef double A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0
cdef double A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0
cdef double A62 = -355.0 / 33.0
cdef double A63 = 46732.0 / 5247.0
cdef double A64 = 49.0 / 176.0
cdef double A65 = -5103.0 / 18656.0
cdef double A71 = 35.0 / 384.0
cdef double A73 = 500.0 / 1113.0
cdef double A74 = 125.0 / 192.0
cdef double A75 = -2187.0 / 6784.0
cdef double A76 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0
cdef double E3 = -71.0 / 16695.0
cdef double E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0
cdef double E6 = 22.0 / 525.0
cdef double E7 = -1.0 / 40.0

cdef double SAFETY = 0.9
cdef double MIN_FACTOR = 0.2
cdef double MAX_FACTOR = 5.0
cdef double VEL_WEIGHT = 1e-3


cdef struct CParams:
    const double *coeff_u
    const double *coeff_v
    double ds
    int n_int
    int parity_odd
    double kz
    double kg
    double delta
    double eps_g2
    double eps_den
    double recoil
    double gravity
    int den_standard
    int sign_minus
    double x_win_lo
    double x_win_hi


cdef inline bint _eval_branch(const double *coeff, double ds, int n_int,
                              int parity_odd, double s, double *out) nogil:
    cdef double sa = -s if s < 0.0 else s
    cdef int i = <int>(sa / ds)
    cdef double xi, c0, c1, c2, c3, c4, c5, q, d, d2
    if i >= n_int:
        out[0] = 0.0
        out[1] = 0.0
        out[2] = 0.0
        return False
    xi = sa / ds - i
    c0 = coeff[i * 6 + 0]
    c1 = coeff[i * 6 + 1]
    c2 = coeff[i * 6 + 2]
    c3 = coeff[i * 6 + 3]
    c4 = coeff[i * 6 + 4]
    c5 = coeff[i * 6 + 5]
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
    out[0] = q
    out[1] = d
    out[2] = d2
    return True


cdef inline int _force(CParams *par, double x, double y,
                       double vx, double vy, double vz, double *acc) nogil:
    cdef double r, uu, u, v, h2, s2, g2
    cdef double qu, du, d2u, qv, dv, d2v
    cdef double psi_u, psi_v, psi_uu, psi_uv, psi_vv
    cdef double ru, iu, rv, iv, lure, lvre, luim, lvim
    cdef double ax_, ay_, bx_, by_, bz_, delta, p, dpop, va, vb
    cdef double gre, gim, pp, lead, den, cb, ca, scale
    cdef double bu[3]
    cdef double bv[3]
    acc[0] = 0.0
    acc[1] = 0.0
    acc[2] = 0.0
    if x < par.x_win_lo or x > par.x_win_hi:
        return _OK
    r = sqrt(x * x + y * y)
    if r == 0.0:
        return _NODE
    if x >= 0.0:
        uu = sqrt(r + x)
        v = fabs(y) / uu
        u = -uu if y < 0.0 else uu
    else:
        v = sqrt(r - x)
        u = y / v
    if not _eval_branch(par.coeff_u, par.ds, par.n_int, par.parity_odd, u, bu):
        return _RANGE
    if not _eval_branch(par.coeff_v, par.ds, par.n_int, par.parity_odd, v, bv):
        return _RANGE
    qu = bu[0]
    du = bu[1]
    d2u = bu[2]
    qv = bv[0]
    dv = bv[1]
    d2v = bv[2]
    psi_u = du * qv
    psi_v = qu * dv
    psi_uu = d2u * qv
    psi_uv = du * dv
    psi_vv = qu * d2v

    h2 = u * u + v * v
    s2 = psi_u * psi_u + psi_v * psi_v
    g2 = par.kg * s2 / h2
    if g2 < par.eps_g2:
        return _NODE

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
        return _DEN
    cb = dpop * (1.0 - p) * va + 0.5
    ca = vb - delta
    scale = par.recoil / den
    acc[0] = scale * (cb * bx_ + ca * ax_)
    acc[1] = scale * (cb * by_ + ca * ay_)
    acc[2] = scale * (cb * bz_)
    return _OK


cdef inline void _rhs(CParams *par, double x, double y,
                      double vx, double vy, double vz,
                      long *counts, double *out) nogil:
    cdef int code = _force(par, x, y, vx, vy, vz, out)
    if code != _OK:
        counts[code] += 1
    out[0] = out[0] - par.gravity


cdef void _fill(CParams *cp, object par, double[:, ::1] cu, double[:, ::1] cv):
    cp.coeff_u = &cu[0, 0]
    cp.coeff_v = &cv[0, 0]
    cp.ds = par.ds
    cp.n_int = par.n_int
    cp.parity_odd = par.parity_odd
    cp.kz = par.kz
    cp.kg = par.kg
    cp.delta = par.delta
    cp.eps_g2 = par.eps_g2
    cp.eps_den = par.eps_den
    cp.recoil = par.recoil
    cp.gravity = par.gravity
    cp.den_standard = par.den_standard
    cp.sign_minus = par.sign_minus
    cp.x_win_lo = par.x_win_lo
    cp.x_win_hi = par.x_win_hi


def force_eval(par, double x, double y, double vx, double vy, double vz):
    """Optical acceleration (ax, ay, az, code); mirror of the Python one."""
    cdef double[:, ::1] cu = par.coeff_u
    cdef double[:, ::1] cv = par.coeff_v
    cdef CParams cp
    cdef double acc[3]
    cdef int code
    _fill(&cp, par, cu, cv)
    code = _force(&cp, x, y, vx, vy, vz, acc)
    return acc[0], acc[1], acc[2], code


def integrate(par, state0, double t_max, double tol, double cadence,
              double x_exit):
    """Integrate one atom; same contract as the Python kernel."""
    cdef double[:, ::1] cu = par.coeff_u
    cdef double[:, ::1] cv = par.coeff_v
    cdef CParams cp
    _fill(&cp, par, cu, cv)

    cdef double x = state0[0]
    cdef double y = state0[1]
    cdef double z = state0[2]
    cdef double vx = state0[3]
    cdef double vy = state0[4]
    cdef double vz = state0[5]
    cdef double t = 0.0
    cdef long counts[4]
    counts[0] = 0
    counts[1] = 0
    counts[2] = 0
    counts[3] = 0
    cdef long n_steps = 0
    cdef long n_rejected = 0
    cdef long rec_index = 1
    cdef bint failed = False

    times = [0.0]
    states = [(x, y, z, vx, vy, vz)]

    cdef double k1x, k1y, k1z
    cdef double k[3]
    _rhs(&cp, x, y, vx, vy, vz, counts, k)
    k1x = k[0]
    k1y = k[1]
    k1z = k[2]
    cdef double h = 1.0
    cdef double err_prev = 1.0
    cdef double next_rec, stop
    cdef bint clipped
    cdef double bx, by, bz, bvx, bvy, bvz
    cdef double k2x, k2y, k2z, k3x, k3y, k3z, k4x, k4y, k4z
    cdef double k5x, k5y, k5z, k6x, k6y, k6z, k7x, k7y, k7z
    cdef double v2x, v2y, v2z, v3x, v3y, v3z, v4x, v4y, v4z
    cdef double v5x, v5y, v5z, v6x, v6y, v6z
    cdef double nx, ny, nz, nvx, nvy, nvz
    cdef double ex, ey, ez, evx, evy, evz, err, sc, factor

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

        with nogil:
            # stage 2
            bx = x + h * A21 * vx
            by = y + h * A21 * vy
            bz = z + h * A21 * vz
            bvx = vx + h * A21 * k1x
            bvy = vy + h * A21 * k1y
            bvz = vz + h * A21 * k1z
            _rhs(&cp, bx, by, bvx, bvy, bvz, counts, k)
            k2x = k[0]
            k2y = k[1]
            k2z = k[2]
            v2x = bvx
            v2y = bvy
            v2z = bvz
            # stage 3
            bx = x + h * (A31 * vx + A32 * v2x)
            by = y + h * (A31 * vy + A32 * v2y)
            bz = z + h * (A31 * vz + A32 * v2z)
            bvx = vx + h * (A31 * k1x + A32 * k2x)
            bvy = vy + h * (A31 * k1y + A32 * k2y)
            bvz = vz + h * (A31 * k1z + A32 * k2z)
            _rhs(&cp, bx, by, bvx, bvy, bvz, counts, k)
            k3x = k[0]
            k3y = k[1]
            k3z = k[2]
            v3x = bvx
            v3y = bvy
            v3z = bvz
            # stage 4
            bx = x + h * (A41 * vx + A42 * v2x + A43 * v3x)
            by = y + h * (A41 * vy + A42 * v2y + A43 * v3y)
            bz = z + h * (A41 * vz + A42 * v2z + A43 * v3z)
            bvx = vx + h * (A41 * k1x + A42 * k2x + A43 * k3x)
            bvy = vy + h * (A41 * k1y + A42 * k2y + A43 * k3y)
            bvz = vz + h * (A41 * k1z + A42 * k2z + A43 * k3z)
            _rhs(&cp, bx, by, bvx, bvy, bvz, counts, k)
            k4x = k[0]
            k4y = k[1]
            k4z = k[2]
            v4x = bvx
            v4y = bvy
            v4z = bvz
            # stage 5
            bx = x + h * (A51 * vx + A52 * v2x + A53 * v3x + A54 * v4x)
            by = y + h * (A51 * vy + A52 * v2y + A53 * v3y + A54 * v4y)
            bz = z + h * (A51 * vz + A52 * v2z + A53 * v3z + A54 * v4z)
            bvx = vx + h * (A51 * k1x + A52 * k2x + A53 * k3x + A54 * k4x)
            bvy = vy + h * (A51 * k1y + A52 * k2y + A53 * k3y + A54 * k4y)
            bvz = vz + h * (A51 * k1z + A52 * k2z + A53 * k3z + A54 * k4z)
            _rhs(&cp, bx, by, bvx, bvy, bvz, counts, k)
            k5x = k[0]
            k5y = k[1]
            k5z = k[2]
            v5x = bvx
            v5y = bvy
            v5z = bvz
            # stage 6
            bx = x + h * (A61 * vx + A62 * v2x + A63 * v3x + A64 * v4x + A65 * v5x)
            by = y + h * (A61 * vy + A62 * v2y + A63 * v3y + A64 * v4y + A65 * v5y)
            bz = z + h * (A61 * vz + A62 * v2z + A63 * v3z + A64 * v4z + A65 * v5z)
            bvx = vx + h * (A61 * k1x + A62 * k2x + A63 * k3x + A64 * k4x + A65 * k5x)
            bvy = vy + h * (A61 * k1y + A62 * k2y + A63 * k3y + A64 * k4y + A65 * k5y)
            bvz = vz + h * (A61 * k1z + A62 * k2z + A63 * k3z + A64 * k4z + A65 * k5z)
            _rhs(&cp, bx, by, bvx, bvy, bvz, counts, k)
            k6x = k[0]
            k6y = k[1]
            k6z = k[2]
            v6x = bvx
            v6y = bvy
            v6z = bvz
            # 5th-order solution (= stage 7 point, FSAL)
            nx = x + h * (A71 * vx + A73 * v3x + A74 * v4x + A75 * v5x + A76 * v6x)
            ny = y + h * (A71 * vy + A73 * v3y + A74 * v4y + A75 * v5y + A76 * v6y)
            nz = z + h * (A71 * vz + A73 * v3z + A74 * v4z + A75 * v5z + A76 * v6z)
            nvx = vx + h * (A71 * k1x + A73 * k3x + A74 * k4x + A75 * k5x + A76 * k6x)
            nvy = vy + h * (A71 * k1y + A73 * k3y + A74 * k4y + A75 * k5y + A76 * k6y)
            nvz = vz + h * (A71 * k1z + A73 * k3z + A74 * k4z + A75 * k5z + A76 * k6z)
            _rhs(&cp, nx, ny, nvx, nvy, nvz, counts, k)
            k7x = k[0]
            k7y = k[1]
            k7z = k[2]

            ex = h * (E1 * vx + E3 * v3x + E4 * v4x + E5 * v5x + E6 * v6x + E7 * nvx)
            ey = h * (E1 * vy + E3 * v3y + E4 * v4y + E5 * v5y + E6 * v6y + E7 * nvy)
            ez = h * (E1 * vz + E3 * v3z + E4 * v4z + E5 * v5z + E6 * v6z + E7 * nvz)
            evx = h * (E1 * k1x + E3 * k3x + E4 * k4x + E5 * k5x + E6 * k6x + E7 * k7x)
            evy = h * (E1 * k1y + E3 * k3y + E4 * k4y + E5 * k5y + E6 * k6y + E7 * k7y)
            evz = h * (E1 * k1z + E3 * k3z + E4 * k4z + E5 * k5z + E6 * k6z + E7 * k7z)
            err = 0.0
            sc = tol + tol * (fabs(x) if fabs(x) > fabs(nx) else fabs(nx))
            err = err + (ex / sc) * (ex / sc)
            sc = tol + tol * (fabs(y) if fabs(y) > fabs(ny) else fabs(ny))
            err = err + (ey / sc) * (ey / sc)
            sc = tol + tol * (fabs(z) if fabs(z) > fabs(nz) else fabs(nz))
            err = err + (ez / sc) * (ez / sc)
            sc = tol * VEL_WEIGHT + tol * (fabs(vx) if fabs(vx) > fabs(nvx) else fabs(nvx))
            err = err + (evx / sc) * (evx / sc)
            sc = tol * VEL_WEIGHT + tol * (fabs(vy) if fabs(vy) > fabs(nvy) else fabs(nvy))
            err = err + (evy / sc) * (evy / sc)
            sc = tol * VEL_WEIGHT + tol * (fabs(vz) if fabs(vz) > fabs(nvz) else fabs(nvz))
            err = err + (evz / sc) * (evz / sc)
            err = sqrt(err / 6.0)

        if err <= 1.0:
            t = stop if clipped else t + h
            x = nx
            y = ny
            z = nz
            vx = nvx
            vy = nvy
            vz = nvz
            k1x = k7x
            k1y = k7y
            k1z = k7z
            n_steps += 1
            if clipped and stop == next_rec:
                times.append(t)
                states.append((x, y, z, vx, vy, vz))
                rec_index += 1
            if x < x_exit:
                break
            if err < 1e-10:
                factor = MAX_FACTOR
            else:
                factor = SAFETY * pow(err, -0.14) * pow(err_prev, 0.08)
                if factor > MAX_FACTOR:
                    factor = MAX_FACTOR
                elif factor < MIN_FACTOR:
                    factor = MIN_FACTOR
            err_prev = err if err > 1e-4 else 1e-4
            h = h * factor
        else:
            n_rejected += 1
            factor = SAFETY * pow(err, -0.2)
            if factor < MIN_FACTOR:
                factor = MIN_FACTOR
            h = h * factor

    if times[len(times) - 1] != t:
        times.append(t)
        states.append((x, y, z, vx, vy, vz))
    stats = {"steps": n_steps, "rejected": n_rejected,
             "node_sentinels": counts[_NODE], "den_sentinels": counts[_DEN],
             "range_sentinels": counts[_RANGE], "step_underflow": failed}
    return times, states, stats
