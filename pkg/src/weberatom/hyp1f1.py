"""Confluent hypergeometric function M(a, b, z) = 1F1(a; b; z) for beam profiles.

The transverse beam profiles need M(a, b, i*x) with complex ``a``, real
``b > 0`` and real ``x`` up to several hundred.  This regime is hostile:
the Taylor series suffers cancellation that grows like e^|x| (terms reach
~1e18 at x = 41 while the sum stays O(1)), and library routines either
refuse complex ``a`` or lose most digits.  Two bands cover it:

* ``|z| <= 41``   -- Taylor summation in double-double (~31 significant
  digits) arithmetic, which keeps the relative error near 1e-11 at the
  top of the band even for the largest tabulated orders.
* ``|z| > 41``    -- the large-|z| expansion in descending powers of z,
  combining the two Poincare branches.  Pure-imaginary z only, which is
  the only large-argument case the beam code produces.

Everything here is scalar Python; the beam module calls it once per
tabulation node, never in inner loops.
"""

from __future__ import annotations

import cmath
import math

from scipy.special import gamma as _cgamma
from scipy.special import rgamma as _crgamma

_TAYLOR_LIMIT = 41.0
_TAYLOR_MAX_TERMS = 2000

# ---------------------------------------------------------------------------
# double-double helpers (Dekker/Knuth).  A value is a pair (hi, lo) of
# doubles with hi = fl(hi + lo); arithmetic below is exact to ~2^-104.

_SPLITTER = 134217729.0  # 2**27 + 1


def _two_sum(a: float, b: float):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _fast_two_sum(a: float, b: float):
    # requires |a| >= |b|
    s = a + b
    return s, b - (s - a)


def _two_prod(a: float, b: float):
    p = a * b
    t = _SPLITTER * a
    ahi = t - (t - a)
    alo = a - ahi
    t = _SPLITTER * b
    bhi = t - (t - b)
    blo = b - bhi
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


def _dd_add(ahi: float, alo: float, bhi: float, blo: float):
    s, e = _two_sum(ahi, bhi)
    e += alo + blo
    return _fast_two_sum(s, e)


def _dd_mul_d(ahi: float, alo: float, b: float):
    p, e = _two_prod(ahi, b)
    e += alo * b
    return _fast_two_sum(p, e)


def _dd_div_d(ahi: float, alo: float, b: float):
    q1 = ahi / b
    p, e = _two_prod(q1, b)
    rhi, rlo = _dd_add(ahi, alo, -p, -e)
    q2 = (rhi + rlo) / b
    return _fast_two_sum(q1, q2)


def _kummer_taylor_dd(a: complex, b: float, z: complex) -> complex:
    """Taylor series of M(a, b, z) summed in double-double arithmetic."""
    ar, ai = a.real, a.imag
    zr, zi = z.real, z.imag
    # term T_k and partial sum S as complex double-doubles
    tr_hi, tr_lo, ti_hi, ti_lo = 1.0, 0.0, 0.0, 0.0
    sr_hi, sr_lo, si_hi, si_lo = 1.0, 0.0, 0.0, 0.0
    peak = 1.0
    for k in range(_TAYLOR_MAX_TERMS):
        # T <- T * (a + k)
        akr = ar + k
        pr_hi, pr_lo = _dd_mul_d(tr_hi, tr_lo, akr)
        qr_hi, qr_lo = _dd_mul_d(ti_hi, ti_lo, -ai)
        nr_hi, nr_lo = _dd_add(pr_hi, pr_lo, qr_hi, qr_lo)
        pi_hi, pi_lo = _dd_mul_d(tr_hi, tr_lo, ai)
        qi_hi, qi_lo = _dd_mul_d(ti_hi, ti_lo, akr)
        ni_hi, ni_lo = _dd_add(pi_hi, pi_lo, qi_hi, qi_lo)
        # T <- T * z
        pr_hi, pr_lo = _dd_mul_d(nr_hi, nr_lo, zr)
        qr_hi, qr_lo = _dd_mul_d(ni_hi, ni_lo, -zi)
        tr_hi, tr_lo = _dd_add(pr_hi, pr_lo, qr_hi, qr_lo)
        pi_hi, pi_lo = _dd_mul_d(nr_hi, nr_lo, zi)
        qi_hi, qi_lo = _dd_mul_d(ni_hi, ni_lo, zr)
        ti_hi, ti_lo = _dd_add(pi_hi, pi_lo, qi_hi, qi_lo)
        # T <- T / ((b + k) * (k + 1)); both factors and their product are
        # exact doubles for the k range used here
        den = (b + k) * (k + 1.0)
        tr_hi, tr_lo = _dd_div_d(tr_hi, tr_lo, den)
        ti_hi, ti_lo = _dd_div_d(ti_hi, ti_lo, den)
        # S <- S + T
        sr_hi, sr_lo = _dd_add(sr_hi, sr_lo, tr_hi, tr_lo)
        si_hi, si_lo = _dd_add(si_hi, si_lo, ti_hi, ti_lo)
        mag = abs(tr_hi) + abs(ti_hi)
        if mag > peak:
            peak = mag
        elif mag < 1.0e-34 * peak:
            return complex(sr_hi + sr_lo, si_hi + si_lo)
    raise ArithmeticError(
        f"Kummer Taylor series did not converge for a={a}, b={b}, z={z}"
    )


def _poincare_series(p: complex, q: complex, winv: complex) -> complex:
    """Sum_k (p)_k (q)_k / k! * winv^k, truncated at the smallest term.

    Asymptotic (divergent) series; returns the optimally truncated sum.
    """
    term = 1.0 + 0.0j
    total = 1.0 + 0.0j
    best = abs(term)
    for k in range(400):
        term = term * (p + k) * (q + k) * winv / (k + 1.0)
        mag = abs(term)
        if mag > best:
            break
        total += term
        best = mag
        if mag < 1.0e-18 * abs(total):
            break
    return total


def _kummer_asymptotic(a: complex, b: float, z: complex) -> complex:
    """Large-|z| expansion of M(a, b, z) for z on the positive imaginary axis."""
    # For arg z in (-pi/2, 3pi/2] the two branches combine as
    #   M = G(b) [ e^{i pi a} z^-a / G(b-a) * S1  +  e^z z^{a-b} / G(a) * S2 ]
    # with S1 in powers of -1/z and S2 in powers of 1/z.
    s1 = _poincare_series(a, a - b + 1.0, -1.0 / z)
    s2 = _poincare_series(b - a, 1.0 - a, 1.0 / z)
    lnz = cmath.log(z)
    branch1 = cmath.exp(1j * math.pi * a - a * lnz) * complex(_crgamma(b - a)) * s1
    branch2 = cmath.exp(z + (a - b) * lnz) * complex(_crgamma(a)) * s2
    return complex(_cgamma(b)) * (branch1 + branch2)


def kummer_1f1(a: complex, b: float, z: complex) -> complex:
    """Confluent hypergeometric M(a; b; z).

    Supports complex ``a``, real ``b`` that is not a non-positive integer,
    and complex ``z`` with ``|z| <= 41``; beyond that radius only
    pure-imaginary ``z`` is accepted (the beam-profile regime).
    """
    b = float(b)
    if b <= 0.0 and b == int(b):
        raise ValueError("b must not be a non-positive integer")
    a = complex(a)
    z = complex(z)
    r = abs(z)
    if r <= _TAYLOR_LIMIT:
        return _kummer_taylor_dd(a, b, z)
    if abs(z.real) > 1.0e-12 * r:
        raise ValueError(
            "large-argument evaluation is implemented for pure-imaginary z only"
        )
    if z.imag > 0.0:
        return _kummer_asymptotic(a, b, complex(0.0, z.imag))
    # reflect to the upper axis with the Kummer transform
    # M(a, b, z) = e^z M(b - a, b, -z)
    return cmath.exp(z) * _kummer_asymptotic(b - a, b, complex(0.0, -z.imag))


def kummer_derivative_parameters(a: complex, b: float, k: int):
    """Parameters and scale of the k-th derivative of M w.r.t. its argument.

    d^k/dz^k M(a, b, z) = [(a)_k / (b)_k] M(a + k, b + k, z); returns
    ((a + k, b + k), pochhammer ratio).
    """
    scale = 1.0 + 0.0j
    for j in range(k):
        scale *= (a + j) / (b + j)
    return (a + k, b + k), scale


def kummer_with_derivatives(a: complex, b: float, z: complex, nder: int = 2):
    """M(a, b, z) and its first ``nder`` derivatives with respect to z."""
    out = [kummer_1f1(a, b, z)]
    for k in range(1, nder + 1):
        (ak, bk), scale = kummer_derivative_parameters(a, b, k)
        out.append(scale * kummer_1f1(ak, bk, z))
    return tuple(out)
