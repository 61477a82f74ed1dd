"""Parabolic cylinder coordinates on the transverse plane.

Convention: x = (u**2 - v**2)/2, y = u*v, with the branch fixed by v >= 0
and sign(u) = sign(y) when v > 0.  The scale factor is h = sqrt(u**2 + v**2)
= sqrt(2*r) with r the Cartesian radius.
"""

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ParabolicPoint:
    u: float
    v: float

    def __post_init__(self):
        if self.v < 0.0:
            raise ValueError("parabolic v must be non-negative, got %r" % (self.v,))

    @property
    def h(self):
        return math.hypot(self.u, self.v)

    @property
    def h2(self):
        return self.u * self.u + self.v * self.v


def parabolic_to_cart(p):
    """Map a ParabolicPoint (or (u, v) pair) to Cartesian (x, y)."""
    try:
        u, v = p.u, p.v
    except AttributeError:
        u, v = p
    return 0.5 * (u * u - v * v), u * v


def cart_to_parabolic(x, y):
    """Map Cartesian (x, y) to the v >= 0 branch of parabolic coordinates.

    The two obvious formulas u = sqrt(r + x) and v = sqrt(r - x) each lose
    half the significant digits on one side of the plane (catastrophic
    cancellation for r ~ |x|), so the stable one is picked per sign of x and
    the other coordinate recovered from u*v = y.
    """
    r = math.hypot(x, y)
    if r == 0.0:
        return ParabolicPoint(0.0, 0.0)
    if x >= 0.0:
        uu = math.sqrt(r + x)
        v = abs(y) / uu
        u = math.copysign(uu, y) if y != 0.0 else uu
    else:
        v = math.sqrt(r - x)
        u = y / v
    return ParabolicPoint(u, v)


def transverse_gradient(du, dv, u, v):
    """Convert parabolic first partials (f_u, f_v) to Cartesian (f_x, f_y).

    Inverse of the chain rule for the map above; valid away from the origin
    where h = 0.
    """
    h2 = u * u + v * v
    fx = (u * du - v * dv) / h2
    fy = (v * du + u * dv) / h2
    return fx, fy
