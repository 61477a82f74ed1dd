import math

import pytest
from hypothesis import given, strategies as st

from weberatom.parabolic import (
    ParabolicPoint,
    cart_to_parabolic,
    parabolic_to_cart,
    transverse_gradient,
)


def test_forward_examples():
    assert parabolic_to_cart(ParabolicPoint(2.0, 1.0)) == (1.5, 2.0)
    p = cart_to_parabolic(0.0, 1.0)
    assert (p.u, p.v) == pytest.approx((1.0, 1.0))
    p = cart_to_parabolic(-0.5, 0.0)
    assert (p.u, p.v) == pytest.approx((0.0, 1.0))


def test_branch_convention():
    # v >= 0 always; u carries the sign of y when v > 0
    for x, y in [(3.0, 2.0), (3.0, -2.0), (-3.0, 2.0), (-3.0, -2.0),
                 (0.0, -1.0)]:
        p = cart_to_parabolic(x, y)
        assert p.v >= 0.0
        if p.v > 0.0 and y != 0.0:
            assert math.copysign(1.0, p.u) == math.copysign(1.0, y)


def test_negative_v_rejected():
    with pytest.raises(ValueError):
        ParabolicPoint(1.0, -0.5)


coords = st.floats(min_value=-300.0, max_value=300.0,
                   allow_nan=False, allow_infinity=False)


@given(x=coords, y=coords)
def test_round_trip(x, y):
    p = cart_to_parabolic(x, y)
    xb, yb = parabolic_to_cart(p)
    scale = max(1.0, abs(x), abs(y))
    assert abs(xb - x) <= 1e-12 * scale
    assert abs(yb - y) <= 1e-12 * scale


@given(x=coords, y=coords)
def test_gradient_of_coordinates(x, y):
    # f = x has parabolic partials (u, -v); f = y has (v, u); their
    # Cartesian gradients must be (1,0) and (0,1)
    p = cart_to_parabolic(x, y)
    if p.u == 0.0 and p.v == 0.0:
        return
    gx = transverse_gradient(p.u, -p.v, p.u, p.v)
    gy = transverse_gradient(p.v, p.u, p.u, p.v)
    assert gx[0] == pytest.approx(1.0, rel=1e-12)
    assert abs(gx[1]) <= 1e-12
    assert gy[1] == pytest.approx(1.0, rel=1e-12)
    assert abs(gy[0]) <= 1e-12
