"""Plane-wave-superposition oracle vs. the hypergeometric product.

The two constructions share no code, so agreement up to one fitted global
constant is strong evidence both are right.
"""

import numpy as np
import pytest

from weberatom.beams import BeamSpec, scalar_psi
from weberatom.parabolic import cart_to_parabolic
from weberatom.spectrum import QuadratureConfig, scalar_psi_spectrum

POINTS = [(3.0, 4.0), (-8.0, 9.0), (25.0, 1.5), (-2.0, -6.0), (14.0, -3.0), (0.5, 7.0)]


def fitted_residual(spec):
    sv = np.array([scalar_psi_spectrum(spec, x, y) for x, y in POINTS])
    hv = np.array([scalar_psi(spec, cart_to_parabolic(x, y)).psi for x, y in POINTS])
    c = np.vdot(hv, sv) / np.vdot(hv, hv)
    return float(np.max(np.abs(sv - c * hv)) / np.max(np.abs(sv)))


@pytest.mark.parametrize("parity,a", [("odd", -5.0), ("even", -5.0),
                                      ("odd", 2.0), ("even", 0.0)])
def test_spectrum_matches_product_up_to_constant(parity, a):
    assert fitted_residual(BeamSpec(parity=parity, order_a=a)) < 1e-6


def test_quadrature_refinement_is_converged():
    val, est = scalar_psi_spectrum(BeamSpec(), 3.0, 4.0, report_error=True)
    assert est < 1e-8 * abs(val)


def test_coarse_quadrature_reports_larger_error():
    coarse = QuadratureConfig(panels=40, tau_limit=20.0, order=4)
    _, est_coarse = scalar_psi_spectrum(BeamSpec(), 3.0, 4.0, quad=coarse,
                                        report_error=True)
    _, est_default = scalar_psi_spectrum(BeamSpec(), 3.0, 4.0, report_error=True)
    assert est_coarse > est_default


def test_odd_spectrum_vanishes_on_axis():
    spec = BeamSpec()  # odd parity
    assert abs(scalar_psi_spectrum(spec, 5.0, 0.0)) == 0.0
    assert abs(scalar_psi_spectrum(spec, 5.0, 3.0)) > 0.0


def test_even_spectrum_bright_on_axis():
    spec = BeamSpec(parity="even")
    assert abs(scalar_psi_spectrum(spec, 5.0, 0.0)) > 0.0
