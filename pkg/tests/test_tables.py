"""Interpolation tables vs. direct profile evaluation."""

import numpy as np
import pytest

from weberatom.beams import profile
from weberatom.tables import FieldTables

BUDGET = 1e-5  # relative, on q, q', q''


@pytest.fixture(scope="module")
def tables(spec):
    return FieldTables.for_spec(spec)


def _worst_rel(table_vals, exact_vals, floor):
    err = 0.0
    for t, e in zip(table_vals, exact_vals):
        err = max(err, abs(t - e) / max(abs(e), floor))
    return err


@pytest.mark.parametrize("branch,sigma", [("u", -5.0), ("v", +5.0)])
def test_interpolant_matches_direct_profile(spec, tables, branch, sigma):
    # deliberately off-node sample points, spanning the caustic region
    rng = np.random.default_rng(11)
    s = np.concatenate([rng.uniform(0.0, 25.9, 80), [0.0, 0.00123, 25.9]])
    ev = tables.eval_u if branch == "u" else tables.eval_v
    q, d, d2, ok = ev(s)
    assert ok.all()
    exact = [profile(spec.n_parity, sigma, si, spec.kperp_natural) for si in s]
    scale = max(abs(e[0]) for e in exact)
    assert _worst_rel(q, [e[0] for e in exact], scale) < BUDGET
    assert _worst_rel(d, [e[1] for e in exact], scale) < BUDGET
    assert _worst_rel(d2, [e[2] for e in exact], 10 * scale) < BUDGET


def test_signed_argument_parity_continuation(spec, tables):
    # odd parity: q is even in s, q' odd, q'' even ... for n=1 the profile
    # q ~ s^0 near 0 and q(-s) = q(s) per the (k s^2)^((n-1)/4) prefactor
    s = np.array([0.25, 1.7, 4.4])
    qp, dp, d2p, _ = tables.eval_u(s)
    qm, dm, d2m, _ = tables.eval_u(-s)
    if spec.n_parity == 1:
        np.testing.assert_array_equal(qm, qp)
        np.testing.assert_array_equal(dm, -dp)
        np.testing.assert_array_equal(d2m, d2p)
    else:
        np.testing.assert_array_equal(qm, -qp)
        np.testing.assert_array_equal(dm, dp)
        np.testing.assert_array_equal(d2m, -d2p)


def test_out_of_range_is_flagged(tables):
    q, d, d2, ok = tables.eval_v(np.array([1.0, 30.0, -27.0]))
    assert ok.tolist() == [True, False, False]
    assert np.isfinite(q).all()  # clamped, not garbage


def test_cache_returns_same_object(spec):
    assert FieldTables.for_spec(spec) is FieldTables.for_spec(spec)
