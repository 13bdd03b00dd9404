from __future__ import annotations

import itertools

import numpy as np
import pytest

from hyptr.curve import random_quintic
from hyptr.errors import ModelMismatch
from hyptr.jacobian import point_at
from hyptr.kernels import BERGMAN, SCHIFFER
from hyptr.mirror import SpectralCurve, mirror_spectral_curve, random_moduli
from hyptr.periods import periods
from hyptr.recursion import (THETA_FORM_OFFSET, TopologicalRecursion, branch_free_difference, f1, f1_forms, omega03_closed_form,
                             pole_bound, total_pole_bound)


@pytest.fixture(scope="module")
def tr():
    sc = mirror_spectral_curve(random_moduli(np.random.default_rng(61)))
    return TopologicalRecursion(sc, periods(sc.curve))


def _points(sc, n, seed):
    rng = np.random.default_rng(seed)
    return [point_at(sc.curve, complex(*rng.normal(size=2)), int(rng.choice([-1, 1]))) for _ in range(n)]


def test_pole_bounds():
    assert pole_bound(0, 3) == 2 and total_pole_bound(0, 3) == 6
    assert pole_bound(1, 1) == 4 and total_pole_bound(1, 1) == 4
    assert pole_bound(2, 1) == 10 and total_pole_bound(2, 2) == 14


def test_omega03_matches_closed_form(tr):
    pts = _points(tr.sc, 3, 62)
    val = tr.evaluate(tr.omega(0, 3), pts)
    ref = omega03_closed_form(tr.sc, tr.pd.M, pts)
    assert abs(val - ref) < 1e-9 * abs(ref)


def test_omega03_literal_prefactor_differs(tr):
    pts = _points(tr.sc, 3, 63)
    val = tr.evaluate(tr.omega(0, 3), pts)
    lit = omega03_closed_form(tr.sc, tr.pd.M, pts, literal=True)
    assert abs(val - lit) > 1e-3 * abs(val)


@pytest.mark.parametrize("gn", [(0, 3), (1, 1), (0, 4), (1, 2), (2, 1), (2, 2), (3, 1)])
def test_pole_orders_saturate_bounds(tr, gn):
    per, tot = tr.omega(*gn).pole_orders()
    assert per == pole_bound(*gn)
    assert tot == total_pole_bound(*gn)


@pytest.mark.parametrize("gn", [(0, 4), (1, 2), (1, 3)])
def test_symmetric_under_permutations(tr, gn):
    at = tr.omega(*gn)
    assert at.symmetry_residual() < 1e-9
    pts = _points(tr.sc, gn[1], 64)
    vals = [tr.evaluate(at, [pts[i] for i in perm]) for perm in itertools.permutations(range(gn[1]))]
    assert max(abs(v - vals[0]) for v in vals) < 1e-9 * abs(vals[0])


def test_odd_under_involution(tr):
    at = tr.omega(1, 2)
    p, q = _points(tr.sc, 2, 65)
    # the coefficient against dx/2y is even, so the differential is odd since y -> -y
    assert abs(tr.evaluate(at, [p.involution(), q]) - tr.evaluate(at, [p, q])) < 1e-12 * abs(tr.evaluate(at, [p, q]))


def test_even_basis_terms_vanish():
    sc = mirror_spectral_curve(random_moduli(np.random.default_rng(66)))
    full = TopologicalRecursion(sc, periods(sc.curve), parity="all")
    for gn in [(0, 3), (1, 1), (0, 4)]:
        assert full.omega(*gn).even_weight() < 1e-10


def test_buffer_does_not_change_result():
    sc = mirror_spectral_curve(random_moduli(np.random.default_rng(67)))
    pd = periods(sc.curve)
    a = TopologicalRecursion(sc, pd).omega(2, 1)
    b = TopologicalRecursion(sc, pd, buffer=4).omega(2, 1)
    assert a.ds == b.ds
    assert np.max(np.abs(a.coeffs - b.coeffs)) < 1e-10 * np.max(np.abs(a.coeffs))


def test_schiffer_at_zero_Y_is_bitwise_bergman(tr):
    s = TopologicalRecursion(tr.sc, tr.pd, SCHIFFER, Y=np.zeros((2, 2)))
    for gn in [(0, 3), (1, 1), (1, 2), (2, 1)]:
        assert np.array_equal(s.omega(*gn).coeffs, tr.omega(*gn).coeffs)
    assert s.f_g(2).value == tr.f_g(2).value


def test_schiffer_differs_from_bergman(tr):
    s = TopologicalRecursion(tr.sc, tr.pd, SCHIFFER)
    a, b = s.omega(1, 1).coeffs, tr.omega(1, 1).coeffs
    assert np.max(np.abs(a - b)) > 1e-6 * np.max(np.abs(b))


def test_F2_is_cubic_in_Y(tr):
    rng = np.random.default_rng(68)
    Y0 = tr.pd.Y
    D = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    D = (D + D.T) / 2 * 0.1 * np.max(np.abs(Y0))
    ts = np.linspace(-1, 1, 7)
    vals = np.array([TopologicalRecursion(tr.sc, tr.pd, SCHIFFER, Y=Y0 + t * D).f_g(2).value for t in ts])
    V = np.vander(ts, 4)
    coef, *_ = np.linalg.lstsq(V, vals, rcond=None)
    assert np.max(np.abs(V @ coef - vals)) < 1e-8 * np.max(np.abs(vals))


def test_f1_forms_agree(tr):
    fo = f1_forms(tr.sc.curve, tr.pd)
    for other in (fo.root_form, fo.quintic_form):
        assert abs(branch_free_difference(fo.tau_b_form, other) - 1) < 1e-6
    assert abs(branch_free_difference(fo.theta_form - THETA_FORM_OFFSET, fo.tau_b_form) - 1) < 1e-6
    assert f1(tr.sc.curve, tr.pd).value == fo.tau_b_form


def test_argument_checks(tr):
    with pytest.raises(ValueError):
        tr.omega(0, 2)
    with pytest.raises(ValueError):
        tr.omega(4, 1)
    with pytest.raises(ValueError):
        tr.f_g(1)
    with pytest.raises(ValueError):
        TopologicalRecursion(tr.sc, tr.pd, parity="even")
    with pytest.raises(ValueError):
        tr.evaluate(tr.omega(0, 3), _points(tr.sc, 2, 69))


def test_quintic_rejected():
    c = random_quintic(np.random.default_rng(70))
    with pytest.raises(ModelMismatch):
        TopologicalRecursion(SpectralCurve(c, np.array([0.5, 0.5, 0, 0])), periods(c))
