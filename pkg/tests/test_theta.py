from __future__ import annotations

import itertools

import mpmath
import numpy as np
import pytest

from hyptr.curve import QUINTIC, SEXTIC, HyperellipticCurve, igusa_j, random_quintic, random_sextic, to_rosenhain, sextic_closure
from hyptr.errors import CharacteristicResolutionFailed, NotInSiegelSpace
from hyptr.jacobian import characteristic_data
from hyptr.modularity import generators
from hyptr.periods import periods
from hyptr.theta import (EVEN_LABELS, ODD_LABELS, ThetaCharacteristic, characteristics, cusp_forms,
                         igusa_from_tau, match_rosenhain_orbit, period_theta, quasi_period_theta,
                         rosenhain_lambdas, theta, theta_constants, thomae_check)

TAU = np.array([[0.31 + 1.1j, 0.12 + 0.25j], [0.12 + 0.25j, -0.2 + 0.9j]])


def test_parity_counts():
    chars = characteristics()
    assert len(chars) == 16
    assert sum(c.is_even for c in chars) == 10
    assert len(EVEN_LABELS) == 10 and len(ODD_LABELS) == 6


@pytest.mark.parametrize("label", ODD_LABELS)
def test_odd_vanishes_at_zero(label):
    assert abs(theta(label, np.zeros(2), TAU).value) < 1e-12


def _jtheta(n, t):
    q = mpmath.exp(1j * mpmath.pi * t)
    return complex(mpmath.jtheta(n, 0, q))


@pytest.mark.parametrize("label,factors", [("0000", (3, 3)), ("1000", (2, 3)), ("0010", (4, 3)),
                                           ("0011", (4, 4)), ("1100", (2, 2))])
def test_diagonal_tau_factorizes(label, factors):
    t1, t2 = 0.2 + 0.8j, -0.35 + 1.3j
    tau = np.diag([t1, t2])
    ref = _jtheta(factors[0], t1) * _jtheta(factors[1], t2)
    assert abs(theta(label, np.zeros(2), tau).value - ref) < 1e-12 * max(1.0, abs(ref))


def test_integer_shift_quasi_periodicity():
    v = np.array([0.13 - 0.05j, -0.21 + 0.1j])
    for label in ("1010", "0110", "1111"):
        ch = ThetaCharacteristic.from_bits(label)
        base = theta(ch, v, TAU).value
        for m in itertools.product((-1, 0, 2), repeat=2):
            m = np.array(m)
            shifted = theta(ch, v + m, TAU).value
            assert abs(shifted - np.exp(2j * np.pi * ch.avec() @ m) * base) < 1e-10


def test_tail_rule_is_converged():
    v = np.array([0.2 + 0.1j, -0.1 + 0.05j])
    a = theta("1001", v, TAU)
    b = theta("1001", v, TAU, radius=a.trunc_radius + 2)
    assert abs(a.value - b.value) < 1e-12


def test_derivatives_match_finite_differences():
    v = np.array([0.17 + 0.04j, -0.08 + 0.11j])
    tv = theta("0110", v, TAU)
    h = 1e-5
    for i in range(2):
        e = np.zeros(2)
        e[i] = h
        fd = (theta("0110", v + e, TAU).value - theta("0110", v - e, TAU).value) / (2 * h)
        assert abs(fd - tv.gradient[i]) < 1e-6 * np.max(np.abs(tv.gradient))
        fdg = (theta("0110", v + e, TAU).gradient - theta("0110", v - e, TAU).gradient) / (2 * h)
        assert np.max(np.abs(fdg - tv.hessian[i])) < 1e-6 * np.max(np.abs(tv.hessian))


def test_rejects_non_siegel():
    with pytest.raises(NotInSiegelSpace):
        theta("0000", np.zeros(2), np.array([[1j, 0.1], [0.2, 1j]]))
    with pytest.raises(NotInSiegelSpace):
        theta("0000", np.zeros(2), np.diag([1j, -1j]))


def test_theta_constants_are_even_only():
    th = theta_constants(TAU)
    assert set(th) == set(EVEN_LABELS)


def test_humbert_locus():
    cf = cusp_forms(np.diag([0.1 + 1.1j, -0.3 + 0.95j]))
    assert abs(cf.chi10) < 1e-10
    assert abs(cf.chi12) > 1e-6


def _act(g, tau):
    a, b, c, d = g[:2, :2], g[:2, 2:], g[2:, :2], g[2:, 2:]
    return (a @ tau + b) @ np.linalg.inv(c @ tau + d)


def test_cusp_form_weights():
    for s in generators():
        g = s.gamma
        t2 = _act(g, TAU)
        j = np.linalg.det(g[2:, :2] @ TAU + g[2:, 2:])
        c1, c2 = cusp_forms(TAU), cusp_forms(t2)
        assert abs(c2.psi4 - j ** 4 * c1.psi4) < 1e-9 * abs(c2.psi4)
        assert abs(c2.psi6 - j ** 6 * c1.psi6) < 1e-9 * abs(c2.psi6)
        assert abs(c2.chi10 - j ** 10 * c1.chi10) < 1e-9 * abs(c2.chi10)
        assert abs(c2.chi12 - j ** 12 * c1.chi12) < 1e-9 * abs(c2.chi12)


def test_torelli_and_scaling():
    rng = np.random.default_rng(20)
    for _ in range(3):
        c = random_sextic(rng)
        ref = igusa_j(c).as_array()
        got = igusa_from_tau(periods(c).tau).as_array()
        assert np.max(np.abs(got - ref) / np.abs(ref)) < 1e-5
        cs = HyperellipticCurve.from_roots(SEXTIC, (0.6 + 0.3j) * c.roots, c.lead)
        got2 = igusa_from_tau(periods(cs).tau).as_array()
        assert np.max(np.abs(got2 - got) / np.abs(got)) < 1e-6


def test_rosenhain_round_trip():
    c = random_sextic(np.random.default_rng(21))
    R = to_rosenhain(c)
    lams = rosenhain_lambdas(periods(R).tau)
    assert all(abs(l) > 1e-6 and abs(l - 1) > 1e-6 for l in lams)
    assert match_rosenhain_orbit(sextic_closure(R), lams) is not None


def test_quasi_period_formula():
    rng = np.random.default_rng(22)
    a = random_sextic(rng, a0=1.0).a
    c = HyperellipticCurve.sextic(a)
    pd = periods(c)
    M = quasi_period_theta(c, pd)
    assert np.max(np.abs(M - pd.M)) < 1e-5 * np.max(np.abs(pd.M))
    assert np.max(np.abs(M - M.T)) < 1e-8


def test_thomae_identity():
    rng = np.random.default_rng(23)
    for _ in range(3):
        chk = thomae_check(periods(random_quintic(rng)))
        assert chk.rel_error < 1e-5
        assert chk.sign in (1, -1)


def test_period_formula_choices_agree():
    q = random_quintic(np.random.default_rng(24))
    pd = periods(q)
    cd = characteristic_data(pd)
    got = []
    for choice in [(0, 1, 2, 3, 4), (2, 4, 0, 1, 3)]:
        M, _, err = period_theta(q, pd.tau, choice, cd.branch, cd.delta).resolve(pd.PA)
        assert err < 1e-5
        got.append(M)
    assert np.max(np.abs(got[0] - got[1])) < 1e-6 * np.max(np.abs(got[0]))


def test_period_formula_rejects_repeated_index():
    q = random_quintic(np.random.default_rng(25))
    pd = periods(q)
    cd = characteristic_data(pd)
    with pytest.raises(CharacteristicResolutionFailed):
        period_theta(q, pd.tau, (0, 0, 1, 2, 3), cd.branch, cd.delta)
