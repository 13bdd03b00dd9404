from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from hyptr.curve import absolute_invariants, binary_invariants
from hyptr.errors import LeadingCoefficientZero, LogBranchPointAtRamification
from hyptr.kernels import zeta_series
from hyptr.mirror import (MirrorModuli, SpectralCurve, equivalent_moduli, evaluate_series, lambda_series,
                          mirror_coefficients, mirror_maps, mirror_sextic, mirror_spectral_curve,
                          moduli_jacobian, random_moduli, series_A2, series_A3, series_A4)
from hyptr.curve import HyperellipticCurve


def test_sextic_coefficients_pure_q3():
    t = 0.7 - 0.2j
    a = mirror_coefficients(MirrorModuli(0, 0, t))
    assert np.allclose(a, [-t, 0, 0, 0, 0.25, 0.5, 0.25])


def test_sextic_coefficients_unit_moduli():
    a = mirror_coefficients(MirrorModuli(1, 1, 1))
    assert np.allclose(a, [-0.75, 0.5, 0.75, 1, 0.75, 0.5, 0.25])


def test_sextic_is_h_squared_minus_q3_x6():
    m = MirrorModuli(0.2 + 0.1j, -0.3j, 0.05)
    P = np.polynomial.polynomial
    expect = P.polysub(P.polymul(m.h, m.h), [0] * 6 + [m.q3])
    assert np.allclose(mirror_coefficients(m)[::-1], expect)


def test_leading_coefficient_zero():
    with pytest.raises(LeadingCoefficientZero):
        mirror_sextic(MirrorModuli(0.1, 0.4, 0.04))


def test_s_variables():
    m = MirrorModuli(2, 3, 5)
    assert m.s == (2, 3 / 4, 5 / 9)


def test_lambda_difference_matches_direct_evaluation():
    sc = mirror_spectral_curve(random_moduli(np.random.default_rng(50)))
    k = 1
    ls = lambda_series(sc, k, 12)
    X, Yt = zeta_series(sc.curve, k, 12)
    for ze in (1e-4, -1e-4, 0.01 + 0.005j):
        x, y = X.evaluate(ze), Yt.evaluate(ze)
        h = sc.h_at(x)
        direct = (np.log(y - h) - np.log(-y - h)) * 2 * ze / x
        assert abs(ls.diff.evaluate(ze) - direct) < 1e-9 * max(1.0, abs(direct))


def test_lambda_log_branch_at_zero():
    sc = mirror_spectral_curve(random_moduli(np.random.default_rng(51)))
    ls = lambda_series(sc, 0, 8)
    assert ls.branch == np.log(-sc.h_at(sc.curve.roots[0]))
    assert ls.log_y.coeff(0) == ls.branch


def test_lambda_rejects_h_zero_at_root():
    # h = (1 + X)/2 vanishes at the root X = -1
    h = np.array([0.5, 0.5, 0, 0])
    roots = [-1.0, 0.5, 1.5j, -2.0, 0.3 - 1j, 2.2]
    curve = HyperellipticCurve.from_roots("sextic", roots, 1.0)
    with pytest.raises(LogBranchPointAtRamification):
        lambda_series(SpectralCurve(curve, h), 0, 6)


def _taylor(f, n):
    return [Fraction(str(mpmath.nstr(c, 30))).limit_denominator(10 ** 9) for c in mpmath.taylor(f, 0, n)]


def test_A4_against_closed_form():
    # sum (2n-1)!/(n!)^2 x^n = log(2/(1 + sqrt(1 - 4x)))
    mpmath.mp.dps = 40
    ref = _taylor(lambda x: -mpmath.log(2 / (1 + mpmath.sqrt(1 - 4 * x))), 12)
    A4 = series_A4(12)
    assert A4[(0, 0, 1)] == -1 and A4[(0, 0, 2)] == Fraction(-3, 2) and A4[(0, 0, 3)] == Fraction(-10, 3)
    for n in range(1, 13):
        assert A4[(0, 0, n)] == ref[n]


def test_Q3_is_catalan_square():
    # exp(-2 A4) = C(x)^2 = sum Catalan(n+1) x^n
    ms = mirror_maps(8)
    for n in range(9):
        catalan = Fraction(math.comb(2 * n + 2, n + 1), n + 2)
        assert ms.Q3_over_s3[(0, 0, n)] == catalan
    assert all(k[0] == k[1] == 0 for k in ms.Q3_over_s3)


def test_A1_zero_and_A2_index_range():
    ms = mirror_maps(6)
    assert ms.A1 == {}
    assert all(k[0] > 0 for k in ms.A2)
    assert all(2 * k[0] <= k[1] for k in series_A3(6))


def test_A2_A3_first_terms():
    A2, A3 = series_A2(3), series_A3(3)
    # d = (1,0,0): (-1)^(-1) 1!/(1! 1! 0! 0!) = -1
    assert A2[(1, 0, 0)] == -1
    # d = (2,1,0): (+1) 2!/(2! 0! 1!) = 1
    assert A2[(2, 1, 0)] == 1
    # d = (0,1,0): (-1)^(-1) 1!/(0! 1! 1!) = -1
    assert A3[(0, 1, 0)] == -1
    # d = (1,2,1): (+1) 2!/(1! 0! 0! 1!) = 2
    assert A3[(1, 2, 1)] == 2


def test_mirror_maps_degree_cap():
    with pytest.raises(ValueError):
        mirror_maps(13)


def test_Q1_leading_behaviour():
    ms = mirror_maps(6)
    s = (1e-3, 2e-3, 1e-3)
    assert abs(evaluate_series(ms.Q1_over_s1, s) - 1) < 1e-2


def test_equivalent_moduli_same_igusa():
    m = random_moduli(np.random.default_rng(52))
    j0 = absolute_invariants(binary_invariants(mirror_sextic(m))).as_array()
    for b in (0.05, -0.1 + 0.03j):
        j1 = absolute_invariants(binary_invariants(mirror_sextic(equivalent_moduli(m, b)))).as_array()
        assert np.max(np.abs(j1 - j0)) < 1e-8 * np.max(np.abs(j0))


def test_moduli_jacobian_has_rank_two():
    m = random_moduli(np.random.default_rng(53))
    s = np.linalg.svd(moduli_jacobian(m), compute_uv=False)
    assert s[1] > 1e-6 * s[0]
    assert s[2] < 1e-6 * s[0]
