from __future__ import annotations

import numpy as np
import pytest
from scipy.special import ellipk

from hyptr.errors import TruncationTooShallow, ZeroLeadingCoefficient
from hyptr.numerics import (LaurentSeries, agm, gauss_chebyshev, gauss_legendre, integrate_segment,
                            series_invert, series_log_unit, series_mul, series_pow_unit, series_residue)


def _random_series(rng, lead, n):
    return LaurentSeries.from_coeffs(rng.normal(size=n) + 1j * rng.normal(size=n), lead)


def test_mul_basic():
    a = LaurentSeries.from_coeffs([1, 1], -1, 5)
    b = LaurentSeries.from_coeffs([1], 1, 7)
    c = series_mul(a, b)
    assert c.lead_order == 0
    assert c.coeff(0) == 1 and c.coeff(1) == 1
    assert np.allclose(c.coeffs[2:], 0)


def test_mul_by_zero_keeps_truncation():
    a = LaurentSeries.from_coeffs([1, 2, 3], 0, 3)
    z = LaurentSeries.from_coeffs([0, 0], 0, 2)
    c = series_mul(a, z)
    assert c.trunc_order == 2
    assert np.all(c.coeffs == 0)


def test_mul_truncation_window():
    a = LaurentSeries.from_coeffs([1, 1], 0, 2)
    b = LaurentSeries.from_coeffs([1, -1], 0, 2)
    c = series_mul(a, b)
    assert c.trunc_order == 2
    assert np.allclose(c.coeffs, [1, 0])


def test_invert_monomial_and_geometric():
    inv = series_invert(LaurentSeries.from_coeffs([1], 2, 8))
    assert inv.lead_order == -2 and inv.coeff(-2) == 1
    geo = series_invert(LaurentSeries.from_coeffs([1, 1], 0, 6))
    assert np.allclose(geo.coeffs, [1, -1, 1, -1, 1, -1])


def test_invert_zero_raises():
    with pytest.raises(ZeroLeadingCoefficient):
        series_invert(LaurentSeries.from_coeffs([0, 0, 0], 0))


def test_residue():
    assert series_residue(LaurentSeries.from_coeffs([3, 5], -1, 4)) == 3
    assert series_residue(LaurentSeries.from_coeffs([1], -2, 3)) == 0
    with pytest.raises(TruncationTooShallow):
        series_residue(LaurentSeries.from_coeffs([1], -4, -2))


def test_residue_of_derivative_vanishes():
    rng = np.random.default_rng(0)
    for _ in range(10):
        f = _random_series(rng, -4, 10)
        assert abs(series_residue(f.derivative())) < 1e-14


def test_ring_axioms_on_overlap():
    rng = np.random.default_rng(1)
    for _ in range(10):
        a, b, c = (_random_series(rng, int(rng.integers(-3, 2)), 9) for _ in range(3))
        lhs, rhs = series_mul(series_mul(a, b), c), series_mul(a, series_mul(b, c))
        assert lhs.lead_order == rhs.lead_order
        n = min(lhs.trunc_order, rhs.trunc_order) - lhs.lead_order
        assert np.allclose(lhs.coeffs[:n], rhs.coeffs[:n], atol=1e-12)


def test_double_inverse_identity():
    rng = np.random.default_rng(2)
    a = _random_series(rng, -2, 8)
    a = LaurentSeries.from_coeffs(np.r_[1.0 + 0.5j, a.coeffs[1:]], -2)
    back = series_invert(series_invert(a))
    assert np.allclose(back.coeffs, a.coeffs, atol=1e-10)


def test_pow_and_log_units():
    a = LaurentSeries.from_coeffs([2, 0.3, -0.1, 0.05], 0, 8)
    half = series_pow_unit(a, 0.5)
    sq = series_mul(half, half)
    assert np.allclose(sq.coeffs[:8], a.coeffs[:8])
    lg = series_log_unit(a)
    z = 0.05
    assert abs(lg.evaluate(z) - np.log(a.evaluate(z))) < 1e-10


def test_chebyshev_arcsine_integral():
    val = integrate_segment(lambda x: 1 / (2 * np.sqrt(x * (1 - x))), (0, 1), gauss_chebyshev(64), (True, True))
    assert abs(val - np.pi / 2) < 1e-12


def test_polynomial_segment_exact():
    p = np.array([1.0, -2.0, 0.5, 3.0])
    z0, z1 = 0.2 - 0.4j, 1.3 + 0.7j
    val = integrate_segment(lambda x: np.polyval(p, x), (z0, z1), gauss_legendre(16))
    P = np.polyint(p)
    assert abs(val - (np.polyval(P, z1) - np.polyval(P, z0))) < 1e-12


def test_single_singular_end():
    # int_0^1 dx / sqrt(x) = 2
    val = integrate_segment(lambda x: 1 / np.sqrt(x), (0, 1), gauss_legendre(32), (True, False))
    assert abs(val - 2) < 1e-12


@pytest.mark.parametrize("lam", [1.7, 3.0, 9.5])
def test_elliptic_period_against_scipy(lam):
    # y^2 = x (x - 1)(x - lam): int_0^1 dx/y over the real segment is 2 K(1/lam)/sqrt(lam)
    val = integrate_segment(lambda x: 1 / np.sqrt(x * (1 - x) * (lam - x)), (0, 1), gauss_chebyshev(64), (True, True))
    ref = 2 * ellipk(1 / lam) / np.sqrt(lam)
    assert abs(val - ref) < 1e-12
    m = 1 / lam
    assert abs(np.pi / (2 * agm(1, np.sqrt(1 - m))) - ellipk(m)) < 1e-13


def test_quadrature_converges_on_doubling():
    f = lambda x: np.exp(np.sin(3 * x)) / np.sqrt(x * (1 - x) * (2.5 - x))
    a = integrate_segment(f, (0, 1), gauss_chebyshev(64), (True, True), adaptive=False)
    b = integrate_segment(f, (0, 1), gauss_chebyshev(128), (True, True), adaptive=False)
    assert abs(a - b) < 1e-10
