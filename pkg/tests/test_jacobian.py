from __future__ import annotations

import itertools

import numpy as np
import pytest

from hyptr.curve import random_quintic
from hyptr.errors import WeierstrassPointLimit
from hyptr.jacobian import (CurvePoint, abel_jacobi, abel_jacobi_pair, branch_characteristics, branch_point,
                            find_delta, half_period_characteristic, lattice_reduce, point_at,
                            restrict_to_curve, sigma, wp, wp_identities_residual)
from hyptr.periods import periods
from hyptr.theta import bits_add


@pytest.fixture(scope="module")
def setup():
    q = random_quintic(np.random.default_rng(30))
    pd = periods(q)
    return q, pd, find_delta(pd)


def _pts(curve, rng, k):
    xs = rng.normal(size=k) + 1j * rng.normal(size=k)
    return [point_at(curve, x, int(s)) for x, s in zip(xs, rng.choice([-1, 1], size=k))]


def test_infinity_maps_to_zero(setup):
    q, pd, _ = setup
    assert np.all(abel_jacobi(CurvePoint(None, None), pd).u == 0)


def test_branch_points_are_half_periods(setup):
    q, pd, _ = setup
    for k in range(5):
        v = abel_jacobi(branch_point(q, k), pd).v
        assert np.max(np.abs(lattice_reduce(2 * v, pd.tau))) < 1e-7
        half_period_characteristic(v, pd.tau)


def test_involution_negates(setup):
    q, pd, _ = setup
    for p in _pts(q, np.random.default_rng(31), 4):
        w = abel_jacobi(p, pd).v + abel_jacobi(p.involution(), pd).v
        assert np.max(np.abs(lattice_reduce(w, pd.tau))) < 1e-7


def test_two_torsion_generated(setup):
    _, pd, _ = setup
    chars = branch_characteristics(pd)
    seen = set()
    for eps in itertools.product((0, 1), repeat=len(chars)):
        s = "0000"
        for e, c in zip(eps, chars):
            if e:
                s = bits_add(s, c)
        seen.add(s)
    assert len(seen) == 16


def test_sigma_parity_and_divisor(setup):
    q, pd, d = setup
    assert abs(sigma(np.zeros(2), pd, d)) < 1e-12
    u = np.array([0.21 - 0.1j, 0.05 + 0.3j])
    assert abs(sigma(-u, pd, d) + sigma(u, pd, d)) < 1e-9 * abs(sigma(u, pd, d))
    for p in _pts(q, np.random.default_rng(32), 3):
        u = abel_jacobi(p, pd).u
        s = sigma(u, pd, d)
        ref = abs(sigma(u + np.array([0.05, 0.02]), pd, d))
        assert abs(s) < 1e-8 * max(1.0, ref)


def test_wp_even_and_periodic(setup):
    q, pd, d = setup
    u = np.array([0.31 + 0.2j, -0.17 + 0.05j])
    W = wp(u, pd, d).wp2
    assert np.max(np.abs(wp(-u, pd, d).wp2 - W)) < 1e-8 * np.max(np.abs(W))
    for m, n in [((1, 0), (0, 0)), ((0, 1), (1, 0)), ((-1, 2), (0, -1))]:
        shift = np.array(m) @ pd.PA + np.array(n) @ pd.PB
        assert np.max(np.abs(wp(u + shift, pd, d).wp2 - W)) < 1e-7 * np.max(np.abs(W))


def test_wp_curve_identities(setup):
    q, pd, d = setup
    rng = np.random.default_rng(33)
    for _ in range(5):
        p1, p2 = _pts(q, rng, 2)
        res = wp_identities_residual(p1, p2, pd, d)
        W = wp(abel_jacobi_pair(p1, p2, pd).u, pd, d).wp2
        assert np.max(np.abs(res)) < 1e-6 * max(1.0, np.max(np.abs(W)))


def test_restrict_to_curve_round_trip(setup):
    q, pd, d = setup
    for p in _pts(q, np.random.default_rng(34), 3):
        x, y = restrict_to_curve(p, pd, d)
        assert abs(x - p.x) < 1e-6 * max(1.0, abs(p.x))
        assert abs(y - p.y) < 1e-6 * max(1.0, abs(p.y))


def test_restrict_rejects_weierstrass(setup):
    q, pd, d = setup
    with pytest.raises(WeierstrassPointLimit):
        restrict_to_curve(branch_point(q, 1), pd, d)


def test_wp_frame_covariance(setup):
    q, pd, d = setup
    g = np.array([[1.2 + 0.1j, -0.3], [0.4j, 0.8 - 0.2j]])
    pg = periods(q, frame=g)
    u = np.array([0.25 - 0.1j, 0.12 + 0.2j])
    W = wp(u, pd, d).wp2
    Wg = wp(u @ g.T, pg, find_delta(pg)).wp2
    gi = np.linalg.inv(g)
    assert np.max(np.abs(Wg - gi.T @ W @ gi)) < 1e-7 * np.max(np.abs(W))
