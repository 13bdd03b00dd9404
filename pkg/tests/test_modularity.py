from __future__ import annotations

import numpy as np
import pytest

from hyptr.curve import random_sextic
from hyptr.errors import SingularDenominator
from hyptr.jacobian import abel_jacobi, find_delta, point_at
from hyptr.modularity import (IDENTITY, J_ELEMENT, SymplecticMatrix, act_on_tau, gamma2_membership, generators,
                              random_gamma2, random_word, transformation_suite, transformed_periods,
                              verify_bergman_law, verify_order1_quasi_modular, verify_wp_invariance)
from hyptr.periods import J4, periods


@pytest.fixture(scope="module")
def pd():
    return periods(random_sextic(np.random.default_rng(80)))


def test_generators_are_symplectic():
    for g in generators():
        assert np.array_equal(g.gamma @ J4 @ g.gamma.T, J4)
        assert g.block_residual() == 0
        assert (g @ g.inverse()).gamma.tolist() == IDENTITY.gamma.tolist()


def test_rejects_non_symplectic():
    with pytest.raises(ValueError):
        SymplecticMatrix(2 * np.eye(4, dtype=int))
    with pytest.raises(ValueError):
        SymplecticMatrix(np.eye(3, dtype=int))


def test_random_words_have_nonzero_c():
    rng = np.random.default_rng(81)
    for _ in range(20):
        g = random_word(rng)
        assert np.any(g.c != 0) and g.block_residual() == 0
        h = random_gamma2(rng)
        assert gamma2_membership(h) and np.any(h.c != 0)


def test_tau_action_is_a_group_action(pd):
    rng = np.random.default_rng(82)
    g, h = random_word(rng), random_word(rng)
    lhs = act_on_tau(g @ h, pd.tau)
    rhs = act_on_tau(g, act_on_tau(h, pd.tau))
    assert np.max(np.abs(lhs - rhs)) < 1e-9


def test_tau_stays_in_siegel_space(pd):
    rng = np.random.default_rng(83)
    for _ in range(5):
        t = act_on_tau(random_word(rng), pd.tau)
        assert np.max(np.abs(t - t.T)) < 1e-10
        assert np.linalg.eigvalsh(t.imag).min() > 0


def test_singular_denominator():
    tau = np.array([[1j, 0], [0, 1j]])
    g = SymplecticMatrix(np.array([[1, 0, 0, 0], [0, 1, 0, 0], [1, 0, 1, 0], [0, 0, 0, 1]]))
    with pytest.raises(SingularDenominator):
        act_on_tau(g, np.array([[-1 + 1e-14j, 0], [0, 1j]]))
    assert np.all(np.isfinite(act_on_tau(g, tau)))


@pytest.mark.parametrize("seed", [84, 85, 86])
def test_transformation_suite_random_word(pd, seed):
    g = random_word(np.random.default_rng(seed))
    for rep in transformation_suite(pd, g):
        assert rep.passed, rep


def test_transformation_suite_gamma2(pd):
    t = generators()[4]  # lower transvection
    g = t @ t
    assert gamma2_membership(g) and np.any(g.c != 0)
    for rep in transformation_suite(pd, g):
        assert rep.passed, rep


def test_J_quasi_period_shift_is_nontrivial(pd):
    new = transformed_periods(pd, J_ELEMENT)
    assert np.max(np.abs(new.M - pd.M)) > 1e-3 * np.max(np.abs(pd.M))
    assert np.max(np.abs((new.M + new.Y) - (pd.M + pd.Y))) < 1e-7 * np.max(np.abs(pd.M))


def test_recompute_agrees_with_matrix_action(pd):
    g = random_word(np.random.default_rng(87))
    a = transformed_periods(pd, g, recompute=True)
    b = transformed_periods(pd, g, recompute=False)
    assert np.max(np.abs(a.Pi - b.Pi)) < 1e-8 * np.max(np.abs(pd.Pi))


def test_order1_law(pd):
    assert verify_order1_quasi_modular(pd, random_word(np.random.default_rng(88))).passed


def test_wp_and_bergman_laws(pd):
    g = random_word(np.random.default_rng(89))
    new = transformed_periods(pd, g)
    d0, d1 = find_delta(pd), find_delta(new)
    c = pd.curve
    p, q = point_at(c, 0.4 + 0.3j), point_at(c, -0.6 - 0.2j, -1)
    u = abel_jacobi(p, pd).u - abel_jacobi(q, pd).u
    assert verify_wp_invariance(pd, g, u, new, d0, d1).passed
    assert verify_bergman_law(pd, g, p, q, new, d0, d1).passed
