"""Sp4(Z) action on markings and checks of the transformation laws.

Markings are rows (B1, B2, A1, A2); gamma acts by (B, A)^t -> gamma (B, A)^t,
so Pi -> gamma Pi and tau -> (a tau + b)(c tau + d)^-1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SingularDenominator
from .jacobian import find_delta, wp
from .periods import J4, Marking, PeriodData, periods

TOL = 1e-6


@dataclass(frozen=True)
class SymplecticMatrix:
    gamma: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gamma)
        if g.shape != (4, 4) or not np.all(g == np.round(g)):
            raise ValueError("gamma must be a 4x4 integer matrix")
        g = np.round(g).astype(int)
        if not np.array_equal(g @ J4 @ g.T, J4):
            raise ValueError("gamma is not symplectic")
        object.__setattr__(self, "gamma", g)

    @property
    def a(self):
        return self.gamma[:2, :2]

    @property
    def b(self):
        return self.gamma[:2, 2:]

    @property
    def c(self):
        return self.gamma[2:, :2]

    @property
    def d(self):
        return self.gamma[2:, 2:]

    def __matmul__(self, other: "SymplecticMatrix") -> "SymplecticMatrix":
        return SymplecticMatrix(self.gamma @ other.gamma)

    def inverse(self) -> "SymplecticMatrix":
        # gamma^-1 = -J gamma^t J for symplectic gamma
        return SymplecticMatrix(-(J4 @ self.gamma.T @ J4))

    def block_residual(self) -> int:
        """Largest entry of ab^t - ba^t, cd^t - dc^t, ad^t - bc^t - 1 (zero exactly)."""
        a, b, c, d = self.a, self.b, self.c, self.d
        parts = [a @ b.T - b @ a.T, c @ d.T - d @ c.T, a @ d.T - b @ c.T - np.eye(2, dtype=int)]
        return int(max(np.abs(p).max() for p in parts))


IDENTITY = SymplecticMatrix(np.eye(4, dtype=int))
J_ELEMENT = SymplecticMatrix(np.block([[np.zeros((2, 2), int), -np.eye(2, dtype=int)],
                                       [np.eye(2, dtype=int), np.zeros((2, 2), int)]]))


def _transvections() -> list[SymplecticMatrix]:
    I2 = np.eye(2, dtype=int)
    Z = np.zeros((2, 2), dtype=int)
    upper = [SymplecticMatrix(np.block([[I2, S], [Z, I2]]))
             for S in (np.array([[1, 0], [0, 0]]), np.array([[0, 0], [0, 1]]), np.array([[0, 1], [1, 0]]))]
    lower = [J_ELEMENT @ t @ J_ELEMENT.inverse() for t in upper]
    return upper + lower


def generators() -> list[SymplecticMatrix]:
    """J, the upper and lower transvections and a unimodular change (U, 0; 0, U^-t)."""
    I2 = np.eye(2, dtype=int)
    Z = np.zeros((2, 2), dtype=int)
    U = np.array([[1, 1], [0, 1]])
    Uit = np.array([[1, 0], [-1, 1]])
    return [J_ELEMENT] + _transvections() + [SymplecticMatrix(np.block([[U, Z], [Z, Uit]]))]


def _word(rng: np.random.Generator, gens: list[SymplecticMatrix], length: int) -> SymplecticMatrix:
    g = IDENTITY
    for _ in range(length):
        h = gens[int(rng.integers(len(gens)))]
        if rng.random() < 0.5:
            h = h.inverse()
        g = g @ h
    return g


def random_word(rng: np.random.Generator, max_length: int = 6) -> SymplecticMatrix:
    """Short word in the generators; redrawn until c != 0 so the laws are not trivial."""
    gens = generators()
    while True:
        g = _word(rng, gens, int(rng.integers(2, max_length + 1)))
        if np.any(g.c != 0):
            return g


def gamma2_membership(gamma: SymplecticMatrix) -> bool:
    return bool(np.all(np.mod(gamma.gamma - np.eye(4, dtype=int), 2) == 0))


def random_gamma2(rng: np.random.Generator, max_length: int = 3) -> SymplecticMatrix:
    """Word in squared transvections (all in Gamma(2)) with c != 0."""
    gens = [t @ t for t in _transvections()]
    while True:
        g = _word(rng, gens, int(rng.integers(1, max_length + 1)))
        if np.any(g.c != 0):
            return g


def _ctd(gamma: SymplecticMatrix, tau: np.ndarray) -> np.ndarray:
    m = gamma.c @ tau + gamma.d
    if abs(np.linalg.det(m)) < 1e-12 * max(1.0, np.abs(m).max()) ** 2:
        raise SingularDenominator("c tau + d is singular")
    return m


def act_on_tau(gamma: SymplecticMatrix, tau: np.ndarray) -> np.ndarray:
    tau = np.asarray(tau, dtype=complex)
    return (gamma.a @ tau + gamma.b) @ np.linalg.inv(_ctd(gamma, tau))


def act_on_marking(gamma: SymplecticMatrix, marking: Marking) -> Marking:
    return marking.transformed(gamma.gamma)


@dataclass(frozen=True)
class TransformReport:
    law: str
    gamma: list
    residual: float
    tolerance: float
    passed: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.residual < self.tolerance))

    def to_dict(self) -> dict:
        return {"law": self.law, "gamma": self.gamma, "residual": self.residual,
                "tolerance": self.tolerance, "passed": self.passed}


def _report(law, gamma, residual, tol=TOL) -> TransformReport:
    return TransformReport(law, gamma.gamma.tolist(), float(residual), tol)


def transformed_periods(pd: PeriodData, gamma: SymplecticMatrix, recompute: bool = True) -> PeriodData:
    """Periods in the marking gamma(B, A); ``recompute`` re-integrates the cycles."""
    if recompute:
        return periods(pd.curve, marking=act_on_marking(gamma, pd.marking), frame=pd.frame)
    return pd.with_marking(gamma.gamma)


def _rel(x, y) -> float:
    return float(np.max(np.abs(x - y)) / max(1.0, float(np.max(np.abs(y)))))


def verify_period_block_law(pd: PeriodData, gamma: SymplecticMatrix, new: PeriodData | None = None) -> TransformReport:
    new = transformed_periods(pd, gamma) if new is None else new
    return _report("period block law", gamma, _rel(new.Pi, gamma.gamma @ pd.Pi))


def verify_tau_action(pd: PeriodData, gamma: SymplecticMatrix, new: PeriodData | None = None) -> TransformReport:
    new = transformed_periods(pd, gamma) if new is None else new
    return _report("tau action", gamma, _rel(new.tau, act_on_tau(gamma, pd.tau)))


def quasi_period_shift(pd: PeriodData, gamma: SymplecticMatrix) -> np.ndarray:
    """Pi_A^-1 (c tau + d)^-1 2 pi i c Pi_A^-t."""
    P = pd.PA_inv
    return P @ np.linalg.solve(_ctd(gamma, pd.tau), 2j * np.pi * gamma.c) @ P.T


def verify_quasi_period_law(pd: PeriodData, gamma: SymplecticMatrix, new: PeriodData | None = None) -> TransformReport:
    new = transformed_periods(pd, gamma) if new is None else new
    return _report("quasi-period law", gamma, _rel(new.M, pd.M + quasi_period_shift(pd, gamma)))


def verify_completed_invariance(pd: PeriodData, gamma: SymplecticMatrix, new: PeriodData | None = None) -> TransformReport:
    new = transformed_periods(pd, gamma) if new is None else new
    return _report("completed invariance", gamma, _rel(new.M + new.Y, pd.M + pd.Y))


def verify_imaginary_part_law(tau: np.ndarray, gamma: SymplecticMatrix) -> TransformReport:
    """(g tau - conj g tau)^-1 = (c conj tau + d)(tau - conj tau)^-1 (c tau + d)^t."""
    gt = act_on_tau(gamma, tau)
    lhs = np.linalg.inv(gt - gt.conj())
    c, d = gamma.c, gamma.d
    rhs = (c @ tau.conj() + d) @ np.linalg.inv(tau - tau.conj()) @ (c @ tau + d).T
    return _report("(tau - conj tau)^-1 law", gamma, _rel(lhs, rhs), 1e-9)


def verify_order1_quasi_modular(pd: PeriodData, gamma: SymplecticMatrix, new: PeriodData | None = None) -> TransformReport:
    """Weight 1, order 1 law for f0 = Pi_A(eta), f1 = Pi_B(eta) - tau Pi_A(eta).

    f1(tau) = (c tau + d)^t f1(g tau) and
    f0(tau) = (c tau + d)^-1 (f0(g tau) - c (c tau + d)^t f1(g tau)), columnwise in eta.
    """
    new = transformed_periods(pd, gamma) if new is None else new
    f0, f1 = pd.PA_eta, pd.PB_eta - pd.tau @ pd.PA_eta
    g0, g1 = new.PA_eta, new.PB_eta - new.tau @ new.PA_eta
    m = _ctd(gamma, pd.tau)
    r1 = _rel(f1, m.T @ g1)
    r0 = _rel(f0, np.linalg.solve(m, g0 - gamma.c @ m.T @ g1))
    return _report("order-1 quasi-modular law", gamma, max(r0, r1))


def verify_wp_invariance(pd: PeriodData, gamma: SymplecticMatrix, u: np.ndarray,
                         new: PeriodData | None = None, delta: str | None = None,
                         new_delta: str | None = None) -> TransformReport:
    """wp_ij at a fixed u is the same function in both markings."""
    new = transformed_periods(pd, gamma) if new is None else new
    delta = find_delta(pd) if delta is None else delta
    new_delta = find_delta(new) if new_delta is None else new_delta
    return _report("wp invariance", gamma, _rel(wp(u, new, new_delta).wp2, wp(u, pd, delta).wp2))


def verify_bergman_law(pd: PeriodData, gamma: SymplecticMatrix, p, q, new: PeriodData | None = None,
                       delta: str | None = None, new_delta: str | None = None) -> TransformReport:
    """B(new marking) - B(old) = -Pi_A^-1 (c tau + d)^-1 2 pi i c Pi_A^-t in the du frame."""
    from .kernels import bergman_theta
    new = transformed_periods(pd, gamma) if new is None else new
    delta = find_delta(pd) if delta is None else delta
    new_delta = find_delta(new) if new_delta is None else new_delta
    b0 = bergman_theta(p, q, pd, delta).matrix_part
    b1 = bergman_theta(p, q, new, new_delta).matrix_part
    return _report("Bergman kernel law", gamma, _rel(b1 - b0, -quasi_period_shift(pd, gamma)))


def transformation_suite(pd: PeriodData, gamma: SymplecticMatrix) -> list[TransformReport]:
    new = transformed_periods(pd, gamma)
    return [
        verify_quasi_period_law(pd, gamma, new),
        verify_completed_invariance(pd, gamma, new),
        verify_period_block_law(pd, gamma, new),
        verify_tau_action(pd, gamma, new),
        verify_imaginary_part_law(pd.tau, gamma),
    ]
