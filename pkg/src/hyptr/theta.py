"""Genus-two Riemann theta functions with characteristics and theta constants.

theta[a, b](v, tau) = sum_n exp(pi i (n+a)^t tau (n+a) + 2 pi i (n+a)^t (v+b)).
Characteristics are labelled by bits xyzw with a = (x, y)/2, b = (z, w)/2.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DenominatorVanishes, NotInSiegelSpace

TAIL_DIGITS = 14


@dataclass(frozen=True)
class ThetaCharacteristic:
    a: tuple
    b: tuple

    @classmethod
    def from_bits(cls, bits) -> "ThetaCharacteristic":
        if isinstance(bits, str):
            bits = [int(c) for c in bits]
        x, y, z, w = bits
        return cls((Fraction(x, 2), Fraction(y, 2)), (Fraction(z, 2), Fraction(w, 2)))

    @classmethod
    def from_vectors(cls, a, b) -> "ThetaCharacteristic":
        return cls(tuple(Fraction(v).limit_denominator(1000) for v in a),
                   tuple(Fraction(v).limit_denominator(1000) for v in b))

    @property
    def bits(self) -> str:
        vals = [int(2 * v) % 2 for v in self.a + self.b]
        return "".join(str(v) for v in vals)

    @property
    def parity(self) -> int:
        """4 a.b mod 2: 0 for even, 1 for odd (half-integer characteristics)."""
        s = 4 * (self.a[0] * self.b[0] + self.a[1] * self.b[1])
        return int(s) % 2

    @property
    def is_even(self) -> bool:
        return self.parity == 0

    def reduced(self) -> "ThetaCharacteristic":
        return ThetaCharacteristic.from_bits(self.bits)

    def reduction_sign(self) -> int:
        """theta[a, b + m] = exp(2 pi i a.m) theta[a, b]; sign relative to the reduced label."""
        r = self.reduced()
        m = [self.b[i] - r.b[i] for i in range(2)]
        s = 2 * sum(r.a[i] * m[i] for i in range(2))  # exp(2 pi i a.m) = (-1)^(2 a.m)
        # shifts in a permute the summation index and do not change the value
        return -1 if int(s) % 2 else 1

    def avec(self) -> np.ndarray:
        return np.array([float(v) for v in self.a])

    def bvec(self) -> np.ndarray:
        return np.array([float(v) for v in self.b])

    def __add__(self, other: "ThetaCharacteristic") -> "ThetaCharacteristic":
        return ThetaCharacteristic(tuple(x + y for x, y in zip(self.a, other.a)),
                                   tuple(x + y for x, y in zip(self.b, other.b)))

    def __str__(self):
        return self.bits


ALL_LABELS = ["".join(b) for b in itertools.product("01", repeat=4)]


def characteristics() -> list[ThetaCharacteristic]:
    return [ThetaCharacteristic.from_bits(s) for s in ALL_LABELS]


EVEN_LABELS = [s for s in ALL_LABELS if ThetaCharacteristic.from_bits(s).is_even]
ODD_LABELS = [s for s in ALL_LABELS if not ThetaCharacteristic.from_bits(s).is_even]


def bits_add(s: str, t: str) -> str:
    return "".join(str((int(x) + int(y)) % 2) for x, y in zip(s, t))


@dataclass(frozen=True)
class ThetaValue:
    """Theta value and v-derivatives.

    Derivatives are stored exactly; ``third`` is None unless requested.
    """

    value: complex
    gradient: np.ndarray
    hessian: np.ndarray
    third: np.ndarray | None
    trunc_radius: int

    def log_gradient(self) -> np.ndarray:
        return self.gradient / self.value

    def log_hessian(self) -> np.ndarray:
        g = self.log_gradient()
        return self.hessian / self.value - np.outer(g, g)

    def log_third(self) -> np.ndarray:
        v = self.value
        g = self.gradient / v
        H = self.hessian / v
        T = self.third / v
        out = T.copy()
        for i, j, k in itertools.product(range(2), repeat=3):
            out[i, j, k] = (T[i, j, k] - H[i, j] * g[k] - H[i, k] * g[j] - H[j, k] * g[i]
                            + 2 * g[i] * g[j] * g[k])
        return out


def check_siegel(tau: np.ndarray) -> np.ndarray:
    tau = np.asarray(tau, dtype=complex)
    if tau.shape != (2, 2):
        raise NotInSiegelSpace("tau must be 2x2")
    if np.max(np.abs(tau - tau.T)) > 1e-8 * max(1.0, np.max(np.abs(tau))):
        raise NotInSiegelSpace("tau is not symmetric")
    ev = np.linalg.eigvalsh(0.5 * (tau.imag + tau.imag.T))
    if ev.min() <= 0:
        raise NotInSiegelSpace("Im tau is not positive definite")
    return 0.5 * (tau + tau.T)


def truncation_radius(tau: np.ndarray) -> int:
    lam = float(np.linalg.eigvalsh(np.asarray(tau).imag).min())
    return int(math.ceil(math.sqrt(TAIL_DIGITS * math.log(10) / (math.pi * lam)))) + 2


@lru_cache(maxsize=32)
def _box(N: int) -> np.ndarray:
    r = np.arange(-N, N + 1)
    return np.array(list(itertools.product(r, r)), dtype=float)


def theta(char: ThetaCharacteristic | str, v, tau, derivs: int = 2, radius: int | None = None) -> ThetaValue:
    """Lattice-sum evaluation with term-wise v-derivatives up to order 3.

    The summation box is centered on the dominant terms for the given v, so
    large imaginary parts of v do not need a separate lattice reduction.
    """
    if isinstance(char, str):
        char = ThetaCharacteristic.from_bits(char)
    tau = check_siegel(tau)
    v = np.asarray(v, dtype=complex).reshape(2)
    a, b = char.avec(), char.bvec()
    N = truncation_radius(tau) if radius is None else radius
    center = -np.linalg.solve(tau.imag, v.imag) - a
    n = _box(N) + np.round(center)
    na = n + a
    expo = 1j * np.pi * np.einsum("ki,ij,kj->k", na, tau, na) + 2j * np.pi * na @ (v + b)
    terms = np.exp(expo)
    val = terms.sum()
    k = 2j * np.pi * na
    grad = (terms[:, None] * k).sum(0)
    hess = np.einsum("k,ki,kj->ij", terms, k, k) if derivs >= 2 else np.zeros((2, 2), complex)
    third = np.einsum("k,ki,kj,kl->ijl", terms, k, k, k) if derivs >= 3 else None
    return ThetaValue(complex(val), grad, hess, third, N)


def theta_constants(tau, labels=None) -> dict[str, complex]:
    """theta[m](0, tau) for the even characteristics (or the given labels)."""
    labels = EVEN_LABELS if labels is None else labels
    return {s: theta(s, np.zeros(2), tau, derivs=0).value for s in labels}


def theta_gradients(tau, labels=None) -> dict[str, np.ndarray]:
    labels = ODD_LABELS if labels is None else labels
    return {s: theta(s, np.zeros(2), tau, derivs=1).gradient for s in labels}


# Siegel modular forms from theta constants -------------------------------------


def _goepel_complements() -> list[tuple[str, ...]]:
    """The 15 six-element sets of even characteristics complementary to
    Goepel quadruples (four even characteristics summing to zero)."""
    out = []
    for quad in itertools.combinations(EVEN_LABELS, 4):
        s = "0000"
        for q in quad:
            s = bits_add(s, q)
        if s == "0000":
            out.append(tuple(m for m in EVEN_LABELS if m not in quad))
    return out


GOEPEL_COMPLEMENTS = _goepel_complements()

# Weight-6 form as a combination of (theta_a theta_b theta_c)^4 over triples of
# even characteristics; integer coefficients are fixed once by requiring
# Sp4(Z)-invariance of weight 6 and unit value at the cusp (tests re-derive
# them from the invariance conditions).
PSI6_TRIPLES: dict[tuple[str, str, str], int] = {}
PSI6_SCALE = Fraction(1, 4)


def _load_psi6():
    from ._psi6 import PSI6
    PSI6_TRIPLES.update(PSI6)


@dataclass(frozen=True)
class CuspForms:
    psi4: complex
    psi6: complex
    chi10: complex
    chi12: complex

    @property
    def E4(self) -> complex:
        return self.psi4

    @property
    def E6(self) -> complex:
        # the j2 identification needs twice the cusp-normalized weight-6 form
        return 2 * self.psi6


def cusp_forms_from_constants(th: dict[str, complex]) -> CuspForms:
    if not PSI6_TRIPLES:
        _load_psi6()
    t4 = {k: v ** 4 for k, v in th.items()}
    psi4 = sum(v ** 2 for v in t4.values()) / 4
    psi6 = sum(c * t4[x] * t4[y] * t4[z] for (x, y, z), c in PSI6_TRIPLES.items()) * float(PSI6_SCALE)
    chi10 = -np.prod([v ** 2 for v in th.values()]) / 2 ** 14
    chi12 = sum(np.prod([t4[m] for m in six]) for six in GOEPEL_COMPLEMENTS) / (2 ** 17 * 3)
    return CuspForms(complex(psi4), complex(psi6), complex(chi10), complex(chi12))


def cusp_forms(tau) -> CuspForms:
    return cusp_forms_from_constants(theta_constants(tau))


def igusa_from_tau(tau):
    """(E4 chi10^2/chi12^2, E6 chi10^3/chi12^3, chi10^6/chi12^5)."""
    from .curve import AbsoluteInvariants
    cf = cusp_forms(tau)
    if abs(cf.chi12) == 0:
        raise DenominatorVanishes("chi12 vanishes")
    return AbsoluteInvariants(cf.E4 * cf.chi10 ** 2 / cf.chi12 ** 2,
                              cf.E6 * cf.chi10 ** 3 / cf.chi12 ** 3,
                              cf.chi10 ** 6 / cf.chi12 ** 5)


def rosenhain_lambdas(tau) -> tuple[complex, complex, complex]:
    th = theta_constants(tau)
    den = [th["0100"], th["0000"], th["0001"]]
    if min(abs(d) for d in den) < 1e-14:
        raise DenominatorVanishes("theta constant in a Rosenhain denominator vanishes")
    l1 = (th["1100"] * th["1000"] / (th["0100"] * th["0000"])) ** 2
    l2 = (th["1001"] * th["1100"] / (th["0001"] * th["0100"])) ** 2
    l3 = (th["1001"] * th["1000"] / (th["0001"] * th["0000"])) ** 2
    return complex(l1), complex(l2), complex(l3)


def match_rosenhain_orbit(curve, lams, tol: float = 1e-5) -> tuple[int, ...] | None:
    """Root ordering whose Rosenhain parameters equal ``lams`` as a set, if any.

    The 720 orderings of the six branch points realize the action of
    Sp4(Z)/Gamma(2) on level-2 data.
    """
    from .curve import to_rosenhain
    from .errors import DegenerateDiscriminant
    target = np.sort_complex(np.asarray(lams, dtype=complex))
    scale = max(1.0, float(np.max(np.abs(target))))
    for perm in itertools.permutations(range(6)):
        try:
            got = np.sort_complex(np.asarray(to_rosenhain(curve, perm).coeffs, dtype=complex))
        except DegenerateDiscriminant:
            continue
        if np.max(np.abs(got - target)) < tol * scale:
            return perm
    return None


# Identities tying periods to theta constants -----------------------------------


@dataclass(frozen=True)
class ThomaeCheck:
    discriminant: complex  # prod_{k<l} (e_k - e_l)^2
    theta_side: complex  # (det Pi_A / pi^2)^-10 prod_even theta^2
    sign: int
    rel_error: float


def thomae_check(pd) -> ThomaeCheck:
    """Discriminant of a monic quintic against periods and even theta constants.

    det Pi_A / pi^2 is the determinant divided by pi^2 (not det(Pi_A / pi^2),
    which differs by pi^20).
    """
    from .curve import QUINTIC
    from .errors import ModelMismatch
    curve = pd.curve
    if curve.model != QUINTIC or abs(curve.lead - 1) > 1e-12:
        raise ModelMismatch("discriminant identity needs a quintic with leading coefficient 1")
    e = curve.roots
    disc = np.prod([(e[k] - e[l]) ** 2 for k, l in itertools.combinations(range(5), 2)])
    th = theta_constants(pd.tau)
    rhs = (np.linalg.det(pd.PA) / np.pi ** 2) ** -10 * np.prod([v ** 2 for v in th.values()])
    sign = 1 if abs(disc - rhs) <= abs(disc + rhs) else -1
    rel = abs(disc - sign * rhs) / abs(disc)
    return ThomaeCheck(complex(disc), complex(rhs), sign, float(rel))


def quasi_period_theta(curve, pd, pair_chars: dict | None = None) -> np.ndarray:
    """Pi_A^-1 Pi_A(eta) for a sextic from coefficients and even theta constants.

    M = -1/10 ((4 a4, a3), (a3, 4 a2)) + 1/10 sum_m Pi_A^-1 H theta_m(0) Pi_A^-t / theta_m(0)
    with m running over the characteristics of the ten branch-point pairs
    (all ten even characteristics).
    """
    from .curve import SEXTIC
    from .errors import ModelMismatch
    if curve.model != SEXTIC:
        raise ModelMismatch("quasi-period theta formula needs the sextic model")
    if pair_chars is None:
        from .jacobian import pair_characteristics
        pair_chars = pair_characteristics(pd)
    a = curve.a
    P = pd.PA_inv
    acc = np.zeros((2, 2), dtype=complex)
    for m in pair_chars.values():
        tv = theta(m, np.zeros(2), pd.tau, derivs=2)
        acc += P @ tv.hessian @ P.T / tv.value
    base = np.array([[4 * a[4], a[3]], [a[3], 4 * a[2]]])
    return (-base + acc) / 10


UNITS = (1, 1j, -1, -1j)


@dataclass(frozen=True)
class PeriodThetaTerms:
    """Pi_A as u1 T1 + u2 T2 with fourth roots of unity u1, u2 left open.

    T1 = pre/Theta_l grad(theta_l) (1, e_k), T2 = pre/Theta_k grad(theta_k) (1, e_l);
    the units absorb the branch of (e_k - e_l)^(3/2) and theta sign conventions.
    """

    T1: np.ndarray
    T2: np.ndarray
    choice: tuple

    def combine(self, u1: complex = 1, u2: complex = 1) -> np.ndarray:
        return u1 * self.T1 + u2 * self.T2

    def resolve(self, target: np.ndarray) -> tuple[np.ndarray, tuple, float]:
        """Units making the combination closest to ``target``; returns (matrix, units, rel error)."""
        best = None
        for u1, u2 in itertools.product(UNITS, repeat=2):
            M = self.combine(u1, u2)
            err = float(np.max(np.abs(M - target)) / np.max(np.abs(target)))
            if best is None or err < best[2]:
                best = (M, (u1, u2), err)
        return best


def period_theta(curve, tau, choice, branch_chars, delta: str) -> PeriodThetaTerms:
    """Pi_A(omega) of a monic quintic from odd theta gradients and even constants.

    choice = (k, l, p, q, r) is a permutation of the five finite branch indices
    (0-based); theta_k has characteristic delta + c_k, theta_kl has
    delta + c_k + c_l, where c_k is the half-period characteristic of e_k.
    """
    from .errors import CharacteristicResolutionFailed
    if sorted(choice) != list(range(5)):
        raise CharacteristicResolutionFailed("choice must be a permutation of the five branch indices")
    k, l, p, q, r = choice
    e = curve.roots

    def ch(*ks):
        s = delta
        for j in ks:
            s = bits_add(s, branch_chars[j])
        return s

    def T(*ks):
        return theta(ch(*ks), np.zeros(2), tau, derivs=0).value

    def grad(j):
        return theta(ch(j), np.zeros(2), tau, derivs=1).gradient

    den = T(k, l)
    if abs(den) < 1e-14:
        raise DenominatorVanishes("theta constant in the period formula vanishes")
    pre = T(p, q) * T(p, r) * T(q, r) / (den * (e[k] - e[l]) ** 1.5)
    th_l = T(p, l) * T(q, l) * T(r, l)
    th_k = T(p, k) * T(q, k) * T(r, k)
    T1 = pre / th_l * np.outer(grad(l), [1, e[k]])
    T2 = pre / th_k * np.outer(grad(k), [1, e[l]])
    return PeriodThetaTerms(T1, T2, tuple(choice))
