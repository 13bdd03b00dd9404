"""Genus-two hyperelliptic curves in sextic, quintic and Rosenhain form.

Every model is stored through a degree-six coefficient vector
a = (a0, ..., a6) of P(x) = sum_k a_k x^(6-k) together with its finite roots.
A quintic has a0 = 0 (and b_k = a_{k+1}); a Rosenhain curve is the monic
quintic with roots 0, 1, lambda_1, lambda_2, lambda_3.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    AZero,
    CoincidentShifts,
    DegenerateDiscriminant,
    ModelMismatch,
    RootAtZero,
    ZeroLeadingCoefficient,
    ZeroScale,
)

SEXTIC, QUINTIC, ROSENHAIN = "sextic", "quintic", "rosenhain"
DEGENERACY_REL = 1e-10
CONSISTENCY_REL = 1e-9


def _as_complex(v) -> complex:
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(v[0], v[1])
    return complex(v)


def lexicographic(roots: Sequence[complex]) -> np.ndarray:
    r = np.asarray(roots, dtype=complex)
    idx = sorted(range(len(r)), key=lambda i: (round(r[i].real, 12), round(r[i].imag, 12)))
    return r[idx]


def check_distinct(roots: Sequence[complex]) -> None:
    r = np.asarray(roots, dtype=complex)
    if len(r) < 2:
        return
    diff = np.abs(r[:, None] - r[None, :])
    spread = max(float(diff.max()), 1.0)
    diff[np.diag_indices(len(r))] = np.inf
    if float(diff.min()) < DEGENERATE_THRESHOLD(spread):
        raise DegenerateDiscriminant("degenerate discriminant: two roots coincide")


def DEGENERATE_THRESHOLD(spread: float) -> float:
    return DEGENERACY_REL * spread


def _polish(coeffs: np.ndarray, roots: np.ndarray, steps: int = 3) -> np.ndarray:
    p = np.poly1d(coeffs)
    dp = p.deriv()
    r = roots.copy()
    for _ in range(steps):
        d = dp(r)
        ok = np.abs(d) > 0
        r[ok] = r[ok] - p(r[ok]) / d[ok]
    return r


def roots_of(coeffs: Sequence[complex], ordering: Sequence[int] | None = None) -> np.ndarray:
    """Roots of a polynomial given by descending coefficients.

    Leading zero coefficients are stripped; the returned roots are ordered
    lexicographically by (re, im) unless an explicit permutation is given.
    """
    c = np.array([_as_complex(v) for v in coeffs], dtype=complex)
    nz = np.nonzero(np.abs(c) > 0)[0]
    if len(nz) == 0:
        raise ZeroLeadingCoefficient("zero polynomial")
    c = c[nz[0]:]
    if len(c) < 2:
        return np.zeros(0, dtype=complex)
    r = _polish(c, np.roots(c))
    check_distinct(r)
    r = lexicographic(r)
    if ordering is not None:
        r = r[list(ordering)]
    back = c[0] * np.poly(r)
    scale = np.abs(c).max()
    if np.abs(back - c).max() > CONSISTENCY_REL * scale * 10:
        raise DegenerateDiscriminant("root finding did not reproduce the coefficients")
    return r


@dataclass(frozen=True)
class HyperellipticCurve:
    """A genus-two curve y^2 = P(x) in one of three models.

    ``coeffs`` holds the model's native parameters: (a0..a6) for a sextic,
    (b0..b5) for a quintic, (lambda1, lambda2, lambda3) for Rosenhain form.
    ``roots`` are the finite branch points; for a sextic roots[0] is r0.
    """

    model: str
    coeffs: tuple
    roots: np.ndarray = field(compare=False)

    def __post_init__(self):
        r = np.asarray(self.roots, dtype=complex).copy()
        r.setflags(write=False)
        object.__setattr__(self, "roots", r)
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))

    # constructors ---------------------------------------------------

    @classmethod
    def sextic(cls, a: Sequence[complex], ordering: Sequence[int] | None = None) -> "HyperellipticCurve":
        a = [_as_complex(v) for v in a]
        if len(a) != 7:
            raise ValueError("sextic needs 7 coefficients a0..a6")
        if abs(a[0]) == 0:
            raise ZeroLeadingCoefficient("sextic requires a0 != 0")
        return cls(SEXTIC, tuple(a), roots_of(a, ordering))

    @classmethod
    def quintic(cls, b: Sequence[complex], ordering: Sequence[int] | None = None) -> "HyperellipticCurve":
        b = [_as_complex(v) for v in b]
        if len(b) != 6:
            raise ValueError("quintic needs 6 coefficients b0..b5")
        if abs(b[0]) == 0:
            raise ZeroLeadingCoefficient("quintic requires b0 != 0")
        return cls(QUINTIC, tuple(b), roots_of(b, ordering))

    @classmethod
    def rosenhain(cls, lams: Sequence[complex]) -> "HyperellipticCurve":
        lam = [complex(v) for v in lams]
        roots = np.array([0.0, 1.0] + lam, dtype=complex)
        check_distinct(roots)
        return cls(ROSENHAIN, tuple(lam), roots)

    @classmethod
    def from_roots(cls, model: str, roots: Sequence[complex], lead: complex = 1.0) -> "HyperellipticCurve":
        r = np.asarray(roots, dtype=complex)
        check_distinct(r)
        c = complex(lead) * np.poly(r)
        if model == SEXTIC:
            if len(r) != 6:
                raise ValueError("sextic needs 6 roots")
            return cls(SEXTIC, tuple(c), r)
        if model == QUINTIC:
            if len(r) != 5:
                raise ValueError("quintic needs 5 roots")
            return cls(QUINTIC, tuple(c), r)
        raise ValueError(f"unknown model {model!r}")

    # derived data ---------------------------------------------------

    @property
    def a(self) -> np.ndarray:
        """Degree-six coefficient vector (a0..a6) of the defining polynomial."""
        if self.model == SEXTIC:
            return np.array(self.coeffs, dtype=complex)
        if self.model == QUINTIC:
            return np.concatenate([[0.0], np.array(self.coeffs, dtype=complex)])
        return np.concatenate([[0.0], np.poly(self.roots)])

    @property
    def lead(self) -> complex:
        a = self.a
        return complex(a[0] if self.model == SEXTIC else a[1])

    @property
    def degree(self) -> int:
        return 6 if self.model == SEXTIC else 5

    @property
    def is_odd(self) -> bool:
        return self.model != SEXTIC

    def f(self, x):
        return np.polyval(self.a, x)

    def df(self, x):
        return np.polyval(np.polyder(self.a), x)

    def with_roots_order(self, ordering: Sequence[int]) -> "HyperellipticCurve":
        return HyperellipticCurve(self.model, self.coeffs, self.roots[list(ordering)])

    def scale_spread(self) -> float:
        r = self.roots
        return max(float(np.abs(r[:, None] - r[None, :]).max()), 1e-300)

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "coeffs": [[c.real, c.imag] for c in self.coeffs],
            "roots": [[c.real, c.imag] for c in self.roots],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HyperellipticCurve":
        model = d.get("model", SEXTIC).lower()
        coeffs = [_as_complex(v) for v in d["coeffs"]]
        if model == SEXTIC:
            return cls.sextic(coeffs)
        if model == QUINTIC:
            return cls.quintic(coeffs)
        if model == ROSENHAIN:
            return cls.rosenhain(coeffs)
        raise ValueError(f"unknown model {model!r}")


def sextic_closure(curve: HyperellipticCurve, t: complex | None = None) -> HyperellipticCurve:
    """Sextic model of an odd-degree curve via x = t + 1/X, Y = y X^3.

    The branch point at infinity moves to X = 0.
    """
    if curve.model == SEXTIC:
        return curve
    e = curve.roots
    if t is None:
        t = complex(np.mean(e)) + 0.5j * max(1.0, curve.scale_spread()) + 0.37
    lead = curve.lead * np.prod(t - e)
    roots = np.concatenate([[0.0], -1.0 / (t - e)])
    return HyperellipticCurve.from_roots(SEXTIC, roots, lead)


# Igusa invariants ------------------------------------------------------


@dataclass(frozen=True)
class BinaryInvariants:
    A: complex
    B: complex
    C: complex
    D: complex


@dataclass(frozen=True)
class AbsoluteInvariants:
    j1: complex
    j2: complex
    j3: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.j1, self.j2, self.j3], dtype=complex)


def _matchings(items):
    if not items:
        yield []
        return
    first = items[0]
    for k in items[1:]:
        rest = [x for x in items if x not in (first, k)]
        for m in _matchings(rest):
            yield [(first, k)] + m


def _triple_splits():
    for t in itertools.combinations(range(1, 6), 2):
        left = (0,) + t
        right = tuple(i for i in range(6) if i not in left)
        yield left, right


def invariant_A(a: Sequence[complex]) -> complex:
    """A from the sextic coefficients a0..a6; defined on degenerate sextics too."""
    a = [_as_complex(v) for v in a]
    return complex(6 * a[3] ** 2 - 16 * a[2] * a[4] + 40 * a[1] * a[5] - 240 * a[0] * a[6])


def binary_invariants(curve: HyperellipticCurve) -> BinaryInvariants:
    """Igusa's binary invariants A, B, C, D of the defining sextic.

    A uses the coefficient formula; B, C, D are symmetric functions of the
    roots (A equals a0^2 times its root sum exactly, which the tests check).
    """
    if curve.model != SEXTIC:
        curve = sextic_closure(curve)
    a = curve.a
    r = curve.roots
    u = a[0]
    d = (r[:, None] - r[None, :]) ** 2
    A = invariant_A(a)
    B = 0j
    C = 0j
    for left, right in _triple_splits():
        i, j, k = left
        l, m, n = right
        tri = d[i, j] * d[j, k] * d[k, i] * d[l, m] * d[m, n] * d[n, l]
        B += tri
        for perm in itertools.permutations(right):
            C += tri * d[i, perm[0]] * d[j, perm[1]] * d[k, perm[2]]
    iu = np.triu_indices(6, 1)
    D = u ** 10 * np.prod(d[iu])
    return BinaryInvariants(complex(A), complex(u ** 4 * B), complex(u ** 6 * C), complex(D))


def binary_invariant_A_from_roots(curve: HyperellipticCurve) -> complex:
    if curve.model != SEXTIC:
        curve = sextic_closure(curve)
    r = curve.roots
    d = (r[:, None] - r[None, :]) ** 2
    s = sum(np.prod([d[i, j] for i, j in m]) for m in _matchings(list(range(6))))
    return complex(curve.a[0] ** 2 * s)


def sylvester_resultant(p: Sequence[complex], q: Sequence[complex]) -> complex:
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    m, n = len(p) - 1, len(q) - 1
    S = np.zeros((m + n, m + n), dtype=complex)
    for i in range(n):
        S[i, i:i + m + 1] = p
    for i in range(m):
        S[n + i, i:i + n + 1] = q
    return complex(np.linalg.det(S))


def absolute_invariants(inv: BinaryInvariants) -> AbsoluteInvariants:
    A = inv.A
    if abs(A) == 0 or not np.isfinite(abs(A)):
        raise AZero("binary invariant A vanishes; absolute invariants have a pole")
    j1 = 144 * inv.B / A ** 2
    j2 = 3456 * (3 * inv.C - A * inv.B) / A ** 3
    j3 = 486 * inv.D / A ** 5
    return AbsoluteInvariants(complex(j1), complex(j2), complex(j3))


def igusa_j(curve: HyperellipticCurve) -> AbsoluteInvariants:
    return absolute_invariants(binary_invariants(curve))


# model changes ---------------------------------------------------------


@dataclass(frozen=True)
class CoordinateMap:
    """Birational map from a sextic (X, Y) to a quintic (x, y).

    X = r0 (x + c1)/(x + c2),  Y = K y / (x + c2)^3 with
    K^2 = a0 r0 (c1 - c2) prod_k (r0 - r_k) / b0.
    """

    r0: complex
    c1: complex
    c2: complex
    K: complex

    def to_quintic(self, X, Y):
        X = np.asarray(X, dtype=complex)
        x = (self.c1 * self.r0 - self.c2 * X) / (X - self.r0)
        y = np.asarray(Y, dtype=complex) * (x + self.c2) ** 3 / self.K
        return x, y

    def to_sextic(self, x, y):
        x = np.asarray(x, dtype=complex)
        X = self.r0 * (x + self.c1) / (x + self.c2)
        Y = self.K * np.asarray(y, dtype=complex) / (x + self.c2) ** 3
        return X, Y

    def dX_dx(self, x):
        return self.r0 * (self.c2 - self.c1) / (np.asarray(x) + self.c2) ** 2


def sextic_to_quintic(curve: HyperellipticCurve, c1: complex, c2: complex,
                      b0: complex = 1.0) -> tuple[HyperellipticCurve, CoordinateMap]:
    if curve.model != SEXTIC:
        raise ModelMismatch("sextic_to_quintic needs a sextic")
    r = curve.roots
    r0 = r[0]
    spread = curve.scale_spread()
    if abs(r0) <= DEGENERACY_REL * spread:
        raise RootAtZero("r0 must be nonzero")
    if abs(c1 - c2) <= DEGENERACY_REL * max(1.0, abs(c1), abs(c2)):
        raise CoincidentShifts("c1 and c2 must differ")
    e = -(c1 * r0 - c2 * r[1:]) / (r0 - r[1:])
    K = np.sqrt(curve.a[0] * r0 * (c1 - c2) * np.prod(r0 - r[1:]) / b0)
    q = HyperellipticCurve(QUINTIC, tuple(complex(b0) * np.poly(e)), e)
    return q, CoordinateMap(complex(r0), complex(c1), complex(c2), complex(K))


def rosenhain_shifts(roots: Sequence[complex]) -> tuple[complex, complex]:
    """(c1, c2) sending r2, r4, r0 to 0, 1, infinity."""
    r0, r2, r4 = roots[0], roots[2], roots[4]
    c1 = -(r2 / r0) * (r4 - r0) / (r4 - r2)
    c2 = -(r4 - r0) / (r4 - r2)
    return complex(c1), complex(c2)


def quintic_normalize(curve: HyperellipticCurve, s: complex, r: complex) -> HyperellipticCurve:
    """Apply x -> s^2 x + r, y -> s^5 y; roots move to (e - r)/s^2."""
    if curve.model == SEXTIC:
        raise ModelMismatch("quintic_normalize needs an odd-degree model")
    if abs(s) == 0:
        raise ZeroScale("scale s must be nonzero")
    e = (curve.roots - r) / s ** 2
    b0 = curve.lead
    return HyperellipticCurve(QUINTIC, tuple(b0 * np.poly(e)), e)


def to_rosenhain(curve: HyperellipticCurve, ordering: Sequence[int] | None = None) -> HyperellipticCurve:
    """Rosenhain form from a sextic; ordering permutes (r0..r5) first."""
    if curve.model != SEXTIC:
        curve = sextic_closure(curve)
    r = curve.roots if ordering is None else curve.roots[list(ordering)]
    r0, r2, r4 = r[0], r[2], r[4]
    pre = (r4 - r0) / (r4 - r2)
    lam = [pre * (r[k] - r2) / (r[k] - r0) for k in (1, 3, 5)]
    for v in lam:
        if abs(v) < DEGENERACY_REL or abs(v - 1) < DEGENERACY_REL:
            raise DegenerateDiscriminant("Rosenhain parameter hits 0 or 1")
    return HyperellipticCurve.rosenhain(lam)


def random_sextic(rng: np.random.Generator, a0: complex | None = None, spread: float = 1.0,
                  min_sep: float = 0.25) -> HyperellipticCurve:
    """Random smooth sextic with well-separated roots (for tests and suites)."""
    while True:
        r = spread * (rng.normal(size=6) + 1j * rng.normal(size=6))
        d = np.abs(r[:, None] - r[None, :]) + np.eye(6) * 10
        if d.min() > min_sep * spread and np.abs(r).min() > 0.1 * spread:
            break
    lead = a0 if a0 is not None else complex(rng.normal() + 1j * rng.normal())
    if abs(lead) < 0.2:
        lead = 1.0
    a = lead * np.poly(r)
    return HyperellipticCurve.sextic(a)


def random_quintic(rng: np.random.Generator, spread: float = 1.0, min_sep: float = 0.25) -> HyperellipticCurve:
    while True:
        r = spread * (rng.normal(size=5) + 1j * rng.normal(size=5))
        d = np.abs(r[:, None] - r[None, :]) + np.eye(5) * 10
        if d.min() > min_sep * spread:
            break
    return HyperellipticCurve.quintic(np.poly(r))
