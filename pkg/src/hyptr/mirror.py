"""The resolved C^3/Z_6 mirror curve family.

1 + X + Y + q1 X^2 + q2 X^3 + q3 X^6 / Y = 0 becomes the sextic
Yt^2 = h(X)^2 - q3 X^6 after Yt = Y + h(X), h = (1 + X + q1 X^2 + q2 X^3)/2.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .curve import HyperellipticCurve, absolute_invariants, binary_invariants
from .errors import LeadingCoefficientZero, LogBranchPointAtRamification, RamificationAtXZero
from .kernels import zeta_series
from .numerics import LaurentSeries, poly_compose_series, series_log_unit


@dataclass(frozen=True)
class MirrorModuli:
    q1: complex
    q2: complex
    q3: complex

    def __post_init__(self):
        for name in ("q1", "q2", "q3"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    @property
    def s(self) -> tuple[complex, complex, complex]:
        q1, q2, q3 = self.q1, self.q2, self.q3
        return q1, q2 / q1 ** 2, q3 / q2 ** 2

    @property
    def h(self) -> np.ndarray:
        """h(X) coefficients, ascending powers."""
        return np.array([0.5, 0.5, 0.5 * self.q1, 0.5 * self.q2], dtype=complex)

    def as_list(self) -> list[complex]:
        return [self.q1, self.q2, self.q3]


def mirror_coefficients(m: MirrorModuli) -> np.ndarray:
    q1, q2, q3 = m.q1, m.q2, m.q3
    return np.array([q2 ** 2 / 4 - q3, q1 * q2 / 2, q1 ** 2 / 4 + q2 / 2, (q1 + q2) / 2,
                     0.25 + q1 / 2, 0.5, 0.25], dtype=complex)


def mirror_sextic(m: MirrorModuli) -> HyperellipticCurve:
    a = mirror_coefficients(m)
    if abs(a[0]) < 1e-14 * max(1.0, abs(m.q3)):
        raise LeadingCoefficientZero("q3 = q2^2/4 makes the sextic degenerate")
    return HyperellipticCurve.sextic(a)


@dataclass(frozen=True)
class SpectralCurve:
    """A sextic Yt^2 = F(X) with lambda = log(Yt - h(X)) dX / X."""

    curve: HyperellipticCurve
    h: np.ndarray  # ascending coefficients
    moduli: MirrorModuli | None = None

    def h_at(self, x):
        return np.polynomial.polynomial.polyval(x, self.h)


def mirror_spectral_curve(m: MirrorModuli) -> SpectralCurve:
    return SpectralCurve(mirror_sextic(m), m.h, m)


# local expansions at ramification points ----------------------------------


@dataclass(frozen=True)
class LambdaExpansion:
    """log(Yt - h) on both sheets and the difference lambda - lambda* at one point.

    ``log_y`` and ``log_y_star`` are functions of zeta; ``diff`` is the dzeta
    coefficient of lambda(p) - lambda(p*) (lambda* pulled back along the
    involution); ``branch`` is the constant term used on both sheets.
    """

    k: int
    log_y: LaurentSeries
    log_y_star: LaurentSeries
    diff: LaurentSeries
    branch: complex


def lambda_series(sc: SpectralCurve, k: int, order: int, branch: complex | None = None) -> LambdaExpansion:
    curve = sc.curve
    r = curve.roots[k]
    if abs(r) < 1e-12:
        raise RamificationAtXZero("ramification point at X = 0")
    h0 = sc.h_at(r)
    if abs(h0) < 1e-12:
        raise LogBranchPointAtRamification("h vanishes at the ramification point")
    X, Yt = zeta_series(curve, k, order + 2)
    hX = poly_compose_series(sc.h[::-1], X)
    const = np.log(-h0) if branch is None else branch
    log_y = series_log_unit(Yt - hX, const)
    log_ys = series_log_unit(-Yt - hX, const)
    two_zeta_over_X = LaurentSeries.from_coeffs([0, 2], 0, order + 2) / X
    diff = (log_y - log_ys) * two_zeta_over_X
    return LambdaExpansion(k, log_y.truncate(order), log_ys.truncate(order), diff.truncate(order), const)


# mirror maps ----------------------------------------------------------------

Monomial = tuple[int, int, int]


def _fac(n: int) -> int:
    return math.factorial(n)


def _sign(n: int) -> int:
    return -1 if n % 2 else 1


def series_A2(degree: int) -> dict[Monomial, Fraction]:
    out = {}
    for d1, d2, d3 in itertools.product(range(degree + 1), repeat=3):
        if d1 > 0 and d1 >= 2 * d2 and d2 >= 2 * d3:
            c = Fraction(_sign(d2 - 1) * _fac(2 * d1 - d2 - 1),
                         _fac(d1) * _fac(d1 - 2 * d2) * _fac(d2 - 2 * d3) * _fac(d3) ** 2)
            out[(d1, d2, d3)] = c
    return out


def series_A3(degree: int) -> dict[Monomial, Fraction]:
    out = {}
    for d1, d2, d3 in itertools.product(range(degree + 1), repeat=3):
        if 0 <= 2 * d1 <= d2 and d2 > 0 and d2 >= 2 * d3:
            c = Fraction(_sign(d1 - 1) * _fac(2 * d2 - d1 - 1),
                         _fac(d1) * _fac(d2 - 2 * d1) * _fac(d2 - 2 * d3) * _fac(d3) ** 2)
            out[(d1, d2, d3)] = c
    return out


def series_A4(degree: int) -> dict[Monomial, Fraction]:
    return {(0, 0, d3): -Fraction(_fac(2 * d3 - 1), _fac(d3) ** 2) for d3 in range(1, degree + 1)}


def _mul(a: dict, b: dict, degree: int) -> dict:
    out: dict = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            if max(k) <= degree:
                out[k] = out.get(k, 0) + va * vb
    return {k: v for k, v in out.items() if v != 0}


def _lin(*terms) -> dict:
    out: dict = {}
    for c, s in terms:
        for k, v in s.items():
            out[k] = out.get(k, 0) + c * v
    return {k: v for k, v in out.items() if v != 0}


def series_exp(a: dict, degree: int) -> dict:
    """exp of a series with zero constant term, truncated at ``degree`` per variable."""
    if a.get((0, 0, 0), 0) != 0:
        raise ValueError("exp needs a series without constant term")
    out = {(0, 0, 0): Fraction(1)}
    term = {(0, 0, 0): Fraction(1)}
    # each factor raises the total degree, so 3*degree steps reach every kept monomial
    for n in range(1, 3 * degree + 1):
        term = {k: v / n for k, v in _mul(term, a, degree).items()}
        if not term:
            break
        out = _lin((1, out), (1, term))
    return out


@dataclass(frozen=True)
class MirrorSeries:
    degree: int
    A1: dict = field(default_factory=dict)
    A2: dict = field(default_factory=dict)
    A3: dict = field(default_factory=dict)
    A4: dict = field(default_factory=dict)
    Q1_over_s1: dict = field(default_factory=dict)
    Q2_over_s2: dict = field(default_factory=dict)
    Q3_over_s3: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def enc(d):
            return [[list(k), str(v)] for k, v in sorted(d.items())]
        return {"degree": self.degree, **{name: enc(getattr(self, name)) for name in
                ("A1", "A2", "A3", "A4", "Q1_over_s1", "Q2_over_s2", "Q3_over_s3")}}


def mirror_maps(degree: int) -> MirrorSeries:
    """Truncated mirror-map series in (s1, s2, s3), exact rational coefficients."""
    if degree > 12:
        raise ValueError("mirror-map truncation is limited to degree 12")
    A2, A3, A4 = series_A2(degree), series_A3(degree), series_A4(degree)
    Q1 = series_exp(_lin((-2, A2), (1, A3)), degree)
    Q2 = series_exp(_lin((1, A2), (-2, A3), (1, A4)), degree)
    Q3 = series_exp(_lin((-2, A4)), degree)
    return MirrorSeries(degree, {}, A2, A3, A4, Q1, Q2, Q3)


def evaluate_series(series: dict, s) -> complex:
    return complex(sum(float(v) * s[0] ** k[0] * s[1] ** k[1] * s[2] ** k[2] for k, v in series.items()))


# algebraic independence of the moduli ----------------------------------------


def igusa_of_moduli(q) -> np.ndarray:
    m = MirrorModuli(*q)
    return absolute_invariants(binary_invariants(mirror_sextic(m))).as_array()


def moduli_jacobian(m: MirrorModuli, h: float = 1e-5) -> np.ndarray:
    """d(j1, j2, j3)/d(q1, q2, q3) by central differences (the j's are rational in q)."""
    q = np.array(m.as_list())
    J = np.zeros((3, 3), dtype=complex)
    for i in range(3):
        step = h * max(1.0, abs(q[i]))
        e = np.zeros(3, dtype=complex)
        e[i] = step
        J[:, i] = (igusa_of_moduli(q + e) - igusa_of_moduli(q - e)) / (2 * step)
    return J


def random_moduli(rng: np.random.Generator, scale: float = 0.3) -> MirrorModuli:
    """Moduli near the large-radius region with a smooth, well-separated sextic."""
    while True:
        q = scale * (rng.normal(size=3) + 1j * rng.normal(size=3))
        m = MirrorModuli(*q)
        try:
            c = mirror_sextic(m)
        except Exception:
            continue
        r = c.roots
        d = np.abs(r[:, None] - r[None, :]) + np.eye(6) * 1e9
        hr = np.abs(np.polynomial.polynomial.polyval(r, m.h))
        if d.min() > 0.05 * max(1.0, np.abs(r).max()) and hr.min() > 1e-3 and np.abs(r).min() > 1e-3:
            return m


def equivalent_moduli(m: MirrorModuli, b: complex) -> MirrorModuli:
    """Moduli of the same curve after X -> X/(1 - bX) and a rescaling of X.

    The substitution keeps the shape h^2 - q3 X^6 and the normalisation
    h(0) = h'(0) = 1/2, so the Igusa invariants are constant along b.
    """
    P = np.polynomial.polynomial
    one = np.array([1.0, -b], dtype=complex)
    ht = 0.5 * P.polyadd(P.polyadd(P.polypow(one, 3), P.polymul([0, 1], P.polypow(one, 2))),
                         P.polyadd(P.polymul([0, 0, m.q1], one), [0, 0, 0, m.q2]))
    kappa = 1.0 / (1.0 - 3.0 * b)
    ht = ht * kappa ** np.arange(4)
    return MirrorModuli(2 * ht[2], 2 * ht[3], m.q3 * kappa ** 6)
