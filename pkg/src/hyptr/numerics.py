"""Scalar, series and quadrature arithmetic shared by the other modules.

Everything here works in double precision.  Truncated Laurent series carry an
explicit truncation order so that products and inverses never report
coefficients that the inputs do not determine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import (
    NonFiniteSample,
    QuadratureFailure,
    TruncationTooShallow,
    ZeroLeadingCoefficient,
)

# Relative size below which a leading coefficient is treated as zero.
ZERO_TOL = 1e-300


@dataclass(frozen=True)
class LaurentSeries:
    """Truncated Laurent series sum_k c_k z^k for lead_order <= k < trunc_order."""

    lead_order: int
    coeffs: np.ndarray
    trunc_order: int

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        if len(c) != self.trunc_order - self.lead_order:
            raise ValueError(
                f"coefficient count {len(c)} does not match window "
                f"[{self.lead_order}, {self.trunc_order})"
            )

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[complex], lead_order: int = 0,
                    trunc_order: int | None = None) -> "LaurentSeries":
        c = np.asarray(coeffs, dtype=complex)
        if trunc_order is None:
            trunc_order = lead_order + len(c)
        n = trunc_order - lead_order
        if len(c) < n:
            c = np.concatenate([c, np.zeros(n - len(c), dtype=complex)])
        return cls(lead_order, c[:n], trunc_order)

    @classmethod
    def monomial(cls, k: int, trunc_order: int, value: complex = 1.0) -> "LaurentSeries":
        c = np.zeros(max(trunc_order - k, 0), dtype=complex)
        if len(c):
            c[0] = value
        return cls(k, c, max(trunc_order, k))

    def __len__(self):
        return len(self.coeffs)

    def coeff(self, k: int) -> complex:
        if k >= self.trunc_order:
            raise TruncationTooShallow(f"coefficient z^{k} beyond truncation {self.trunc_order}")
        if k < self.lead_order:
            return 0j
        return complex(self.coeffs[k - self.lead_order])

    def truncate(self, trunc_order: int) -> "LaurentSeries":
        trunc_order = min(trunc_order, self.trunc_order)
        if trunc_order <= self.lead_order:
            return LaurentSeries(trunc_order, np.zeros(0), trunc_order)
        return LaurentSeries(self.lead_order, self.coeffs[: trunc_order - self.lead_order], trunc_order)

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by z^k."""
        return LaurentSeries(self.lead_order + k, self.coeffs, self.trunc_order + k)

    def with_lead(self, lead_order: int) -> "LaurentSeries":
        """Re-express with a different (lower or higher) lead order, padding or dropping zeros."""
        if lead_order <= self.lead_order:
            pad = np.zeros(self.lead_order - lead_order, dtype=complex)
            return LaurentSeries(lead_order, np.concatenate([pad, self.coeffs]), self.trunc_order)
        drop = lead_order - self.lead_order
        return LaurentSeries(lead_order, self.coeffs[drop:], max(self.trunc_order, lead_order))

    def normalized(self, tol: float = 0.0) -> "LaurentSeries":
        """Drop leading coefficients whose magnitude is <= tol."""
        c = self.coeffs
        i = 0
        while i < len(c) and abs(c[i]) <= tol:
            i += 1
        return LaurentSeries(self.lead_order + i, c[i:], self.trunc_order)

    # ring operations -------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, LaurentSeries):
            other = LaurentSeries(0, np.array([complex(other)]), self.trunc_order if self.trunc_order > 0 else 1)
            if self.trunc_order <= 0:
                return self
        lead = min(self.lead_order, other.lead_order)
        trunc = min(self.trunc_order, other.trunc_order)
        out = np.zeros(max(trunc - lead, 0), dtype=complex)
        for s in (self, other):
            n = min(len(s.coeffs), trunc - s.lead_order)
            if n > 0:
                out[s.lead_order - lead: s.lead_order - lead + n] += s.coeffs[:n]
        return LaurentSeries(lead, out, max(trunc, lead))

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(self.lead_order, -self.coeffs, self.trunc_order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, LaurentSeries):
            return series_mul(self, other)
        return LaurentSeries(self.lead_order, self.coeffs * complex(other), self.trunc_order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, LaurentSeries):
            return series_mul(self, series_invert(other))
        return self * (1.0 / complex(other))

    def reflect(self) -> "LaurentSeries":
        """Substitute z -> -z."""
        k = np.arange(self.lead_order, self.trunc_order)
        return LaurentSeries(self.lead_order, self.coeffs * (-1.0) ** k, self.trunc_order)

    def odd_part(self) -> "LaurentSeries":
        return (self - self.reflect()) * 0.5

    def even_part(self) -> "LaurentSeries":
        return (self + self.reflect()) * 0.5

    def derivative(self) -> "LaurentSeries":
        k = np.arange(self.lead_order, self.trunc_order)
        return LaurentSeries(self.lead_order - 1, self.coeffs * k, self.trunc_order - 1)

    def integral(self) -> "LaurentSeries":
        """Termwise primitive with zero constant term; requires no z^-1 term."""
        k = np.arange(self.lead_order, self.trunc_order)
        c = self.coeffs.copy()
        if self.lead_order <= -1 < self.trunc_order:
            if abs(c[-1 - self.lead_order]) > 1e-12 * max(1.0, np.abs(c).max()):
                raise ValueError("series has a residue; primitive is not single-valued")
            c[-1 - self.lead_order] = 0.0
            k = np.where(k == -1, 1, k)
        return LaurentSeries(self.lead_order + 1, c / (k + 1), self.trunc_order + 1)

    def evaluate(self, z: complex) -> complex:
        k = np.arange(self.lead_order, self.trunc_order)
        return complex(np.sum(self.coeffs * np.power(complex(z), k)))


def series_mul(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    lead = a.lead_order + b.lead_order
    trunc = min(a.trunc_order + b.lead_order, b.trunc_order + a.lead_order)
    n = trunc - lead
    if n <= 0:
        return LaurentSeries(trunc, np.zeros(0), trunc)
    out = np.convolve(a.coeffs[:n], b.coeffs[:n])[:n]
    return LaurentSeries(lead, out, trunc)


def series_invert(a: LaurentSeries) -> LaurentSeries:
    c = a.coeffs
    if len(c) == 0 or abs(c[0]) <= ZERO_TOL:
        raise ZeroLeadingCoefficient("series has zero leading coefficient")
    n = len(c)
    inv = _inverse_unit(c / c[0], n) / c[0]
    return LaurentSeries(-a.lead_order, inv, -a.lead_order + n)


def _inverse_unit(c: np.ndarray, n: int) -> np.ndarray:
    """Coefficients of 1/c for a power series with c[0] == 1."""
    out = np.zeros(n, dtype=complex)
    out[0] = 1.0
    for k in range(1, n):
        m = min(k, len(c) - 1)
        out[k] = -np.dot(c[1: m + 1], out[k - 1::-1][:m])
    return out


def series_residue(a: LaurentSeries) -> complex:
    if a.trunc_order <= -1:
        raise TruncationTooShallow("z^-1 coefficient lies beyond the truncation window")
    return a.coeff(-1)


def series_pow_unit(a: LaurentSeries, p: float) -> LaurentSeries:
    """a**p for a series with lead_order 0, using the principal branch at z=0."""
    if a.lead_order != 0:
        raise ValueError("power requires lead_order 0")
    c0 = a.coeffs[0]
    if abs(c0) <= ZERO_TOL:
        raise ZeroLeadingCoefficient("zero constant term")
    u = a.coeffs / c0
    n = len(u)
    out = np.zeros(n, dtype=complex)
    out[0] = 1.0
    # J. C. P. Miller recurrence for powers of a unit series
    for k in range(1, n):
        j = np.arange(1, k + 1)
        out[k] = np.sum(((p + 1) * j - k) * u[j] * out[k - j]) / k
    return LaurentSeries(0, out * c0 ** p, a.trunc_order)


def series_log_unit(a: LaurentSeries, branch: complex | None = None) -> LaurentSeries:
    """log(a) for lead_order 0; constant term log(a0) on the principal branch unless given."""
    if a.lead_order != 0:
        raise ValueError("log requires lead_order 0")
    c0 = a.coeffs[0]
    if abs(c0) <= ZERO_TOL:
        raise ZeroLeadingCoefficient("zero constant term")
    d = a.derivative() / a
    out = d.integral()
    const = np.log(c0) if branch is None else branch
    c = out.coeffs.copy()
    c[0] += const
    return LaurentSeries(0, c, min(out.trunc_order, a.trunc_order))


def poly_compose_series(poly_coeffs_desc: Sequence[complex], s: LaurentSeries) -> LaurentSeries:
    """Evaluate a polynomial (descending coefficients) at a power series by Horner."""
    acc = LaurentSeries.from_coeffs([poly_coeffs_desc[0]], 0, s.trunc_order)
    for c in poly_coeffs_desc[1:]:
        acc = acc * s + LaurentSeries.from_coeffs([c], 0, s.trunc_order)
    return acc


# quadrature ----------------------------------------------------------


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    kind: str

    def __len__(self):
        return len(self.nodes)


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> QuadratureRule:
    x, w = np.polynomial.legendre.leggauss(n)
    return QuadratureRule(x, w, "gauss-legendre")


@lru_cache(maxsize=64)
def gauss_chebyshev(n: int) -> QuadratureRule:
    k = np.arange(1, n + 1)
    x = np.cos((2 * k - 1) * np.pi / (2 * n))[::-1]
    w = np.full(n, np.pi / n)
    return QuadratureRule(x, w, "gauss-chebyshev")


def rule_of_kind(kind: str, n: int) -> QuadratureRule:
    if kind == "gauss-legendre":
        return gauss_legendre(n)
    if kind == "gauss-chebyshev":
        return gauss_chebyshev(n)
    raise ValueError(f"unknown quadrature kind {kind!r}")


def _segment_once(f, z0, z1, rule: QuadratureRule, singular_ends):
    s0, s1 = singular_ends
    t = rule.nodes
    w = rule.weights
    if s0 and s1:
        if rule.kind != "gauss-chebyshev":
            raise ValueError("two singular ends need the Chebyshev rule")
        m, h = 0.5 * (z0 + z1), 0.5 * (z1 - z0)
        x = m + h * t
        jac = h * np.sqrt(1.0 - t * t)
    elif s0 or s1:
        # x = e + (other - e) s^2 with s in (0, 1) removes (x - e)^(-1/2)
        e, o = (z0, z1) if s0 else (z1, z0)
        s = 0.5 * (t + 1.0)
        x = e + (o - e) * s * s
        jac = 2.0 * (o - e) * s * 0.5
        if s1:
            jac = -jac
    else:
        m, h = 0.5 * (z0 + z1), 0.5 * (z1 - z0)
        x = m + h * t
        jac = h * np.ones_like(t)
    vals = np.asarray(f(x))
    if not np.all(np.isfinite(vals)):
        raise NonFiniteSample("integrand returned a non-finite sample")
    jw = jac * w
    return np.tensordot(jw, vals, axes=(0, 0))


def integrate_segment(f: Callable[[np.ndarray], np.ndarray], endpoints, rule: QuadratureRule | None = None,
                      singular_ends=(False, False), *, adaptive: bool = True, tol: float = 1e-11,
                      max_nodes: int = 1024):
    """Integrate f along the straight segment between two complex endpoints.

    ``f`` receives an array of sample points and returns values of the same
    leading length (extra trailing axes integrate several functions at once).
    With ``singular_ends`` flags, an inverse square-root singularity at the
    flagged endpoint is absorbed by a change of variables: both ends use the
    Chebyshev weight, one end uses x = e + (o - e) s^2.
    """
    z0, z1 = complex(endpoints[0]), complex(endpoints[1])
    both = singular_ends[0] and singular_ends[1]
    if rule is None:
        rule = gauss_chebyshev(64) if both else gauss_legendre(64)
    val = _segment_once(f, z0, z1, rule, singular_ends)
    if not adaptive:
        return val
    n = len(rule)
    while True:
        n2 = 2 * n
        if n2 > max_nodes:
            raise QuadratureFailure(
                f"segment integral did not converge to {tol:g} within {max_nodes} nodes")
        new = _segment_once(f, z0, z1, rule_of_kind(rule.kind, n2), singular_ends)
        scale = max(1.0, float(np.max(np.abs(new))))
        if float(np.max(np.abs(new - val))) <= tol * scale:
            return new
        val, n = new, n2


def agm(a: complex, b: complex, tol: float = 1e-15) -> complex:
    """Arithmetic-geometric mean with the 'right' choice of square roots."""
    a, b = complex(a), complex(b)
    for _ in range(200):
        an, bn = 0.5 * (a + b), np.sqrt(a * b)
        if abs(an - bn) > abs(an + bn):
            bn = -bn
        a, b = an, bn
        if abs(a - b) <= tol * abs(a):
            break
    return a


def factorial_ratio(num: int, dens: Sequence[int]) -> int:
    out = math.factorial(num)
    for d in dens:
        out //= math.factorial(d)
    return out
