"""Bergman and Schiffer kernels and their local expansions.

Matrix parts are coefficients of du(p)^t (x) du(q) with du = (dx/2y, x dx/2y);
scalar parts are coefficients of (dx_p/2y_p)(dx_q/2y_q), i.e. U_p^t B U_q with
U = (1, x).  The Schiffer kernel is the Bergman kernel with the quasi-period
matrix M = Pi_A^-1 Pi_A(eta) replaced by M + Y.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np
from scipy.signal import convolve2d

from .curve import SEXTIC, HyperellipticCurve
from .errors import CoincidentPoints, CoincidentX, ModelMismatch, NonSimpleRamification, PointAtRamification
from .jacobian import CurvePoint, abel_jacobi, wp
from .numerics import LaurentSeries, series_invert, series_pow_unit
from .periods import PeriodData
from .theta import theta

BERGMAN = "bergman"
SCHIFFER = "schiffer"


@dataclass(frozen=True)
class NonHolomorphicPart:
    """Y = 2 pi i Pi_A^-1 (tau - conj tau)^-1 Pi_A^-t."""

    Y: np.ndarray

    @classmethod
    def from_periods(cls, pd: PeriodData) -> "NonHolomorphicPart":
        return cls(pd.Y)

    def symmetry_residual(self) -> float:
        return float(np.max(np.abs(self.Y - self.Y.T)))


@dataclass(frozen=True)
class BidifferentialValue:
    matrix_part: np.ndarray | None
    scalar_part: complex


def effective_M(pd: PeriodData, kernel_choice: str = BERGMAN, Y: np.ndarray | None = None) -> np.ndarray:
    """M for the Bergman kernel, M + Y for Schiffer (Y defaults to the period value)."""
    if kernel_choice == BERGMAN:
        return pd.M
    if kernel_choice == SCHIFFER:
        return pd.M + (pd.Y if Y is None else np.asarray(Y, dtype=complex))
    raise ValueError(f"unknown kernel choice {kernel_choice!r}")


def _U(x) -> np.ndarray:
    return np.array([1.0, x], dtype=complex)


def _scalar(B: np.ndarray, p: CurvePoint, q: CurvePoint) -> complex:
    return complex(_U(p.x) @ B @ _U(q.x))


# closed forms -----------------------------------------------------------------


def G_sextic(a: np.ndarray, x1, x2):
    """Symmetric G with G(x, x) = 2 f(x); reduced closed form."""
    s, p = x1 + x2, x1 * x2
    return (2 * a[0] * p ** 3 + (2 * a[6] + a[5] * s) + p * (2 * a[4] + a[3] * s)
            + p ** 2 * (2 * a[2] + a[1] * s))


def G_sextic_expanded(a: np.ndarray, x1, x2, y2=None):
    """The unreduced form 2 y2^2 + 2 (x1 - x2) y2 y2' + (x1 - x2)^2 * (double sum).

    y2 y2' = f'(x2)/2 so the value does not depend on the sheet of y2.
    """
    f2 = np.polyval(a, x2)
    df2 = np.polyval(np.polyder(a), x2)
    inner = 0
    for j in (1, 2):
        part = 0
        for k in range(j, 6 - j):
            part = part + (k - j + 1) * a[6 - (k + j + 1)] * x2 ** k
        inner = inner + x1 ** (j - 1) * part
    return 2 * f2 + (x1 - x2) * df2 + (x1 - x2) ** 2 * inner


def bergman_theta(p: CurvePoint, q: CurvePoint, pd: PeriodData, delta: str,
                  M_shift: np.ndarray | None = None) -> BidifferentialValue:
    """-Pi_A^-1 H log theta[delta]((u_p - u_q) Pi_A^-1) Pi_A^-t (minus ``M_shift``)."""
    if p == q:
        raise CoincidentPoints("Bergman kernel needs p != q")
    du = abel_jacobi(p, pd).u - abel_jacobi(q, pd).u
    tv = theta(delta, du @ pd.PA_inv, pd.tau, derivs=2)
    P = pd.PA_inv
    B = -P @ tv.log_hessian() @ P.T
    if M_shift is not None:
        B = B - M_shift
    return BidifferentialValue(B, _scalar(B, p, q))


def bergman_wp(p: CurvePoint, q: CurvePoint, pd: PeriodData, delta: str) -> BidifferentialValue:
    """wp(u_p - u_q) - M."""
    if p == q:
        raise CoincidentPoints("Bergman kernel needs p != q")
    du = abel_jacobi(p, pd).u - abel_jacobi(q, pd).u
    B = wp(du, pd, delta).wp2 - pd.M
    return BidifferentialValue(B, _scalar(B, p, q))


def bergman_algebraic(p: CurvePoint, q: CurvePoint, curve: HyperellipticCurve, M: np.ndarray) -> BidifferentialValue:
    """(G(x1, x2) + 2 y1 y2)/(x1 - x2)^2 - U_p^t M U_q against (dx1/2y1)(dx2/2y2)."""
    if p.x is None or q.x is None:
        raise CoincidentX("points at infinity are not supported")
    if abs(p.x - q.x) < 1e-12 * max(1.0, abs(p.x)):
        raise CoincidentX("x1 = x2")
    G = G_sextic(curve.a, p.x, q.x)
    val = (G + 2 * p.y * q.y) / (p.x - q.x) ** 2 - _U(p.x) @ M @ _U(q.x)
    return BidifferentialValue(None, complex(val))


def schiffer(p: CurvePoint, q: CurvePoint, pd: PeriodData, delta: str,
             Y: np.ndarray | None = None) -> BidifferentialValue:
    """Bergman kernel with M -> M + Y."""
    Y = pd.Y if Y is None else np.asarray(Y, dtype=complex)
    return bergman_theta(p, q, pd, delta, M_shift=Y)


def schiffer_algebraic(p: CurvePoint, q: CurvePoint, curve: HyperellipticCurve, pd: PeriodData,
                       Y: np.ndarray | None = None) -> BidifferentialValue:
    return bergman_algebraic(p, q, curve, effective_M(pd, SCHIFFER, Y))


# local expansions at ramification points ------------------------------------


def local_sheet(curve: HyperellipticCurve, k: int, order: int) -> np.ndarray:
    """Coefficients in t = zeta^2 of s with y = zeta s(t), x = r_k + t (principal root at t = 0)."""
    if curve.model != SEXTIC:
        raise ModelMismatch("local expansions are implemented for the sextic model")
    r = curve.roots[k]
    poly = np.poly1d([1.0 + 0j])
    for e in np.delete(curve.roots, k):
        poly = poly * np.poly1d([1.0, r - e])
    asc = curve.lead * poly.coeffs[::-1]
    return series_pow_unit(LaurentSeries.from_coeffs(asc, 0, order), 0.5).coeffs


def zeta_series(curve: HyperellipticCurve, k: int, order: int) -> tuple[LaurentSeries, LaurentSeries]:
    """(x(zeta), y(zeta)) to zeta^order with x = r_k + zeta^2."""
    r = curve.roots[k]
    X = LaurentSeries.from_coeffs([r, 0, 1], 0, order)
    s = local_sheet(curve, k, order // 2 + 1)
    yc = np.zeros(order, dtype=complex)
    for j, c in enumerate(s):
        if 2 * j + 1 < order:
            yc[2 * j + 1] = c
    return X, LaurentSeries.from_coeffs(yc, 0, order)


def _shift_matrix(r: complex, n: int) -> np.ndarray:
    """S[i, k] = C(i, k) r^(i-k): x^i = sum_k S[i, k] t^k for x = r + t."""
    S = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for k in range(i + 1):
            S[i, k] = comb(i, k) * r ** (i - k)
    return S


def G_coefficients(a: np.ndarray) -> np.ndarray:
    """G[i, j] = coefficient of x1^i x2^j."""
    G = np.zeros((4, 4), dtype=complex)
    G[0, 0] = 2 * a[6]
    G[1, 0] = G[0, 1] = a[5]
    G[1, 1] = 2 * a[4]
    G[2, 1] = G[1, 2] = a[3]
    G[2, 2] = 2 * a[2]
    G[3, 2] = G[2, 3] = a[1]
    G[3, 3] = 2 * a[0]
    return G


def _shifted(P: np.ndarray, r1: complex, r2: complex, T: int) -> np.ndarray:
    n = P.shape[0]
    out = _shift_matrix(r1, n).T @ P @ _shift_matrix(r2, n)
    full = np.zeros((T, T), dtype=complex)
    m = min(n, T)
    full[:m, :m] = out[:m, :m]
    return full


def _bmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    T = A.shape[0]
    return convolve2d(A, B)[:T, :T]


def _divide_t_minus_u(H: np.ndarray) -> np.ndarray:
    """Q with H = (t - u) Q; Q[i, j] = sum_l H[i+1+l, j-l], valid for i + j <= T - 2."""
    T = H.shape[0]
    Q = np.zeros_like(H)
    for i in range(T):
        for j in range(T - 1 - i):
            Q[i, j] = sum(H[i + 1 + l, j - l] for l in range(j + 1))
    return Q


def _total_degree_mask(T: int, deg: int) -> np.ndarray:
    i, j = np.indices((T, T))
    return (i + j) <= deg


class LocalBergman:
    """Power-series data of B near pairs of ramification points of a sextic.

    For q near r_a (zeta, t = zeta^2) and p near r_b (eta, u = eta^2), the
    coefficient of dzeta deta is
      a != b:  A(t, u) + 2 zeta eta C(t, u)
      a == b:  1/(zeta - eta)^2 + R(t, u)
    with M replaced by ``M_eff`` throughout.
    """

    def __init__(self, curve: HyperellipticCurve, M_eff: np.ndarray, T: int = 16):
        if curve.model != SEXTIC:
            raise ModelMismatch("the recursion uses the sextic model")
        self.curve = curve
        self.M = np.asarray(M_eff, dtype=complex)
        self.T = T
        self.roots = curve.roots
        self.G = G_coefficients(curve.a)
        Mm = np.zeros((4, 4), dtype=complex)
        Mm[:2, :2] = self.M
        self.Mm = Mm
        self._sinv = {}
        self._cross = {}
        self._regular = {}

    def ensure(self, T: int) -> None:
        if T > self.T:
            self.T = T
            self._sinv.clear()
            self._cross.clear()
            self._regular.clear()

    def sheet(self, k: int) -> np.ndarray:
        return local_sheet(self.curve, k, self.T)

    def sinv(self, k: int) -> np.ndarray:
        if k not in self._sinv:
            s = LaurentSeries.from_coeffs(self.sheet(k), 0, self.T)
            self._sinv[k] = series_invert(s).coeffs[: self.T]
        return self._sinv[k]

    def cross(self, a: int, b: int) -> tuple[np.ndarray, np.ndarray]:
        if (a, b) not in self._cross:
            T = self.T
            delta = self.roots[a] - self.roots[b]
            C = np.zeros((T, T), dtype=complex)
            for i in range(T):
                for j in range(T - i):
                    n = i + j
                    C[i, j] = (-1) ** i * (n + 1) * comb(n, i) / delta ** (n + 2)
            G = _shifted(self.G, self.roots[a], self.roots[b], T)
            Mm = _shifted(self.Mm, self.roots[a], self.roots[b], T)
            A = _bmul(_bmul(G, C) - Mm, np.outer(self.sinv(a), self.sinv(b)))
            mask = _total_degree_mask(T, T - 1)
            self._cross[(a, b)] = (A * mask, C * mask)
        return self._cross[(a, b)]

    def regular(self, k: int) -> np.ndarray:
        """R(t, u), exact for total degree <= T - 3."""
        if k not in self._regular:
            T = self.T
            r = self.roots[k]
            S = np.outer(self.sinv(k), self.sinv(k))
            H = _bmul(_shifted(self.G, r, r, T), S)
            H[1, 0] -= 1.0
            H[0, 1] -= 1.0
            H = H * _total_degree_mask(T, T - 1)
            Q = _divide_t_minus_u(_divide_t_minus_u(H))
            R = Q - _bmul(_shifted(self.Mm, r, r, T), S)
            self._regular[k] = R * _total_degree_mask(T, T - 3)
        return self._regular[k]

    # expansions of the basis differentials ---------------------------------

    def basis_expansions(self, k: int, ds, hi: int) -> tuple[np.ndarray, int]:
        """E[(a, d), m] = coefficient of eta^(lead + m) of chi_{a,d} near r_k, in deta units.

        chi_{a,d}(p) = [zeta^(d-1)] B(zeta, p)/dzeta at r_a.  Rows are ordered
        a-major over ``ds``; the window is [-(max d + 1), hi).
        """
        ds = list(ds)
        lead = -(max(ds) + 1)
        L = hi - lead
        self.ensure(max(ds) // 2 + hi // 2 + 4)
        E = np.zeros((6 * len(ds), L), dtype=complex)
        for a in range(6):
            for di, d in enumerate(ds):
                row = E[a * len(ds) + di]
                if a == k:
                    row[-d - 1 - lead] = d
                    if d % 2 == 1:
                        R = self.regular(k)
                        for j in range((hi + 1) // 2):
                            if 2 * j - lead < L:
                                row[2 * j - lead] += R[(d - 1) // 2, j]
                else:
                    A, C = self.cross(a, k)
                    for j in range((hi + 1) // 2 + 1):
                        if d % 2 == 1 and 2 * j - lead < L:
                            row[2 * j - lead] = A[(d - 1) // 2, j]
                        if d % 2 == 0 and 2 * j + 1 - lead < L:
                            row[2 * j + 1 - lead] = 2 * C[(d - 2) // 2, j]
        return E, lead

    def diagonal_regular(self, k: int, hi: int) -> np.ndarray:
        """R(zeta^2, zeta^2) as coefficients of zeta^0 .. zeta^(hi-1)."""
        self.ensure(hi // 2 + 4)
        R = self.regular(k)
        out = np.zeros(max(hi, 1), dtype=complex)
        for n in range(0, hi, 2):
            m = n // 2
            out[n] = sum(R[i, m - i] for i in range(m + 1))
        return out[:hi]

    def chi_values(self, p: CurvePoint, ds) -> np.ndarray:
        """chi_{a,d}(p) against dx_p/2y_p for all a and d in ``ds`` (a-major)."""
        ds = list(ds)
        if p.x is None:
            raise PointAtRamification("point at infinity")
        n = max(ds) // 2 + 2
        out = np.zeros(6 * len(ds), dtype=complex)
        a_ = self.curve.a
        for a in range(6):
            r = self.roots[a]
            c = r - p.x
            if abs(c) < 1e-10 * max(1.0, abs(r)):
                raise PointAtRamification("evaluation point coincides with a ramification point")
            inv2 = np.array([(-1) ** j * (j + 1) / c ** (j + 2) for j in range(n)], dtype=complex)
            # G(r + t, x_p) and U(r + t)^t M U_p as polynomials in t
            g = np.zeros(n, dtype=complex)
            Gs = _shift_matrix(r, 4).T @ self.G
            gp = Gs @ (p.x ** np.arange(4))
            g[: min(4, n)] += gp[: min(4, n)]
            mp = np.zeros(n, dtype=complex)
            mpv = _shift_matrix(r, 2).T @ self.M @ _U(p.x)
            mp[: min(2, n)] += mpv[: min(2, n)]
            sinv = local_sheet_inverse(self.curve, a, n)
            odd = np.convolve(np.convolve(g, inv2)[:n] - mp, sinv)[:n]
            for di, d in enumerate(ds):
                if d % 2 == 1:
                    out[a * len(ds) + di] = odd[(d - 1) // 2]
                else:
                    out[a * len(ds) + di] = 2 * p.y * inv2[(d - 2) // 2]
        return out


def local_sheet_inverse(curve: HyperellipticCurve, k: int, n: int) -> np.ndarray:
    s = LaurentSeries.from_coeffs(local_sheet(curve, k, n), 0, n)
    return series_invert(s).coeffs[:n]


# recursion kernel ---------------------------------------------------------------


@dataclass(frozen=True)
class KernelSeries:
    """1/(2 (lambda - lambda*)/dzeta) at one ramification point."""

    k: int
    inv_diff: LaurentSeries
    diff: LaurentSeries = field(repr=False)


def kernel_denominator(diff: LaurentSeries, k: int, tol: float = 1e-10) -> KernelSeries:
    """Invert 2 (lambda - lambda*)/dzeta, which starts at zeta^2 for a simple ramification."""
    lead = diff.coeff(2)
    scale = max(1.0, float(np.max(np.abs(diff.coeffs))))
    if abs(lead) < tol * scale or abs(diff.coeff(0)) > tol * scale or abs(diff.coeff(1)) > tol * scale:
        raise NonSimpleRamification("lambda - lambda* does not vanish to order exactly 2")
    trimmed = LaurentSeries(2, diff.coeffs[2 - diff.lead_order:], diff.trunc_order)
    return KernelSeries(k, series_invert(2 * trimmed), diff)


def recursion_kernel(p: CurvePoint, k: int, local: LocalBergman, diff: LaurentSeries,
                     dmax: int | None = None) -> LaurentSeries:
    """K(p, zeta) = int_zeta^-zeta B(p, .) / (2 (lambda - lambda*)) near r_k.

    The numerator is sum_d chi_{k,d}(p) ((-zeta)^d - zeta^d)/d; the result is
    the dzeta^-1 coefficient, against dx_p/2y_p.
    """
    ks = kernel_denominator(diff, k)
    order = ks.inv_diff.trunc_order
    dmax = order + 1 if dmax is None else dmax
    ds = list(range(1, dmax + 1))
    chi = local.chi_values(p, ds)[k * len(ds):(k + 1) * len(ds)]
    num = np.zeros(dmax + 1, dtype=complex)
    for d, c in zip(ds, chi):
        num[d] = c * ((-1) ** d - 1) / d
    return ks.inv_diff * LaurentSeries.from_coeffs(num, 0, order + 2)
