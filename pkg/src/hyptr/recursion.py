"""Topological recursion on the genus-two mirror spectral curve.

Correlators are stored as coefficient tensors over the basis
chi_{k,d}(p) = [zeta^(d-1)] B(zeta, p)/dzeta at the ramification point r_k,
which has a pole of order d + 1 at r_k and nowhere else.  Only odd d occur
(the correlators are odd under the hyperelliptic involution); the ``parity``
option keeps even d as well so that this can be checked.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .curve import SEXTIC, rosenhain_shifts, sextic_to_quintic
from .errors import DegenerateDiscriminant, ModelMismatch, TruncationTooShallow
from .jacobian import CurvePoint, pair_characteristics
from .kernels import BERGMAN, SCHIFFER, G_sextic, LocalBergman, effective_M, kernel_denominator
from .mirror import SpectralCurve, lambda_series
from .numerics import LaurentSeries
from .periods import PeriodData
from .theta import cusp_forms, theta_constants

G_CAP = 3
N_CAP = 5


def pole_bound(g: int, n: int) -> int:
    return 6 * g + 2 * n - 4


def total_pole_bound(g: int, n: int) -> int:
    return 6 * g + 4 * n - 6


@dataclass(frozen=True)
class CorrelatorAtlas:
    """omega_{g,n} = sum C[i1..in] prod chi_{b(i)}(p), basis b = (k, d) a-major over ``ds``."""

    g: int
    n: int
    ds: tuple
    coeffs: np.ndarray
    kernel_choice: str

    @property
    def basis(self) -> list[tuple[int, int]]:
        return [(k, d) for k in range(6) for d in self.ds]

    def pole_orders(self, rel_tol: float = 1e-9) -> tuple[int, int]:
        """(max pole order in one argument, max total pole order) over nonzero coefficients."""
        C = self.coeffs
        scale = float(np.max(np.abs(C))) if C.size else 0.0
        if scale == 0.0:
            return 0, 0
        nz = np.argwhere(np.abs(C) > rel_tol * scale)
        order = np.array([d + 1 for _, d in self.basis])
        per = order[nz]
        return int(per.max()), int(per.sum(axis=1).max())

    def even_weight(self) -> float:
        """Largest |C| on a tuple containing an even d, relative to max |C|."""
        C = self.coeffs
        even = np.array([d % 2 == 0 for _, d in self.basis])
        if not even.any():
            return 0.0
        mask = np.zeros(C.shape, dtype=bool)
        for ax in range(self.n):
            shape = [1] * self.n
            shape[ax] = -1
            mask |= even.reshape(shape)
        return float(np.max(np.abs(C[mask])) / max(np.max(np.abs(C)), 1e-300))

    def symmetry_residual(self) -> float:
        C = self.coeffs
        worst = 0.0
        for perm in itertools.permutations(range(self.n)):
            worst = max(worst, float(np.max(np.abs(C - np.transpose(C, perm)))))
        return worst / max(float(np.max(np.abs(C))), 1e-300)

    def to_dict(self, rel_tol: float = 1e-14) -> dict:
        C = self.coeffs
        scale = float(np.max(np.abs(C))) if C.size else 0.0
        basis = self.basis
        items = []
        for idx in np.argwhere(np.abs(C) > rel_tol * scale):
            z = complex(C[tuple(idx)])
            items.append([[list(basis[i]) for i in idx], [z.real, z.imag]])
        return {"g": self.g, "n": self.n, "kernel": self.kernel_choice, "ds": list(self.ds),
                "coefficients": items}


@dataclass(frozen=True)
class FreeEnergy:
    g: int
    value: complex
    kernel_choice: str
    metadata: dict = field(default_factory=dict)


# local series tensors ------------------------------------------------------------


@dataclass
class _Local:
    """Tensor over argument bases with a trailing axis of zeta powers lead, lead+1, ..."""

    data: np.ndarray
    lead: int

    def cut(self, top: int) -> "_Local":
        n = max(top - self.lead, 0)
        return _Local(self.data[..., :n], self.lead)


def _add(acc: _Local | None, x: _Local, top: int) -> _Local:
    x = x.cut(top)
    if acc is None:
        return x
    lead = min(acc.lead, x.lead)
    n = top - lead
    out = np.zeros(acc.data.shape[:-1] + (n,), dtype=complex)
    out[..., acc.lead - lead: acc.lead - lead + acc.data.shape[-1]] += acc.data
    out[..., x.lead - lead: x.lead - lead + x.data.shape[-1]] += x.data
    return _Local(out, lead)


def _series_product(x: _Local, y: _Local, top: int) -> _Local:
    """Outer product over argument axes (x first), convolution over powers."""
    x = x.cut(top - y.lead)
    y = y.cut(top - x.lead)
    lead = x.lead + y.lead
    n = top - lead
    if n <= 0:
        return _Local(np.zeros(x.data.shape[:-1] + y.data.shape[:-1] + (0,), dtype=complex), top)
    out = np.zeros(x.data.shape[:-1] + y.data.shape[:-1] + (n,), dtype=complex)
    Ly = y.data.shape[-1]
    for l1 in range(min(x.data.shape[-1], n)):
        m = min(Ly, n - l1)
        out[..., l1:l1 + m] += np.multiply.outer(x.data[..., l1], y.data[..., :m])
    return _Local(out, lead)


def _self_convolve_axes(X: np.ndarray, lead: int, top: int) -> _Local:
    """X[l1, ..., l2] -> sum over l1 + l2 (both axes with the same lead)."""
    L1, L2 = X.shape[0], X.shape[-1]
    lead2 = 2 * lead
    n = top - lead2
    out = np.zeros(X.shape[1:-1] + (max(n, 0),), dtype=complex)
    for l1 in range(min(L1, n)):
        m = min(L2, n - l1)
        out[..., l1:l1 + m] += X[l1, ..., :m]
    return _Local(out, lead2)


class TopologicalRecursion:
    """omega_{g,n} and F_g for a spectral curve, with the Bergman or Schiffer kernel."""

    def __init__(self, sc: SpectralCurve, pd: PeriodData, kernel_choice: str = BERGMAN,
                 Y: np.ndarray | None = None, parity: str = "odd", buffer: int = 0):
        if sc.curve.model != SEXTIC:
            raise ModelMismatch("the recursion runs on the sextic model")
        if parity not in ("odd", "all"):
            raise ValueError("parity must be 'odd' or 'all'")
        self.sc = sc
        self.pd = pd
        self.kernel_choice = kernel_choice
        self.M_eff = effective_M(pd, kernel_choice, Y)
        self.local = LocalBergman(sc.curve, self.M_eff)
        self.parity = parity
        self.buffer = buffer
        self._atlas: dict = {}
        self._kernel: dict = {}
        self._exp: dict = {}

    # ingredients --------------------------------------------------------------

    def _ds(self, dmax: int) -> tuple:
        step = 2 if self.parity == "odd" else 1
        return tuple(range(1, dmax + 1, step))

    def kernel_series(self, k: int, order: int) -> LaurentSeries:
        """1/(2 (lambda - lambda*)/dzeta) at r_k, from zeta^-2 up to zeta^(order-1)."""
        key = k
        ks = self._kernel.get(key)
        if ks is None or ks.inv_diff.trunc_order < order:
            diff = lambda_series(self.sc, k, order + 4).diff
            ks = kernel_denominator(diff, k)
            self._kernel[key] = ks
        if ks.inv_diff.trunc_order < order:
            raise TruncationTooShallow("kernel series too short")
        return ks.inv_diff

    def _expansions(self, k: int, ds: tuple, hi: int) -> tuple[np.ndarray, int]:
        key = (k, ds, hi)
        if key not in self._exp:
            self._exp[key] = self.local.basis_expansions(k, ds, hi)
        return self._exp[key]

    def _pad(self, C: np.ndarray, ds_from: tuple, ds_to: tuple, axes) -> np.ndarray:
        if ds_from == ds_to:
            return C
        idx = [a * len(ds_to) + ds_to.index(d) for a in range(6) for d in ds_from]
        for ax in axes:
            shape = list(C.shape)
            shape[ax] = 6 * len(ds_to)
            out = np.zeros(shape, dtype=complex)
            sl = [slice(None)] * C.ndim
            sl[ax] = idx
            out[tuple(sl)] = C
            C = out
        return C

    # series of one correlator near r_k ----------------------------------------

    def _first_arg(self, g: int, m: int, k: int, sign: int, hi: int, ds_rest: tuple) -> _Local:
        """omega_{g,m}(+-zeta, rest) near r_k, dzeta coefficient, rest axes over ds_rest."""
        B = 6 * len(ds_rest)
        if (g, m) == (0, 2):
            # B(zeta, p) = sum_d chi_{k,d}(p) zeta^(d-1)
            data = np.zeros((B, hi), dtype=complex)
            for i, d in enumerate(ds_rest):
                if d - 1 < hi:
                    data[k * len(ds_rest) + i, d - 1] = 1.0 if sign > 0 else -((-1) ** (d - 1))
            return _Local(data, 0)
        at = self.omega(g, m)
        E, lead = self._expansions(k, at.ds, hi)
        if sign < 0:
            E = E * (-((-1.0) ** (lead + np.arange(E.shape[1]))))
        C = self._pad(at.coeffs, at.ds, ds_rest, range(1, m))
        X = np.tensordot(E, C, axes=(0, 0))
        return _Local(np.moveaxis(X, 0, -1), lead)

    def _pole_of(self, g: int, m: int) -> int:
        if (g, m) == (0, 2):
            return 0
        return max(self.omega(g, m).ds) + 1

    def omega(self, g: int, n: int) -> CorrelatorAtlas:
        if 2 * g - 2 + n <= 0:
            raise ValueError("omega_{g,n} needs 2g - 2 + n > 0")
        if g > G_CAP or n > N_CAP or g + n > G_CAP + 3:
            raise ValueError(f"(g, n) = ({g}, {n}) is beyond the configured caps")
        key = (g, n)
        if key in self._atlas:
            return self._atlas[key]
        rest = list(range(n - 1))
        terms = []  # (kind, data)
        if g >= 1:
            terms.append(("pair", (g - 1, n + 1)))
        for g1 in range(g + 1):
            for r in range(len(rest) + 1):
                for I in itertools.combinations(rest, r):
                    J = tuple(i for i in rest if i not in I)
                    g2 = g - g1
                    if (g1 == 0 and len(I) == 0) or (g2 == 0 and len(J) == 0):
                        continue
                    terms.append(("prod", (g1, I, g2, J)))
        # pole order of the quadratic part bounds every window
        PQ = 0
        for kind, t in terms:
            if kind == "pair":
                gg, mm = t
                PQ = max(PQ, 2 if (gg, mm) == (0, 2) else 2 * self._pole_of(gg, mm))
            else:
                g1, I, g2, J = t
                PQ = max(PQ, self._pole_of(g1, len(I) + 1) + self._pole_of(g2, len(J) + 1))
        d_out = PQ + 1
        dmax_rest = d_out
        for kind, t in terms:
            if kind == "pair":
                gg, mm = t
                if (gg, mm) != (0, 2):
                    dmax_rest = max(dmax_rest, max(self.omega(gg, mm).ds))
            else:
                g1, I, g2, J = t
                for gg, mm in ((g1, len(I) + 1), (g2, len(J) + 1)):
                    if (gg, mm) != (0, 2):
                        dmax_rest = max(dmax_rest, max(self.omega(gg, mm).ds))
        ds = self._ds(max(d_out, dmax_rest))
        Bn = 6 * len(ds)
        hi = PQ + 1 + self.buffer
        top = 1  # powers zeta^m with m <= 0 feed the residue
        C = np.zeros((Bn,) * n, dtype=complex)
        for k in range(6):
            Q = None
            for kind, t in terms:
                if kind == "pair":
                    gg, mm = t
                    if (gg, mm) == (0, 2):
                        # omega_{0,2}(zeta, zeta*) = -(1/(4 zeta^2) + R(zeta^2, zeta^2))
                        reg = self.local.diagonal_regular(k, hi + 2)
                        data = np.zeros(hi + 4, dtype=complex)
                        data[0] = -0.25
                        data[2:2 + len(reg)] -= reg[: hi + 2]
                        Q = _add(Q, _Local(data, -2), top)
                        continue
                    at = self.omega(gg, mm)
                    E, lead = self._expansions(k, at.ds, hi)
                    Es = E * (-((-1.0) ** (lead + np.arange(E.shape[1]))))
                    Ct = self._pad(at.coeffs, at.ds, ds, range(2, mm))
                    X = np.tensordot(E, Ct, axes=(0, 0))          # (L, B, rest...)
                    X = np.tensordot(X, Es, axes=(1, 0))          # (L, rest..., L)
                    Q = _add(Q, _self_convolve_axes(X, lead, top), top)
                else:
                    g1, I, g2, J = t
                    x = self._first_arg(g1, len(I) + 1, k, +1, hi, ds)
                    y = self._first_arg(g2, len(J) + 1, k, -1, hi, ds)
                    prod = _series_product(x, y, top)
                    order = list(I) + list(J)
                    perm = [order.index(i) for i in rest] + [len(rest)]
                    Q = _add(Q, _Local(np.transpose(prod.data, perm), prod.lead), top)
            if Q.lead < -PQ:
                raise TruncationTooShallow("quadratic part has a deeper pole than estimated")
            Kf = self.kernel_series(k, PQ + 2)
            for i, d in enumerate(ds):
                if d % 2 == 0:
                    continue
                # Res zeta^d * Kf * Q, times -2/d from int_zeta^-zeta zeta'^(d-1) dzeta'
                acc = 0
                for idx in range(Q.data.shape[-1]):
                    mpow = Q.lead + idx
                    j = -1 - d - mpow
                    if j < -2:
                        continue
                    acc = acc + Q.data[..., idx] * Kf.coeff(j)
                C[k * len(ds) + i] = (-2.0 / d) * acc
        atlas = CorrelatorAtlas(g, n, ds, C, self.kernel_choice)
        atlas = self._prune(atlas)
        self._atlas[key] = atlas
        return atlas

    def _prune(self, at: CorrelatorAtlas, rel_tol: float = 1e-11) -> CorrelatorAtlas:
        """Drop trailing d values whose coefficients vanish in every slot."""
        C = at.coeffs
        scale = float(np.max(np.abs(C)))
        ds = list(at.ds)
        keep = len(ds)
        while keep > 1:
            d_idx = [a * len(ds) + keep - 1 for a in range(6)]
            if float(np.max(np.abs(np.take(C, d_idx, axis=0)))) > rel_tol * scale:
                break
            keep -= 1
        if keep == len(ds):
            return at
        idx = [a * len(ds) + i for a in range(6) for i in range(keep)]
        for ax in range(at.n):
            C = np.take(C, idx, axis=ax)
        return CorrelatorAtlas(at.g, at.n, tuple(ds[:keep]), C, at.kernel_choice)

    # evaluation ------------------------------------------------------------------

    def basis_values(self, p: CurvePoint, ds) -> np.ndarray:
        return self.local.chi_values(p, ds)

    def evaluate(self, atlas: CorrelatorAtlas, points: list[CurvePoint]) -> complex:
        if len(points) != atlas.n:
            raise ValueError("number of points does not match n")
        out = atlas.coeffs
        for p in points:
            out = np.tensordot(out, self.basis_values(p, atlas.ds), axes=(0, 0))
        return complex(out)

    # free energies ------------------------------------------------------------

    def f_g(self, g: int) -> FreeEnergy:
        """sum_k Res int_zeta^-zeta lambda * omega_{g,1}(zeta), without a 1/(2-2g) factor."""
        if g < 2:
            raise ValueError("f_g needs g >= 2; use f1 for genus one")
        at = self.omega(g, 1)
        P = max(at.ds) + 1
        total = 0j
        for k in range(6):
            E, lead = self._expansions(k, at.ds, P + 2 + self.buffer)
            w = at.coeffs @ E
            order = P + 4
            diff = lambda_series(self.sc, k, order).diff
            # int_zeta^-zeta lambda = -int_0^zeta (lambda - lambda*)
            prim = -diff.integral()
            for idx, c in enumerate(w):
                mpow = lead + idx
                j = -1 - mpow
                if j >= 0:
                    if j >= prim.trunc_order:
                        raise TruncationTooShallow("lambda primitive too short")
                    total += c * prim.coeff(j)
        return FreeEnergy(g, total, self.kernel_choice)


def omega(g: int, n: int, sc: SpectralCurve, pd: PeriodData, kernel_choice: str = BERGMAN,
          Y: np.ndarray | None = None) -> tuple[CorrelatorAtlas, TopologicalRecursion]:
    tr = TopologicalRecursion(sc, pd, kernel_choice, Y)
    return tr.omega(g, n), tr


def f_g(g: int, sc: SpectralCurve, pd: PeriodData, kernel_choice: str = BERGMAN,
        Y: np.ndarray | None = None) -> FreeEnergy:
    return TopologicalRecursion(sc, pd, kernel_choice, Y).f_g(g)


# closed form for omega_{0,3} ---------------------------------------------------


def omega03_closed_form(sc: SpectralCurve, M: np.ndarray, points: list[CurvePoint],
                        literal: bool = False) -> complex:
    """sum_k c_k prod_i [G(X_i, r_k)/(X_i - r_k)^2 - (1, X_i) M (1, r_k)^t].

    c_k = -r_k h(r_k)/(2 F'(r_k)^2) matches the recursion; ``literal=True``
    uses c_k = r_k h(r_k)/4 instead.
    """
    curve = sc.curve
    total = 0j
    for r in curve.roots:
        h = sc.h_at(r)
        c = r * h / 4 if literal else -r * h / (2 * curve.df(r) ** 2)
        prod = 1.0 + 0j
        for p in points:
            prod *= G_sextic(curve.a, p.x, r) / (p.x - r) ** 2 - np.array([1, p.x]) @ M @ np.array([1, r])
        total += c * prod
    return complex(total)


# genus one ---------------------------------------------------------------------


# theta_form - tau_b_form, fixed modulo 2 pi i / 48 (measured, curve independent)
THETA_FORM_OFFSET = 59 / 24 * math.log(2) + math.log(math.pi) + 1j * math.pi / 16


@dataclass(frozen=True)
class F1Forms:
    """Genus-one free energy in several equivalent forms (a0 = 1 convention).

    The forms agree modulo 2 pi i / 48 (compare with ``branch_free_difference``)
    except ``theta_form``, which is shifted by ``THETA_FORM_OFFSET``.  ``raw`` is
    the first form with the unnormalized sextic; ``a0_shift`` is normalized
    minus raw.
    """

    tau_b_form: complex
    root_form: complex
    quintic_form: complex
    theta_form: complex
    raw: complex
    a0_shift: complex


def _log_pairs(r: np.ndarray) -> complex:
    return complex(sum(np.log(r[i] - r[j]) for i, j in itertools.combinations(range(len(r)), 2)))


def f1_forms(curve, pd: PeriodData) -> F1Forms:
    if curve.model != SEXTIC:
        raise ModelMismatch("F1 is evaluated on the sextic model")
    r = curve.roots
    a0 = curve.lead
    iu = np.triu_indices(6, 1)
    if np.min(np.abs(r[iu[0]] - r[iu[1]])) < 1e-12 * curve.scale_spread():
        raise DegenerateDiscriminant("coincident roots")
    ldet_raw = np.log(np.linalg.det(pd.PA))
    ldet = np.log(a0 * np.linalg.det(pd.PA))  # omega -> sqrt(a0) omega when Y -> Y/sqrt(a0)
    im = 0.5 * np.log(1.0 / np.linalg.det(pd.tau.imag))
    lp = _log_pairs(r)

    def tau_b(ld):
        return np.log(4.0) + ld + lp / 4

    # prod over ramification points of dYt/dzeta = sqrt(F'(r_k))
    lsq_raw = sum(0.5 * np.log(curve.df(x)) for x in r)
    lsq = lsq_raw - 3 * np.log(a0)
    form_49 = -0.5 * tau_b(ldet) - lsq / 12 + im
    raw = -0.5 * tau_b(ldet_raw) - lsq_raw / 12 + im
    form_411 = -0.5 * ldet - 5 * lp / 24 - 0.25 * np.log(16.0) + im

    c1, c2 = rosenhain_shifts(r)
    quint, _ = sextic_to_quintic(curve, c1, c2)
    e = quint.roots
    r0 = r[0]
    lprod0 = np.sum(np.log(r0 - r[1:]))
    det_g = -(r0 ** 2) * (c1 - c2) ** 2 / np.prod(r0 - r[1:])
    ldet5 = ldet - np.log(det_g)
    le = sum(np.log(e[j] - e[i]) for i, j in itertools.combinations(range(5), 2))
    form_412 = (-0.5 * ldet5 - 5 * le / 24 + im - 0.25 * np.log(16.0)
                + 13 / 24 * (np.log(r0 ** 2 * (c1 - c2) ** 2) - lprod0))

    pairs = pair_characteristics(pd)
    th = theta_constants(pd.tau)
    cubed = [(1, 3), (1, 5), (3, 5)]
    num = 3 * sum(np.log(th[pairs[p]]) for p in cubed)
    den = sum(np.log(th[pairs[p]]) for p in pairs if p not in cubed)
    chi10 = cusp_forms(pd.tau).chi10
    form_414 = (13 / 24 * (num - den) - 5 / 48 * np.log(chi10) + im
                + 13 / 24 * (np.log((r0 - r[2]) ** 2 * (r0 - r[4]) ** 2 / (r[2] - r[4]) ** 2) - lprod0))
    return F1Forms(complex(form_49), complex(form_411), complex(form_412), complex(form_414),
                   complex(raw), complex(form_49 - raw))


def f1(curve, pd: PeriodData) -> FreeEnergy:
    forms = f1_forms(curve, pd)
    return FreeEnergy(1, forms.tau_b_form, BERGMAN,
                      {"raw": forms.raw, "a0_shift": forms.a0_shift, "root_form": forms.root_form,
                       "quintic_form": forms.quintic_form, "theta_form": forms.theta_form})


def branch_free_difference(x: complex, y: complex, unit: int = 48) -> complex:
    """exp(unit (x - y)): removes the log-branch ambiguity of fractional powers."""
    return complex(np.exp(unit * (x - y)))
