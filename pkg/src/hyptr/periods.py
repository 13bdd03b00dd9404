"""Symplectic homology bases and the matrix of periods and quasi-periods.

Conventions used throughout the package:

* differentials, in units of dx/2y:  omega = (1, x),
  eta_1 = 4 a0 x^4 + 3 a1 x^3 + 2 a2 x^2 + a3 x,  eta_2 = 2 a0 x^3 + a1 x^2
  (for a quintic, a0 = 0 and a1 = b0, giving the usual Baker frame);
* Pi has rows (B1, B2, A1, A2) and columns (omega1, omega2, eta1, eta2);
* tau = Pi_B(omega) Pi_A(omega)^-1 with Im tau > 0 and A_i . B_j = delta_ij.

With these choices the Legendre relation reads
    Pi_A(omega)^t Pi_B(eta) - Pi_B(omega)^t Pi_A(eta) = 2 pi i,
which in the (B, A)-row layout is Pi J Pi^t = -2 pi i J (the +2 pi i J form
holds for the (A, B)-row layout).

Branch points are joined by an x-monotone chain e_0 - e_1 - ... and the
loops l_k encircling [e_{k-1}, e_k] (k = 1..4) form a Z-basis of H_1.
Their intersection numbers are read off from the local sheet data at the
shared endpoints, never from the periods themselves.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curve import SEXTIC, HyperellipticCurve, lexicographic
from .errors import BilinearRelationViolated, ModelMismatch, NumericFailure
from .numerics import gauss_chebyshev

J4 = np.block([[np.zeros((2, 2), int), np.eye(2, dtype=int)],
               [-np.eye(2, dtype=int), np.zeros((2, 2), int)]])

RH_ABORT = 1e-6
QUAD_TOL = 1e-11
QUAD_START = 64
QUAD_CAP = 1024


def frame_numerators(a: np.ndarray) -> np.ndarray:
    """Ascending-power numerators (rows) of omega1, omega2, eta1, eta2 in dx/2y."""
    a = np.asarray(a, dtype=complex)
    N = np.zeros((4, 5), dtype=complex)
    N[0, 0] = 1.0
    N[1, 1] = 1.0
    N[2, 1:5] = [a[3], 2 * a[2], 3 * a[1], 4 * a[0]]
    N[3, 2:4] = [a[1], 2 * a[0]]
    return N


def apply_frame(numer: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Numerators after omega -> g omega, eta -> g^-t eta."""
    g = np.asarray(g, dtype=complex)
    out = numer.copy()
    out[:2] = g @ numer[:2]
    out[2:] = np.linalg.inv(g).T @ numer[2:]
    return out


# segment integration ----------------------------------------------------


def _segment_sheet(lead: complex, others: np.ndarray, m: complex):
    """s(x) with s^2 = lead * prod(x - r), continuous on the segment about m.

    The factor sqrt((x - r)/(m - r)) never meets the cut of the principal
    square root because r is off the segment.
    """
    base = np.sqrt(complex(lead)) * np.prod(np.sqrt(m - others))

    def s(x):
        x = np.asarray(x, dtype=complex)
        val = np.full(x.shape, base, dtype=complex)
        for r in others:
            val = val * np.sqrt((x - r) / (m - r))
        return val

    return s


def branch_segment_integrals(curve: HyperellipticCurve, e0: complex, e1: complex,
                             numer: np.ndarray, *, nodes: int = QUAD_START, tol: float = QUAD_TOL,
                             cap: int = QUAD_CAP) -> np.ndarray:
    """Integrals over [e0, e1] (both branch points) of numer(x) dx / 2y.

    On x = m + h t, y = i h sqrt(1 - t^2) s(t); the Chebyshev weight absorbs
    sqrt(1 - t^2) so the rule sees the smooth function numer(x) / (2 i s(t)).
    Returns one value per numerator row.
    """
    others = np.array([r for r in curve.roots if abs(r - e0) > 0 and abs(r - e1) > 0])
    m, h = 0.5 * (e0 + e1), 0.5 * (e1 - e0)
    s = _segment_sheet(curve.lead, others, m)

    def once(n):
        rule = gauss_chebyshev(n)
        x = m + h * rule.nodes
        vals = np.polynomial.polynomial.polyval(x, numer.T) / (2j * s(x))
        if not np.all(np.isfinite(vals)):
            raise NumericFailure("non-finite sample on a branch segment")
        return vals @ rule.weights

    val = once(nodes)
    n = nodes
    while True:
        n *= 2
        if n > cap:
            from .errors import QuadratureFailure
            raise QuadratureFailure(f"branch segment integral did not reach {tol:g} with {cap} nodes")
        new = once(n)
        if np.max(np.abs(new - val)) <= tol * max(1.0, float(np.max(np.abs(new)))):
            return new
        val = new


# markings ----------------------------------------------------------------


@dataclass(frozen=True)
class Marking:
    """A symplectic basis expressed through segment loops.

    ``tree`` lists the chain segments (branch-point pairs) carrying loops
    l_1..l_4.  ``cycle_vectors`` has rows A1, A2, B1, B2 in the loop basis;
    ``intersection_form`` is the resulting integer matrix (always J4) and
    ``loop_intersections`` the raw l_i . l_j table.
    """

    tree: tuple
    loop_intersections: np.ndarray
    cycle_vectors: np.ndarray
    intersection_form: np.ndarray = field(init=False)

    def __post_init__(self):
        L = np.asarray(self.loop_intersections, dtype=int)
        C = np.asarray(self.cycle_vectors, dtype=int)
        object.__setattr__(self, "loop_intersections", L)
        object.__setattr__(self, "cycle_vectors", C)
        object.__setattr__(self, "intersection_form", C @ L @ C.T)

    @property
    def ba_matrix(self) -> np.ndarray:
        """Rows (B1, B2, A1, A2) in the loop basis."""
        C = self.cycle_vectors
        return np.vstack([C[2:], C[:2]])

    def transformed(self, gamma: np.ndarray) -> "Marking":
        """New marking with (B, A)^t -> gamma (B, A)^t."""
        g = np.asarray(gamma, dtype=int)
        ba = g @ self.ba_matrix
        return Marking(self.tree, self.loop_intersections, np.vstack([ba[2:], ba[:2]]))

    def to_dict(self) -> dict:
        return {
            "tree": [[[complex(p).real, complex(p).imag] for p in seg] for seg in self.tree],
            "cycle_vectors": self.cycle_vectors.tolist(),
            "intersection_form": self.intersection_form.tolist(),
        }


def _half_angle_sqrt(z: complex) -> complex:
    # same branch as 0.5 * np.angle(z), immune to the sign of a zero imaginary part
    return np.sqrt(abs(z)) * np.exp(0.5j * _angle(z))


def _angle(z: complex) -> float:
    z = complex(z)
    return float(np.angle(complex(z.real + 0.0, z.imag + 0.0)))


def loop_intersection_matrix(curve: HyperellipticCurve, chain: np.ndarray) -> np.ndarray:
    """Intersection numbers l_i . l_j of the chain loops from local sheet data.

    At a shared branch point e with c = sqrt(f'(e)), the forward sheet of
    each adjacent segment is y ~ +-c sqrt(x - e); this picks the direction
    of each loop's lift in the uniformizer w = sqrt(x - e), and two lines
    through w = 0 meet with the sign of the sine of their angle.
    """
    nloops = 4
    L = np.zeros((nloops, nloops), dtype=int)
    for k in range(nloops - 1):
        e_prev, e, e_next = chain[k], chain[k + 1], chain[k + 2]
        c = np.sqrt(complex(curve.df(e)))
        # segment k ends at e (t = +1)
        h1 = 0.5 * (e - e_prev)
        m1 = 0.5 * (e + e_prev)
        o1 = np.array([r for r in curve.roots if abs(r - e_prev) > 0 and abs(r - e) > 0])
        s1v = _segment_sheet(curve.lead, o1, m1)(np.array([e]))[0]
        s1 = np.real(1j * h1 * np.sqrt(2.0) * s1v / (_half_angle_sqrt(-h1) * c))
        # segment k + 1 starts at e (t = -1)
        h2 = 0.5 * (e_next - e)
        m2 = 0.5 * (e + e_next)
        o2 = np.array([r for r in curve.roots if abs(r - e) > 0 and abs(r - e_next) > 0])
        s2v = _segment_sheet(curve.lead, o2, m2)(np.array([e]))[0]
        s2 = np.real(1j * h2 * np.sqrt(2.0) * s2v / (_half_angle_sqrt(h2) * c))
        if abs(abs(s1) - 1) > 1e-6 or abs(abs(s2) - 1) > 1e-6:
            raise NumericFailure("sheet comparison at a branch point is not +-1")
        phi1 = 0.5 * _angle(e_prev - e) + (np.pi if s1 < 0 else 0.0)
        phi2 = 0.5 * _angle(e_next - e) + (np.pi if s2 < 0 else 0.0)
        v = -int(np.sign(np.sin(phi2 - phi1)))
        L[k, k + 1] = v
        L[k + 1, k] = -v
    return L


def _symp(L, u, v):
    return int(u @ L @ v)


def symplectic_reduction(L: np.ndarray) -> np.ndarray:
    """Integer basis (rows A1, A2, B1, B2) with A_i . B_j = delta_ij.

    Symplectic Gram-Schmidt over Z on the unit vectors; pairs are chosen
    by smallest combined support among those with intersection +-1.
    """
    vecs = [np.eye(4, dtype=int)[i] for i in range(4)]
    A, B = [], []
    while vecs:
        best = None
        for i in range(len(vecs)):
            for j in range(len(vecs)):
                if i == j:
                    continue
                q = _symp(L, vecs[i], vecs[j])
                if abs(q) == 1:
                    key = (np.count_nonzero(vecs[i]) + np.count_nonzero(vecs[j]), i, j)
                    if q == 1 and (best is None or key < best[0]):
                        best = (key, i, j)
        if best is None:
            raise NumericFailure("intersection form is not unimodular")
        _, i, j = best
        a, b = vecs[i], vecs[j]
        rest = [vecs[k] for k in range(len(vecs)) if k not in (i, j)]
        new = []
        for w in rest:
            # w' = w - (w.b) a + (w.a) b is orthogonal to a and b
            new.append(w - _symp(L, w, b) * a + _symp(L, w, a) * b)
        A.append(a)
        B.append(b)
        vecs = new
    return np.array(A + B, dtype=int)


def branch_chain(curve: HyperellipticCurve) -> np.ndarray:
    return lexicographic(curve.roots)


def build_marking(curve: HyperellipticCurve, chain: np.ndarray | None = None) -> Marking:
    """Canonical marking from the x-monotone chain through the branch points."""
    chain = branch_chain(curve) if chain is None else np.asarray(chain, dtype=complex)
    L = loop_intersection_matrix(curve, chain)
    C = symplectic_reduction(L)
    tree = tuple((complex(chain[k]), complex(chain[k + 1])) for k in range(4))
    mk = Marking(tree, L, C)
    if not np.array_equal(mk.intersection_form, J4):
        raise NumericFailure("symplectic reduction failed to reach J4")
    return mk


def transport_marking(marking: Marking, curve: HyperellipticCurve) -> Marking:
    """Carry a marking to a nearby curve by snapping chain points to its roots.

    The loop intersection table is recomputed; a change means the
    deformation was too large to transport the cycles this way.
    """
    pts = [marking.tree[0][0]] + [seg[1] for seg in marking.tree]
    roots = curve.roots
    chain = []
    for p in pts:
        d = np.abs(roots - p)
        chain.append(roots[int(np.argmin(d))])
    chain = np.array(chain)
    if all(abs(a - b) == 0 for a, b in zip(chain, pts)):
        return marking
    L = loop_intersection_matrix(curve, chain)
    if not np.array_equal(L, marking.loop_intersections):
        raise NumericFailure("marking cannot be transported: loop intersections changed")
    tree = tuple((complex(chain[k]), complex(chain[k + 1])) for k in range(4))
    return Marking(tree, L, marking.cycle_vectors)


# periods -------------------------------------------------------------------


@dataclass(frozen=True)
class PeriodData:
    """Periods and quasi-periods of one curve in one marking and frame."""

    Pi: np.ndarray
    tau: np.ndarray
    marking: Marking
    curve: HyperellipticCurve
    loop_periods: np.ndarray
    frame: np.ndarray

    @property
    def PB(self):
        return self.Pi[:2, :2]

    @property
    def PA(self):
        return self.Pi[2:, :2]

    @property
    def PB_eta(self):
        return self.Pi[:2, 2:]

    @property
    def PA_eta(self):
        return self.Pi[2:, 2:]

    @property
    def PA_inv(self):
        return np.linalg.inv(self.PA)

    @property
    def M(self) -> np.ndarray:
        """Pi_A(omega)^-1 Pi_A(eta), symmetric by the Legendre relation."""
        return np.linalg.solve(self.PA, self.PA_eta)

    @property
    def Y(self) -> np.ndarray:
        """2 pi i Pi_A^-1 (tau - conj tau)^-1 Pi_A^-t."""
        Pinv = self.PA_inv
        return 2j * np.pi * Pinv @ np.linalg.inv(self.tau - self.tau.conj()) @ Pinv.T

    def riemann_hodge_residual(self) -> float:
        """max |Pi J Pi^t + 2 pi i J|, the relation valid in this layout."""
        return float(np.max(np.abs(self.Pi @ J4 @ self.Pi.T + 2j * np.pi * J4)))

    def riemann_hodge_literal_residual(self) -> float:
        """max |Pi J Pi^t - 2 pi i J| in the (B, A)-row layout (equals 4 pi)."""
        return float(np.max(np.abs(self.Pi @ J4 @ self.Pi.T - 2j * np.pi * J4)))

    def legendre_residual(self) -> float:
        """max |Pi_A^t Pi_B(eta) - Pi_B^t Pi_A(eta) - 2 pi i|."""
        L = self.PA.T @ self.PB_eta - self.PB.T @ self.PA_eta
        return float(np.max(np.abs(L - 2j * np.pi * np.eye(2))))

    def ab_layout(self) -> np.ndarray:
        """Rows (A1, A2, B1, B2); satisfies Pi J Pi^t = +2 pi i J."""
        return np.vstack([self.Pi[2:], self.Pi[:2]])

    def symmetry_residual(self) -> float:
        M = self.M
        return float(max(np.max(np.abs(M - M.T)), np.max(np.abs(self.tau - self.tau.T))))

    def with_marking(self, gamma: np.ndarray) -> "PeriodData":
        """Same curve, marking transformed by gamma (no re-integration)."""
        mk = self.marking.transformed(gamma)
        return _assemble(self.curve, mk, self.loop_periods, self.frame, check=False)

    def to_dict(self) -> dict:
        def cm(A):
            return [[[complex(z).real, complex(z).imag] for z in row] for row in A]
        return {"Pi": cm(self.Pi), "tau": cm(self.tau), "marking": self.marking.to_dict()}


def loop_periods(curve: HyperellipticCurve, marking: Marking, numer: np.ndarray, **quad) -> np.ndarray:
    rows = []
    for e0, e1 in marking.tree:
        rows.append(2.0 * branch_segment_integrals(curve, e0, e1, numer, **quad))
    return np.array(rows)


def _assemble(curve, marking, lp, frame, check=True) -> PeriodData:
    Pi = marking.ba_matrix.astype(complex) @ lp
    PA, PB = Pi[2:, :2], Pi[:2, :2]
    tau = PB @ np.linalg.inv(PA)
    pd = PeriodData(Pi, tau, marking, curve, lp, frame)
    if check:
        res = pd.riemann_hodge_residual()
        if not np.isfinite(res) or res > RH_ABORT:
            raise BilinearRelationViolated(f"Riemann-Hodge residual {res:.3e} exceeds {RH_ABORT:g}")
    return pd


def periods(curve: HyperellipticCurve, marking: Marking | None = None, frame: np.ndarray | None = None,
            *, check: bool = True, **quad) -> PeriodData:
    """Integrate omega and eta over the marking's cycles.

    ``frame`` is an optional invertible g; the integrands become g omega and
    g^-t eta (the Riemann-Hodge relation is frame independent).
    """
    if marking is None:
        marking = build_marking(curve)
    else:
        marking = transport_marking(marking, curve)
    numer = frame_numerators(curve.a)
    g = np.eye(2, dtype=complex) if frame is None else np.asarray(frame, dtype=complex)
    if frame is not None:
        numer = apply_frame(numer, g)
    lp = loop_periods(curve, marking, numer, **quad)
    return _assemble(curve, marking, lp, g, check=check)


# Rauch variation -----------------------------------------------------------


def _poly_div_linear(p: np.ndarray, e: complex) -> tuple[np.ndarray, complex]:
    """p(x) = (x - e) q(x) + p(e) with ascending coefficients."""
    n = len(p) - 1
    q = np.zeros(max(n, 1), dtype=complex)
    acc = 0j
    for k in range(n, 0, -1):
        acc = p[k] + acc * e
        q[k - 1] = acc
    rem = p[0] + acc * e
    return q, rem


def _in_frame(P: np.ndarray, numer: np.ndarray) -> np.ndarray:
    """Coefficients c with P = sum c_i numer_i for a polynomial of degree <= 3."""
    Pp = np.zeros(4, dtype=complex)
    Pp[:min(len(P), 4)] = P[:4]
    if len(P) > 4 and np.max(np.abs(P[4:])) > 1e-12 * max(1.0, np.max(np.abs(P))):
        raise ModelMismatch("reduction left a degree > 3 numerator")
    basis = numer[:, :4].T
    return np.linalg.solve(basis, Pp)


@dataclass(frozen=True)
class RauchResult:
    dPi: np.ndarray
    dtau: np.ndarray
    dtau_closed: np.ndarray
    beta: np.ndarray

    def omega_eta_blocks(self) -> np.ndarray:
        """d/de_k of ((Pi_A(w), -Pi_A(eta)), (Pi_B(w), -Pi_B(eta)))."""
        d = self.dPi
        return np.block([[d[2:, :2], -d[2:, 2:]], [d[:2, :2], -d[:2, 2:]]])


def rauch_variation(curve: HyperellipticCurve, pd: PeriodData, k: int) -> RauchResult:
    """Derivative of the period matrix in the finite branch point e_k.

    Uses d/de_k (R dx/2y) = R dx / (4 y (x - e_k)) + (dR/de_k) dx/2y and the
    exact-form identity
        d(y/(x - e)) = [(x-e) g' - g] dx / (2y (x-e)),  f = (x - e) g,
    which trades dx/(y (x - e)) for polynomial differentials.  All cycle
    integrals of exact forms vanish, so dPi = Pi_loop @ coefficient matrix.
    ``k`` indexes curve.roots.
    """
    if curve.model == SEXTIC or abs(curve.lead - 1) > 1e-12:
        raise ModelMismatch("Rauch variation is implemented for monic odd-degree models")
    if not np.allclose(pd.frame, np.eye(2)):
        raise ModelMismatch("Rauch variation needs periods in the standard frame")
    e = complex(curve.roots[k])
    numer = frame_numerators(curve.a)
    f_asc = curve.a[::-1][:6]
    g_asc, _ = _poly_div_linear(f_asc, e)
    fpe = complex(np.polynomial.polynomial.polyval(e, g_asc))
    dg = np.polynomial.polynomial.polyder(g_asc)
    ghat, _ = _poly_div_linear(g_asc, e)
    corr = np.zeros(5, dtype=complex)
    corr[:len(dg)] += dg
    corr[:len(ghat)] -= ghat
    pole_coeffs = _in_frame(corr / fpe, numer)  # dx/(2y(x-e)) in the frame

    # dependence of the frame numerators on e through b1, b2, b3
    others = np.array([r for i, r in enumerate(curve.roots) if i != k])
    dcoef = -np.poly(others)  # d/de of descending coeffs of prod(x - e_j)
    da = np.zeros(7, dtype=complex)
    da[2:] = dcoef
    dnumer = frame_numerators(da)
    dnumer[:, :] -= frame_numerators(np.zeros(7))

    T = np.zeros((4, 4), dtype=complex)  # column j: derivative of integrand j
    for j in range(4):
        q, rem = _poly_div_linear(numer[j], e)
        c = 0.5 * _in_frame(q, numer) + 0.5 * rem * pole_coeffs
        c += _in_frame(dnumer[j], numer)
        T[:, j] = c
    dloop = pd.loop_periods @ T
    dPi = pd.marking.ba_matrix.astype(complex) @ dloop
    PAinv = np.linalg.inv(pd.PA)
    dtau = (dPi[:2, :2] - pd.tau @ dPi[2:, :2]) @ PAinv
    U = np.array([1.0, e])
    # the normalized differentials at e_k give d tau = 2 pi i Pi_A^-t beta Pi_A^-1
    beta = np.outer(U, U) / (2.0 * fpe)
    dtau_closed = 2j * np.pi * PAinv.T @ beta @ PAinv
    return RauchResult(dPi, dtau, dtau_closed, beta)
