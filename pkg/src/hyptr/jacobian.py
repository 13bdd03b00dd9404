"""Abel-Jacobi maps, the Kleinian sigma function and its log-derivatives.

Base point: infinity for odd-degree models, roots[0] for sextics.  Jacobian
points are row vectors u (unnormalized) with v = u Pi_A(omega)^-1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .curve import SEXTIC, HyperellipticCurve
from .errors import (
    CharacteristicResolutionFailed,
    OnThetaDivisor,
    PathThroughBranchPoint,
    WeierstrassPointLimit,
)
from .numerics import gauss_legendre
from .periods import PeriodData, apply_frame, frame_numerators
from .theta import (
    EVEN_LABELS,
    ODD_LABELS,
    ThetaCharacteristic,
    bits_add,
    theta,
)

INFINITY = None
PATH_CLEARANCE = 0.12
QUAD_TOL = 1e-12


@dataclass(frozen=True)
class CurvePoint:
    """A point (x, y) with y^2 = f(x); x is None for the point at infinity."""

    x: complex | None
    y: complex | None
    sheet: int = 1

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def involution(self) -> "CurvePoint":
        if self.x is None:
            return self
        return CurvePoint(self.x, -self.y, -self.sheet)


def point_at(curve: HyperellipticCurve, x: complex, sheet: int = 1) -> CurvePoint:
    """Point above x with y = sheet * principal sqrt(f(x))."""
    x = complex(x)
    y = complex(np.sqrt(complex(curve.f(x))))
    return CurvePoint(x, sheet * y, sheet)


def branch_point(curve: HyperellipticCurve, k: int) -> CurvePoint:
    return CurvePoint(complex(curve.roots[k]), 0j, 1)


@dataclass(frozen=True)
class JacobianPoint:
    u: np.ndarray
    v: np.ndarray


# path integration -----------------------------------------------------------


def _legendre_adaptive(fun, n0: int = 32, tol: float = QUAD_TOL, cap: int = 2048):
    """Gauss-Legendre on [0, 1] with node doubling; fun maps nodes -> (n, k)."""
    def once(n):
        r = gauss_legendre(n)
        s = 0.5 * (r.nodes + 1.0)
        return 0.5 * (r.weights @ fun(s))
    val = once(n0)
    n = n0
    while 2 * n <= cap:
        n *= 2
        new = once(n)
        if np.max(np.abs(new - val)) <= tol * max(1.0, float(np.max(np.abs(new)))):
            return new
        val = new
    from .errors import QuadratureFailure
    raise QuadratureFailure("path integral did not converge")


def _numvals(x, numer):
    """Numerator polynomials (rows, ascending) at points x, shape (len(x), rows)."""
    return np.polynomial.polynomial.polyval(x, numer.T).T


def _clear(seg0, seg1, roots, skip=()) -> bool:
    d = seg1 - seg0
    scale = max(abs(d), 1e-300)
    for i, r in enumerate(roots):
        if i in skip:
            continue
        t = np.clip(((r - seg0) * np.conj(d)).real / scale ** 2, 0.0, 1.0)
        if abs(seg0 + t * d - r) < PATH_CLEARANCE * scale:
            return False
    return True


def _continue_y(roots, z_from, y_from, z_to):
    """Analytic continuation of y along the straight segment z_from -> z_to."""
    return y_from * np.prod(np.sqrt((z_to - roots) / (z_from - roots)))


def _segment_regular(curve, numer, z0, z1, y1):
    """int_{z0}^{z1} numer dx/2y with y known at z1; no root on the segment."""
    roots = curve.roots

    def fun(s):
        x = z0 + (z1 - z0) * s
        y = y1 * np.prod(np.sqrt((x[:, None] - roots) / (z1 - roots)), axis=1)
        return _numvals(x, numer) / (2 * y[:, None]) * (z1 - z0)

    return _legendre_adaptive(fun)


def _segment_from_branch(curve, numer, k, z1, y1):
    """int_{e_k}^{z1} numer dx/2y; x = e + (z1 - e) s^2 removes the root singularity."""
    roots = curve.roots
    e = roots[k]
    others = np.delete(roots, k)

    def fun(s):
        x = e + (z1 - e) * s * s
        # y = s * yred and dx / (2 y) = (z1 - e) s ds / y, so s cancels
        yred = y1 * np.prod(np.sqrt((x[:, None] - others) / (z1 - others)), axis=1)
        return _numvals(x, numer) * (z1 - e) / yred[:, None]

    return _legendre_adaptive(fun)


def _ray_to_infinity(curve, numer, p, yp, d, L):
    """int_p^infinity numer dx/2y along x = p + d u, split at u = L."""
    roots = curve.roots
    near = _segment_regular(curve, numer, p + d * L, p, yp) * -1.0  # int_p^{p+dL}

    def fun(v):
        # x = p + d L / v^2, dx = -2 d L / v^3 dv; y = yp * prod sqrt((x-r)/(p-r))
        w = d * L + (p - roots) * (v * v)[:, None]  # = v^2 (x - r)
        red = yp * np.prod(np.sqrt(w / (p - roots)), axis=1)  # = y * v^deg
        x = p + d * L / (v * v)
        deg = len(roots)
        vals = _numvals(x, numer) / (2 * red[:, None])
        # integrand * dx/dv with orientation u: L -> infinity is v: 1 -> 0
        return vals * (2 * d * L) * v[:, None] ** (deg - 3)

    far = _legendre_adaptive(fun)
    return near + far


def _ray_direction(curve, p) -> complex:
    roots = curve.roots
    best, best_d = None, -1.0
    for ang in np.linspace(0, 2 * np.pi, 48, endpoint=False) + 0.1234:
        d = np.exp(1j * ang)
        # distance from roots to the ray
        t = np.maximum(((roots - p) * np.conj(d)).real, 0.0)
        dist = np.min(np.abs(p + t * d - roots))
        if dist > best_d:
            best, best_d = d, dist
    return best


def _detour(curve, a, b, skip_a=(), skip_b=()):
    """Waypoints from a to b avoiding the roots (straight if possible).

    skip_a / skip_b list root indices sitting at the start / end point.
    """
    if _clear(a, b, curve.roots, tuple(skip_a) + tuple(skip_b)):
        return [a, b]
    n = (b - a) * 1j
    for frac in (0.5, 0.3, 0.7):
        mid = a + frac * (b - a)
        for s in (0.3, -0.3, 0.6, -0.6, 1.0, -1.0, 1.7, -1.7, 2.5, -2.5):
            w = mid + s * n
            if _clear(a, w, curve.roots, skip_a) and _clear(w, b, curve.roots, skip_b):
                return [a, w, b]
    return _visibility_path(curve.roots, a, b, skip_a, skip_b)


def _visibility_path(roots, a, b, skip_a, skip_b):
    """Shortest polygonal route through a grid of candidate waypoints."""
    import heapq
    pts = np.concatenate([roots, [a, b]])
    lo, hi = pts.real.min(), pts.real.max()
    blo, bhi = pts.imag.min(), pts.imag.max()
    pad = 0.5 * max(hi - lo, bhi - blo, 1e-3)
    gx = np.linspace(lo - pad, hi + pad, 15)
    gy = np.linspace(blo - pad, bhi + pad, 15)
    nodes = [a] + [complex(x, y) for x in gx for y in gy] + [b]
    nodes = [nodes[0]] + [z for z in nodes[1:-1] if np.min(np.abs(roots - z)) > 0.05 * pad] + [nodes[-1]]
    end = len(nodes) - 1

    def ok(i, j):
        skip = (tuple(skip_a) if i == 0 or j == 0 else ()) + (tuple(skip_b) if i == end or j == end else ())
        return _clear(nodes[i], nodes[j], roots, skip)

    dist = {0: 0.0}
    prev = {}
    heap = [(0.0, 0)]
    done = set()
    while heap:
        d, i = heapq.heappop(heap)
        if i in done:
            continue
        done.add(i)
        if i == end:
            break
        for j in range(len(nodes)):
            if j in done or j == i:
                continue
            nd = d + abs(nodes[j] - nodes[i])
            if nd < dist.get(j, np.inf) and ok(i, j):
                dist[j] = nd
                prev[j] = i
                heapq.heappush(heap, (nd, j))
    if end not in prev:
        raise PathThroughBranchPoint("no clear path between the points")
    route = [end]
    while route[-1] != 0:
        route.append(prev[route[-1]])
    return [nodes[i] for i in reversed(route)]


def integrate_from_base(curve: HyperellipticCurve, p: CurvePoint, numer: np.ndarray) -> np.ndarray:
    """int_{base}^{p} numer dx/2y, base = infinity (odd degree) or roots[0] (sextic)."""
    if p.is_infinity:
        if curve.model == SEXTIC:
            raise PathThroughBranchPoint("points at infinity of a sextic are not supported")
        return np.zeros(numer.shape[0], dtype=complex)
    x, y = complex(p.x), complex(p.y)
    roots = curve.roots
    kb = [i for i, r in enumerate(roots) if abs(r - x) <= 1e-14 * max(1.0, abs(r))]
    k = kb[0] if kb else None
    if curve.model != SEXTIC:
        if k is None:
            d = _ray_direction(curve, x)
            L = max(1.0, float(np.max(np.abs(roots - x))))
            return -_ray_to_infinity(curve, numer, x, y, d, L)
        # branch point: go through a nearby regular point
        nn = float(np.min(np.abs(np.delete(roots, k) - x)))
        d = _ray_direction(curve, x)
        aux = x + 0.5 * nn * d
        ya = complex(np.sqrt(curve.f(aux)))
        head = integrate_from_base(curve, CurvePoint(aux, ya), numer)
        return head - _segment_from_branch(curve, numer, k, aux, ya)
    if k == 0:
        return np.zeros(numer.shape[0], dtype=complex)
    wp = _detour(curve, roots[0], x, skip_a=(0,), skip_b=() if k is None else (k,))
    if k is not None and len(wp) == 2:
        wp = [wp[0], 0.5 * (wp[0] + wp[1]), wp[1]]
    # y on the interior waypoints, continued back from the end of the route
    if k is None:
        ys = {len(wp) - 1: y}
        last = len(wp) - 1
    else:
        last = len(wp) - 2
        ys = {last: complex(np.sqrt(curve.f(wp[last])))}
    for i in range(last, 1, -1):
        ys[i - 1] = _continue_y(roots, wp[i], ys[i], wp[i - 1])
    total = _segment_from_branch(curve, numer, 0, wp[1], ys[1])
    for i in range(1, last):
        total = total + _segment_regular(curve, numer, wp[i], wp[i + 1], ys[i + 1])
    if k is not None:
        total = total - _segment_from_branch(curve, numer, k, wp[last], ys[last])
    return total


def abel_jacobi(p: CurvePoint, pd: PeriodData) -> JacobianPoint:
    numer = apply_frame(frame_numerators(pd.curve.a), pd.frame)[:2]
    u = integrate_from_base(pd.curve, p, numer)
    return JacobianPoint(u, u @ pd.PA_inv)


def abel_jacobi_pair(p1: CurvePoint, p2: CurvePoint, pd: PeriodData) -> JacobianPoint:
    a, b = abel_jacobi(p1, pd), abel_jacobi(p2, pd)
    return JacobianPoint(a.u + b.u, a.v + b.v)


def lattice_reduce(v: np.ndarray, tau: np.ndarray) -> np.ndarray:
    """Representative of v mod Z^2 + Z^2 tau (row vectors) with small real parts."""
    v = np.asarray(v, dtype=complex)
    y = np.linalg.solve(tau.imag.T, v.imag)
    n = np.round(y)
    w = v - n @ tau
    return w - np.round(w.real)


def half_period_characteristic(v: np.ndarray, tau: np.ndarray, tol: float = 1e-6) -> str:
    """Bits xyzw of a 2-torsion point v = b + a tau (a, b in {0, 1/2}^2)."""
    v = np.asarray(v, dtype=complex)
    y = np.linalg.solve(tau.imag.T, v.imag)
    n2 = np.round(2 * y)
    w = v - 0.5 * n2 @ tau
    m2 = np.round(2 * w.real)
    resid = np.max(np.abs(w - 0.5 * m2))
    if resid > tol or np.max(np.abs(2 * y - n2)) > tol:
        raise CharacteristicResolutionFailed(f"not a half-period (residual {resid:.2e})")
    a = n2.astype(int) % 2
    b = m2.astype(int) % 2
    return f"{a[0]}{a[1]}{b[0]}{b[1]}"


# characteristic dictionary ----------------------------------------------------


@dataclass(frozen=True)
class CharacteristicData:
    """Half-period characteristics of branch points and the odd delta."""

    branch: tuple  # bits per curve.roots index (base point maps to 0000)
    delta: str


def branch_characteristics(pd: PeriodData) -> tuple:
    out = []
    for k in range(len(pd.curve.roots)):
        jp = abel_jacobi(branch_point(pd.curve, k), pd)
        out.append(half_period_characteristic(jp.v, pd.tau))
    return tuple(out)


def find_delta(pd: PeriodData, rng: np.random.Generator | None = None) -> str:
    """Odd characteristic whose theta vanishes on the embedded curve."""
    rng = np.random.default_rng(11) if rng is None else rng
    curve = pd.curve
    spread = curve.scale_spread()
    center = np.mean(curve.roots)
    pts = []
    for _ in range(2):
        x = center + 0.5 * spread * (rng.normal() + 1j * rng.normal())
        pts.append(abel_jacobi(point_at(curve, x), pd).v)
    scores = {}
    for s in ODD_LABELS:
        vals = []
        for v in pts:
            vr = lattice_reduce(v, pd.tau)
            tv = theta(s, vr, pd.tau, derivs=1)
            vals.append(abs(tv.value) / max(np.max(np.abs(tv.gradient)), 1e-300))
        scores[s] = max(vals)
    best = min(scores, key=scores.get)
    ranked = sorted(scores.values())
    if ranked[0] > 1e-7 or ranked[1] < 1e-3:
        raise CharacteristicResolutionFailed("no unique odd characteristic vanishes on the curve")
    return best


def characteristic_data(pd: PeriodData) -> CharacteristicData:
    return CharacteristicData(branch_characteristics(pd), find_delta(pd))


def pair_characteristics(pd: PeriodData, data: CharacteristicData | None = None) -> dict:
    """Sextic: (i, j) -> characteristic of the class r_i + r_j - 2 r_0 shifted by delta."""
    data = characteristic_data(pd) if data is None else data
    out = {}
    for i, j in itertools.combinations(range(1, 6), 2):
        out[(i, j)] = bits_add(bits_add(data.branch[i], data.branch[j]), data.delta)
    if sorted(out.values()) != sorted(EVEN_LABELS):
        raise CharacteristicResolutionFailed("pairs of branch points do not give the 10 even characteristics")
    return out


# sigma and wp ---------------------------------------------------------------


@dataclass(frozen=True)
class WpValue:
    wp2: np.ndarray  # wp_ij
    wp3: np.ndarray | None  # wp_ijk


def sigma(u, pd: PeriodData, delta: str) -> complex:
    """Kleinian sigma up to a constant: exp(-u M u^t / 2) theta[delta](u Pi_A^-1)."""
    u = np.asarray(u, dtype=complex)
    v = u @ pd.PA_inv
    return complex(np.exp(-0.5 * u @ pd.M @ u) * theta(delta, v, pd.tau, derivs=0).value)


def wp(u, pd: PeriodData, delta: str, third: bool = False, guard: float = 1e-8) -> WpValue:
    """wp_ij = -d_i d_j log sigma = M - Pi_A^-1 H(log theta) Pi_A^-t (and wp_ijk)."""
    u = np.asarray(u, dtype=complex)
    v = u @ pd.PA_inv
    tv = theta(delta, v, pd.tau, derivs=3 if third else 2)
    if abs(tv.value) <= guard * max(1.0, float(np.max(np.abs(tv.gradient)))):
        raise OnThetaDivisor("u lies on the sigma divisor")
    P = pd.PA_inv
    W2 = pd.M - P @ tv.log_hessian() @ P.T
    W3 = None
    if third:
        W3 = -np.einsum("ai,bj,ck,ijk->abc", P, P, P, tv.log_third())
    return WpValue(W2, W3)


def G_quintic_sextic(a: np.ndarray, x1, x2):
    """Symmetric polynomial G with f(x1)+f(x2)-style splitting used by wp and B."""
    s, p = x1 + x2, x1 * x2
    return (2 * a[0] * p ** 3 + (2 * a[6] + a[5] * s) + p * (2 * a[4] + a[3] * s)
            + p ** 2 * (2 * a[2] + a[1] * s))


def wp_identities_residual(p1: CurvePoint, p2: CurvePoint, pd: PeriodData, delta: str) -> np.ndarray:
    """Residuals of wp22 = x1+x2, wp12 = -x1 x2, wp11 = (G - 2 y1 y2)/(x1-x2)^2."""
    u = abel_jacobi_pair(p1, p2, pd).u
    W = wp(u, pd, delta).wp2
    x1, x2, y1, y2 = p1.x, p2.x, p1.y, p2.y
    G = G_quintic_sextic(pd.curve.a, x1, x2)
    expect = np.array([[(G - 2 * y1 * y2) / (x1 - x2) ** 2, -x1 * x2], [-x1 * x2, x1 + x2]])
    return W - expect


def restrict_to_curve(p: CurvePoint, pd: PeriodData, delta: str, h: float | None = None,
                      levels: int = 6) -> tuple[complex, complex]:
    """Recover (x, y) from wp at Phi(p, p') with p' -> infinity.

    p' runs along x' = t^-2 in the uniformizer at infinity; the values of
    -wp12/wp22 and -(wp11 wp22 - wp12^2)/wp222 are extrapolated to t = 0.
    """
    curve = pd.curve
    if curve.model == SEXTIC:
        raise WeierstrassPointLimit("restriction needs the odd-degree model with base point at infinity")
    if abs(p.y) < 1e-8 * max(1.0, abs(p.x)) ** 2.5:
        raise WeierstrassPointLimit("formulas degenerate at a Weierstrass point")
    base = abel_jacobi(p, pd).u
    scale = max(1.0, float(np.max(np.abs(curve.roots))), abs(p.x))
    h = 0.25 / np.sqrt(scale) if h is None else h
    ts = h * 0.5 ** np.arange(levels)
    xs, ys = [], []
    for t in ts:
        q = point_at(curve, 1.0 / t ** 2)
        u = base + abel_jacobi(q, pd).u
        W = wp(u, pd, delta, third=True)
        w2, w3 = W.wp2, W.wp3
        xs.append(-w2[0, 1] / w2[1, 1])
        # in this frame (omega = dx/2y) the restriction carries no extra 1/2
        ys.append(-(w2[0, 0] * w2[1, 1] - w2[0, 1] ** 2) / w3[1, 1, 1])
    return _extrapolate(ts, xs), _extrapolate(ts, ys)


def _extrapolate(ts, vals) -> complex:
    ts = np.asarray(ts)
    V = np.vander(ts, len(ts), increasing=True)
    c = np.linalg.solve(V, np.asarray(vals, dtype=complex))
    return complex(c[0])
