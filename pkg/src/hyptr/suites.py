"""Seeded verification suites behind ``hyptr verify``.

Each suite draws its own random curves (or moduli, or group elements) from a
child of the seed sequence, so results do not depend on the thread count or
on which other suites run alongside it.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .curve import igusa_j, random_quintic, random_sextic
from .jacobian import find_delta, point_at
from .kernels import bergman_algebraic, bergman_theta, schiffer, schiffer_algebraic
from .mirror import mirror_spectral_curve, random_moduli
from .modularity import random_word, transformation_suite
from .periods import periods
from .recursion import TopologicalRecursion, omega03_closed_form, pole_bound, total_pole_bound
from .theta import igusa_from_tau, quasi_period_theta, thomae_check

SUITES = ("periods", "theta", "kernels", "recursion", "modularity")

DEFAULT_TOLERANCES = {
    "riemann_hodge": 1e-7,
    "legendre": 1e-7,
    "period_symmetry": 1e-8,
    "imag_tau_positive": 0.5,
    "torelli": 1e-5,
    "thomae": 1e-5,
    "quasi_period_theta": 1e-5,
    "bergman_forms": 1e-6,
    "schiffer_forms": 1e-6,
    "omega03_closed_form": 1e-7,
    "omega_symmetry": 1e-7,
    "pole_order_excess": 0.5,
    "quasi-period law": 1e-6,
    "completed invariance": 1e-6,
    "period block law": 1e-6,
    "tau action": 1e-6,
    "(tau - conj tau)^-1 law": 1e-9,
}


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    item: int
    residual: float
    tolerance: float
    passed: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(np.isfinite(self.residual) and self.residual < self.tolerance))


class _Collector:
    def __init__(self, suite: str, item: int, tolerances: dict):
        self.suite = suite
        self.item = item
        self.tolerances = tolerances
        self.checks: list[Check] = []

    def add(self, name: str, residual: float) -> None:
        tol = self.tolerances.get(name, DEFAULT_TOLERANCES.get(name, 1e-6))
        self.checks.append(Check(self.suite, name, self.item, float(residual), float(tol)))


def _rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(float(np.max(np.abs(b))), 1e-300))


def _random_points(rng, curve, count):
    xs = rng.normal(size=count) + 1j * rng.normal(size=count)
    sheets = rng.choice([-1, 1], size=count)
    return [point_at(curve, x, int(s)) for x, s in zip(xs, sheets)]


def _periods_item(rng, col: _Collector) -> None:
    pd = periods(random_sextic(rng))
    col.add("riemann_hodge", pd.riemann_hodge_residual())
    col.add("legendre", pd.legendre_residual())
    col.add("period_symmetry", pd.symmetry_residual())
    # 0 when Im tau is positive definite, 1 otherwise
    col.add("imag_tau_positive", 0.0 if np.linalg.eigvalsh(pd.tau.imag).min() > 0 else 1.0)


def _theta_item(rng, col: _Collector) -> None:
    c = random_sextic(rng)
    pd = periods(c)
    col.add("torelli", _rel(igusa_from_tau(pd.tau).as_array(), igusa_j(c).as_array()))
    col.add("quasi_period_theta", _rel(quasi_period_theta(c, pd), pd.M))
    col.add("thomae", thomae_check(periods(random_quintic(rng))).rel_error)


def _kernels_item(rng, col: _Collector) -> None:
    c = random_sextic(rng)
    pd = periods(c)
    delta = find_delta(pd)
    p, q = _random_points(rng, c, 2)
    col.add("bergman_forms", _rel(bergman_theta(p, q, pd, delta).scalar_part,
                                  bergman_algebraic(p, q, c, pd.M).scalar_part))
    col.add("schiffer_forms", _rel(schiffer(p, q, pd, delta).scalar_part,
                                   schiffer_algebraic(p, q, c, pd).scalar_part))


def _recursion_item(rng, col: _Collector) -> None:
    sc = mirror_spectral_curve(random_moduli(rng))
    pd = periods(sc.curve)
    tr = TopologicalRecursion(sc, pd)
    a03 = tr.omega(0, 3)
    pts = _random_points(rng, sc.curve, 3)
    col.add("omega03_closed_form", _rel(tr.evaluate(a03, pts), omega03_closed_form(sc, pd.M, pts)))
    col.add("omega_symmetry", a03.symmetry_residual())
    a11 = tr.omega(1, 1)
    per, tot = a11.pole_orders()
    col.add("pole_order_excess", max(0, per - pole_bound(1, 1), tot - total_pole_bound(1, 1)))


def _modularity_item(rng, col: _Collector) -> None:
    pd = periods(random_sextic(rng))
    gamma = random_word(rng)
    for rep in transformation_suite(pd, gamma):
        col.add(rep.law, rep.residual)


_RUNNERS = {
    "periods": _periods_item,
    "theta": _theta_item,
    "kernels": _kernels_item,
    "recursion": _recursion_item,
    "modularity": _modularity_item,
}


@dataclass
class SuiteReport:
    suites: list
    seed: int
    items: int
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"suites": self.suites, "seed": self.seed, "items": self.items, "passed": self.passed,
                "checks": [asdict(c) for c in self.checks]}


def run_suites(names, seed: int = 0, items: int = 2, threads: int = 1,
               tolerances: dict | None = None) -> SuiteReport:
    """Run the named suites; ``items`` random instances per suite."""
    names = list(SUITES) if "all" in names else list(names)
    unknown = [n for n in names if n not in _RUNNERS]
    if unknown:
        raise ValueError(f"unknown suite(s): {', '.join(unknown)}")
    tolerances = dict(tolerances or {})
    # one child sequence per (suite, item) keyed by the suite's fixed position
    jobs = []
    for name in names:
        children = np.random.SeedSequence([seed, SUITES.index(name)]).spawn(items)
        for i, ss in enumerate(children):
            jobs.append((name, i, ss))

    def run(job):
        name, i, ss = job
        col = _Collector(name, i, tolerances)
        _RUNNERS[name](np.random.default_rng(ss), col)
        return col.checks

    with ThreadPoolExecutor(max_workers=max(1, threads)) as ex:
        results = list(ex.map(run, jobs))
    return SuiteReport(names, seed, items, [c for r in results for c in r])
