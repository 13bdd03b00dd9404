"""Command-line interface: ``hyptr <command> [options]``.

Every command prints canonical JSON (sorted keys, complex numbers as
[re, im], matrices row-major) and writes a RunManifest next to it.  Exit
codes: 0 ok, 1 verification failure, 2 degenerate input, 3 numeric failure,
64 usage.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import platform
import re
import sys
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .curve import HyperellipticCurve, absolute_invariants, binary_invariants
from .errors import HyptrError, TruncationTooShallow, UsageError

HARD_G_CAP = 4
HARD_N_CAP = 4
EXIT_OK, EXIT_VERIFY, EXIT_USAGE = 0, 1, 64


@dataclass(frozen=True)
class Config:
    """Numeric knobs shared by all commands."""

    tolerances: dict = field(default_factory=dict)
    quad_nodes: int = 64
    buffer: int = 0
    g_cap: int = 3
    n_cap: int = 3
    threads: int = 1
    format: str = "json"

    def validate(self) -> "Config":
        for name, tol in self.tolerances.items():
            if not isinstance(tol, (int, float)) or not tol > 0:
                raise UsageError(f"tolerance {name!r} must be positive, got {tol!r}")
        for name in ("quad_nodes", "g_cap", "n_cap", "threads"):
            v = getattr(self, name)
            if not isinstance(v, int) or v <= 0:
                raise UsageError(f"{name} must be a positive integer, got {v!r}")
        if not isinstance(self.buffer, int) or self.buffer < 0:
            raise UsageError(f"buffer must be a non-negative integer, got {self.buffer!r}")
        if self.g_cap > HARD_G_CAP or self.n_cap > HARD_N_CAP:
            raise UsageError(f"caps are limited to g <= {HARD_G_CAP}, n <= {HARD_N_CAP}")
        if self.format not in ("json", "csv"):
            raise UsageError(f"format must be json or csv, got {self.format!r}")
        return self

    @classmethod
    def load(cls, path: str | None, args: argparse.Namespace) -> "Config":
        data: dict = {}
        if path:
            try:
                data = json.loads(Path(path).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise UsageError(f"cannot read config {path}: {exc}") from exc
            if not isinstance(data, dict):
                raise UsageError("config must be a JSON object")
            unknown = set(data) - set(cls.__dataclass_fields__)
            if unknown:
                raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg = cls(**data)
        if getattr(args, "tolerance", None) is not None:
            # a single global override applied to every check
            from .suites import DEFAULT_TOLERANCES
            cfg = replace(cfg, tolerances={k: args.tolerance for k in DEFAULT_TOLERANCES})
        if getattr(args, "format", None):
            cfg = replace(cfg, format=args.format)
        env = os.environ.get("HYPTR_THREADS")
        if env is not None:
            try:
                cfg = replace(cfg, threads=int(env))
            except ValueError as exc:
                raise UsageError(f"HYPTR_THREADS must be an integer, got {env!r}") from exc
        return cfg.validate()


@dataclass
class RunManifest:
    command: str
    argv: list
    inputs: dict
    config: dict
    versions: dict
    wall_time: float
    residuals: dict
    output_sha256: str
    exit_code: int

    def write(self, directory: Path) -> Path:
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / f"{self.command}-{self.output_sha256[:12]}.json"
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True))
        return path


def _versions() -> dict:
    import scipy
    return {"hyptr": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


# serialization ---------------------------------------------------------------


def to_jsonable(obj):
    """Complex -> [re, im]; arrays -> nested lists; recurse into containers."""
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()] if obj.ndim else to_jsonable(obj.item())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2)


def _read_json_arg(text: str, what: str):
    """Inline JSON, or a path to a JSON file."""
    src = text
    if not text.lstrip().startswith(("{", "[")):
        try:
            src = Path(text).read_text()
        except OSError as exc:
            raise UsageError(f"{what}: not JSON and not a readable file: {text}") from exc
    try:
        return json.loads(src)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what}: invalid JSON ({exc})") from exc


def _complex(v) -> complex:
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        return complex(v.replace(" ", ""))
    return complex(v)


def _complex_matrix(data, shape, what: str) -> np.ndarray:
    try:
        M = np.array([[_complex(v) for v in row] for row in data], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"{what}: expected a matrix of [re, im] pairs") from exc
    if M.shape != shape:
        raise UsageError(f"{what}: expected shape {shape}, got {M.shape}")
    return M


def _parse_curve(text: str) -> HyperellipticCurve:
    d = _read_json_arg(text, "--curve")
    if not isinstance(d, dict) or "coeffs" not in d:
        raise UsageError('--curve needs {"model": ..., "coeffs": [[re, im], ...]}')
    try:
        return HyperellipticCurve.from_dict(d)
    except (TypeError, KeyError) as exc:
        raise UsageError(f"--curve: {exc}") from exc


def _parse_moduli(text: str):
    from .mirror import MirrorModuli
    t = text.strip()
    try:
        vals = json.loads(t) if t.startswith("[") else t.split(",")
        q = [_complex(v) for v in vals]
    except (ValueError, json.JSONDecodeError) as exc:
        raise UsageError(f"--q: cannot parse {text!r}") from exc
    if len(q) != 3:
        raise UsageError("--q needs three values q1,q2,q3")
    return MirrorModuli(*q)


def _parse_points(text: str, n: int) -> list[list]:
    """List of n-tuples of points; a point is [re, im] or [re, im, sheet]."""
    data = _read_json_arg(text, "--points")
    if not isinstance(data, list) or any(not isinstance(t, list) or len(t) != n for t in data):
        raise UsageError(f"--points needs a list of {n}-tuples of [re, im] or [re, im, sheet]")
    out = []
    for tup in data:
        pts = []
        for p in tup:
            if not isinstance(p, list) or len(p) not in (2, 3):
                raise UsageError("a point is [re, im] or [re, im, sheet]")
            sheet = int(p[2]) if len(p) == 3 else 1
            if sheet not in (-1, 1):
                raise UsageError("sheet must be +1 or -1")
            pts.append((complex(float(p[0]), float(p[1])), sheet))
        out.append(pts)
    return out


def _parse_gamma(text: str | None):
    from .modularity import SymplecticMatrix
    if text is None:
        return None
    data = _read_json_arg(text, "--gamma")
    try:
        return SymplecticMatrix(np.array(data))
    except ValueError as exc:
        raise UsageError(f"--gamma: {exc}") from exc


# commands --------------------------------------------------------------------


@dataclass
class Result:
    payload: object
    exit_code: int = EXIT_OK
    residuals: dict = field(default_factory=dict)
    text: str | None = None  # preformatted output (csv)


def cmd_invariants(args, cfg: Config) -> Result:
    curve = _parse_curve(args.curve)
    inv = binary_invariants(curve)
    j = absolute_invariants(inv)
    row = {"A": inv.A, "B": inv.B, "C": inv.C, "D": inv.D, "j1": j.j1, "j2": j.j2, "j3": j.j3}
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(row))
        w.writerow([f"{complex(v).real:.17g}{complex(v).imag:+.17g}j" for v in row.values()])
        return Result(row, text=buf.getvalue())
    return Result({"model": curve.model, **row})


def cmd_periods(args, cfg: Config) -> Result:
    from .periods import periods
    curve = _parse_curve(args.curve)
    pd = periods(curve, nodes=cfg.quad_nodes)
    res = {"riemann_hodge": pd.riemann_hodge_residual(), "legendre": pd.legendre_residual(),
           "symmetry": pd.symmetry_residual()}
    return Result({**pd.to_dict(), "M": pd.M, "residuals": res}, residuals=res)


def cmd_theta(args, cfg: Config) -> Result:
    from .theta import ThetaCharacteristic, theta
    if not re.fullmatch(r"[01]{4}", args.char):
        raise UsageError("--char is four bits xyzw, e.g. 0101")
    tau = _complex_matrix(_read_json_arg(args.tau, "--tau"), (2, 2), "--tau")
    v = np.zeros(2, dtype=complex)
    if args.v is not None:
        data = _read_json_arg(args.v, "--v")
        try:
            v = np.array([_complex(x) for x in data], dtype=complex)
        except (TypeError, ValueError) as exc:
            raise UsageError("--v: expected two [re, im] pairs") from exc
        if v.shape != (2,):
            raise UsageError("--v needs two entries")
    ch = ThetaCharacteristic.from_bits(args.char)
    tv = theta(ch, v, tau, derivs=2)
    return Result({"char": ch.bits, "parity": ch.parity, "value": tv.value, "gradient": tv.gradient,
                   "hessian": tv.hessian, "trunc_radius": tv.trunc_radius})


def _check_caps(cfg: Config, g: int, n: int) -> None:
    if g < 0 or n < 0:
        raise UsageError("g and n must be non-negative")
    if g > cfg.g_cap or n > cfg.n_cap:
        raise UsageError(f"(g, n) = ({g}, {n}) exceeds the configured caps g <= {cfg.g_cap}, n <= {cfg.n_cap}")


def _recursion_setup(args, cfg: Config):
    from .mirror import mirror_spectral_curve
    from .modularity import act_on_marking
    from .periods import build_marking, periods
    sc = mirror_spectral_curve(_parse_moduli(args.q))
    gamma = _parse_gamma(getattr(args, "gamma", None))
    marking = None
    if gamma is not None:
        marking = act_on_marking(gamma, build_marking(sc.curve))
    pd = periods(sc.curve, marking=marking, nodes=cfg.quad_nodes)
    return sc, pd


def _with_escalation(build, cfg: Config, steps: int = 2, grow: int = 4):
    """Run ``build(buffer)``, growing the series buffer on truncation failures."""
    buffer = cfg.buffer
    for attempt in range(steps + 1):
        try:
            return build(buffer), buffer
        except TruncationTooShallow:
            if attempt == steps:
                raise
            buffer += grow


def cmd_recurse(args, cfg: Config) -> Result:
    from .jacobian import point_at
    from .recursion import TopologicalRecursion, omega03_closed_form
    _check_caps(cfg, args.g, args.n)
    if 2 * args.g - 2 + args.n <= 0:
        raise UsageError("omega_{g,n} needs 2g - 2 + n > 0")
    sc, pd = _recursion_setup(args, cfg)

    def build(buffer):
        tr = TopologicalRecursion(sc, pd, args.kernel, buffer=buffer)
        return tr, tr.omega(args.g, args.n)

    (tr, atlas), buffer = _with_escalation(build, cfg)
    per, tot = atlas.pole_orders()
    C = atlas.coeffs
    nz = np.argwhere(np.abs(C) > 1e-14 * max(float(np.max(np.abs(C))), 1e-300))
    max_d = max((atlas.ds[i % len(atlas.ds)] for idx in nz for i in idx), default=0)
    out = {"atlas": atlas.to_dict(), "max_pole_order": per, "max_total_pole_order": tot,
           "max_derivative_order": int(max_d), "symmetry_residual": atlas.symmetry_residual(),
           "buffer": buffer, "marking": pd.marking.to_dict()}
    if args.points:
        evals = []
        for tup in _parse_points(args.points, args.n):
            pts = [point_at(sc.curve, x, s) for x, s in tup]
            item = {"points": [[x, s] for x, s in tup], "value": tr.evaluate(atlas, pts)}
            if (args.g, args.n) == (0, 3):
                item["closed_form"] = omega03_closed_form(sc, tr.M_eff, pts)
            evals.append(item)
        out["evaluations"] = evals
    return Result(out, residuals={"symmetry": out["symmetry_residual"]})


def cmd_free_energy(args, cfg: Config) -> Result:
    from .recursion import TopologicalRecursion, f1
    if args.g < 1:
        raise UsageError("free-energy needs g >= 1")
    _check_caps(cfg, args.g, 1)
    sc, pd = _recursion_setup(args, cfg)
    if args.g == 1:
        fe = f1(sc.curve, pd)
    else:
        fe, _ = _with_escalation(lambda b: TopologicalRecursion(sc, pd, args.kernel, buffer=b).f_g(args.g), cfg)
    return Result({"g": fe.g, "kernel": fe.kernel_choice, "value": fe.value, "metadata": fe.metadata})


def cmd_mirror_maps(args, cfg: Config) -> Result:
    from .mirror import evaluate_series, mirror_maps
    if not 1 <= args.degree <= 12:
        raise UsageError("--degree must be in 1..12")
    ms = mirror_maps(args.degree)
    out = ms.to_dict()
    if args.q:
        m = _parse_moduli(args.q)
        s = m.s
        out["evaluated"] = {"s": list(s),
                            "Q1_over_s1": evaluate_series(ms.Q1_over_s1, s),
                            "Q2_over_s2": evaluate_series(ms.Q2_over_s2, s),
                            "Q3_over_s3": evaluate_series(ms.Q3_over_s3, s)}
    return Result(out)


def cmd_verify(args, cfg: Config) -> Result:
    from .suites import run_suites
    if args.items <= 0:
        raise UsageError("--items must be positive")
    report = run_suites([args.suite], seed=args.seed, items=args.items, threads=cfg.threads,
                        tolerances=cfg.tolerances)
    worst = {}
    for c in report.checks:
        worst[c.name] = max(worst.get(c.name, 0.0), c.residual)
    return Result(report.to_dict(), EXIT_OK if report.passed else EXIT_VERIFY, residuals=worst)


def cmd_replay(args, cfg: Config) -> Result:
    """Re-run the command recorded in a manifest and compare output hashes."""
    try:
        man = json.loads(Path(args.manifest).read_text())
        argv = list(man["argv"])
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read manifest {args.manifest}: {exc}") from exc
    out = io.StringIO()
    code, text = _run(argv, stdout=out, manifest_dir=None)
    same = hashlib.sha256(text.encode()).hexdigest() == man.get("output_sha256")
    return Result({"manifest": args.manifest, "reproduced": same, "exit_code": code},
                  EXIT_OK if same else EXIT_VERIFY)


# parser ----------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hyptr", description="Genus-two curves, theta functions and topological recursion.")
    p.add_argument("--version", action="version", version=f"hyptr {__version__}")
    p.add_argument("--config", help="JSON config file (tolerances, quad_nodes, buffer, caps, threads, format)")
    p.add_argument("--manifest-dir", default="hyptr_runs", help="where run manifests are written")
    p.add_argument("--output", help="write the result here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("invariants", help="Igusa binary and absolute invariants")
    s.add_argument("--curve", required=True, help='curve JSON {"model": ..., "coeffs": [[re, im], ...]} or a file')
    s.add_argument("--format", choices=["json", "csv"])
    s.set_defaults(func=cmd_invariants)

    s = sub.add_parser("periods", help="period matrix, tau and quasi-periods")
    s.add_argument("--curve", required=True)
    s.set_defaults(func=cmd_periods)

    s = sub.add_parser("theta", help="theta value, gradient and Hessian")
    s.add_argument("--char", required=True, help="characteristic bits xyzw")
    s.add_argument("--tau", required=True, help="2x2 matrix of [re, im] pairs")
    s.add_argument("--v", help="argument, two [re, im] pairs (default 0)")
    s.set_defaults(func=cmd_theta)

    for name, func, helptext in (("recurse", cmd_recurse, "correlator atlas omega_{g,n}"),
                                 ("free-energy", cmd_free_energy, "free energy F_g")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--g", type=int, required=True)
        if name == "recurse":
            s.add_argument("--n", type=int, required=True)
            s.add_argument("--points", help="JSON list of n-tuples of points [re, im] or [re, im, sheet]")
        s.add_argument("--q", required=True, help="moduli q1,q2,q3 (python complex literals) or JSON")
        s.add_argument("--kernel", choices=["bergman", "schiffer"], default="bergman")
        s.add_argument("--gamma", help="4x4 Sp4(Z) matrix applied to the default marking")
        s.set_defaults(func=func)

    s = sub.add_parser("mirror-maps", help="mirror-map series with exact coefficients")
    s.add_argument("--degree", type=int, default=6)
    s.add_argument("--q", help="optional moduli at which to evaluate the series")
    s.set_defaults(func=cmd_mirror_maps)

    s = sub.add_parser("verify", help="run verification suites")
    s.add_argument("--suite", choices=["periods", "theta", "kernels", "recursion", "modularity", "all"],
                   default="all")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--items", type=int, default=2, help="random instances per suite")
    s.add_argument("--tolerance", type=float, help="override every check tolerance")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("replay", help="re-run a manifest and confirm identical output")
    s.add_argument("manifest")
    s.set_defaults(func=cmd_replay)
    return p


def _error_label(exc: Exception) -> str:
    # DegenerateDiscriminant -> "degenerate discriminant"
    return re.sub(r"(?<!^)(?=[A-Z])", " ", type(exc).__name__).lower()


def _run(argv: list[str], stdout=None, manifest_dir: str | None = "") -> tuple[int, str]:
    """Parse, execute and emit; returns (exit code, emitted text)."""
    stdout = sys.stdout if stdout is None else stdout
    t0 = time.perf_counter()
    command = "?"
    try:
        args = build_parser().parse_args(argv)
        command = args.command
        cfg = Config.load(args.config, args)
        result = args.func(args, cfg)
    except HyptrError as exc:
        label, msg = _error_label(exc), str(exc)
        text = msg if msg.lower().startswith(label) else f"{label}: {msg}"
        print(f"hyptr: error: {text}", file=sys.stderr)
        return exc.exit_code, ""
    except ValueError as exc:
        print(f"hyptr: error: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE, ""
    text = result.text if result.text is not None else dumps(result.payload) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        stdout.write(text)
    directory = args.manifest_dir if manifest_dir == "" else manifest_dir
    if directory and command != "replay":
        inputs = {k: v for k, v in vars(args).items() if k not in ("func", "command")}
        RunManifest(command, list(argv), inputs, asdict(cfg), _versions(), time.perf_counter() - t0,
                    to_jsonable(result.residuals), hashlib.sha256(text.encode()).hexdigest(),
                    result.exit_code).write(Path(directory))
    return result.exit_code, text


def main(argv: list[str] | None = None) -> int:
    code, _ = _run(sys.argv[1:] if argv is None else list(argv))
    return code


if __name__ == "__main__":
    sys.exit(main())
