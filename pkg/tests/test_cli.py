from __future__ import annotations

import json

import numpy as np
import pytest

from hyptr.cli import main

X6_PLUS_1 = json.dumps({"model": "sextic", "coeffs": [1, 0, 0, 0, 0, 0, 1]})
Q = "0.1+0.05j,-0.08+0.02j,0.03-0.01j"


def run(capsys, tmp_path, *argv):
    code = main(["--manifest-dir", str(tmp_path / "runs"), *argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_invariants_json(capsys, tmp_path):
    code, out, _ = run(capsys, tmp_path, "invariants", "--curve", X6_PLUS_1)
    assert code == 0
    data = json.loads(out)
    assert data["A"] == [-240.0, 0.0]
    assert list((tmp_path / "runs").glob("invariants-*.json"))


def test_invariants_csv(capsys, tmp_path):
    code, out, _ = run(capsys, tmp_path, "invariants", "--curve", X6_PLUS_1, "--format", "csv")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header == "A,B,C,D,j1,j2,j3"
    assert complex(row.split(",")[0]) == -240


def test_degenerate_curve_exit_code(capsys, tmp_path):
    curve = json.dumps({"model": "sextic", "coeffs": list(np.poly([1, 1, 2, 3, 4, 5]).real)})
    code, _, err = run(capsys, tmp_path, "periods", "--curve", curve)
    assert code == 2
    assert "degenerate discriminant" in err


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, tmp_path, "verify", "--tolerance", "-1")[0] == 64
    assert run(capsys, tmp_path, "theta", "--char", "012", "--tau", "[[[0,1],[0,0]],[[0,0],[0,1]]]")[0] == 64
    assert run(capsys, tmp_path, "recurse", "--g", "5", "--n", "1", "--q", Q)[0] == 64
    assert run(capsys, tmp_path, "recurse", "--g", "0", "--n", "2", "--q", Q)[0] == 64
    assert run(capsys, tmp_path, "nonsense")[0] == 64


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"quad_nodes": 0}))
    assert run(capsys, tmp_path, "--config", str(cfg), "periods", "--curve", X6_PLUS_1)[0] == 64
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(capsys, tmp_path, "--config", str(cfg), "periods", "--curve", X6_PLUS_1)[0] == 64


def test_theta_parity(capsys, tmp_path):
    tau = "[[[0,1.1],[0.2,0.1]],[[0.2,0.1],[0,0.9]]]"
    code, out, _ = run(capsys, tmp_path, "theta", "--char", "1111", "--tau", tau)
    data = json.loads(out)
    assert code == 0 and data["parity"] == 0
    assert abs(complex(*data["value"])) > 0
    code, out, _ = run(capsys, tmp_path, "theta", "--char", "1010", "--tau", tau)
    data = json.loads(out)
    assert data["parity"] == 1 and abs(complex(*data["value"])) < 1e-12


def test_recurse_omega03_matches_closed_form(capsys, tmp_path):
    pts = json.dumps([[[0.3, 0.2], [-0.4, 0.1, -1], [0.7, -0.5]]])
    code, out, _ = run(capsys, tmp_path, "recurse", "--g", "0", "--n", "3", "--q", Q, "--points", pts)
    assert code == 0
    data = json.loads(out)
    assert data["max_pole_order"] == 2 and data["max_total_pole_order"] == 6
    ev = data["evaluations"][0]
    v, c = complex(*ev["value"]), complex(*ev["closed_form"])
    assert abs(v - c) < 1e-8 * abs(c)


def test_recurse_omega11_derivative_order(capsys, tmp_path):
    code, out, _ = run(capsys, tmp_path, "recurse", "--g", "1", "--n", "1", "--q", Q)
    data = json.loads(out)
    assert code == 0
    assert data["max_derivative_order"] == 3 and data["max_pole_order"] == 4


def test_schiffer_marking_independent(capsys, tmp_path):
    pts = json.dumps([[[0.3, 0.2]]])
    gamma = json.dumps([[1, 0, 0, 0], [0, 1, 0, 0], [1, 1, 1, 0], [1, 0, 0, 1]])
    base = ["recurse", "--g", "1", "--n", "1", "--q", Q, "--points", pts]
    vals = {}
    for kernel in ("bergman", "schiffer"):
        a = json.loads(run(capsys, tmp_path, *base, "--kernel", kernel)[1])
        b = json.loads(run(capsys, tmp_path, *base, "--kernel", kernel, "--gamma", gamma)[1])
        va, vb = complex(*a["evaluations"][0]["value"]), complex(*b["evaluations"][0]["value"])
        vals[kernel] = abs(va - vb) / abs(va)
    assert vals["schiffer"] < 1e-6
    assert vals["bergman"] > 1e-4


def test_free_energy(capsys, tmp_path):
    for g in ("1", "2"):
        code, out, _ = run(capsys, tmp_path, "free-energy", "--g", g, "--q", Q)
        assert code == 0
        assert json.loads(out)["g"] == int(g)


def test_mirror_maps(capsys, tmp_path):
    code, out, _ = run(capsys, tmp_path, "mirror-maps", "--degree", "3", "--q", Q)
    data = json.loads(out)
    assert code == 0
    assert [[0, 0, 1], "-1"] in data["A4"] and [[0, 0, 2], "-3/2"] in data["A4"]
    assert data["A1"] == []
    assert run(capsys, tmp_path, "mirror-maps", "--degree", "13")[0] == 64


def test_verify_deterministic_and_thread_independent(capsys, tmp_path, monkeypatch):
    args = ("verify", "--suite", "all", "--seed", "42", "--items", "1")
    code, first, _ = run(capsys, tmp_path, *args)
    assert code == 0
    assert json.loads(first)["passed"]
    assert run(capsys, tmp_path, *args)[1] == first
    monkeypatch.setenv("HYPTR_THREADS", "4")
    assert run(capsys, tmp_path, *args)[1] == first


def test_verify_failure_exit_code(capsys, tmp_path):
    code, out, _ = run(capsys, tmp_path, "verify", "--suite", "periods", "--tolerance", "1e-30")
    assert code == 1
    assert not json.loads(out)["passed"]


def test_replay(capsys, tmp_path):
    run(capsys, tmp_path, "invariants", "--curve", X6_PLUS_1)
    (manifest,) = (tmp_path / "runs").glob("invariants-*.json")
    data = json.loads(manifest.read_text())
    assert data["exit_code"] == 0 and data["command"] == "invariants"
    code, out, _ = run(capsys, tmp_path, "replay", str(manifest))
    assert code == 0 and json.loads(out)["reproduced"]
    data["output_sha256"] = "0" * 64
    manifest.write_text(json.dumps(data))
    assert run(capsys, tmp_path, "replay", str(manifest))[0] == 1


def test_output_file(capsys, tmp_path):
    target = tmp_path / "out.json"
    code, out, _ = run(capsys, tmp_path, "--output", str(target), "invariants", "--curve", X6_PLUS_1)
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["A"] == [-240.0, 0.0]
