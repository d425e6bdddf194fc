import csv
import io
import json
import math
import subprocess
import sys

import pytest

from qlocal.cli import DEFAULT_SEED, main, parse_angle, resolve_seed


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_singlet(capsys):
    code, out, _ = run(capsys, "eval", "singlet_canonical")
    assert code == 0
    doc = json.loads(out)
    assert doc["details"]["chsh"] == pytest.approx(2 * math.sqrt(2), abs=1e-9)
    reports = {r["name"]: r for r in doc["reports"]}
    assert not reports["bell"]["satisfied"]
    assert reports["cirelson"]["satisfied"]
    assert reports["circle"]["value"] == pytest.approx(2, abs=1e-9)
    assert doc["no_signaling"]["ok"]
    assert doc["details"]["lhv"]["member"] is False


def test_eval_product(capsys):
    code, out, _ = run(capsys, "eval", "product_zz")
    doc = json.loads(out)
    assert code == 0
    assert all(r["satisfied"] for r in doc["reports"])
    assert doc["details"]["lhv"]["member"] is True


def test_eval_unsharp(capsys):
    code, out, _ = run(capsys, "eval", "unsharp_povm")
    doc = json.loads(out)
    assert code == 0
    assert doc["details"]["chsh"] == pytest.approx(0.9 * 2 * math.sqrt(2), abs=1e-9)


def test_eval_noncommuting_exit_3(capsys):
    code, out, err = run(capsys, "eval", "noncommuting_joint")
    assert code == 3 and out == ""
    assert "commute" in err


def test_eval_bad_file_exit_2(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"schema_version": 1, "state": {"kind": "pure", "entries": [[1, 0]]}, "alice": []}')
    code, _, err = run(capsys, "eval", str(p))
    assert code == 2
    assert "alice" in err


def test_numerical_failure_exit_4(capsys, monkeypatch):
    from qlocal import linalg
    monkeypatch.setattr(linalg, "JACOBI_MAX_SWEEPS", 0)
    code, _, err = run(capsys, "eval", "unsharp_povm")
    assert code == 4 and "converge" in err


def test_sweep_csv(capsys):
    code, out, _ = run(capsys, "sweep", "product_zz", "--steps", "4")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [float(r["value"]) for r in rows] == pytest.approx([0, 2, 0, 2], abs=1e-12)
    assert all(float(r["bound"]) == 2 for r in rows)


def test_circle_csv(capsys):
    code, out, _ = run(capsys, "circle", "--steps", "8", "--seed", "4")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert set(rows[0]) == {"series", "phi", "x", "y", "radius", "converged"}
    circle = [r for r in rows if r["series"] == "circle"]
    assert len(circle) == 8
    assert all(2 - 1e-3 <= float(r["radius"]) <= 2 + 1e-9 for r in circle)
    axis = {(float(r["x"]), float(r["y"])) for r in rows if r["series"] == "axis_square"}
    assert axis == {(2, 2), (-2, 2), (-2, -2), (2, -2)}
    slanted = {(float(r["x"]), float(r["y"])) for r in rows if r["series"] == "slanted_square"}
    s = 2 * math.sqrt(2)
    assert slanted == {(s, 0), (0, s), (-s, 0), (0, -s)}


def test_prbox(capsys):
    code, out, _ = run(capsys, "prbox", "--canonical")
    doc = json.loads(out)
    assert code == 0 and doc["details"]["chsh"] == 4
    assert doc["no_signaling"] == {"ok": True, "max_violation": 0.0}


def test_prbox_axes(capsys):
    code, out, _ = run(capsys, "prbox", "--axes", "0,0,0,0")
    assert json.loads(out)["details"]["chsh"] == 2
    code, out, _ = run(capsys, "prbox", "--axes", "0,pi/4,pi/2,3pi/4")
    assert json.loads(out)["details"]["chsh"] == 4


def test_prbox_sample(capsys):
    argv = ("prbox-sample", "--theta", "pi/2", "--count", "100000", "--seed", "7")
    code, out1, _ = run(capsys, *argv)
    _, out2, _ = run(capsys, *argv)
    d1, d2 = json.loads(out1), json.loads(out2)
    assert code == 0 and d1["details"] == d2["details"]
    assert all(abs(v - 0.25) <= 0.01 for v in d1["details"]["frequencies"].values())
    assert d1["metadata"]["seed"] == 7
    assert "PCG64" in d1["metadata"]["rng_algorithm"]


def test_protocol(capsys):
    code, out, _ = run(capsys, "protocol")
    doc = json.loads(out)
    assert code == 0
    assert doc["details"]["chsh"] == pytest.approx(4, abs=1e-12)
    assert doc["details"]["invariant_procedure"] is False
    assert doc["details"]["per_wing_nosignal"] is True
    for m in doc["details"]["marginals"].values():
        assert m["alice_plus"] == pytest.approx(0.5, abs=1e-12)
        assert m["bob_plus"] == pytest.approx(0.5, abs=1e-12)


def test_optimize_chsh(capsys):
    code, out, _ = run(capsys, "optimize", "--target", "chsh", "--budget", "20000", "--seed", "1")
    doc = json.loads(out)
    assert code == 0 and doc["details"]["converged"]
    assert doc["details"]["best_value"] >= 2 * math.sqrt(2) - 1e-4


def test_optimize_rotated_with_state_file(capsys):
    code, out, _ = run(capsys, "optimize", "--target", "rotated", "--phi", "pi/4", "--budget", "8000",
                       "--state", "singlet_canonical", "--seed", "2")
    doc = json.loads(out)
    assert code == 0 and doc["details"]["converged"]
    assert doc["details"]["phi"] == pytest.approx(math.pi / 4)


def test_optimize_product_state_file(capsys):
    code, out, _ = run(capsys, "optimize", "--state", "product_zz", "--budget", "8000")
    doc = json.loads(out)
    assert doc["details"]["best_value"] == pytest.approx(2, abs=1e-4)
    assert doc["details"]["converged"] is False


def test_deterministic_output(capsys, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    outs = [run(capsys, "optimize", "--budget", "2000", "--seed", "9")[1] for _ in range(2)]
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["metadata"]["timestamp"].startswith("2023-11-14")


def test_seed_resolution(monkeypatch):
    monkeypatch.delenv("QLOCAL_SEED", raising=False)
    assert resolve_seed(None) == DEFAULT_SEED
    monkeypatch.setenv("QLOCAL_SEED", "42")
    assert resolve_seed(None) == 42
    assert resolve_seed(3) == 3


def test_seed_env_used(capsys, monkeypatch):
    monkeypatch.setenv("QLOCAL_SEED", "17")
    _, out, _ = run(capsys, "prbox-sample", "--theta", "1", "--count", "10")
    assert json.loads(out)["metadata"]["seed"] == 17
    monkeypatch.setenv("QLOCAL_SEED", "zzz")
    code, _, err = run(capsys, "prbox-sample", "--theta", "1", "--count", "10")
    assert code == 2 and "QLOCAL_SEED" in err


def test_output_file(capsys, tmp_path):
    target = tmp_path / "r.json"
    assert main(["protocol", "-o", str(target)]) == 0
    assert json.loads(target.read_text())["command"] == "protocol"


@pytest.mark.parametrize("text,value", [("0.5", 0.5), ("pi", math.pi), ("pi/4", math.pi / 4),
                                        ("3pi/4", 3 * math.pi / 4), ("-2*pi/3", -2 * math.pi / 3)])
def test_parse_angle(text, value):
    assert parse_angle(text) == pytest.approx(value)


def test_bad_theta(capsys):
    code, _, _ = run(capsys, "prbox-sample", "--theta", "4", "--count", "10")
    assert code == 2


def test_scenarios_listing(capsys):
    _, out, _ = run(capsys, "scenarios")
    assert "singlet_canonical" in out.split()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qlocal", "eval", "noncommuting_joint"],
                          capture_output=True, text=True)
    assert proc.returncode == 3
