import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from polydist.cli import main

from .conftest import QUAD_COEFFS, problem_data


def _run(args, capsys):
    code = main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_auto(quad_problem, tmp_path, capsys):
    report = tmp_path / "r.json"
    code, _, _ = _run(["analyze", quad_problem, "--report", report], capsys)
    assert code == 0
    r = json.loads(report.read_text())
    assert r["path"] == "corrected"
    assert r["gamma_search"]["gamma_star"] == pytest.approx(1, abs=1e-4)
    assert r["gamma_search"]["s_star"] == pytest.approx(4, abs=1e-6)
    assert r["gamma_search"]["coalesced"] is True
    assert r["verification"]["verdict"] == "multiple (defective)"
    assert sorted(r["correction"]["eigenvalues"]) == pytest.approx([-20 / 13, 12 / 5], abs=1e-8)
    assert r["error"] is None
    assert len(r["Q"]["coefficients"]) == 3
    assert r["pre_diagnostics"]["uv_gram_gap"] == pytest.approx(0.3846, abs=1e-4)


def test_analyze_stdout(quad_problem, capsys):
    code, out, _ = _run(["analyze", quad_problem], capsys)
    assert code == 0
    assert json.loads(out)["path"] == "corrected"


def test_analyze_single_pair_fails(quad_problem, capsys):
    code, out, _ = _run(["analyze", quad_problem, "--mode", "single"], capsys)
    assert code == 2
    r = json.loads(out)
    assert r["path"] == "single-pair"
    assert r["verification"]["verdict"] == "not-an-eigenvalue"


def test_mode_from_file(tmp_path, capsys):
    path = tmp_path / "p.json"
    path.write_text(json.dumps(problem_data(QUAD_COEFFS, 3.0, mode="force-single-pair")))
    code, _, _ = _run(["analyze", path], capsys)
    assert code == 2


def test_analyze_is_deterministic(quad_problem, tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    _run(["analyze", quad_problem, "--report", a], capsys)
    _run(["analyze", quad_problem, "--report", b], capsys)
    assert a.read_bytes() == b.read_bytes()


def test_malformed_missing_coefficient(tmp_path, capsys):
    data = problem_data(QUAD_COEFFS, 3.0)
    data["coefficients"].pop()
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    code, _, err = _run(["analyze", path], capsys)
    assert code == 1
    e = json.loads(err)["error"]
    assert e["code"] == "problem_format"
    assert e["field"] == "coefficients[2]"


@pytest.mark.parametrize(
    "mutate, field",
    [
        (lambda d: d.pop("mu"), "mu"),
        (lambda d: d.pop("n"), "n"),
        (lambda d: d.__setitem__("weights", [1, 1]), "weights"),
        (lambda d: d.__setitem__("weights", [0, 1, 1]), "weights"),
        (lambda d: d["coefficients"][1][0].pop(), "coefficients[1][0]"),
        (lambda d: d.__setitem__("mu", "3"), "mu"),
        (lambda d: d.__setitem__("gamma", {"bogus": 1}), "gamma.bogus"),
        (lambda d: d.__setitem__("mode", "whatever"), "mode"),
    ],
)
def test_malformed_fields(tmp_path, capsys, mutate, field):
    data = problem_data(QUAD_COEFFS, 3.0)
    mutate(data)
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    code, _, err = _run(["analyze", path], capsys)
    assert code == 1
    assert json.loads(err)["error"]["field"] == field


def test_missing_file_and_bad_json(tmp_path, capsys):
    code, _, _ = _run(["analyze", tmp_path / "nope.json"], capsys)
    assert code == 1
    p = tmp_path / "x.json"
    p.write_text("{not json")
    code, _, _ = _run(["analyze", p], capsys)
    assert code == 1


def test_usage_error_is_exit_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["analyze"])
    assert exc.value.code == 1


def test_flat_coefficients(tmp_path, capsys):
    data = problem_data(QUAD_COEFFS, 3.0)
    data["coefficients"] = [sum(c, []) for c in data["coefficients"]]
    path = tmp_path / "flat.json"
    path.write_text(json.dumps(data))
    code, out, _ = _run(["analyze", path], capsys)
    assert code == 0


def test_computational_error_is_reported(tmp_path, capsys):
    # equal |P(mu)| blocks: the maximum sits at gamma = 0
    coeffs = [-np.diag([1.0, 2.0]), np.eye(2)]
    path = tmp_path / "deg.json"
    path.write_text(json.dumps(problem_data(coeffs, 1.5)))
    code, out, _ = _run(["analyze", path], capsys)
    assert code == 2
    assert json.loads(out)["error"]["code"] == "gamma_star_zero"


def _read_curve(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], [[float(x) for x in r] for r in rows[1:]]


def test_curve(quad_problem, tmp_path, capsys):
    out = tmp_path / "c.csv"
    code, _, _ = _run(
        ["curve", quad_problem, "--gamma-lo", 0, "--gamma-hi", 10, "--samples", 101, "--out", out],
        capsys,
    )
    assert code == 0
    assert out.read_text().splitlines()[0] == "gamma,s_2n_minus_1,s_2n_minus_2"
    header, rows = _read_curve(out)
    assert len(rows) == 101
    lo = [r[1] for r in rows]
    k = int(np.argmax(lo))
    assert rows[k][0] == pytest.approx(1.0) and lo[k] == pytest.approx(4.0, abs=1e-12)
    first = out.read_text().splitlines()[1].split(",")[1]
    assert len(first.split("e")[0].replace(".", "").lstrip("0")) >= 12


def test_curve_small(quad_problem, tmp_path, capsys):
    out = tmp_path / "c.csv"
    _run(["curve", quad_problem, "--gamma-lo", 0, "--gamma-hi", 1, "--samples", 2, "--out", out], capsys)
    assert len(_read_curve(out)[1]) == 2
    _run(["curve", quad_problem, "--gamma-lo", 0, "--gamma-hi", 0.5, "--samples", 51, "--out", out], capsys)
    lo = [r[1] for r in _read_curve(out)[1]]
    assert all(b > a for a, b in zip(lo, lo[1:]))


def test_curve_unwritable(quad_problem, tmp_path, capsys):
    code, _, _ = _run(["curve", quad_problem, "--out", tmp_path / "no" / "dir" / "c.csv"], capsys)
    assert code == 1


def test_curve_bad_range(quad_problem, capsys):
    code, _, _ = _run(["curve", quad_problem, "--gamma-lo", 2, "--gamma-hi", 1], capsys)
    assert code == 1


def test_verify_round_trip(quad_problem, tmp_path, capsys):
    report = tmp_path / "r.json"
    _run(["analyze", quad_problem, "--report", report], capsys)
    code, out, _ = _run(["verify", report], capsys)
    assert code == 0
    again = json.loads(out)["verification"]
    orig = json.loads(report.read_text())["verification"]
    for key in ("smin_ratio", "slope_residual"):
        assert again[key] == pytest.approx(orig[key], abs=1e-10)
    assert again["verdict"] == orig["verdict"]


def _q_file(tmp_path, coeffs, name, reference=None):
    data = problem_data(coeffs, 0.0)
    del data["mu"]
    if reference is not None:
        data["reference_coefficients"] = problem_data(reference, 0)["coefficients"]
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


def test_verify_files(quad_problem, tmp_path, capsys):
    report = tmp_path / "r.json"
    _run(["analyze", quad_problem, "--report", report], capsys)
    r = json.loads(report.read_text())
    good = [np.array([[complex(*x) for x in row] for row in c]) for c in r["Q"]["coefficients"]]
    path = _q_file(tmp_path, good, "good.json", reference=QUAD_COEFFS)
    assert _run(["verify", path, "--mu", "3,0"], capsys)[0] == 0

    _run(["analyze", quad_problem, "--mode", "single", "--report", report], capsys)
    r = json.loads(report.read_text())
    bad = [np.array([[complex(*x) for x in row] for row in c]) for c in r["Q"]["coefficients"]]
    code, out, _ = _run(["verify", _q_file(tmp_path, bad, "bad.json"), "--mu", "3,0"], capsys)
    assert code == 2
    assert json.loads(out)["verification"]["smin_ratio"] > 1e-2

    mu = 0.5 + 0.25j
    synth = [np.diag([mu**2, 1, 1]), np.diag([-2 * mu, 0, 0]), np.eye(3)]
    code, out, _ = _run(["verify", _q_file(tmp_path, synth, "s.json"), "--mu", "0.5,0.25"], capsys)
    assert code == 0
    assert json.loads(out)["verification"]["geometric_multiplicity"] == 1


def test_verify_needs_mu(tmp_path, capsys):
    path = _q_file(tmp_path, QUAD_COEFFS, "q.json")
    assert _run(["verify", path], capsys)[0] == 1


def test_module_entry_point(quad_problem):
    proc = subprocess.run(
        [sys.executable, "-m", "polydist", "analyze", str(quad_problem)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verification"]["multiple"] is True


def test_shipped_sample_problem(tmp_path, capsys):
    from pathlib import Path

    sample = Path(__file__).resolve().parent.parent / "problems" / "normal_quadratic.json"
    report = tmp_path / "r.json"
    code, _, _ = _run(["analyze", sample, "--report", report], capsys)
    assert code == 0
    r = json.loads(report.read_text())
    assert r["path"] == "corrected"
    assert r["gamma_search"]["s_star"] == pytest.approx(4.0, abs=1e-9)
