import json
import math
import subprocess
import sys

import pytest

from baker_sunit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_bound_branch1(capsys):
    code, out, _ = run(capsys, "bound", "--field", "Q", "--S", "2,3", "--alpha", "1", "--beta", "1")
    assert code == 0
    data = json.loads(out)
    assert data["schema"] == 1 and data["branch"] == "archimedean"
    assert data["equation"]["alpha"] == "1"


def test_bound_branch2(capsys):
    code, out, _ = run(capsys, "bound", "--S", "2,3,5,7,11", "--alpha", "1", "--beta", "1")
    data = json.loads(out)
    assert code == 0 and data["branch"] == "finite-P'S" and data["P_prime_S"] == 5


def test_bound_trivial(capsys):
    code, out, _ = run(capsys, "bound", "--S", "", "--alpha", "1", "--beta", "1")
    data = json.loads(out)
    assert data["branch"] == "trivial-s<=2"
    assert data["bound"] == pytest.approx(4 * math.pi + math.log(2), rel=1e-9)


def test_bound_formats(capsys):
    _, tsv, _ = run(capsys, "bound", "--S", "2", "--alpha", "1", "--beta", "1", "--format", "tsv")
    assert "branch\ttrivial-s<=2" in tsv.splitlines()
    _, human, _ = run(capsys, "bound", "--S", "2", "--alpha", "1", "--beta", "1", "--format", "human")
    assert human.startswith("branch: trivial")


def test_bound_quadratic(capsys):
    code, out, _ = run(
        capsys, "bound", "--field", "quadratic", "--D", "2", "--S", "7:0",
        "--alpha", "1+1*sqrt2", "--beta", "1",
    )
    assert code == 0
    data = json.loads(out)
    assert data["equation"]["field"] == {"kind": "real_quadratic", "D": 2}
    assert data["s"] == 3


def test_solve_three_solutions(capsys):
    code, out, _ = run(capsys, "solve", "--S", "2", "--alpha", "1", "--beta", "1", "--cap", "8")
    lines = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and len(lines) == 3
    assert {(d["x"], d["y"]) for d in lines} == {("-1", "2"), ("1/2", "1/2"), ("2", "-1")}


def test_solve_swap_closed(capsys):
    _, out, _ = run(capsys, "solve", "--S", "2,3", "--alpha", "1", "--beta", "1", "--cap", "6")
    pairs = {(d["x"], d["y"]) for d in map(json.loads, out.splitlines())}
    assert pairs == {(y, x) for x, y in pairs}


def test_solve_usage_errors(capsys):
    code, out, err = run(capsys, "solve", "--S", "2", "--alpha", "1", "--beta", "1", "--cap", "0")
    assert code == 2 and out == "" and "cap" in err
    code, out, _ = run(capsys, "solve", "--S", "2,2", "--alpha", "1", "--beta", "1")
    assert code == 2 and out == ""
    code, out, _ = run(capsys, "solve", "--S", "2", "--alpha", "0", "--beta", "1")
    assert code == 2 and out == ""
    code, out, _ = run(capsys, "solve", "--S", "4", "--alpha", "1", "--beta", "1")
    assert code == 2 and out == ""
    code, _, _ = run(capsys, "bound", "--field", "quadratic", "--S", "7", "--alpha", "1", "--beta", "1")
    assert code == 2
    code, _, _ = run(capsys, "bound", "--field", "quadratic", "--D", "10", "--S", "3",
                     "--alpha", "1", "--beta", "1")
    assert code == 2


def test_resource_limit(capsys, monkeypatch):
    monkeypatch.setenv("BAKER_WORK_LIMIT", "50")
    code, out, err = run(capsys, "solve", "--S", "2,3", "--alpha", "1", "--beta", "1", "--cap", "12")
    assert code == 4 and out == "" and "work limit" in err


def test_verify_pass(capsys):
    code, out, _ = run(capsys, "verify", "--S", "2,3", "--alpha", "1", "--beta", "1")
    assert code == 0 and out.startswith("PASS margin")
    code, out, _ = run(capsys, "verify", "--S", "2,3", "--alpha", "3", "--beta", "5", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["verdict"] == "PASS" and data["margin"] > 0


def test_verify_fail_with_fake_bound(capsys):
    code, out, _ = run(
        capsys, "verify", "--S", "2,3", "--alpha", "1", "--beta", "1", "--override-bound", "0"
    )
    assert code == 1 and out.startswith("FAIL")


def test_missing_constants(capsys, tmp_path):
    code, out, _ = run(capsys, "bound", "--S", "2,3", "--alpha", "1", "--beta", "1", "--closed-form")
    assert code == 3 and out == ""
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"gy_c26": 1e20, "gy_c1": 1e21}))
    code, out, _ = run(
        capsys, "bound", "--S", "2,3", "--alpha", "1", "--beta", "1",
        "--closed-form", "--constants", str(path),
    )
    assert code == 0 and "c26_bound" in json.loads(out)["closed_form"]


def _write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_tubular_curve(capsys, tmp_path):
    path = _write(tmp_path, "curve.json",
                  {"n": 3, "finite": [[1], [2], [3]], "contained": [[1, 2], [1, 3], [2, 3]]})
    code, out, _ = run(capsys, "tubular", "--incidence", path)
    assert code == 0
    assert out.splitlines()[0] == "m_B=1 m_Y=1; condition ⇔ r_fin < 3"
    _, out, _ = run(capsys, "tubular", "--incidence", path, "--format", "json", "--caps", "2,4")
    data = json.loads(out)
    assert data["signatures"] == [[a, b] for a in (1, 2) for b in (0, 1, 2)]


def test_tubular_no_baker_number(capsys, tmp_path):
    path = _write(tmp_path, "none.json", {"n": 3, "finite": [], "contained": [[1, 2, 3]]})
    code, out, _ = run(capsys, "tubular", "--incidence", path)
    assert code == 0 and out.strip() == "m_B does not exist"


def test_tubular_pairwise_finite_points_in_Y(capsys, tmp_path):
    path = _write(tmp_path, "pairs.json",
                  {"n": 3, "finite": [[1, 2], [1, 3], [2, 3]], "contained": [[1], [2], [3]]})
    _, out, _ = run(capsys, "tubular", "--incidence", path, "--format", "json")
    data = json.loads(out)
    assert (data["m_B"], data["m_Y"], data["condition"]) == (2, 0, "r_inf < 3")


def test_tubular_non_monotone(capsys, tmp_path):
    path = _write(tmp_path, "bad.json", {"n": 3, "finite": [[1]], "finite_false": [[1, 2]]})
    code, out, _ = run(capsys, "tubular", "--incidence", path)
    assert code == 2 and out == ""
    code, _, _ = run(capsys, "tubular", "--incidence", str(tmp_path / "missing.json"))
    assert code == 2


def test_byte_identical_output():
    cmd = [sys.executable, "-m", "baker_sunit", "solve", "--S", "2,3,5", "--alpha", "3",
           "--beta", "5", "--cap", "6"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a
    cmd = [sys.executable, "-m", "baker_sunit", "bound", "--S", "2,3", "--alpha", "1", "--beta", "1"]
    assert subprocess.run(cmd, capture_output=True).stdout == subprocess.run(
        cmd, capture_output=True).stdout
