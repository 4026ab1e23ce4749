import io
import json
import subprocess
import sys

import pytest

from conicsens.cli import run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_solve(fixtures_dir):
    code, out, _ = call("solve", str(fixtures_dir / "example_5_1.json"))
    data = json.loads(out)
    assert code == 0 and data["status"] == "Optimal"
    assert data["value"] == pytest.approx(1.0, abs=1e-6)


def test_analyze_obj(fixtures_dir):
    code, out, _ = call("analyze-obj", str(fixtures_dir / "example_6_1.json"),
                        "--direction", "[0,-1]", "--t-grid", "0.5,0.1")
    data = json.loads(out)
    assert code == 0
    assert data["upper_slope"] == pytest.approx(0.0, abs=1e-6)
    assert data["lower_slope"] == "-inf"
    assert [row[0] for row in data["fd_table"]] == [0.5, 0.1]


def test_analyze_rhs_on_empty_problem(fixtures_dir):
    code, out, err = call("analyze-rhs", str(fixtures_dir / "empty.json"), "--direction", "[1,0]")
    data = json.loads(out)
    assert code == 2
    assert data["error"] == "hypothesis_violation"
    assert data["hypothesis"] == "primal_strict_feasibility"
    assert err


def test_verify(fixtures_dir):
    code, out, _ = call("verify", str(fixtures_dir / "example_5_1.json"), "--direction", "[1,2,3]")
    data = json.loads(out)
    assert code == 0 and data["pass"] and data["monotone"]
    assert len(data["fd_table"]) == 5


def test_verify_obj_kind(fixtures_dir):
    code, out, _ = call("verify", str(fixtures_dir / "example_6_1.json"), "--direction", "[0,-1]",
                        "--kind", "obj", "--t-grid", "1e-2,1e-3,1e-4")
    assert code == 0 and json.loads(out)["pass"]


def test_certify_and_probe(fixtures_dir):
    code, out, _ = call("certify", str(fixtures_dir / "example_5_1.json"))
    data = json.loads(out)
    assert code == 0 and data["primal"]["strictly_feasible"] and data["dual"]["strictly_feasible"]
    code, out, _ = call("probe", str(fixtures_dir / "example_5_1.json"), "--samples", "5")
    data = json.loads(out)
    assert code == 0 and data["dual_solutions_bounded"] and data["seed"] == 42


def test_direction_from_file(fixtures_dir, tmp_path):
    path = tmp_path / "d.json"
    path.write_text("[1, 0, 0]")
    code, out, _ = call("analyze-rhs", str(fixtures_dir / "example_5_1.json"),
                        "--direction", str(path))
    assert code == 0 and json.loads(out)["derivative"] == pytest.approx(-1.0, abs=1e-6)


@pytest.mark.parametrize("argv", [
    ("solve", "missing.json"),
    ("analyze-rhs", "{fx}/example_5_1.json", "--direction", "[1,0]"),
    ("analyze-rhs", "{fx}/example_5_1.json", "--direction", "not-a-file"),
    ("analyze-rhs", "{fx}/example_5_1.json", "--direction", "[1,0,0]", "--t-grid", "0.01,0.1"),
])
def test_input_errors(fixtures_dir, argv):
    code, out, err = call(*(a.format(fx=fixtures_dir) for a in argv))
    assert code == 3 and out == "" and "input error" in err


def test_malformed_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"A": [[1]], "b": [0]')
    code, _, err = call("solve", str(path))
    assert code == 3 and "input error" in err


def test_numerical_failure(tmp_path):
    # a generator-form polyhedral cone is accepted by the schema but not by the solver
    path = tmp_path / "v.json"
    path.write_text(json.dumps({"n": 1, "m": 2, "A": [[1.0], [0.0]], "b": [0.0, 0.0], "c": [1.0],
                                "cone": {"blocks": [{"type": "generated",
                                                     "G": [[1, 0], [0, 1]]}]}}))
    code, _, err = call("solve", str(path))
    assert code == 4 and err


def test_repeatable_output(fixtures_dir):
    argv = ("probe", str(fixtures_dir / "example_5_1.json"), "--samples", "5", "--seed", "7")
    assert call(*argv)[1] == call(*argv)[1]


def test_text_format(fixtures_dir):
    code, out, _ = call("solve", str(fixtures_dir / "example_4_1.json"), "--format", "text")
    assert code == 0 and out.startswith("status: ")


def test_console_entry_point(fixtures_dir):
    proc = subprocess.run([sys.executable, "-m", "conicsens", "solve",
                           str(fixtures_dir / "example_5_2.json")],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    data = json.loads(proc.stdout)
    assert data["status"] == "Optimal"
    assert data["value"] == pytest.approx(-1.0, abs=1e-6)
