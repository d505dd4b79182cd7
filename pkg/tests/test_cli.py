import csv
import io
import json
import math
import subprocess
import sys

import pytest

from abcmero import cli, nt_abc
from abcmero.cli import SCHEMA, main
from abcmero.parser import parse_rational


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    doc = json.loads(out)
    assert doc["schema"] == SCHEMA
    return code, doc["result"]


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("QUAD_TOL", "ROOT_TOL", "CLUSTER_TOL", "GUARD_REL", "MAX_QUAD_POINTS", "OUTPUT_FORMAT", "WORKERS"):
        monkeypatch.delenv("ABCMERO_" + name, raising=False)


# ---------------------------------------------------------------- pj


def test_pj_ok(capsys):
    code, rows = run_json(capsys, "pj", "--f", "z", "--rho", "2")
    assert code == 0
    assert abs(rows[0]["residual"]) < 1e-12
    assert rows[0]["ok"] is True


def test_pj_jensen_case(capsys):
    code, rows = run_json(capsys, "pj", "--f", "(z-1/2)", "--rho", "1")
    assert code == 0
    assert abs(rows[0]["residual"]) < 1e-12


def test_pj_site_on_circle(capsys):
    code, out, err = run(capsys, "pj", "--f", "z-1", "--rho", "1")
    assert code == 2
    assert "site on circle" in err
    assert out == ""


def test_pj_from_file(capsys, tmp_path):
    src = tmp_path / "funcs.txt"
    src.write_text("# two functions\nz^2+1\n(z-3)/(z+1/2)\n", encoding="utf-8")
    code, rows = run_json(capsys, "pj", "--file", str(src), "--rho", "2")
    assert code == 0
    assert [r["f"] for r in rows] == ["z^2+1", "(z-3)/(z+1/2)"]


def test_parse_error_exit_code(capsys):
    code, _, err = run(capsys, "pj", "--f", "z^", "--rho", "2")
    assert code == 2
    assert "position" in err


# ---------------------------------------------------------------- abc-mero


def test_abc_mero_anchor(capsys):
    code, res = run_json(capsys, "abc-mero", "--a", "z", "--b", "-1", "--c", "1-z", "--rho", "2", "--json")
    assert code == 0
    assert res["h"] == pytest.approx(0.7834, abs=1e-4)
    assert res["r"] == pytest.approx(res["h"], abs=1e-9)
    assert abs(res["slack"]) < 1e-9
    assert res["holds"] is True
    assert [parse_rational(t) for t in res["triple"]] == [parse_rational(t) for t in ("z", "-1", "1-z")]


def test_violations_map_to_exit_code_one(capsys, monkeypatch):
    monkeypatch.setattr(cli.nv, "pj_residual", lambda f, rho, cfg: 1e-3)
    code, rows = run_json(capsys, "pj", "--f", "z", "--rho", "2")
    assert code == 1
    assert rows[0]["ok"] is False
    monkeypatch.setattr(nt_abc, "psi", lambda h: 0.0)
    code, rows = run_json(capsys, "abc-int", "--triple", "1,8,-9")
    assert code == 1
    assert rows[0]["holds"] is False


def test_abc_mero_small_rho(capsys):
    code, _, err = run(capsys, "abc-mero", "--a", "z", "--b", "-1", "--c", "1-z", "--rho", "0.5")
    assert code == 2
    assert "rho must be >= 1" in err


def test_abc_mero_constant_point(capsys):
    code, _, err = run(capsys, "abc-mero", "--a", "1", "--b", "1", "--c", "-2", "--rho", "2")
    assert code == 2
    assert "constant point" in err


def test_abc_mero_oracle(capsys):
    code, res = run_json(capsys, "abc-mero", "--oracle", "sincos", "--rho", "2.2")
    assert code == 0
    assert res["slack"] >= -1e-6


def test_abc_mero_missing_coordinate(capsys):
    code, _, err = run(capsys, "abc-mero", "--a", "z", "--rho", "2")
    assert code == 2


def test_json_is_byte_identical(capsys):
    argv = ["abc-mero", "--a", "z^2+1", "--b", "-2*z", "--c", "2*z-z^2-1", "--rho", "3.7"]
    first = run(capsys, *argv)[1]
    second = run(capsys, *argv)[1]
    assert first == second


def test_json_numbers_have_twelve_digits(capsys):
    _, out, _ = run(capsys, "abc-mero", "--a", "z", "--b", "-1", "--c", "1-z", "--rho", "2")
    assert '"h": 0.783399618486' in out


# ---------------------------------------------------------------- scan


def test_scan_writes_csv(capsys, tmp_path):
    target = tmp_path / "scan.csv"
    code, out, _ = run(
        capsys, "scan", "--a", "z", "--b", "-1", "--c", "1-z",
        "--rho-min", "1", "--rho-max", "100", "--steps", "200", "--C", "10", "--out", str(target),
    )
    assert code == 0
    rows = list(csv.DictReader(target.open(encoding="utf-8")))
    assert len(rows) == 200
    assert list(rows[0]) == ["rho", "h", "r_na", "r_arch", "bound", "exceeds", "masked"]
    summary = json.loads(out)["result"]["summary"]
    assert summary["rows"] == 200
    assert summary["exceptional_fraction"] < 0.05


def test_scan_single_step(capsys):
    code, res = run_json(capsys, "scan", "--a", "z", "--b", "-1", "--c", "1-z", "--rho-min", "2", "--rho-max", "5", "--steps", "1")
    assert code == 0
    assert len(res["rows"]) == 1


def test_scan_rejects_small_rho(capsys):
    code, _, err = run(capsys, "scan", "--a", "z", "--b", "-1", "--c", "1-z", "--rho-min", "0.5", "--rho-max", "3")
    assert code == 2


def test_scan_csv_to_stdout(capsys):
    code, out, err = run(
        capsys, "scan", "--a", "z", "--b", "-1", "--c", "1-z", "--rho-min", "1", "--rho-max", "3", "--steps", "5", "--format", "csv",
    )
    assert code == 0
    assert out.splitlines()[0] == "rho,h,r_na,r_arch,bound,exceeds,masked"
    assert len(out.splitlines()) == 6
    assert "exceptional_measure" in err


def test_scan_from_file(capsys, tmp_path):
    src = tmp_path / "triple.txt"
    src.write_text("z^5\n-1\n1-z^5\n", encoding="utf-8")
    code, res = run_json(capsys, "scan", "--file", str(src), "--rho-min", "2", "--rho-max", "4", "--steps", "3")
    assert code == 0
    assert len(res["rows"]) == 3


# ---------------------------------------------------------------- proximity and lemma


def test_proximity(capsys):
    code, rows = run_json(capsys, "proximity", "--f", "z", "--f", "1/z", "--rho", "2")
    assert code == 0
    assert rows[0]["m"] == pytest.approx(0.5 * math.log(5), abs=1e-11)
    assert rows[1]["m"] == pytest.approx(0.5 * math.log(1.25), abs=1e-11)


def test_logder_lemma(capsys):
    code, rows = run_json(capsys, "logder-lemma", "--f", "z^4", "--rho", "10")
    assert code == 0
    assert rows[0]["margin"] < 0


def test_logder_lemma_constant(capsys):
    code, _, err = run(capsys, "logder-lemma", "--f", "3", "--rho", "10")
    assert code == 2


# ---------------------------------------------------------------- integers


def test_abc_int(capsys):
    code, rows = run_json(capsys, "abc-int", "--triple", "1,8,-9")
    assert code == 0
    assert rows[0]["holds"] is True
    assert rows[0]["quality_classical"] == pytest.approx(1.22629, abs=1e-5)


def test_abc_int_sum_nonzero(capsys):
    code, _, err = run(capsys, "abc-int", "--triple", "1,2,3")
    assert code == 2
    assert "sum nonzero" in err


def test_abc_int_csv(capsys):
    code, out, _ = run(capsys, "abc-int", "--triple", "2,16,-18", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert (rows[0]["a"], rows[0]["b"], rows[0]["c"]) == ("1", "8", "-9")


def test_abc_int_file(capsys, tmp_path):
    src = tmp_path / "triples.txt"
    src.write_text("1,8,-9\n2, 6436341, -6436343\n", encoding="utf-8")
    code, rows = run_json(capsys, "abc-int", "--file", str(src))
    assert code == 0
    assert len(rows) == 2


def test_abc_scan(capsys):
    code, res = run_json(capsys, "abc-scan", "--max-c", "10", "--top", "1")
    assert code == 0
    assert res["top"][0]["triple"] == [1, 8, -9]
    assert res["violations"] == []


def test_product_formula(capsys):
    code, rows = run_json(capsys, "product-formula", "--x", "12", "--x", "5/9", "--x", "1")
    assert code == 0
    assert [r["x"] for r in rows] == ["12/1", "5/9", "1/1"]
    assert all(abs(r["residual"]) < 1e-12 for r in rows)


def test_product_formula_zero(capsys):
    code, _, _ = run(capsys, "product-formula", "--x", "0")
    assert code == 2


# ---------------------------------------------------------------- configuration


def test_env_fallback_and_flag_precedence(capsys, monkeypatch):
    monkeypatch.setenv("ABCMERO_QUAD_TOL", "1e-7")
    _, out, _ = run(capsys, "pj", "--f", "z", "--rho", "2")
    assert json.loads(out)["config"]["quad_tol"] == 1e-7
    _, out, _ = run(capsys, "pj", "--f", "z", "--rho", "2", "--quad-tol", "1e-9")
    assert json.loads(out)["config"]["quad_tol"] == 1e-9


def test_env_output_format(capsys, monkeypatch):
    monkeypatch.setenv("ABCMERO_OUTPUT_FORMAT", "csv")
    _, out, _ = run(capsys, "proximity", "--f", "z", "--rho", "2")
    assert out.splitlines()[0] == "f,rho,m"


def test_invalid_config_is_input_error(capsys):
    code, _, err = run(capsys, "pj", "--f", "z", "--rho", "2", "--quad-tol", "-1")
    assert code == 2
    assert "quad_tol" in err


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "abcmero.cli", "abc-int", "--triple", "3,5,-8"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"][0]["triple"] == [3, 5, -8]
