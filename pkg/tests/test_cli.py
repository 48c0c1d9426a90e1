import io
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from funceq.cli import EXIT_NUMERIC, EXIT_SPEC, RunConfig, main, parse_spec_text, run
from funceq.oracle import coeffs_by_recurrence_23

SPECS = Path(__file__).resolve().parent.parent / "specs"
TREE = SPECS / "tree23.txt"


def _run(**kw):
    out, err = io.StringIO(), io.StringIO()
    code = run(RunConfig(spec_path=kw.pop("spec", TREE), **kw), out, err)
    return code, out.getvalue(), err.getvalue()


def _rows(text):
    lines = text.strip().splitlines()
    return lines[0].split(","), [line.split(",") for line in lines[1:]]


def test_analyze():
    code, out, _ = _run(command="analyze")
    assert code == 0
    vals = dict(line.split(" = ") for line in out.strip().splitlines())
    assert float(vals["q"]) == pytest.approx(0.6180339887498949, abs=1e-15)
    assert float(vals["alpha"]) == pytest.approx(-1.404334094295159, abs=1e-13)
    assert float(vals["beta"]) == pytest.approx(0.8679262018347077, abs=1e-14)
    assert float(vals["Psi''(q)"]) == pytest.approx(1.734069734408988, abs=1e-12)


def test_spectrum_first_row():
    code, out, _ = _run(command="spectrum")
    assert code == 0
    header, rows = _rows(out)
    assert header == ["m", "re_lambda_hat", "im_lambda_hat", "re_ratio", "im_ratio"]
    assert len(rows) == 10
    m, re, im, rre, rim = rows[0]
    assert m == "1"
    assert abs(float(re) + 0.10417) <= 2e-5 and abs(float(im) - 0.0052295) <= 2e-7
    assert abs(float(rre) + 0.033869) <= 2e-6 and abs(float(rim) - 0.0013274) <= 2e-7


def test_compare_small():
    code, out, _ = _run(command="compare", n_max=100)
    assert code == 0
    header, rows = _rows(out)
    assert header[:3] == ["n", "exact", "est_R1"]
    assert len(rows) == 100
    q = 0.6180339887498949
    exact = coeffs_by_recurrence_23(100).coeffs
    for n in (1, 50, 100):
        assert float(rows[n - 1][1]) == pytest.approx(n * q ** n * exact[n - 1], rel=1e-11)


def test_kfuncs():
    code, out, _ = _run(command="kfuncs")
    header, rows = _rows(out)
    assert header == ["x", "K1", "K2", "K3"]
    k1 = np.array([float(r[1]) for r in rows])
    assert k1.mean() == pytest.approx(0.7120812661761263, abs=1e-10)


def test_exact_csv():
    code, out, _ = _run(command="exact", n_max=9)
    header, rows = _rows(out)
    assert header == ["n", "phi_n", "normalized"]
    assert [int(r[1]) for r in rows] == [1, 1, 1, 1, 2, 2, 3, 4, 5]


def test_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert _run(command="spectrum", out_path=a)[0] == 0
    assert _run(command="spectrum", out_path=b)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_out_file_suppresses_stdout(tmp_path):
    code, out, _ = _run(command="exact", n_max=5, out_path=tmp_path / "e.csv")
    assert code == 0 and out == ""
    assert (tmp_path / "e.csv").read_text().startswith("n,phi_n")


def test_bad_spec_exit_code(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("P = 0, 1\n")
    code, _, err = _run(spec=bad, command="analyze")
    assert code == EXIT_SPEC
    assert err.startswith("error [parse]")


def test_invalid_spec_exit_code(tmp_path):
    # Q'(0) = 1/2 != 0: fine for a fixed point but not for the full pipeline
    spec = tmp_path / "s.txt"
    spec.write_text("P = 1, 1\nQ = 0, 0, 1, 1\nbracket = 0.1, 0.9\n")
    code, _, err = _run(spec=spec, command="analyze")
    assert code == EXIT_SPEC
    assert "POriginNonzero" in err


def test_numerical_failure_exit_code():
    code, _, err = _run(command="spectrum", y=3.0)
    assert code == EXIT_NUMERIC
    assert err.startswith("error [spectrum]")


def test_bad_grid_exit_code():
    code, _, err = _run(command="spectrum", grid_N=1000)
    assert code == EXIT_SPEC and "power of two" in err


def test_parse_spec_comments():
    spec = parse_spec_text("# tree\nP = 0, 1   # identity\nQ = 0, 0, 1, 1\n")
    assert spec.is_two_three_tree()


def test_main_entry(tmp_path, capsys):
    assert main(["--spec", str(TREE), "--command", "exact", "--n-max", "3"]) == 0
    assert capsys.readouterr().out.splitlines()[1].startswith("1,1,")


def test_module_invocation():
    res = subprocess.run([sys.executable, "-m", "funceq", "--spec", str(TREE), "--command", "analyze"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.startswith("q = 0.618")
