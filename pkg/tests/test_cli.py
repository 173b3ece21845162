import json
import subprocess
import sys

import numpy as np
import pytest

from wavesbvp.cli import fmt, main, parse_points


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def csv_rows(text):
    lines = text.strip("\n").split("\n")
    header = lines[0].split(",")
    return header, [dict(zip(header, line.split(","))) for line in lines[1:]]


def test_fmt():
    assert fmt(float("nan")) == "nan"
    assert fmt(None) == "nan"
    assert fmt(0.99419161619) == "0.994191616"
    assert fmt(3) == "3"
    assert fmt(True) == "true"


def test_parse_points():
    np.testing.assert_allclose(parse_points("0,0.5,1"), [0, 0.5, 1])
    assert len(parse_points("grid:33")) == 33
    assert len(parse_points(None)) == 10


class TestSolve:
    def test_table_value(self, capsys):
        code, out, _ = run(
            ["solve", "--problem", "example1", "--family", "hermite", "--approach", "newton",
             "--J", "3", "--format", "csv"],
            capsys,
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == ["t", "y", "exact", "abs_error"]
        row = next(r for r in rows if float(r["t"]) == 3 / 16)
        assert abs(float(row["y"]) - 0.994191616) <= 5e-7

    def test_manufactured_json(self, capsys):
        code, out, _ = run(
            ["solve", "--problem", "manufactured", "--family", "legendre", "--approach", "qa",
             "--J", "3", "--format", "json"],
            capsys,
        )
        assert code == 0
        doc = json.loads(out)
        assert set(doc) >= {"problem", "method", "J", "converged", "iterations", "residual_norm",
                            "rows", "linf", "l2"}
        assert doc["method"] == "LeWQA" and doc["converged"] is True
        assert doc["linf"] <= 1e-10
        assert set(doc["rows"][0]) == {"t", "y", "exact", "abs_error"}

    def test_unknown_problem(self, capsys):
        code, _, err = run(["solve", "--problem", "nosuch"], capsys)
        assert code == 1
        assert "unknown builtin" in err

    def test_no_exact_uses_nan(self, capsys):
        code, out, _ = run(["solve", "--problem", "example3", "--format", "csv", "--points", "0,1"], capsys)
        assert code == 0
        assert out.splitlines()[1].endswith(",nan,nan")

    def test_non_convergence_exit(self, capsys):
        code, _, err = run(["solve", "--problem", "example1", "--max-iter", "1"], capsys)
        assert code == 2
        assert "did not converge" in err

    def test_conditioning_exit(self, capsys):
        code, _, err = run(["solve", "--problem", "example1", "--family", "laguerre", "--J", "4"], capsys)
        assert code == 2
        assert "singular" in err

    @pytest.mark.parametrize(
        "argv",
        [
            ["solve", "--problem", "example1", "--alpha", "2"],
            ["solve", "--problem", "example1", "--family", "gegenbauer", "--alpha", "-1"],
            ["solve", "--problem", "example1", "--J", "-1"],
            ["solve", "--problem", "example1", "--J", "9"],
            ["solve", "--problem", "example1", "--points", "2"],
            ["solve", "--problem", "example1", "--guess", "a"],
            ["solve", "--problem", "example1", "--tol", "0"],
            ["solve", "--problem", "example1", "--family", "jacobi"],
            ["solve"],
            ["solve", "--problem-file", "/nonexistent/problem.json"],
            ["frobnicate"],
        ],
    )
    def test_input_errors(self, argv, capsys):
        code, _, _ = run(argv, capsys)
        assert code == 1

    def test_problem_file_and_output(self, tmp_path, capsys):
        pf = tmp_path / "p.json"
        pf.write_text('{"k":2,"f":"6","bc":{"type":"dirichlet","alpha":1,"beta":0},"exact":"1-t^2"}')
        out = tmp_path / "out.csv"
        code, stdout, _ = run(["solve", "--problem-file", str(pf), "--format", "csv", "--output", str(out)], capsys)
        assert code == 0 and stdout == ""
        data = out.read_bytes()
        assert b"\r" not in data and data.startswith(b"t,y,exact,abs_error\n")


class TestConvergence:
    def test_rows(self, capsys):
        code, out, _ = run(
            ["convergence", "--problem", "example1", "--J-min", "1", "--J-max", "3", "--family", "legendre",
             "--format", "csv"],
            capsys,
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == ["J", "M", "linf", "l2", "iterations"]
        assert len(rows) == 3 and all(float(r["linf"]) > 0 for r in rows)

    def test_empty_range(self, capsys):
        code, _, _ = run(["convergence", "--problem", "example1", "--J-min", "3", "--J-max", "2"], capsys)
        assert code == 1

    def test_succ_diff_header(self, capsys):
        code, out, _ = run(
            ["convergence", "--problem", "example3", "--J-min", "1", "--J-max", "2", "--format", "csv"], capsys
        )
        assert code == 0
        assert out.splitlines()[0] == "J,M,succ_diff,l2,iterations"


class TestCompare:
    def test_example2_columns(self, capsys):
        code, out, _ = run(["compare", "--problem", "example2", "--J", "2", "--format", "csv"], capsys)
        assert code == 0
        header, rows = csv_rows(out)
        assert header == ["t", "ChWNA", "GeWNA", "LeWNA", "LaWNA", "HeWNA",
                          "ChWQA", "GeWQA", "LeWQA", "LaWQA", "HeWQA", "Exact"]
        for r in rows:
            vals = [float(r[h]) for h in header[1:-1]]
            assert max(vals) - min(vals) <= 1e-7 + 1e-9  # 9 printed digits
            assert abs(vals[0] - float(r["Exact"])) <= 1e-5

    def test_example4_no_exact_column(self, capsys):
        code, out, _ = run(["compare", "--problem", "example4", "--J", "2", "--format", "csv"], capsys)
        assert code == 0
        assert "Exact" not in out.splitlines()[0]

    def test_single_coefficient(self, capsys):
        code, out, _ = run(["compare", "--problem", "example1", "--J", "0"], capsys)
        assert code == 0 and "LaWQA" in out

    def test_failing_method_gives_nan_column(self, capsys):
        code, out, err = run(["compare", "--problem", "example1", "--J", "4", "--format", "csv"], capsys)
        assert code == 2
        header, rows = csv_rows(out)
        assert all(r["LaWNA"] == "nan" and r["LaWQA"] == "nan" for r in rows)
        assert all(r["LeWNA"] != "nan" for r in rows)
        assert "LaWNA" in err

    def test_json(self, capsys):
        code, out, _ = run(["compare", "--problem", "example1", "--J", "2", "--format", "json"], capsys)
        doc = json.loads(out)
        assert code == 0 and len(doc["methods"]) == 10 and doc["failed"] == []


class TestApproximate:
    def test_polynomial_in_span(self, capsys):
        code, out, _ = run(["approximate", "--function", "t^2", "--family", "legendre", "--J", "2",
                            "--format", "csv"], capsys)
        assert code == 0
        header, rows = csv_rows(out)
        assert header == ["t", "f", "reconstruction", "error"] and len(rows) == 65
        assert max(float(r["error"]) for r in rows) <= 1e-9

    def test_sine(self, capsys):
        code, out, _ = run(["approximate", "--function", "sin(3.141592653589793*t)", "--J", "4",
                            "--format", "json"], capsys)
        assert code == 0
        assert json.loads(out)["max_error"] <= 1e-3

    def test_syntax_error(self, capsys):
        code, _, err = run(["approximate", "--function", "("], capsys)
        assert code == 1 and "offset" in err

    def test_function_of_y_rejected(self, capsys):
        code, _, _ = run(["approximate", "--function", "y"], capsys)
        assert code == 1


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "wavesbvp", "solve", "--problem", "manufactured", "--J", "2", "--format", "csv"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("t,y,exact,abs_error\n")


def test_deterministic_output(capsys):
    argv = ["compare", "--problem", "example3", "--J", "3", "--format", "csv"]
    _, a, _ = run(argv, capsys)
    _, b, _ = run(argv, capsys)
    assert a == b
