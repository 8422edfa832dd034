import json
import math
import re
import subprocess
import sys

import pytest

from reglab.cli import main, parse_complex, UsageError
from reglab.divisor import parse_class_text


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def value(text):
    return float(re.search(r"= (-?[0-9.]+)", text).group(1))


def test_parse_complex():
    assert parse_complex("5") == 5
    assert parse_complex("0,-3") == -3j
    assert parse_complex("3sqrt2") == 3 * math.sqrt(2)
    assert parse_complex("isqrt2") == 1j * math.sqrt(2)
    with pytest.raises(UsageError):
        parse_complex("1,2,3")


def test_mahler_commands(capsys):
    c5, o5, _ = run(capsys, "mahler", "--k", "5")
    c1, o1, _ = run(capsys, "mahler", "--k", "1")
    assert c5 == c1 == 0
    assert abs(value(o5) - 6 * value(o1)) < 1e-9
    assert "error estimate" in o5
    c0, o0, _ = run(capsys, "mahler", "--k", "0")
    assert c0 == 0 and o0.startswith("m(0) = 0.000000000")
    cg, og, _ = run(capsys, "mahler", "--k", "3", "--method", "grid")
    _, o3, _ = run(capsys, "mahler", "--k", "3")
    assert cg == 0 and abs(value(og) - value(o3)) < 1e-4
    ch, oh, _ = run(capsys, "mahler", "--h", "0.5")
    assert abs(value(oh) - value(o5)) < 1e-15


def test_mahler_complex_and_json(capsys):
    code, out, _ = run(capsys, "--format", "json", "mahler", "--k", "0,-3")
    d = json.loads(out)
    assert code == 0 and d["k"] == [0, -3] and abs(d["m"] - 1.2566521685662611569) < 1e-12


@pytest.mark.parametrize(
    "argv",
    [
        ["mahler", "--k", "abc"],
        ["mahler"],
        ["mahler", "--k", "1", "--h", "2"],
        ["mahler", "--k", "1", "--tol", "-1"],
        ["mahler", "--k", "1", "--bogus"],
        ["diamond", "--h", "0.7", "--pair", "g"],
        ["diamond", "--h", "0", "--pair", "f"],
        ["lfun", "--k", "0"],
        ["lfun", "--k", "4"],
        ["lfun", "--k", "2.5"],
        ["verify", "--suite", "nope"],
        [],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_nonconvergence_exit_3(capsys, monkeypatch):
    from reglab import mahler

    def fail(*a, **k):
        raise mahler.QuadratureError("no")

    monkeypatch.setattr(mahler, "mahler_measure_estimate", fail)
    code, _, err = run(capsys, "mahler", "--k", "3")
    assert code == 3 and "numerical failure" in err


@pytest.mark.parametrize(
    "h,pair,want",
    [
        ("0.5", "combined", "-12*(Q+P) + 10*(P)"),
        ("0.70710678", "f", "6*(P) + -10*(P+Q)"),
        ("0.5", "xy", "8*(P)"),
        ("0.5", "xyphi", "8*(P+Q)"),
        ("0.5", "g", "3*(Q+P) - 2*(Q+A) - 3*(B) + 4*(Q+B) - 3*(P) + 5*(A)".replace(" - ", " + -")),
        ("0.5", "gsigma", "3*(Q+P) + -2*(Q+B) + -3*(A) + 4*(Q+A) + -3*(P) + 5*(B)"),
    ],
)
def test_diamond_command(capsys, h, pair, want):
    code, out, _ = run(capsys, "diamond", "--h", h, "--pair", pair)
    assert code == 0
    assert parse_class_text(out) == parse_class_text(want)


def test_diamond_exact_strings(capsys):
    assert run(capsys, "diamond", "--h", "0.70710678", "--pair", "f")[1].strip() == "6*(P) + -10*(P+Q)"
    assert run(capsys, "diamond", "--h", "0.5", "--pair", "xy")[1].strip() == "8*(P)"


def test_diamond_json_and_torsion(capsys):
    code, out, _ = run(capsys, "diamond", "--h", "0.5", "--pair", "combined", "--json")
    d = json.loads(out)
    assert code == 0 and parse_class_text(d["text"]) == {"P": 10, "P+Q": -12}
    _, out, _ = run(capsys, "diamond", "--h", "0.5", "--pair", "combined", "--keep-torsion")
    assert parse_class_text(out) == {"P": 10, "P+Q": -12, "2P": 1}


def test_verify_main(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "main")
    assert code == 0 and "6/6 checks passed" in out


def test_verify_json_schema(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "dilog", "--json")
    rows = json.loads(out)
    assert code == 0 and rows
    for row in rows:
        assert set(row) == {"name", "lhs", "rhs", "residual", "tolerance", "passed"}


def test_verify_csv(capsys):
    code, out, _ = run(capsys, "--format", "csv", "verify", "--suite", "main")
    assert code == 0 and out.splitlines()[0].startswith("name,lhs,rhs")


def test_verify_failure_exit_1(capsys, monkeypatch):
    from reglab import verify

    bad = verify.CheckResult("x", 1, 2, 1, 0, False, 0)
    monkeypatch.setitem(verify.SUITES, "main", lambda: [bad])
    code, out, _ = run(capsys, "verify", "--suite", "main")
    assert code == 1 and "FAIL" in out


def test_lfun(capsys, tmp_path):
    code, out1, _ = run(capsys, "--cache-dir", str(tmp_path), "lfun", "--k", "1")
    _, outm, _ = run(capsys, "mahler", "--k", "1")
    assert code == 0 and abs(value(out1) - value(outm)) < 1e-4
    _, out5, _ = run(capsys, "lfun", "--k", "5")
    _, out16, _ = run(capsys, "lfun", "--k", "16", "--terms", "200")
    assert abs(value(out5) - value(out16)) < 1e-6
    assert (tmp_path / "ap_k1.txt").exists()


def test_console_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "reglab", "mahler", "--k", "isqrt2"], capture_output=True, text=True
    )
    assert out.returncode == 0 and "0.767136100580" in out.stdout
