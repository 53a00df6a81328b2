import csv
import io
import json
import math
import shutil
import subprocess
import sys

import pytest

from qcorr import cli


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def table(text):
    rows = {}
    for line in text.splitlines()[1:]:
        parts = line.split()
        if parts[0] in ("concurrence", "hs_min", "trace_min", "re_min"):
            rows[parts[0]] = tuple(float(p) for p in parts[1:])
    return rows


# ---- state ------------------------------------------------------------------


def test_state_maximally_mixed():
    code, out, _ = run("state", "--c", "0,0,0")
    assert code == 0
    assert out.count("0.25") >= 8
    assert "verdict: physical\n" in out
    assert "marginal a: [[0.5, 0], [0, 0.5]]" in out


def test_state_pure_bell():
    code, out, _ = run("state", "--c", "1,-1,1")
    assert code == 0
    assert "lambda_psi+ = 1\n" in out
    assert "verdict: physical (pure)" in out


def test_state_unphysical():
    code, out, err = run("state", "--c", "1,1,1")
    assert code == 2
    assert "unphysical (lambda_phi- = -0.5)" in out
    assert err.startswith("error:") and err.count("\n") == 1
    assert "lambda_phi- = -0.5" in err


# ---- measures ---------------------------------------------------------------


def test_measures_bell_vertex():
    code, out, _ = run("measures", "--c", "1,1,-1")
    assert code == 0
    rows = table(out)
    assert rows["concurrence"][0] == pytest.approx(1.0)
    assert rows["hs_min"][0] == pytest.approx(0.5)
    assert rows["trace_min"][0] == pytest.approx(1.0)
    assert rows["re_min"][0] == pytest.approx(1.0)
    assert all(gap <= 1e-4 for _, _, gap in rows.values())


def test_measures_zero():
    code, out, _ = run("measures", "--c", "0,0,0")
    assert code == 0
    assert all(abs(v) <= 1e-12 for row in table(out).values() for v in row)


def test_measures_partial_entanglement_with_variant():
    code, out, _ = run("measures", "--c", "1,0.3,-0.3", "--min-variant", "--oracle-grid", "30")
    assert code == 0
    rows = table(out)
    assert rows["concurrence"][0] == pytest.approx(0.3)
    assert rows["hs_min"][0] == pytest.approx(0.2725)
    assert rows["trace_min"][0] == pytest.approx(1.0)
    assert rows["re_min"][0] == pytest.approx(1.0, abs=1e-6)
    assert "trace_min*" in out and "0.3" in out.split("trace_min*")[1]


def test_measures_negative_leading_component():
    code, out, _ = run("measures", "--c", "-1,-1,-1")
    assert code == 0 and table(out)["concurrence"][0] == pytest.approx(1.0)


# ---- sweep ------------------------------------------------------------------


def test_sweep_depolarizing_csv():
    code, out, err = run("sweep", "--channel", "depolarizing", "--c", "1,1,-1", "--grid", "0:1:0.01")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["param", "c1", "c2", "c3", "concurrence", "hs_min", "trace_min", "re_min"]
    assert len(rows) == 102
    assert "\r" not in out and out.endswith("\n")
    lines = dict(line.split(":", 1) for line in err.strip().splitlines())
    assert "esd=0.3169873 " in lines["events concurrence"]
    for m in ("hs_min", "trace_min", "re_min"):
        assert "dark=0.75 revival=0.75->0.7" in lines[f"events {m}"]


def test_sweep_numbers_are_plain_decimals():
    _, out, _ = run("sweep", "--channel", "gad", "--c", "0.5,-0.4,0.5", "--grid", "0:1:0.1")
    for row in list(csv.reader(io.StringIO(out)))[1:]:
        for cell in row:
            assert "," not in cell and math.isfinite(float(cell))
            digits = cell.lstrip("-").split("e")[0].replace(".", "").lstrip("0")
            assert len(digits) <= 12


def test_sweep_measure_subset_keeps_fixed_order():
    code, out, _ = run("sweep", "--channel", "bit-phase-flip", "--c", "1,0.3,-0.3", "--measures", "re-min,concurrence")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["param", "c1", "c2", "c3", "concurrence", "re_min"]
    assert {r[2] for r in rows[1:]} == {"0.3"}


def test_sweep_gad_json():
    code, out, err = run("sweep", "--channel", "gad", "--c", "0.5,-0.4,0.5", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["fixed_params"] == {"p": 0.5} and doc["sweep_parameter"] == "gamma"
    assert len(doc["records"]) == 101
    esd = doc["events"]["concurrence"]["esd_threshold"]
    assert 0 < esd < 1
    for rec in doc["records"][:-1]:
        assert all(rec["values"][m] > 0 for m in ("hs_min", "trace_min", "re_min"))


def test_sweep_gad_off_half_is_unsupported_in_closed_form():
    code, _, err = run("sweep", "--channel", "gad", "--c", "0.5,-0.4,0.5", "--p", "0.3", "--grid", "0:1:0.5")
    assert code == 3 and err.startswith("error:")
    code, out, _ = run("sweep", "--channel", "gad", "--c", "0.5,-0.4,0.5", "--p", "0.3", "--grid", "0:1:0.5", "--path", "kraus", "--measures", "concurrence,trace_min")
    assert code == 0 and len(out.splitlines()) == 4


def test_sweep_gad_over_p():
    code, out, _ = run("sweep", "--channel", "gad", "--c", "1,1,-1", "--gamma-fixed", "0.3", "--grid", "0:1:0.25", "--path", "kraus", "--measures", "concurrence")
    assert code == 0 and len(out.splitlines()) == 6


def test_sweep_writes_file_and_is_deterministic(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert run("sweep", "--channel", "bit-phase-flip", "--c", "1,0.3,-0.3", "--out", str(p))[0] == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert paths[0].read_bytes().count(b"\n") == 102


@pytest.mark.parametrize(
    "argv",
    [
        ("state", "--c", "1,2"),
        ("state", "--c", "a,b,c"),
        ("state", "--c", "nan,0,0"),
        ("state", "--c", "2,0,0"),
        ("measures", "--c", "1,1,1"),
        ("measures", "--c", "0,0,0", "--oracle-grid", "1"),
        ("sweep", "--channel", "amplitude", "--c", "0,0,0"),
        ("sweep", "--channel", "depolarizing", "--c", "0,0,0", "--grid", "0:2:0.1"),
        ("sweep", "--channel", "depolarizing", "--c", "0,0,0", "--grid", "0:1"),
        ("sweep", "--channel", "depolarizing", "--c", "0,0,0", "--measures", "negativity"),
        ("sweep", "--channel", "depolarizing", "--c", "0,0,0", "--p", "0.2"),
        ("sweep", "--channel", "gad", "--c", "0,0,0", "--p", "1.5"),
        ("sweep", "--channel", "gad", "--c", "0,0,0", "--p", "0.5", "--gamma-fixed", "0.5"),
        ("sweep", "--channel", "depolarizing", "--c", "0,0,0", "--out", "/nonexistent/dir/x.csv"),
        ("verify", "--samples", "0"),
        ("frobnicate",),
        (),
    ],
)
def test_input_errors(argv):
    code, _, err = run(*argv)
    assert code == 2
    assert err.startswith("error:") and err.count("\n") == 1


# ---- verify -----------------------------------------------------------------


def test_verify_smoke_is_deterministic():
    a = run("verify", "--samples", "1", "--seed", "3")
    b = run("verify", "--samples", "1", "--seed", "3")
    assert a == b and a[0] == 0
    assert "result: all suites passed" in a[1]


def test_verify_full():
    code, out, _ = run("verify", "--samples", "200", "--seed", "7")
    assert code == 0
    assert out.count("PASS ") == 9 and "FAIL" not in out
    assert "known discrepancies: 3" in out
    assert "lambda_phi- = -0.5" in out
    assert "computed p = 0.133100" in out and "stated p = 0.42" in out


def test_verify_failure_echoes_sample(monkeypatch):
    from qcorr import verify

    def broken(rng):
        return 1.0, 1e-12, "c=(0.1,0.2,0.3)"

    monkeypatch.setattr(verify, "suites", lambda oracle_grid=60: (("broken", broken),))
    code, out, _ = run("verify", "--samples", "2", "--seed", "5")
    assert code == 1
    assert "FAIL broken: 0/2" in out
    assert "first failure (seed=5) sample 0: c=(0.1,0.2,0.3)" in out
    assert "result: FAILED" in out


@pytest.mark.skipif(shutil.which("qcorr") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["qcorr", "state", "--c", "0,0,0"], capture_output=True, text=True)
    assert proc.returncode == 0 and "physical" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "qcorr.cli", "state", "--c", "1,1,1"], capture_output=True, text=True)
    assert proc.returncode == 2 and proc.stderr.startswith("error:")
