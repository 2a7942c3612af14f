import csv
import io
import json
import subprocess
import sys

import pytest

from dgsampling.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_abs(capsys):
    code, out, err = run(capsys, "solve", "--fn", "abs", "--x0", "5", "--eps", "1", "--c", "0.5")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["iter", "fx", "eps", "vnorm", "oracle_evals", "oracle_subgrads", "bundle_size"]
    assert "f=" in err
    final = float(err.split("f=")[1].split()[0])
    assert final < 1e-3


def test_solve_cone_no_steps(capsys):
    code, out, err = run(capsys, "solve", "--fn", "cone:10", "--x0", "0")
    assert code == 0 and "steps=0" in err


@pytest.mark.parametrize(
    "argv",
    [["solve", "--fn", "nosuch"], ["solve", "--fn", "abs", "--c", "2"], ["table1", "--n", "1"],
     ["gs-compare", "--trials", "0"], ["solve", "--fn", "maxquad", "--x0", "1,2,3"], ["frobnicate"],
     ["solve", "--fn", "abs", "--bogus"]],
)
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as info:
        raise SystemExit(main(argv))
    assert info.value.code == 1


def test_max_outer_is_failure(capsys):
    code, _, _ = run(capsys, "solve", "--fn", "abs", "--x0", "5", "--max-outer", "2")
    assert code == 2


def test_bisect_demo_legacy(capsys):
    code, out, err = run(capsys, "bisect-demo", "--algo", "legacy", "--c", "0.5")
    assert code == 0 and "IntervalExhausted" in err
    rows = list(csv.DictReader(io.StringIO(out)))
    for r in rows[:40]:
        j = int(r["j"])
        assert float(r["t"]) == 1 - 2.0**-j


@pytest.mark.parametrize("c, ct, t, xi", [("0.5", "0.25", 0.625, 1.375), ("0.75", "1/2", 0.875, -0.625)])
def test_bisect_demo_improved(capsys, c, ct, t, xi):
    code, out, err = run(capsys, "bisect-demo", "--algo", "improved", "--c", c, "--ctilde", ct)
    assert code == 0
    assert f"Found t={t!r} xi=[{xi!r}]" in err


def test_bisect_demo_precondition(capsys):
    code, _, err = run(capsys, "bisect-demo", "--fn", "abs", "--x0", "1", "--v", "-1", "--c", "0.5")
    assert code == 1 and "sufficient descent" in err


def test_table1_analytic(capsys):
    code, out, _ = run(capsys, "table1", "--format", "json")
    rows = json.loads(out)
    assert [r["display"] for r in rows][:6] == [0.6836, 0.6133, 0.4502, 0.1394, 0.0067, 3.3e-7]


def test_table1_monte_carlo(capsys):
    code, out, _ = run(capsys, "table1", "--mc", "100000", "--seed", "7", "--n", "5")
    row = next(csv.DictReader(io.StringIO(out)))
    assert abs(float(row["mc"]) - 0.4502) <= 4 * float(row["mc_se"])


def test_gs_compare(capsys):
    code, out, _ = run(capsys, "gs-compare", "--dims", "2", "3", "10", "--trials", "300", "--seed", "1")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert all(int(r["det_subgrads"]) <= 4 and r["det_critical"] == "1" for r in rows)


def test_gs_compare_workers_match_serial(capsys):
    _, serial, _ = run(capsys, "gs-compare", "--dims", "4", "--trials", "200")
    _, pooled, _ = run(capsys, "gs-compare", "--dims", "4", "--trials", "200", "--workers", "2")
    assert serial == pooled


@pytest.mark.parametrize(
    "argv",
    [["solve", "--fn", "maxquad", "--x0", "1,1"], ["solve", "--fn", "abs", "--x0", "3", "--method", "gs", "--seed", "4"],
     ["bisect-demo", "--algo", "legacy"], ["table1", "--mc", "2000", "--seed", "3"]],
)
@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_outputs_byte_identical(tmp_path, argv, fmt):
    paths = []
    for k in range(2):
        p = tmp_path / f"out{k}.{fmt}"
        cmd = [sys.executable, "-m", "dgsampling", *argv, "--format", fmt, "--out", str(p)]
        assert subprocess.run(cmd, capture_output=True).returncode == 0
        paths.append(p.read_bytes())
    assert paths[0] == paths[1] and paths[0]
    if fmt == "csv":
        assert b"\r\n" not in paths[0]
    else:
        assert isinstance(json.loads(paths[0]), list)
