import csv
import io
import json
import math
import subprocess
import sys

import pytest

from sharpbergman.cli import ConfigError, load_config, main
from sharpbergman.verify import bounds_ledger

FAST_VERIFY = """
[verify]
gamma_nodes = 8
monomial_n_max = 5
monomial_s_nodes = 4
monotone_nodes = 40
ordering_nodes = 5
oracles = no
"""


def read_csv(path):
    return list(csv.DictReader(io.StringIO(path.read_text())))


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_constants_row(capsys):
    assert main(["constants"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    row = next(r for r in rows if float(r["s"]) == 2.0)
    assert float(row["halfplane"]) == pytest.approx(1 / (12 * math.pi), rel=1e-15)
    assert float(row["disc"]) == pytest.approx(1 / (3 * math.pi), rel=1e-15)


def test_verify_passes(tmp_path, capsys):
    cfg = write(tmp_path, "v.ini", FAST_VERIFY)
    out = tmp_path / "verify.csv"
    assert main(["verify", "--config", cfg, "--out", str(out)]) == 0
    summary = capsys.readouterr().out
    rows = read_csv(out)
    assert summary.strip() == f"PASS {len(rows)}/{len(rows)}"
    assert all(r["pass"] == "true" for r in rows)
    assert (tmp_path / "verify.csv.meta.json").exists()


def test_verify_default_grid_passes(capsys):
    assert main(["verify", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["passed"] == doc["total"] > 5000


def test_bounds_csv(tmp_path):
    out = tmp_path / "bounds.csv"
    assert main(["bounds", "--out", str(out)]) == 0
    rows = read_csv(out)
    s = [float(r["s"]) for r in rows]
    assert s[0] == pytest.approx(1.05) and s[-1] == pytest.approx(3.95)
    assert len(s) == 59 and all(b > a for a, b in zip(s, s[1:]))
    for r in rows:
        sv = float(r["s"])
        assert float(r["prelim"]) == pytest.approx(2 * sv - 1, rel=1e-15)
        assert float(r["kernel_lower"]) == 1.0
        assert float(r["phi_lower"]) <= 1.0 + 1e-12
        assert float(r["minkowski"]) == pytest.approx(bounds_ledger(sv).phi_upper_minkowski, rel=1e-15)
        frac = sv - math.floor(sv)
        if 0.01 < frac < 0.49:
            assert 1.0 < float(r["interpolation"]) < float(r["coarse"])
        if abs(frac - 0.5) < 1e-9 or frac < 1e-9:
            assert r["interpolation"] == ""


def test_identical_runs_are_byte_identical(tmp_path):
    cfg = write(tmp_path, "s.ini", "[search]\ns = 1.7\ndegree = 2\nrestarts = 2\n")
    for name in ("a", "b"):
        assert main(["search", "--config", cfg, "--seed", "4", "--out", str(tmp_path / f"{name}.csv")]) == 0
        assert main(["bounds", "--format", "json", "--out", str(tmp_path / f"{name}.json")]) == 0
    for suffix in (".csv", ".csv.result.txt", ".json"):
        assert (tmp_path / f"a{suffix}").read_bytes() == (tmp_path / f"b{suffix}").read_bytes()
    meta = json.loads((tmp_path / "a.csv.meta.json").read_text())
    assert "created" in meta


def test_search_result_file(tmp_path):
    cfg = write(tmp_path, "s.ini", "[search]\ns = 2\ndegree = 1\nrestarts = 2\n")
    out = tmp_path / "search.csv"
    assert main(["search", "--config", cfg, "--out", str(out)]) == 0
    text = (tmp_path / "search.csv.result.txt").read_text()
    assert "counterexample = false" in text
    assert "trial.variant = DiscPolynomial" in text
    values = [float(r["value"]) for r in read_csv(out)]
    assert all(b >= a for a, b in zip(values, values[1:]))


def test_search_forced_threshold_exits_one(tmp_path, capsys):
    cfg = write(tmp_path, "s.ini", "[search]\ns = 2\ndegree = 1\nrestarts = 1\nthreshold = 0.5\n")
    assert main(["search", "--config", cfg, "--format", "json"]) == 1
    captured = capsys.readouterr()
    assert json.loads(captured.out)["result"]["counterexample"] is True
    assert "counterexample candidate" in captured.err


def test_entropy_trials(tmp_path, capsys):
    cfg = write(
        tmp_path,
        "e.ini",
        "[trial:kernel]\nvariant = KernelPower\np = 2\nz0 = 0 1\n\n"
        "[trial:const]\nvariant = DiscPolynomial\ncoeffs = 1 0\n\n"
        "[trial:pw]\nvariant = PWCombination\nterms = 1 0 0.5 1; 0 1 1.5 2\n",
    )
    assert main(["entropy", "--config", cfg]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    got = {r["name"]: float(r["entropy"]) for r in rows}
    assert got["kernel"] == pytest.approx(1.0, abs=1e-5)
    assert got["const"] == pytest.approx(1.0, abs=1e-6)
    assert got["pw"] >= math.log(3) / 2


@pytest.mark.parametrize(
    "text, line",
    [
        ("[run]\nseed = 1\n\n[bounds]\ns_begin = 1.1\n", 5),
        ("# comment\n[nonsense]\nx = 1\n", 2),
        ("[search]\ns = 2\ndegree = three\n", 3),
        ("[trial:x]\nvariant = KernelPower\nradius = 2\n", 3),
    ],
)
def test_config_errors_carry_line_numbers(tmp_path, capsys, text, line):
    cfg = write(tmp_path, "bad.ini", text)
    assert main(["constants", "--config", cfg]) == 2
    assert f"bad.ini:{line}:" in capsys.readouterr().err
    with pytest.raises(ConfigError):
        load_config(text)


def test_other_config_failures(tmp_path, capsys):
    assert main(["constants", "--config", str(tmp_path / "missing.ini")]) == 2
    assert main(["entropy"]) == 2
    cfg = write(tmp_path, "b.ini", "[bounds]\ns_start = 0.5\n")
    assert main(["bounds", "--config", cfg]) == 2
    capsys.readouterr()


def test_numeric_failure_exits_one(tmp_path, capsys):
    cfg = write(tmp_path, "c.ini", "[constants]\ns_values = 0.5\n")
    assert main(["constants", "--config", cfg]) == 1
    assert "numeric failure" in capsys.readouterr().err


def test_flags_override_config(tmp_path, capsys):
    cfg = write(tmp_path, "r.ini", "[run]\nformat = json\n")
    assert main(["constants", "--config", cfg, "--format", "csv"]) == 0
    assert capsys.readouterr().out.startswith("s,halfplane,disc")


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "sharpbergman", "constants", "--format", "json"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["columns"] == ["s", "halfplane", "disc"]
