import json

import pytest

from tmdreef.main import _parse_seeds, main


def test_parse_seeds():
    assert _parse_seeds("0-3") == [0, 1, 2, 3]
    assert _parse_seeds("1, 4,7") == [1, 4, 7]
    assert _parse_seeds("0-1,5") == [0, 1, 5]
    assert _parse_seeds(None) is None


def test_modal(capsys):
    assert main(["modal", "--preset", "n2-paper"]) == 0
    out = capsys.readouterr().out
    assert "mode 1: omega = 15.811 rad/s" in out
    assert "mode 2: omega = 31.623 rad/s" in out


def test_evaluate_bundled_design(capsys, tmp_path):
    code = main(["evaluate", "--preset", "n2-paper", "--design", "n2-paper-best", "--out-dir", str(tmp_path)])
    assert code == 0
    value, db, floor, _ = capsys.readouterr().out.split()
    assert float(value) == pytest.approx(8.4348, rel=0.015)
    assert int(floor) == 2
    assert (tmp_path / "frf_bare.csv").exists()


def test_evaluate_with_mass_override(capsys):
    code = main(["evaluate", "--preset", "n2-lab-top", "--design", "n2-lab-top-best", "--mass", "0.1"])
    assert code == 0
    assert float(capsys.readouterr().out.split()[0]) == pytest.approx(9.8443, rel=0.02)


def test_run_then_export(tmp_path):
    out = tmp_path / "out"
    assert main(["run", "--preset", "n2-paper", "--seeds", "0-1", "--alpha", "2",
                 "--out-dir", str(out), "--jobs", "1"]) == 0
    report = out / "cro-sl" / "seed_1" / "report.json"
    assert json.loads(report.read_text())["rng_seed"] == 1
    assert (out / "comparison.csv").exists()

    again = tmp_path / "again"
    assert main(["export", str(report), "--preset", "n2-paper", "--out-dir", str(again)]) == 0
    assert (again / "frf.csv").read_bytes() == (report.parent / "frf.csv").read_bytes()
    assert (again / "convergence.csv").read_bytes() == (report.parent / "convergence.csv").read_bytes()


def test_compare_selected_modes(tmp_path):
    code = main(["compare", "--preset", "n2-paper", "--seed", "0", "--alpha", "2", "--jobs", "1",
                 "--modes", "cro-sl,standalone:HS", "--out-dir", str(tmp_path)])
    assert code == 0
    lines = (tmp_path / "comparison.csv").read_text().splitlines()
    assert [line.split(",")[0] for line in lines[1:]] == ["cro-sl", "standalone:HS"]


@pytest.mark.parametrize("argv", [
    ["modal", "--preset", "n9-nowhere"],
    ["modal"],
    ["evaluate", "--preset", "n2-paper", "--design", "no-such-design"],
    ["evaluate", "--preset", "n2-paper", "--design", "n4-paper-best"],
    ["run", "--preset", "n2-paper", "--mode", "standalone:PSO"],
])
def test_user_errors_exit_2(argv):
    assert main(argv) == 2


def test_usage_errors(tmp_path):
    assert main(["modal", "--no-such-flag"]) == 2
    assert main(["export", str(tmp_path / "missing.json")]) == 2


def test_bad_report_is_export_error(tmp_path):
    bogus = tmp_path / "report.json"
    bogus.write_text("{}")
    assert main(["export", str(bogus)]) == 4
