import argparse
import json
import math

import numpy as np
import pandas as pd
import pytest

import heatkernel.cli as cli
from heatkernel.errors import QuadratureNoConvergence


def _records(text: str) -> list[dict]:
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def test_parse_grid():
    np.testing.assert_array_equal(cli.parse_grid("0.5"), [0.5])
    np.testing.assert_allclose(cli.parse_grid("-2:2:5"), [-2.0, -1.0, 0.0, 1.0, 2.0])
    assert cli.parse_grid("0:1:0").size == 0


@pytest.mark.parametrize("text", ["a", "0:1", "0:1:x", "0:1:-3"])
def test_parse_grid_rejects(text):
    with pytest.raises(argparse.ArgumentTypeError):
        cli.parse_grid(text)


def test_read_config(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep\nabs_tol = 1e-12\nquiet = true\nverbose = false\n")
    assert cli.read_config(cfg) == ["--abs-tol=1e-12", "--quiet"]


def test_kernel_on_axis(capsys):
    assert cli.main(["kernel", "--t", "1", "--r", "0", "--z", "0", "--method", "axis", "--quiet"]) == 0
    (rec,) = _records(capsys.readouterr().out)
    assert rec["value"] == pytest.approx(math.exp(-1.0) / 64.0, rel=1e-12)
    assert rec["method"] == "axis"


def test_kernel_grid_order(capsys):
    assert cli.main(["kernel", "--t", "1", "--r", "0:1:5", "--z", "0", "--workers", "2", "--quiet"]) == 0
    recs = _records(capsys.readouterr().out)
    assert [rec["r"] for rec in recs] == [0.0, 0.25, 0.5, 0.75, 1.0]
    values = [rec["value"] for rec in recs]
    assert values == sorted(values, reverse=True)
    assert values[0] == pytest.approx(math.exp(-1.0) / 64.0, rel=1e-7)


def test_probability_normalization_doubles(capsys):
    cli.main(["kernel", "--t", "0.5", "--r", "0.5", "--quiet"])
    cli.main(["kernel", "--t", "0.5", "--r", "0.5", "--normalization", "probability", "--quiet"])
    standard, probability = _records(capsys.readouterr().out)
    assert probability["value"] == pytest.approx(2.0 * standard["value"], rel=1e-8)


def test_distance_record(capsys):
    assert cli.main(["distance", "--r", "1.5"]) == 0
    (rec,) = _records(capsys.readouterr().out)
    assert rec["d2"] == pytest.approx(2.25)
    assert rec["case_tag"] == "axis_r"
    assert rec["theta"] is None


def test_limit_reports_the_measured_constant(capsys):
    assert cli.main(["limit", "--t", "0.02:0.01:2", "--r", "0", "--z", "0", "--quiet"]) == 0
    recs = _records(capsys.readouterr().out)
    assert [rec["t"] for rec in recs] == [0.02, 0.01]
    # the origin has the exact ratio e^-t / 2
    assert recs[-1]["ratio"] == pytest.approx(0.5 * math.exp(-0.01), rel=1e-8)
    assert recs[0]["kappa"] == pytest.approx(0.5 * math.exp(-0.01), rel=1e-8)
    assert recs[0]["kappa_identified"] == 0.5


def test_empty_grid_is_a_usage_error(capsys):
    assert cli.main(["kernel", "--t", "1", "--r", "0:1:0", "--quiet"]) == 2
    assert "empty grid" in capsys.readouterr().err


def test_bad_arguments_exit_2():
    with pytest.raises(SystemExit) as info:
        cli.main(["kernel", "--t", "a:b"])
    assert info.value.code == 2


def test_config_file_under_flags(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("format = csv\nz = 1\n")
    out = tmp_path / "d.csv"
    assert cli.main(["distance", "--config", str(cfg), "--r", "0.8", "--z", "0.5", "--out", str(out)]) == 0
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["r", "z", "theta", "d2", "case_tag"]
    assert frame["z"].tolist() == [0.5]
    assert frame["case_tag"].tolist() == ["generic"]


def test_ineq_liyau(capsys):
    code = cli.main(["ineq", "--check", "liyau", "--t", "0.5", "--r", "0.5:1.5:3", "--z=-1:1:3", "--quiet"])
    assert code == 0
    recs = _records(capsys.readouterr().out)
    assert len(recs) == 9
    assert all(rec["status"] != "fail" for rec in recs)


def test_ineq_constant_a(capsys):
    assert cli.main(["ineq", "--check", "A", "--t", "0.5"]) == 0
    (rec,) = _records(capsys.readouterr().out)
    assert rec["A_standard"] == pytest.approx(rec["closed_form"], rel=1e-10)


def test_harnack_needs_t2():
    assert cli.main(["ineq", "--check", "harnack", "--t", "0.2", "--quiet"]) == 2


def test_mc_is_reproducible(capsys):
    argv = ["mc", "--paths", "600", "--steps", "5", "--bins", "4", "4", "--seed", "9", "--quiet"]
    cli.main(argv + ["--workers", "1"])
    one = capsys.readouterr().out
    cli.main(argv + ["--workers", "2"])
    two = capsys.readouterr().out
    assert one == two
    assert len(_records(one)) == 16


def test_selftest_subset(capsys):
    assert cli.main(["selftest", "--only", "on_diagonal", "constant_a", "--quiet"]) == 0
    recs = _records(capsys.readouterr().out)
    assert [rec["check"] for rec in recs] == ["on_diagonal", "constant_a"]
    assert all(rec["status"] == "pass" for rec in recs)


def test_no_convergence_writes_trailer(monkeypatch, capsys):
    def stuck(*args, **kwargs):
        raise QuadratureNoConvergence("budget exhausted", 0.5, 1e-3)

    monkeypatch.setattr(cli, "p_integral", stuck)
    assert cli.main(["kernel", "--t", "1", "--r", "0.5", "--quiet"]) == 3
    (trailer,) = _records(capsys.readouterr().out)
    assert trailer["record"] == "trailer"
    assert trailer["exit_code"] == 3
    assert trailer["value"] == 0.5 and trailer["err_estimate"] == 1e-3
