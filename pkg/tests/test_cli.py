import math

import numpy as np
import pytest
from click.testing import CliRunner

from oracles import sqrt_theta
from grandlebesgue.cli import main
from grandlebesgue.scalar_fn import read_header_csv, write_header_csv


@pytest.fixture
def runner():
    return CliRunner()


def rows_of(path):
    meta, header, rows = read_header_csv(path)
    return meta, header, np.array([[float(v) for v in r] for r in rows])


def test_fundamental_writes_ratio_column(runner, tmp_path):
    out = tmp_path / "f.csv"
    res = runner.invoke(main, ["fundamental", "--psi", "power:m=2", "--delta-lo", "1e-8",
                               "--delta-hi", "1", "--n", "200", "-o", str(out)])
    assert res.exit_code == 0, res.output
    _, header, data = rows_of(out)
    assert header == ["delta", "phi_direct", "theta", "ratio"]
    assert data.shape == (200, 4)
    assert data[0, 3] == pytest.approx(1.165, abs=2e-3)


def test_fundamental_to_stdout(runner):
    res = runner.invoke(main, ["fundamental", "--psi", "power:m=2", "--n", "3"])
    assert res.exit_code == 0
    assert "delta,phi_direct,theta,ratio" in res.output


def test_hypothesis_failure_exits_one(runner):
    res = runner.invoke(main, ["fundamental", "--psi", "power:m=1"])
    assert res.exit_code == 1
    assert "p/psi(p) must be strictly increasing" in res.output


def test_missing_file_exits_two(runner, tmp_path):
    res = runner.invoke(main, ["invert", "--phi", str(tmp_path / "nope.csv")])
    assert res.exit_code == 2


def test_invert_recovers_sqrt(runner, tmp_path):
    d = np.geomspace(1e-12, 1, 400)
    src = tmp_path / "theta_sqrt.csv"
    write_header_csv(src, {"rule": "loglog"}, ["x", "value"], zip(d, sqrt_theta(d)))
    out = tmp_path / "psi.csv"
    res = runner.invoke(main, ["invert", "--phi", str(src), "--C", "0.3678794",
                               "--p-lo", "1.5", "--p-hi", "20", "-o", str(out)])
    assert res.exit_code == 0, res.output
    meta, _, data = rows_of(out)
    np.testing.assert_allclose(data[:, 1], np.sqrt(data[:, 0]), rtol=0.01)
    assert float(meta["C"]) == pytest.approx(0.3678794)


def test_conjugate_table(runner, tmp_path):
    out = tmp_path / "c.csv"
    res = runner.invoke(main, ["conjugate", "--g", "quadratic:a=0.5", "--q-hi", "4", "--n", "5",
                               "-o", str(out)])
    assert res.exit_code == 0
    _, _, data = rows_of(out)
    np.testing.assert_allclose(data[:, 1], data[:, 0] ** 2 / 2, rtol=1e-12)


def test_norm_command(runner, tmp_path):
    src = tmp_path / "f.csv"
    src.write_text("weight,value\n" + "".join(f"0.25,{v}\n" for v in (1, 2, 3, 4)))
    out = tmp_path / "n.csv"
    res = runner.invoke(main, ["norm", "--data", str(src), "--p", "1", "--p", "2",
                               "--psi", "power:m=2", "-o", str(out)])
    assert res.exit_code == 0, res.output
    _, header, rows = read_header_csv(out)
    values = {r[0]: float(r[1]) for r in rows}
    assert values["lp[1]"] == pytest.approx(2.5)
    assert values["lp[2]"] == pytest.approx(math.sqrt(7.5))
    assert values["luxemburg"] <= values["amemiya"] <= 2 * values["luxemburg"]


def test_roundtrip_command(runner, tmp_path):
    out = tmp_path / "rt.csv"
    res = runner.invoke(main, ["roundtrip", "--psi", "power:m=2", "-o", str(out)])
    assert res.exit_code == 0, res.output
    meta, _, data = rows_of(out)
    assert float(meta["max_rel_err"]) < 0.02
    assert np.max(data[:, 3]) < 0.02


def test_eof_command_exports_patch_constants(runner, tmp_path):
    out = tmp_path / "eof.csv"
    res = runner.invoke(main, ["eof", "--psi", "power:m=2", "--atoms", "1000", "-o", str(out)])
    assert res.exit_code == 0, res.output
    meta, header, rows = read_header_csv(out)
    assert {"C1", "C2", "C3", "C4", "C5", "total_mass"} <= set(meta)
    assert header == ["id", "gls", "orlicz", "ratio"] and len(rows) == 3


def test_output_is_deterministic(runner, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        res = runner.invoke(main, ["fundamental", "--psi", "power:m=4", "--n", "20",
                                   "-o", str(path)])
        assert res.exit_code == 0
    assert a.read_bytes() == b.read_bytes()


def test_config_defaults_and_flag_precedence(runner, tmp_path):
    cfg = tmp_path / "job.cfg"
    cfg.write_text("# defaults\nn = 5\ndelta-lo = 0.01\n")
    res = runner.invoke(main, ["--config", str(cfg), "fundamental", "--psi", "power:m=2"])
    assert res.exit_code == 0
    assert len(res.output.strip().splitlines()) == 2 + 5
    res = runner.invoke(main, ["--config", str(cfg), "fundamental", "--psi", "power:m=2",
                               "--n", "7"])
    assert len(res.output.strip().splitlines()) == 2 + 7


def test_bad_grid_is_a_usage_error(runner):
    res = runner.invoke(main, ["fundamental", "--psi", "power:m=2", "--delta-lo", "1",
                               "--delta-hi", "0.5"])
    assert res.exit_code == 2


def test_selftest_passes(runner):
    res = runner.invoke(main, ["--seed", "7", "selftest"])
    assert res.exit_code == 0, res.output
    assert "FAIL" not in res.output
