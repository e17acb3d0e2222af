import numpy as np
import pytest

from pmkdv.cli import main
from pmkdv.io import read_csv_snapshots


def test_check_suite_passes(capsys):
    assert main(["check", "--suite", "weight"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out


def test_unknown_suite_is_usage_error(capsys):
    assert main(["check", "--suite", "nope"]) == 2


def test_argparse_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["compare", "--frame"])
    assert exc.value.code == 2


def test_bad_config_file(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text('frame = "sideways"\n')
    assert main(["effective", "--config", str(p)]) == 2
    assert main(["effective", "--config", str(tmp_path / "missing.toml")]) == 2


def test_effective_writes_csv(tmp_path, capsys):
    rc = main(["effective", "--preset", "fig1", "--output-dir", str(tmp_path)])
    assert rc == 0
    lines = (tmp_path / "effective.csv").read_text().splitlines()
    assert lines[0] == "t,a,c,bracket_vee,bracket_vxe"
    assert (tmp_path / "config.toml").exists()


def test_simulate_writes_snapshots(tmp_path):
    rc = main(["simulate", "--preset", "fig1", "--n", "256", "--t-final", "0.002",
               "--output-dir", str(tmp_path)])
    assert rc == 0
    t, U = read_csv_snapshots(tmp_path / "snapshots.csv")
    assert U.shape[1] == 256 and np.isclose(t[-1], 0.002)
    assert (tmp_path / "track.csv").exists()


def test_blow_up_exit_code(tmp_path, capsys):
    rc = main(["simulate", "--n", "64", "--c0", "3", "--dt", "0.05", "--t-final", "20",
               "--potential", "zero"])
    assert rc == 1
    assert "numerical failure" in capsys.readouterr().err


def test_config_file_round_trip(tmp_path, capsys):
    from pmkdv.experiments import RunConfig
    cfg = RunConfig(n=256, t_final=0.002, snapshot_every=20)
    p = tmp_path / "run.toml"
    p.write_text(cfg.to_toml())
    assert main(["compare", "--config", str(p), "--output-dir", str(tmp_path / "o")]) == 0
    assert RunConfig.load(tmp_path / "o" / "config.toml").t_final == 0.002
