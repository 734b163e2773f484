import importlib.resources
import json

import pytest

from windffs.cli import main


def bundled(name):
    return str(importlib.resources.files("windffs") / "configs" / name)


def test_simulate_subcommand(tmp_path, capsys):
    rc = main(["simulate", "--config", bundled("single_wf.yaml"),
               "--out", str(tmp_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "nadir" in out and "deficit estimate" in out
    assert (tmp_path / "single_wf_timeseries.csv").exists()


def test_tune_subcommand(capsys):
    rc = main(["tune", "--config", bundled("single_wf.yaml")])
    assert rc == 0
    out = capsys.readouterr().out
    assert "K_p0 = 147.9" in out
    assert "K_I0 = 13.5000" in out


def test_campaign_subcommand(tmp_path, capsys):
    rc = main(["campaign", "--kind", "gr_comparison", "--samples", "50",
               "--seed", "1", "--out", str(tmp_path)])
    assert rc == 0
    assert (tmp_path / "campaign_gr_comparison_summary.json").exists()


def test_experiment_subcommand(tmp_path, capsys):
    rc = main(["experiment", "--id", "fig11b", "--out", str(tmp_path)])
    assert rc == 0
    summary = json.loads((tmp_path / "fig11b" / "summary.json").read_text())
    assert summary["passed"] is True


def test_compare_subcommand(tmp_path, capsys):
    rc = main(["compare", "--configs", bundled("single_wf.yaml"),
               "--controllers", "proposed_ti_pi", "none",
               "--out", str(tmp_path)])
    assert rc == 0
    table = (tmp_path / "compare_nadir.csv").read_text()
    assert "proposed_ti_pi" in table


def test_out_dir_env_default(monkeypatch, tmp_path):
    monkeypatch.setenv("WINDFFS_OUT_DIR", str(tmp_path / "envout"))
    from windffs.cli import _default_out
    assert _default_out() == str(tmp_path / "envout")


def test_unknown_experiment_rejected(tmp_path):
    with pytest.raises(SystemExit):
        main(["experiment", "--id", "fig99", "--out", str(tmp_path)])
