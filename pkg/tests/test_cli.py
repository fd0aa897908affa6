import csv
import json
import math
import os
import stat

import pytest

from coexlab import campaign
from coexlab.cli import main
from coexlab.config import ScenarioConfig
from coexlab.errors import InvalidParameter, OutputError
from coexlab.presets import CALIBRATION, calibrated, bf_sweep_grid, ax_sweep_grid, failure_table_grid


def files(d):
    return sorted(p.name for p in d.iterdir())


def test_sweep_produces_one_config_per_value():
    cfgs = campaign.sweep_configs(ScenarioConfig(), "n_bf", [1, 3, 5])
    assert [c.population.n_bf_aps for c in cfgs] == [1, 3, 5]
    assert [c.scenario_id for c in cfgs] == ["default_n_bf1", "default_n_bf3", "default_n_bf5"]


@pytest.mark.parametrize(
    "axis,value,check",
    [
        ("n_ax", "4", lambda c: c.population.n_ax_aps == 4),
        ("interval", "50", lambda c: c.arrival.interval_ms == 50),
        ("edca_class", "vo", lambda c: c.population.edca_bf.cw_min == 4),
        ("antenna", "8x8", lambda c: c.sensing.n_tx == 8 and c.sensing.n_rx == 8),
        ("rate", "100", lambda c: c.timing.rate_R == 100),
    ],
)
def test_apply_axis(axis, value, check):
    assert check(campaign.apply_axis(ScenarioConfig(), axis, value))


@pytest.mark.parametrize(
    "axis,values", [("bogus", ["1"]), ("n_bf", []), ("n_bf", ["x"]), ("antenna", ["4x8"]), ("edca_class", ["XX"])]
)
def test_bad_sweeps(axis, values):
    with pytest.raises(InvalidParameter):
        campaign.sweep_configs(ScenarioConfig(), axis, values)


def test_parse_sweep():
    assert campaign.parse_sweep("n_bf=1, 2,3") == ("n_bf", ["1", "2", "3"])
    with pytest.raises(InvalidParameter):
        campaign.parse_sweep("n_bf")
    with pytest.raises(InvalidParameter):
        campaign.parse_sweep("n_bf=")


def test_preset_grids():
    assert [c.population.n_bf_aps for c in bf_sweep_grid()] == list(range(1, 10))
    assert [c.population.n_ax_aps for c in ax_sweep_grid()] == list(range(1, 10))
    assert len(failure_table_grid()) == 25
    c = calibrated()
    assert c.timing.rate_R == CALIBRATION["rate_R"]
    assert c.sensing.t_ndp == CALIBRATION["frame_time_us"]


def test_emit_and_json_round_trip(tmp_path):
    base = ScenarioConfig(duration_s=0.5, seeds=(0, 1), mode="both")
    res = campaign.run_campaign(campaign.sweep_configs(base, "n_bf", [1, 2]))
    written = campaign.emit(res, ["csv", "json"], tmp_path, campaign="demo")
    assert len(written) == len(files(tmp_path)) == 2 * 3 + 1
    doc = json.loads((tmp_path / "scenario_default_n_bf2.json").read_text())
    assert doc["config"]["population"]["n_bf_aps"] == 2
    assert {c["metric"] for c in doc["comparison"]} == {"aggregate_bps", "mean_latency_us"}
    with open(tmp_path / "scenario_default_n_bf1.csv") as fh:
        rows = list(csv.DictReader(fh))
    metrics = {r["metric"] for r in rows}
    assert {"latency_us", "failure_rate_pct", "analytic_mean_latency_us", "rel_error_mean_latency_us"} <= metrics
    with open(tmp_path / "campaign_demo.csv") as fh:
        assert len(list(csv.DictReader(fh))) == 2


def test_emit_rejects_unknown_format(tmp_path):
    with pytest.raises(InvalidParameter):
        campaign.emit([], ["xml"], tmp_path)


@pytest.mark.skipif(os.geteuid() == 0, reason="root ignores directory permissions")
def test_emit_unwritable_dir(tmp_path):
    d = tmp_path / "ro"
    d.mkdir()
    d.chmod(stat.S_IRUSR | stat.S_IXUSR)
    res = campaign.run_campaign([ScenarioConfig(duration_s=0.1, seeds=(0,))])
    with pytest.raises(OutputError):
        campaign.emit(res, ["csv"], d)


def test_emit_into_file_path_is_output_error(tmp_path):
    f = tmp_path / "file"
    f.write_text("x")
    res = campaign.run_campaign([ScenarioConfig(duration_s=0.1, seeds=(0,))])
    with pytest.raises(OutputError):
        campaign.emit(res, ["csv"], f)


def test_cli_sweep_files_and_determinism(tmp_path):
    args = ["--sweep", "n_bf=1,3,5", "--seeds", "3", "--duration", "0.5"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b), "--threads", "2"]) == 0
    names = files(a)
    assert len([n for n in names if n.startswith("scenario_") and not n.endswith("_hist.csv")]) == 6
    assert names == files(b)
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()


def test_cli_analytic_mode_writes_no_histogram(tmp_path):
    assert main(["--mode", "analytic", "--format", "json", "--out", str(tmp_path)]) == 0
    assert files(tmp_path) == ["scenario_default.json"]
    doc = json.loads((tmp_path / "scenario_default.json").read_text())
    assert "sim" not in doc and doc["analytic"]["mean_latency_us"] > 0


def test_cli_seed_forms(tmp_path):
    for spec in ("2", "4,9", "0:3"):
        assert main(["--seeds", spec, "--duration", "0.1", "--format", "csv", "--out", str(tmp_path / spec.replace(":", "_"))]) == 0


@pytest.mark.parametrize(
    "args",
    [["--sweep", "bogus=1"], ["--seeds", "x"], ["--seeds", "3:1"], ["--duration", "-1"], ["--format", "xml"]],
)
def test_cli_validation_exit_code(tmp_path, args, capsys):
    assert main(args + ["--out", str(tmp_path)]) == 2
    assert "validation error" in capsys.readouterr().err


def test_cli_bad_config_exit_code(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"population": {"edca_bf": {"cw_min": 0}}}))
    assert main(["--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert "cw_min" in capsys.readouterr().err


def test_cli_output_error_exit_code(tmp_path):
    f = tmp_path / "file"
    f.write_text("x")
    assert main(["--mode", "analytic", "--out", str(f)]) == 5


def test_cli_unstable_exit_code(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"mode": "analytic", "arrival": {"mode": "poisson", "rate_hz": 100000}}))
    assert main(["--config", str(cfg), "--out", str(tmp_path)]) == 4


def test_nan_written_as_null(tmp_path):
    base = ScenarioConfig(duration_s=0.1, seeds=(0,)).with_population(n_bf_aps=0, n_ax_aps=1)
    res = campaign.run_campaign([base])
    campaign.emit(res, ["json"], tmp_path)
    doc = json.loads((tmp_path / "scenario_default.json").read_text())
    assert doc["sim"]["failure_rate_pct"] is None
    assert math.isnan(res[0].failure_pct)
