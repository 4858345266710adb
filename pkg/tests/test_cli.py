import json

import pytest

from slipgrip.harness import import_trace
from slipgrip.harness.cli import build_parser, main


def _report(capsys):
    return json.loads(capsys.readouterr().out)


def test_step_test_writes_json_trace(tmp_path, capsys):
    code = main(["step-test", "--object", "case", "--seed", "1", "--out", str(tmp_path),
                 "--format", "json", "--decimation", "10"])
    assert code == 0
    rep = _report(capsys)
    assert rep["t_s"] is not None
    assert (tmp_path / "trace.json").exists()
    assert json.loads((tmp_path / "report.json").read_text())["t_r"] == rep["t_r"]
    tr = import_trace(tmp_path / "trace.json")
    assert tr.metadata["seed"] == 1 and len(tr) > 0


def test_rig_test_report(capsys):
    assert main(["rig-test", "linear", "--surface", "wood", "--runs", "2"]) == 0
    rep = _report(capsys)
    assert rep["runs"] == 2 and "distance_mm" in rep


def test_analytic_bode(capsys):
    assert main(["bode", "--analytic", "--freq", "64", "--plant-T", "0"]) == 0
    rep = _report(capsys)
    assert rep["points"][0]["phase_deg"] == pytest.approx(-46.08, abs=0.01)


def test_run_scenario_file(tmp_path, capsys):
    path = tmp_path / "s.toml"
    path.write_text('object = "wood"\nduration = 0.05\ninitial_force = 5.0\n')
    assert main(["run", str(path), "--out", str(tmp_path)]) == 0
    rep = _report(capsys)
    assert "events" in rep
    assert (tmp_path / "trace.csv").read_text().startswith("t,")


def test_bad_scenario_exits_with_config_error(tmp_path, capsys):
    path = tmp_path / "s.toml"
    path.write_text("duration = -1.0\n")
    assert main(["run", str(path)]) == 2
    err = _report(capsys)["error"]
    assert err["type"] == "ConfigError" and err["path"] == "duration"


def test_missing_scenario_file(tmp_path, capsys):
    assert main(["run", str(tmp_path / "nope.toml")]) == 5
    assert _report(capsys)["error"]["type"] == "OSError"


def test_bad_decimation(capsys):
    assert main(["rig-test", "linear", "--decimation", "0"]) == 2
    assert _report(capsys)["error"]["path"] == "decimation"


def test_unknown_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["teleport"])
    assert info.value.code != 0


@pytest.mark.parametrize("argv, attr, value", [
    (["slip-test", "linear", "--target", "20", "--duration", "5"], "target", 20.0),
    (["slip-test", "rotational", "--object", "wood"], "object", "wood"),
    (["slip-test", "hinge"], "kind", "hinge"),
    (["slip-test", "avoidance", "--seed", "3"], "seed", 3),
    (["demo", "--object", "case"], "object", "case"),
    (["explore", "--format", "json"], "format", "json"),
])
def test_parser_accepts(argv, attr, value):
    assert getattr(build_parser().parse_args(argv), attr) == value
