import json
from importlib import resources

import pytest

from fuzzy_hvac import cli

DAY = str(resources.files("fuzzy_hvac.data").joinpath("day.csv"))


def run(capsys, *argv):
    try:
        code = cli.main(list(argv))
    except SystemExit as exc:  # argparse rejections
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def test_simulate_compare(capsys):
    code, out, _ = run(capsys, "simulate")
    assert code == 0
    assert "combined:" in out and "baseline" in out and "fuzzy" in out


def test_simulate_csv_report(tmp_path, capsys):
    target = tmp_path / "r.csv"
    code, out, _ = run(capsys, "simulate", "--mode", "baseline", "--format", "csv",
                       "--report", str(target), "--data", DAY)
    assert code == 0 and out == ""
    assert target.read_text().startswith("time,controller,state,action_value\n")


def test_thresholds_override(tmp_path, capsys):
    path = tmp_path / "t.json"
    path.write_text(json.dumps({"heat_max_below": 10, "heat_normal_range": [10, 17],
                                "off_range": [18, 22], "cool_normal_range": [23, 25],
                                "cool_max_above": 25}))
    code, out, _ = run(capsys, "simulate", "--mode", "baseline", "--format", "csv",
                       "--thresholds", str(path))
    assert code == 0
    assert "HeatMax" not in out


@pytest.mark.parametrize("argv", [
    [],
    ["simulate", "--mode", "pid"],
    ["simulate", "--centroid-step", "0"],
    ["poll", "--source", "midgar", "--endpoint", "http://x", "--field", "value"],
    ["poll", "--source", "file", "--endpoint", DAY, "--source", "midgar", "--endpoint", "u"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1 and "error" in err


def test_bad_thresholds_file(tmp_path, capsys):
    path = tmp_path / "t.json"
    path.write_text('{"heat_max_below": 30}')
    code, _, _ = run(capsys, "simulate", "--mode", "baseline", "--thresholds", str(path))
    assert code == 2


def test_data_errors(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("time,humidity,temp_outdoor,temp_indoor\n00:00,x,1,2\n")
    code, _, err = run(capsys, "simulate", "--data", str(bad))
    assert code == 2 and "line 2" in err
    code, _, _ = run(capsys, "simulate", "--data", str(tmp_path / "missing.csv"))
    assert code == 2
    rules = tmp_path / "r.rules"
    rules.write_text("variable x range 0 1\n  term a 0 zero 1 1\n")
    code, _, err = run(capsys, "simulate", "--mode", "fuzzy", "--config", str(rules))
    assert code == 2 and "line 2" in err


def test_feed_failure(capsys):
    argv = ["poll", "--interval", "0.01", "--max-failures", "1"]
    for ch in ("humidity", "outdoor_temp", "indoor_temp"):
        argv += ["--source", "midgar", "--endpoint", "http://127.0.0.1:9/x",
                 "--field", "value", "--channel", ch]
    code, _, err = run(capsys, *argv)
    assert code == 3 and "feed failure" in err


def test_poll_file_replay(capsys):
    code, out, _ = run(capsys, "poll", "--source", "file", "--endpoint", DAY,
                       "--interval", "0.001", "--max-ticks", "3")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 3
    first = lines[0].split()
    assert first[0] == "00:00"
    assert [f.split("=")[0] for f in first[2:]] == ["yellow", "red", "blue"]
