import yaml

from depasim import cli, scenario

from conftest import constant_rate_config


def write_tiny_scenario(tmp_path, **overrides):
    cfg = constant_rate_config(rate=5.0, duration=20.0, **overrides)
    path = tmp_path / "tiny.yaml"
    path.write_text(yaml.safe_dump(cfg.to_dict()))
    return str(path)


def test_presets_subcommand(capsys):
    assert cli.main(["presets"]) == cli.EXIT_OK
    out = capsys.readouterr().out.split()
    assert out == list(scenario.PRESET_NAMES)


def test_gen_trace_matches_packaged_data(tmp_path, capsys):
    out_path = tmp_path / "trace.txt"
    assert cli.main(["gen-trace", "--out", str(out_path)]) == cli.EXIT_OK
    generated = out_path.read_bytes()
    packaged = open(scenario.packaged_trace_path(), "rb").read()
    assert generated == packaged


def test_run_yaml_scenario_writes_csvs(tmp_path, capsys):
    path = write_tiny_scenario(tmp_path)
    out_dir = tmp_path / "out"
    code = cli.main(["run", path, "--out", str(out_dir), "--check"])
    captured = capsys.readouterr().out
    assert code == cli.EXIT_OK
    assert (out_dir / "frames.csv").exists()
    assert (out_dir / "summary.csv").exists()
    assert "CHECK OK" in captured


def test_run_is_deterministic_for_fixed_seed(tmp_path, capsys):
    path = write_tiny_scenario(tmp_path)
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert cli.main(["run", path, "--seed", "9", "--out", str(out_a)]) == cli.EXIT_OK
    assert cli.main(["run", path, "--seed", "9", "--out", str(out_b)]) == cli.EXIT_OK
    assert (out_a / "frames.csv").read_bytes() == (out_b / "frames.csv").read_bytes()
    assert (out_a / "summary.csv").read_bytes() == (out_b / "summary.csv").read_bytes()


def test_run_seeds_change_the_outcome(tmp_path, capsys):
    path = write_tiny_scenario(tmp_path)
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert cli.main(["run", path, "--seed", "1", "--out", str(out_a)]) == cli.EXIT_OK
    assert cli.main(["run", path, "--seed", "2", "--out", str(out_b)]) == cli.EXIT_OK
    assert (out_a / "frames.csv").read_bytes() != (out_b / "frames.csv").read_bytes()


def test_run_multiple_runs_aggregates(tmp_path, capsys):
    path = write_tiny_scenario(tmp_path)
    out_dir = tmp_path / "out"
    code = cli.main(["run", path, "--runs", "2", "--out", str(out_dir)])
    captured = capsys.readouterr().out
    assert code == cli.EXIT_OK
    assert "runs=2" in captured


def test_run_duration_override(tmp_path, capsys):
    path = write_tiny_scenario(tmp_path)
    out_dir = tmp_path / "out"
    code = cli.main(["run", path, "--duration", "10", "--out", str(out_dir)])
    assert code == cli.EXIT_OK
    frames = (out_dir / "frames.csv").read_text().splitlines()
    assert len(frames) == 1 + 11


def test_run_unknown_scenario_fails(tmp_path, capsys):
    code = cli.main(["run", str(tmp_path / "missing.yaml")])
    assert code == cli.EXIT_RUN_FAILURE
    assert "error:" in capsys.readouterr().err


def test_run_invalid_yaml_fails(tmp_path, capsys):
    path = tmp_path / "bad.yaml"
    path.write_text("duration: -4\n")
    code = cli.main(["run", str(path)])
    assert code == cli.EXIT_RUN_FAILURE
