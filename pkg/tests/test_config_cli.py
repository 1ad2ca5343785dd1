import json

import pytest

from farmscape.cli import main
from farmscape.config import (
    PROFILE_DEFAULTS,
    RunConfig,
    load_config,
    with_overrides,
    write_config,
)
from farmscape.landscape import scaling_laws


def write(tmp_path, text: str):
    path = tmp_path / "config.toml"
    path.write_text(text)
    return path


def test_missing_and_empty_configs_give_defaults(tmp_path):
    assert load_config(None) == RunConfig()
    assert load_config(write(tmp_path, "")) == RunConfig()


def test_ecology_alias_q(tmp_path):
    cfg = load_config(write(tmp_path, "[ecology]\nq = 0.5\n"))
    assert cfg.eco.selectivity == 0.5


def test_out_of_range_selectivity_rejected(tmp_path):
    with pytest.raises(ValueError):
        load_config(write(tmp_path, "[ecology]\nq = 1.5\n"))


def test_unknown_keys_rejected_by_name(tmp_path):
    with pytest.raises(ValueError, match="run.bogus"):
        load_config(write(tmp_path, "[run]\nbogus = 1\n"))
    with pytest.raises(ValueError, match="ecology.nope"):
        load_config(write(tmp_path, "[ecology]\nnope = 1\n"))
    with pytest.raises(ValueError, match="section"):
        load_config(write(tmp_path, "[weird]\nx = 1\n"))


def test_type_mismatches_rejected_by_name(tmp_path):
    with pytest.raises(ValueError, match="run.seed"):
        load_config(write(tmp_path, '[run]\nseed = "abc"\n'))
    with pytest.raises(ValueError, match="run.seed"):
        load_config(write(tmp_path, "[run]\nseed = true\n"))
    with pytest.raises(ValueError, match="landscape.cell_area"):
        load_config(write(tmp_path, '[landscape]\ncell_area = "big"\n'))
    with pytest.raises(ValueError, match="ecology.sn_units"):
        load_config(write(tmp_path, "[ecology]\nsn_units = 3\n"))


def test_config_round_trip(tmp_path):
    src = write(
        tmp_path,
        "\n".join(
            [
                "[run]",
                "profile = 'paper'",
                "seed = 7",
                "replicates = 3",
                "[landscape]",
                "grid_rows = 60",
                "grid_cols = 50",
                "cell_area = 0.02",
                "[calibration]",
                "sobol_points = 32",
                "calibration_grid = 40",
                "targets_path = 'targets.csv'",
                "[ecology]",
                "q = 0.25",
                "sn_units = 'ha'",
                "[economics]",
                "y0 = 60.5",
                "subsidy = 350.0",
            ]
        )
        + "\n",
    )
    cfg = load_config(src)
    echo = tmp_path / "echo.toml"
    write_config(cfg, echo)
    assert load_config(echo) == cfg
    text = echo.read_text()
    assert "jobs" not in text
    assert "out_dir" not in text


def test_profile_resolution():
    desk = RunConfig()
    assert (
        desk.resolved_replicates,
        desk.resolved_sobol_points,
        desk.resolved_calibration_grid,
    ) == (10, 256, 100)
    paper = RunConfig(profile="paper")
    assert (
        paper.resolved_replicates,
        paper.resolved_sobol_points,
        paper.resolved_calibration_grid,
    ) == (100, 4096, 200)
    pinned = RunConfig(profile="paper", replicates=3)
    assert pinned.resolved_replicates == 3
    assert PROFILE_DEFAULTS["desk"]["sobol_points"] == 256


def test_with_overrides_only_touches_given_fields():
    cfg = RunConfig(seed=1)
    assert with_overrides(cfg) is cfg
    bumped = with_overrides(cfg, seed=9, jobs=4)
    assert bumped.seed == 9
    assert bumped.jobs == 4
    assert bumped.profile == cfg.profile


GRID60 = "[landscape]\ngrid_rows = 60\ngrid_cols = 60\n"


def test_cli_generate_landscape_matches_scaling_laws(tmp_path):
    cfg = write(tmp_path, GRID60)
    out = tmp_path / "out"
    rc = main(
        [
            "generate-landscape",
            "--farm-size",
            "100",
            "--seed",
            "5",
            "--config",
            str(cfg),
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    assert (out / "landscape.txt").exists()
    assert (out / "config_resolved.toml").exists()
    stats = json.loads((out / "landscape_stats.json").read_text())
    _, g, h = scaling_laws(100.0)
    cell = 1.0 / 3600.0
    assert abs(stats["realized_h"] - h) <= cell + 1e-12
    assert abs(stats["realized_g"] - g) <= cell + 1e-12
    assert stats["field_count"] >= 1


def run_simulate(tmp_path, name: str, jobs: str) -> tuple[bytes, bytes, bytes]:
    cfg = write(tmp_path, GRID60)
    out = tmp_path / name
    rc = main(
        [
            "simulate",
            "--farm-size",
            "10",
            "--seed",
            "11",
            "--replicates",
            "2",
            "--jobs",
            jobs,
            "--config",
            str(cfg),
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    return (
        (out / "simulate.csv").read_bytes(),
        (out / "simulate_summary.json").read_bytes(),
        (out / "config_resolved.toml").read_bytes(),
    )


def test_cli_simulate_outputs_are_reproducible(tmp_path):
    first = run_simulate(tmp_path, "a", "1")
    second = run_simulate(tmp_path, "b", "1")
    parallel = run_simulate(tmp_path, "c", "2")
    assert first == second
    assert first == parallel


def test_cli_usage_errors_exit_2(capsys):
    assert main([]) == 2
    assert main(["no-such-command"]) == 2
    assert main(["simulate"]) == 2  # missing required --farm-size
    capsys.readouterr()


def test_cli_runtime_errors_exit_1_with_one_line(tmp_path, capsys):
    rc = main(
        [
            "generate-landscape",
            "--farm-size",
            "10",
            "--hedgerow-share",
            "0.9",
            "--out",
            str(tmp_path / "x"),
        ]
    )
    assert rc == 1
    err = capsys.readouterr().err
    assert err.startswith("farmscape:")
    assert len(err.strip().splitlines()) == 1


def test_cli_missing_targets_file_exit_1(tmp_path, capsys):
    rc = main(
        [
            "calibrate",
            "--targets",
            str(tmp_path / "missing.csv"),
            "--out",
            str(tmp_path / "x"),
        ]
    )
    assert rc == 1
    assert "farmscape:" in capsys.readouterr().err
