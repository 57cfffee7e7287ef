# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""Tests for the command line interface."""
import json

import numpy as np
import pandas as pd
import pytest

from rankdyn.archive import PosteriorArchive
from rankdyn.arrobart_dynamic import forecast_one_step
from rankdyn.cli import CONFIG_SCHEMA, main
from rankdyn.common import derive_rng
from rankdyn.pipeline import FORECAST_STREAM, config_from_archive
from rankdyn.rankings import read_ranking_csv

FAST = ["--n-burnin", "3", "--n-draws", "3", "--seed", "5"]


def simulate_into(path, scenario="dyn1", n_times=5):
    """Write a small simulated panel to a directory."""
    argv = ["simulate", "--scenario", scenario, "--sigma", "1"]
    argv += ["--n-items", "4", "--n-rankers", "2", "-o", str(path)]
    if n_times is not None:
        argv += ["--n-times", str(n_times)]
    assert main(argv) == 0
    return path / "rankings.csv"


def archive_files(path):
    """Return the bytes of every file below an archive directory."""
    return {
        item.relative_to(path).as_posix(): item.read_bytes()
        for item in sorted(path.rglob("*"))
        if item.is_file()
    }


def test_schema(capsys):
    """The schema is printed as JSON."""
    assert main(["schema"]) == 0
    schema = json.loads(capsys.readouterr().out)
    assert schema == json.loads(json.dumps(CONFIG_SCHEMA))


def test_version(capsys):
    """The version flag exits after printing the version."""
    with pytest.raises(SystemExit) as error:
        main(["--version"])
    assert error.value.code == 0
    assert capsys.readouterr().out.startswith("rankdyn ")


def test_simulate_is_reproducible(tmp_path):
    """Reruns with the same seed write identical files."""
    first = simulate_into(tmp_path / "first")
    second = simulate_into(tmp_path / "second")
    assert first.read_bytes() == second.read_bytes()
    truth = tmp_path / "first" / "truth.csv"
    other = tmp_path / "second" / "truth.csv"
    assert truth.read_bytes() == other.read_bytes()
    frame = pd.read_csv(first)
    assert list(frame.columns[:4]) == ["time", "ranker", "item", "rank"]
    assert len(frame) == 4 * 2 * 5


@pytest.mark.parametrize(
    "argv",
    [
        ["simulate", "--scenario", "dyn1", "--sigma", "0"],
        ["simulate", "--scenario", "dyn4", "--sigma", "1"],
        ["simulate", "--sigma", "1"],
        [
            "simulate",
            "--scenario",
            "static1",
            "--sigma",
            "1",
            "--n-times",
            "3",
        ],
        ["evaluate"],
    ],
)
def test_usage_errors(argv, tmp_path):
    """Invalid settings exit with code 2."""
    assert main(argv + ["-o", str(tmp_path)]) == 2


def test_config_file(tmp_path):
    """Settings are read from a file and flags override them."""
    config = tmp_path / "config.json"
    settings = {
        "data": {"scenario": "static2", "sigma": 1.0, "n_items": 5},
        "output": str(tmp_path / "from_file"),
    }
    config.write_text(json.dumps(settings))
    assert main(["simulate", "--config", str(config), "--n-rankers", "2"]) == 0
    frame = pd.read_csv(tmp_path / "from_file" / "rankings.csv")
    assert len(frame) == 5 * 2
    config.write_text(json.dumps({"data": {"scenario": 1}}))
    assert main(["simulate", "--config", str(config)]) == 2
    config.write_text("{not json")
    assert main(["simulate", "--config", str(config)]) == 2


def test_bad_ranking_file(tmp_path):
    """Invalid rankings exit with code 3."""
    path = tmp_path / "bad.csv"
    path.write_text("time,ranker,item,rank\n1,a,x,1\n1,a,y,1\n")
    code = main(["fit", str(path), "--model", "robart", "-o", str(tmp_path)])
    assert code == 3


def test_dynamic_fit_needs_two_periods(tmp_path):
    """A single period cannot be fitted by a dynamic model."""
    data = simulate_into(tmp_path / "data", scenario="static1", n_times=None)
    code = main(
        ["fit", str(data), "--model", "arrobart", "-o", str(tmp_path / "a")]
    )
    assert code == 2
    code = main(["fit", str(data), "--model", "borda", "-o", str(tmp_path)])
    assert code == 2


def test_fit_forecast_evaluate(tmp_path, capsys):
    """The commands chain through the files they write."""
    data = simulate_into(tmp_path / "data")
    archive = tmp_path / "archive"
    argv = ["fit", str(data), "--model", "arrolinear", "-o", str(archive)]
    assert main(argv + FAST) == 0
    assert (archive / "config.json").exists()
    more = tmp_path / "more"
    argv = ["fit", str(data), "--resume", str(archive), "-o", str(more)]
    assert main(argv + ["--n-draws", "2"]) == 0
    assert PosteriorArchive.load(more).n_draws == 5

    ahead = tmp_path / "ahead"
    argv = ["forecast", str(data), "--archive", str(archive)]
    assert main(argv + ["-o", str(ahead)]) == 0
    points = pd.read_csv(ahead / "forecast_points.csv", dtype={"time": str})
    assert set(points["time"]) == {"6"}
    assert "observed_rank" not in points.columns

    window = tmp_path / "window"
    argv = ["forecast", str(data), "--model", "arrolinear", "-o", str(window)]
    assert main(argv + FAST + ["--test-periods", "2"]) == 0
    points = pd.read_csv(window / "forecast_points.csv", dtype={"time": str})
    assert set(points["time"]) == {"4", "5"}
    probabilities = pd.read_csv(window / "forecast_probabilities.csv")
    assert len(probabilities) == 2 * 2 * 4 * 4

    scores = tmp_path / "scores"
    argv = ["evaluate", "--forecasts", str(window / "forecast_points.csv")]
    assert main(argv + ["-o", str(scores)]) == 0
    taus = pd.read_csv(scores / "metrics.csv")
    assert len(taus) == 2 * 2
    assert taus["tau"].between(0, 1).all()
    assert (scores / "metrics_summary.csv").exists()
    capsys.readouterr()

    truth = tmp_path / "truth_scores"
    argv = [
        "evaluate",
        "--forecasts",
        str(window / "forecast_points.csv"),
        "--data",
        str(data),
        "--truth",
        str(tmp_path / "data" / "truth.csv"),
        "-o",
        str(truth),
    ]
    assert main(argv) == 0
    assert "mean_tau" in capsys.readouterr().out


@pytest.mark.parametrize(
    "model, extra",
    [("arrobart", []), ("arrolinear", ["--per-ranker"])],
)
def test_fit_is_reproducible(tmp_path, model, extra):
    """A seeded fit writes the same archive for any number of threads."""
    data = simulate_into(tmp_path / "data")
    archives = {}
    for name, threads in [("one", "1"), ("again", "1"), ("four", "4")]:
        output = tmp_path / name
        argv = ["fit", str(data), "--model", model, "-o", str(output)]
        argv += ["--threads", threads]
        assert main(argv + FAST + extra) == 0
        archives[name] = archive_files(output)
    assert "config.json" in {key.split("/")[-1] for key in archives["one"]}
    if extra:
        assert any(key.startswith("ranker_") for key in archives["one"])
    assert archives["again"] == archives["one"]
    assert archives["four"] == archives["one"]


def test_archive_forecast_stream(tmp_path):
    """Archive forecasts draw from the forecast stream of the period."""
    data = simulate_into(tmp_path / "data")
    archive = tmp_path / "archive"
    argv = ["fit", str(data), "--model", "arrolinear", "-o", str(archive)]
    assert main(argv + FAST) == 0
    ahead = tmp_path / "ahead"
    argv = ["forecast", str(data), "--archive", str(archive)]
    assert main(argv + ["-o", str(ahead)]) == 0
    written = pd.read_csv(ahead / "forecast_probabilities.csv")

    panel = read_ranking_csv(data)
    loaded = PosteriorArchive.load(archive)
    _, config = config_from_archive(loaded)
    rng = derive_rng(config.seed, FORECAST_STREAM, panel.n_times, 0)
    expected = forecast_one_step(loaded, panel, config, rng)
    np.testing.assert_array_equal(
        written["probability"],
        expected.probability_frame()["probability"],
    )


def test_study(tmp_path, capsys):
    """A study writes the replications and the ratio table."""
    argv = [
        "evaluate",
        "--study",
        "--scenario",
        "static1",
        "--sigmas",
        "0.5",
        "2",
        "--n-items",
        "5",
        "--n-rankers",
        "2",
        "--models",
        "rolinear",
        "borda",
        "--benchmark",
        "rolinear",
        "--replications",
        "2",
        "-o",
        str(tmp_path),
    ]
    assert main(argv + FAST) == 0
    results = pd.read_csv(tmp_path / "study.csv")
    assert len(results) == 2 * 2 * 2
    summary = pd.read_csv(tmp_path / "study_summary.csv")
    assert list(summary.columns) == ["sigma", "rolinear", "borda"]
    assert "rolinear" in capsys.readouterr().out
