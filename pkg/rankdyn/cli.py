# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""This module defines the rankdyn command line interface.

Commands::

    rankdyn simulate   write a simulated panel and its truth sidecar
    rankdyn fit        fit a model and write its posterior archive
    rankdyn forecast   one-step-ahead forecasts (expanding window)
    rankdyn evaluate   Kendall tau tables, or a full simulation study
    rankdyn schema     print the JSON schema of configuration files

Settings may be given in a JSON file (``--config``); command line flags
override the values read from the file. Exit codes: 0 on success, 2 for
configuration and usage errors, 3 for invalid ranking data and 4 for
internal errors.
"""
import argparse
import dataclasses
import json
import logging
import pathlib
import sys

import jsonschema
import pandas as pd

from rankdyn.archive import PosteriorArchive
from rankdyn.arrobart_dynamic import forecast_one_step
from rankdyn.common import ConfigError, RankDynError, derive_rng
from rankdyn.design import LAG_INPUTS
from rankdyn.pipeline import (
    FORECAST_STREAM,
    ROSTER,
    SAMPLER_SETTINGS,
    StudyPlan,
    WindowResult,
    attach_reference,
    config_from_archive,
    expanding_window,
    fit_model,
    fit_per_ranker,
    forecast_frames,
    get_variant,
    kendall_tau_table,
    make_config,
    period_label,
    reference_frame,
    run_study,
    study_table,
    summarize_taus,
)
from rankdyn.rankings import read_ranking_csv, write_ranking_csv
from rankdyn.simgen import (
    make_scenario,
    read_truth_csv,
    simulate,
    write_truth_csv,
)
from rankdyn.version import VERSION

logger = logging.getLogger("rankdyn")

# Floats are written with all significant digits so reruns are
# byte-identical and files read back to the same values.
FLOAT_FORMAT = "%.17g"

_COUNT = {"type": "integer", "minimum": 1}
_MODEL_NAME = {"enum": list(ROSTER)}

PRIOR_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "alpha": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "beta": {"type": "number", "minimum": 0},
        "k_sigma": {"type": "number", "exclusiveMinimum": 0},
        "n_trees": _COUNT,
        "n_cutpoints": _COUNT,
        "move_probabilities": {
            "type": "array",
            "items": {"type": "number", "minimum": 0},
            "minItems": 3,
            "maxItems": 3,
        },
    },
}

CONFIG_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "rankdyn experiment configuration",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "data": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "csv": {"type": "string"},
                "truth": {"type": "string"},
                "scenario": {
                    "type": "string",
                    "pattern": "^(static[1-3]|dyn[1-3])$",
                },
                "sigma": {"type": "number", "exclusiveMinimum": 0},
                "sigmas": {
                    "type": "array",
                    "items": {"type": "number", "exclusiveMinimum": 0},
                    "minItems": 1,
                },
                "seed": {"type": "integer", "minimum": 0},
                "n_items": {"type": "integer", "minimum": 2},
                "n_rankers": _COUNT,
                "n_times": _COUNT,
            },
        },
        "model": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": _MODEL_NAME,
                "models": {
                    "type": "array",
                    "items": _MODEL_NAME,
                    "minItems": 1,
                },
                "n_burnin": {"type": "integer", "minimum": 0},
                "n_draws": _COUNT,
                "thin": _COUNT,
                "seed": {"type": "integer", "minimum": 0},
                "n_trees": _COUNT,
                "prior": PRIOR_SCHEMA,
                "lag_input": {"enum": list(LAG_INPUTS)},
                "z_prior_mean": {
                    "oneOf": [
                        {"type": "number"},
                        {"type": "array", "items": {"type": "number"}},
                    ]
                },
            },
        },
        "evaluation": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "test_periods": _COUNT,
                "samples_per_draw": _COUNT,
                "reuse_posterior": {"type": "boolean"},
                "per_ranker": {"type": "boolean"},
                "replications": _COUNT,
                "benchmark": _MODEL_NAME,
            },
        },
        "output": {"type": "string"},
        "threads": _COUNT,
    },
}


def load_config(path):
    """Read and validate a JSON configuration file.

    Raises
    ------
    ConfigError
        If the file is not valid JSON.
    jsonschema.ValidationError
        If the file does not follow :py:data:`.CONFIG_SCHEMA`.

    """
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as infile:
            settings = json.load(infile)
    except json.JSONDecodeError as error:
        raise ConfigError(f"{path}: not valid JSON ({error})") from error
    jsonschema.validate(instance=settings, schema=CONFIG_SCHEMA)
    return settings


def merge_settings(settings, overrides):
    """Return settings updated by the flags that were given.

    ``overrides`` maps sections to dicts; None values are skipped.
    """
    merged = {key: value for key, value in settings.items()}
    for key, value in overrides.items():
        if isinstance(value, dict):
            section = dict(merged.get(key, {}))
            section.update(
                (name, item)
                for name, item in value.items()
                if item is not None
            )
            if section:
                merged[key] = section
        elif value is not None:
            merged[key] = value
    jsonschema.validate(instance=merged, schema=CONFIG_SCHEMA)
    return merged


def _require(section, key, what):
    if section.get(key) is None:
        raise ConfigError(f"missing {what} (setting {key})")
    return section[key]


def _output_dir(settings, default):
    path = pathlib.Path(settings.get("output", default))
    path.mkdir(parents=True, exist_ok=True)
    return path


def _sampler_settings(settings):
    model = settings.get("model", {})
    return {key: model[key] for key in SAMPLER_SETTINGS if key in model}


def _write_csv(frame, path):
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.info("Wrote %s", path)


def cmd_simulate(settings, args):
    """Simulate a scenario and write the ranking and truth files."""
    data = settings.get("data", {})
    spec = make_scenario(
        _require(data, "scenario", "scenario name"),
        _require(data, "sigma", "noise level"),
        seed=data.get("seed", 0),
        n_items=data.get("n_items"),
        n_rankers=data.get("n_rankers"),
        n_times=data.get("n_times"),
    )
    simulated = simulate(spec)
    output = _output_dir(settings, ".")
    write_ranking_csv(simulated.panel, output / "rankings.csv")
    write_truth_csv(simulated.truth, simulated.panel, output / "truth.csv")
    n_items, n_rankers, n_times = simulated.panel.shape
    print(
        f"scenario={data['scenario']} sigma={spec.sigma:g} N={n_items} "
        f"M={n_rankers} T={n_times} -> {output}"
    )


def cmd_fit(settings, args):
    """Fit a model (or continue a chain) and write the archive."""
    data = settings.get("data", {})
    panel = read_ranking_csv(_require(data, "csv", "ranking file"))
    if args.resume is not None:
        archive = PosteriorArchive.load(args.resume)
        name, config = config_from_archive(archive)
        n_draws = settings.get("model", {}).get("n_draws")
        if n_draws is not None:
            config = dataclasses.replace(config, n_draws=n_draws)
        archive = fit_model(name, panel, config, resume=archive)
        archive.save(settings.get("output", args.resume))
        return
    name = _require(settings.get("model", {}), "kind", "model")
    if get_variant(name).family == "borda":
        raise ConfigError("the Borda count has nothing to fit")
    config = make_config(name, _sampler_settings(settings))
    output = pathlib.Path(_require(settings, "output", "archive directory"))
    if not settings.get("evaluation", {}).get("per_ranker", False):
        fit_model(name, panel, config).save(output)
        return
    archives = fit_per_ranker(
        name, panel, config, threads=settings.get("threads")
    )
    for ranker, archive in zip(panel.rankers, archives):
        archive.save(output / f"ranker_{ranker}")


def _archive_forecast(path, panel, samples_per_draw):
    archive = PosteriorArchive.load(path)
    name, config = config_from_archive(archive)
    index = panel.n_times
    rng = derive_rng(config.seed, FORECAST_STREAM, index, 0)
    forecast = forecast_one_step(
        archive, panel, config, rng, samples_per_draw=samples_per_draw
    )
    result = WindowResult(
        model=name,
        time=period_label(panel, index),
        index=index,
        forecast=forecast,
    )
    return [result]


def cmd_forecast(settings, args):
    """Write point and probability forecasts."""
    data = settings.get("data", {})
    evaluation = settings.get("evaluation", {})
    panel = read_ranking_csv(_require(data, "csv", "ranking file"))
    samples = evaluation.get("samples_per_draw", 1)
    if args.archive is not None:
        results = _archive_forecast(args.archive, panel, samples)
    else:
        name = _require(settings.get("model", {}), "kind", "model")
        results = expanding_window(
            name,
            panel,
            make_config(name, _sampler_settings(settings)),
            evaluation.get("test_periods", 1),
            threads=settings.get("threads"),
            samples_per_draw=samples,
            reuse_posterior=evaluation.get("reuse_posterior", False),
            per_ranker=evaluation.get("per_ranker", False),
        )
    points, probabilities = forecast_frames(results)
    output = _output_dir(settings, ".")
    _write_csv(points, output / "forecast_points.csv")
    _write_csv(probabilities, output / "forecast_probabilities.csv")


def _study(settings):
    data = settings.get("data", {})
    model = settings.get("model", {})
    evaluation = settings.get("evaluation", {})
    sigmas = data.get("sigmas") or [_require(data, "sigma", "noise level")]
    seed = data.get("seed", 0)
    specs = tuple(
        make_scenario(
            _require(data, "scenario", "scenario name"),
            sigma,
            seed=seed,
            n_items=data.get("n_items"),
            n_rankers=data.get("n_rankers"),
            n_times=data.get("n_times"),
        )
        for sigma in sigmas
    )
    models = tuple(model.get("models") or [_require(model, "kind", "model")])
    benchmark = evaluation.get("benchmark", models[0])
    plan = StudyPlan(
        specs=specs,
        models=models,
        replications=evaluation.get("replications", 50),
        settings=_sampler_settings(settings),
        seed=seed,
    )
    results = run_study(plan, threads=settings.get("threads"))
    table = study_table(results, benchmark)
    output = _output_dir(settings, ".")
    _write_csv(results, output / "study.csv")
    _write_csv(table.reset_index(), output / "study_summary.csv")
    print(table.to_string(float_format=lambda x: f"{x:.3f}"))


def cmd_evaluate(settings, args):
    """Score forecasts (or run a study) and write the tables."""
    if args.study:
        _study(settings)
        return
    if args.forecasts is None:
        raise ConfigError("give --forecasts, or --study")
    points = pd.read_csv(
        args.forecasts, dtype={"time": str, "ranker": str, "item": str}
    )
    data = settings.get("data", {})
    if data.get("truth") is not None and data.get("csv") is None:
        raise ConfigError("the truth file needs the data file (--data)")
    if data.get("csv") is not None:
        panel = read_ranking_csv(data["csv"])
        truth = None
        if data.get("truth") is not None:
            truth = read_truth_csv(data["truth"], panel)
        points = attach_reference(points, reference_frame(panel, truth))
        column = "reference_rank"
    elif "observed_rank" in points.columns:
        column = "observed_rank"
    else:
        raise ConfigError(
            "the forecasts hold no observed ranks; give the data file"
        )
    benchmark = settings.get("evaluation", {}).get("benchmark")
    taus = kendall_tau_table(points, observed=column)
    by_time, summary = summarize_taus(taus, benchmark=benchmark)
    output = _output_dir(settings, ".")
    _write_csv(taus, output / "metrics.csv")
    _write_csv(by_time, output / "metrics_by_time.csv")
    _write_csv(summary, output / "metrics_summary.csv")
    print(summary.to_string(index=False, float_format=lambda x: f"{x:.4f}"))


def cmd_schema(settings, args):
    """Print the configuration schema."""
    print(json.dumps(CONFIG_SCHEMA, indent=2))


def _overrides(args):
    """Collect the settings given as flags."""
    get = vars(args).get
    return {
        "data": {
            "csv": get("data"),
            "truth": get("truth"),
            "scenario": get("scenario"),
            "sigma": get("sigma"),
            "sigmas": get("sigmas"),
            "seed": get("data_seed"),
            "n_items": get("n_items"),
            "n_rankers": get("n_rankers"),
            "n_times": get("n_times"),
        },
        "model": {
            "kind": get("model"),
            "models": get("models"),
            "n_burnin": get("n_burnin"),
            "n_draws": get("n_draws"),
            "thin": get("thin"),
            "seed": get("seed"),
            "n_trees": get("n_trees"),
            "lag_input": get("lag_input"),
        },
        "evaluation": {
            "test_periods": get("test_periods"),
            "samples_per_draw": get("samples_per_draw"),
            "reuse_posterior": get("reuse_posterior") or None,
            "per_ranker": get("per_ranker") or None,
            "replications": get("replications"),
            "benchmark": get("benchmark"),
        },
        "output": get("output"),
        "threads": get("threads"),
    }


def _add_sampler_arguments(parser):
    parser.add_argument("--model", choices=list(ROSTER), help="Model.")
    parser.add_argument("--n-burnin", type=int, help="Burn-in sweeps.")
    parser.add_argument("--n-draws", type=int, help="Stored draws.")
    parser.add_argument("--thin", type=int, help="Thinning interval.")
    parser.add_argument("--seed", type=int, help="Root seed of the chain.")
    parser.add_argument("--n-trees", type=int, help="Trees in the forest.")
    parser.add_argument(
        "--lag-input", choices=list(LAG_INPUTS), help="Lag of dynamic models."
    )


def _add_scenario_arguments(parser):
    parser.add_argument(
        "--scenario", help="Scenario: static1-3 or dyn1-3."
    )
    parser.add_argument("--sigma", type=float, help="Noise level.")
    parser.add_argument(
        "--data-seed", type=int, help="Root seed of the simulation."
    )
    parser.add_argument("--n-items", type=int, help="Number of items.")
    parser.add_argument("--n-rankers", type=int, help="Number of rankers.")
    parser.add_argument("--n-times", type=int, help="Number of periods.")


def get_argument_parser():
    """Return a parser for the command line arguments."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="Log more (repeat for debug output).",
    )
    common.add_argument(
        "-q", "--quiet", action="store_true", help="Log errors only."
    )
    common.add_argument("--config", help="JSON configuration file.")
    common.add_argument("--threads", type=int, help="Worker threads.")
    common.add_argument("-o", "--output", help="Output file or directory.")

    parser = argparse.ArgumentParser(
        prog="rankdyn",
        description="Nonparametric Thurstone models for rankings.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {VERSION}"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    simulate_parser = commands.add_parser(
        "simulate", parents=[common], help="Simulate a scenario."
    )
    _add_scenario_arguments(simulate_parser)
    simulate_parser.set_defaults(func=cmd_simulate)

    fit_parser = commands.add_parser(
        "fit", parents=[common], help="Fit a model."
    )
    fit_parser.add_argument("data", nargs="?", help="Ranking CSV file.")
    _add_sampler_arguments(fit_parser)
    fit_parser.add_argument(
        "--resume", help="Continue the chain of this archive."
    )
    fit_parser.add_argument(
        "--per-ranker",
        action="store_true",
        help="Fit one model per ranker.",
    )
    fit_parser.set_defaults(func=cmd_fit)

    forecast_parser = commands.add_parser(
        "forecast", parents=[common], help="Forecast rankings."
    )
    forecast_parser.add_argument("data", nargs="?", help="Ranking CSV file.")
    _add_sampler_arguments(forecast_parser)
    forecast_parser.add_argument(
        "--test-periods", type=int, help="Held-out final periods."
    )
    forecast_parser.add_argument(
        "--archive",
        help="Forecast the period after the data from this archive.",
    )
    forecast_parser.add_argument(
        "--samples-per-draw", type=int, help="Rankings per posterior draw."
    )
    forecast_parser.add_argument(
        "--reuse-posterior",
        action="store_true",
        help="Warm-start refits (approximate, faster).",
    )
    forecast_parser.add_argument(
        "--per-ranker",
        action="store_true",
        help="Fit one model per ranker.",
    )
    forecast_parser.set_defaults(func=cmd_forecast)

    evaluate_parser = commands.add_parser(
        "evaluate", parents=[common], help="Score forecasts or run a study."
    )
    evaluate_parser.add_argument(
        "--forecasts", help="Point forecast CSV from rankdyn forecast."
    )
    evaluate_parser.add_argument("--data", help="Observed ranking CSV.")
    evaluate_parser.add_argument("--truth", help="Truth sidecar CSV.")
    evaluate_parser.add_argument(
        "--benchmark", choices=list(ROSTER), help="Model to divide by."
    )
    evaluate_parser.add_argument(
        "--study", action="store_true", help="Run a simulation study."
    )
    evaluate_parser.add_argument(
        "--models", nargs="+", choices=list(ROSTER), help="Study models."
    )
    evaluate_parser.add_argument(
        "--sigmas", nargs="+", type=float, help="Study noise levels."
    )
    evaluate_parser.add_argument(
        "--replications", type=int, help="Study replications."
    )
    _add_scenario_arguments(evaluate_parser)
    _add_sampler_arguments(evaluate_parser)
    evaluate_parser.set_defaults(func=cmd_evaluate)

    schema_parser = commands.add_parser(
        "schema", parents=[common], help="Print the configuration schema."
    )
    schema_parser.set_defaults(func=cmd_schema)
    return parser


def set_up_logging(verbose=0, quiet=False):
    """Configure the root logger from the verbosity flags."""
    if quiet:
        level = logging.ERROR
    elif verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def main(argv=None):
    """Run the command line interface and return the exit code."""
    args = get_argument_parser().parse_args(argv)
    set_up_logging(args.verbose, args.quiet)
    try:
        settings = merge_settings(load_config(args.config), _overrides(args))
        args.func(settings, args)
    except RankDynError as error:
        logger.error("%s", error)
        return error.exit_code
    except jsonschema.ValidationError as error:
        path = "/".join(str(i) for i in error.absolute_path) or "config"
        logger.error("invalid configuration at %s: %s", path, error.message)
        return 2
    except OSError as error:
        logger.error("%s", error)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
