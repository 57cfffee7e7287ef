# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""This module runs models over data: fitting, forecasting and scoring.

It holds the roster of model variants, the expanding-window forecast
evaluation, the Kendall tau tables and the simulation study runner.
Work items (test periods, replications) are independent and run on a
thread pool; each one draws its random numbers from a seed derived from
the root seed and its own key, so results do not depend on the number
of threads.
"""
import dataclasses
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import pandas as pd

from rankdyn.arrobart_dynamic import (
    DynamicModelConfig,
    Forecast,
    fit_dynamic,
    fitted_rank_paths,
    forecast_one_step,
)
from rankdyn.baselines import borda_count
from rankdyn.common import (
    ConfigError,
    DimensionError,
    InvalidInputError,
    derive_rng,
    derive_seed,
    max_threads,
)
from rankdyn.rankings import kendall_tau, kendall_tau_arrays
from rankdyn.simgen import StaticScenarioSpec, simulate
from rankdyn.thurstone_static import (
    StaticModelConfig,
    fit_static,
    posterior_rank_estimate,
    prior_from_dict,
)

logger = logging.getLogger(__name__)

# keys of the stream derivations below the root seed
DATA_STREAM = 2
MODEL_STREAM = 3
FORECAST_STREAM = 4


@dataclass(frozen=True)
class ModelVariant:
    """One entry of the model roster.

    Attributes
    ----------
    name : string
        The name used on the command line and in result tables.
    family : string
        ``"static"``, ``"dynamic"`` or ``"borda"``.
    model_kind : string
        The model kind of the configuration (trees or linear).
    exogenous : boolean
        Dynamic models: use the covariates of the panel.
    lagged_rank : boolean
        Use the previous observed rank as a covariate.

    """

    name: str
    family: str
    model_kind: str = None
    exogenous: bool = False
    lagged_rank: bool = False


ROSTER = {
    variant.name: variant
    for variant in (
        ModelVariant("robart", "static", "robart"),
        ModelVariant("rolinear", "static", "rolinear"),
        ModelVariant("robart_lag", "static", "robart", lagged_rank=True),
        ModelVariant("rolinear_lag", "static", "rolinear", lagged_rank=True),
        ModelVariant("arrobart", "dynamic", "arrobart"),
        ModelVariant("arrobartx", "dynamic", "arrobart", exogenous=True),
        ModelVariant("arrolinear", "dynamic", "arrolinear"),
        ModelVariant("arrolinearx", "dynamic", "arrolinear", exogenous=True),
        ModelVariant("arrobart_lag", "dynamic", "arrobart", lagged_rank=True),
        ModelVariant(
            "arrolinear_lag", "dynamic", "arrolinear", lagged_rank=True
        ),
        ModelVariant("borda", "borda"),
    )
}

SAMPLER_SETTINGS = (
    "n_burnin",
    "n_draws",
    "thin",
    "seed",
    "n_trees",
    "prior",
    "lag_input",
    "z_prior_mean",
)


def get_variant(name):
    """Return the roster entry for a model name.

    Raises
    ------
    ConfigError
        If the name is not in :py:data:`.ROSTER`.

    """
    try:
        return ROSTER[name]
    except KeyError:
        raise ConfigError(
            f'unknown model "{name}", expected one of {", ".join(ROSTER)}'
        ) from None


def make_config(name, settings=None):
    """Return the configuration of a model from sampler settings.

    Parameters
    ----------
    name : string
        A model name from :py:data:`.ROSTER`.
    settings : dict, optional
        Any of ``n_burnin``, ``n_draws``, ``thin``, ``seed``,
        ``n_trees``, ``prior`` (a dict of tree prior settings) and, for
        dynamic models, ``lag_input`` and ``z_prior_mean``.

    Returns
    -------
    out : object
        A :py:class:`rankdyn.thurstone_static.StaticModelConfig`, a
        :py:class:`rankdyn.arrobart_dynamic.DynamicModelConfig`, or None
        for the Borda count.

    Raises
    ------
    ConfigError
        If a setting is unknown or invalid.

    """
    variant = get_variant(name)
    settings = {
        key: value
        for key, value in (settings or {}).items()
        if value is not None
    }
    unknown = set(settings) - set(SAMPLER_SETTINGS)
    if unknown:
        raise ConfigError(
            f"unknown model setting(s): {', '.join(sorted(unknown))}"
        )
    if variant.family == "borda":
        return None
    sampler = {
        key: settings[key]
        for key in ("n_burnin", "n_draws", "thin", "seed")
        if key in settings
    }
    prior = dict(settings.get("prior") or {})
    if "n_trees" in settings:
        prior["n_trees"] = settings["n_trees"]
    if variant.family == "static":
        for key in ("lag_input", "z_prior_mean"):
            if key in settings:
                raise ConfigError(f"{key} has no meaning for model {name}")
        return StaticModelConfig(
            prior=prior_from_dict(prior, 50),
            model_kind=variant.model_kind,
            lagged_rank=variant.lagged_rank,
            **sampler,
        )
    for key in ("lag_input", "z_prior_mean"):
        if key in settings:
            sampler[key] = settings[key]
    return DynamicModelConfig(
        prior=prior_from_dict(prior, 25),
        model_kind=variant.model_kind,
        exogenous=variant.exogenous,
        lagged_rank_covariate=variant.lagged_rank,
        **sampler,
    )


def config_from_archive(archive):
    """Return the model name and configuration stored in an archive."""
    values = dict(archive.config)
    name = values.pop("roster", None)
    if name is None:
        raise InvalidInputError("the archive does not name its model")
    variant = get_variant(name)
    if variant.family == "static":
        return name, StaticModelConfig.from_dict(values)
    return name, DynamicModelConfig.from_dict(values)


def fit_model(name, panel, config, resume=None, warm_start=None):
    """Fit one model of the roster.

    Returns
    -------
    out : object like :py:class:`rankdyn.archive.PosteriorArchive`
        The posterior draws, tagged with the model name, or None for
        the Borda count (which has nothing to fit).

    """
    variant = get_variant(name)
    if variant.family == "borda":
        return None
    fit = fit_static if variant.family == "static" else fit_dynamic
    archive = fit(panel, config, resume=resume, warm_start=warm_start)
    archive.config["roster"] = name
    return archive


def fit_per_ranker(name, panel, config, threads=None):
    """Fit one model of the roster to every ranker separately.

    Ranker ``j`` is fitted with the seed derived from ``(seed, j)``, so
    the archives do not depend on the number of threads.

    Parameters
    ----------
    name : string
        A model name from :py:data:`.ROSTER`.
    panel : object like :py:class:`rankdyn.rankings.RankingPanel`
        The observed rankings.
    config : object
        The model configuration (see :py:func:`.make_config`).
    threads : integer, optional
        Worker threads (see :py:func:`rankdyn.common.max_threads`).

    Returns
    -------
    out : list of objects like :py:class:`rankdyn.archive.PosteriorArchive`
        One archive per ranker, in the order of the panel's rankers.

    """
    if get_variant(name).family == "borda":
        raise ConfigError("the Borda count has nothing to fit")

    def task(j):
        return fit_model(name, panel.select_rankers([j]), _seeded(config, j))

    workers = min(max_threads(threads), panel.n_rankers)
    logger.info(
        "Fitting %s to %i rankers on %i thread(s).",
        name,
        panel.n_rankers,
        workers,
    )
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(task, range(panel.n_rankers)))


def borda_forecast(panel):
    """Forecast every ranker with the Borda ranking of the last period.

    The rank probabilities put all mass on that ranking.
    """
    ranks = np.asarray(borda_count(panel).ranks)
    n_items, n_rankers = panel.n_items, panel.n_rankers
    probabilities = np.zeros((n_rankers, n_items, n_items))
    probabilities[:, np.arange(n_items), ranks - 1] = 1.0
    point_ranks = np.repeat(ranks[:, None], n_rankers, axis=1)
    return Forecast(
        probabilities=probabilities,
        point_ranks=point_ranks,
        mean_scores=point_ranks.astype(float),
        items=panel.items,
        rankers=panel.rankers,
    )


def forecast_model(name, archive, panel, config, rng, samples_per_draw=1):
    """Return the one-step-ahead forecast of a fitted model."""
    if get_variant(name).family == "borda":
        return borda_forecast(panel)
    return forecast_one_step(
        archive, panel, config, rng, samples_per_draw=samples_per_draw
    )


def combine_forecasts(forecasts):
    """Stack forecasts of disjoint rankers into one forecast."""
    return Forecast(
        probabilities=np.concatenate(
            [i.probabilities for i in forecasts], axis=0
        ),
        point_ranks=np.concatenate([i.point_ranks for i in forecasts], axis=1),
        mean_scores=np.concatenate([i.mean_scores for i in forecasts], axis=1),
        items=forecasts[0].items,
        rankers=tuple(j for i in forecasts for j in i.rankers),
    )


@dataclass
class WindowResult:
    """The forecast of one test period of an expanding window.

    Attributes
    ----------
    model : string
        The model name.
    time : string
        The label of the forecast period.
    index : integer
        The index of the forecast period in the panel.
    forecast : object like :py:class:`rankdyn.arrobart_dynamic.Forecast`
        The forecast made from the periods before ``index``.
    observed : object like :py:class:`numpy.ndarray`
        The observed ranks of the period, ``(N, M)``, or None when the
        period lies beyond the data.

    """

    model: str
    time: str
    index: int
    forecast: Forecast
    observed: np.ndarray = None


def period_label(panel, index):
    """Return the label of a period (past the data: its 1-based number)."""
    if index < len(panel.times):
        return panel.times[index]
    return str(index + 1)


def _seeded(config, *key):
    if config is None:
        return None
    return dataclasses.replace(config, seed=derive_seed(config.seed, *key))


def _short_burnin(config):
    if config is None:
        return None
    return dataclasses.replace(config, n_burnin=max(1, config.n_burnin // 10))


def forecast_period(
    name,
    panel,
    index,
    config,
    samples_per_draw=1,
    per_ranker=False,
    warm_start=None,
):
    """Fit to the periods before ``index`` and forecast period ``index``.

    Parameters
    ----------
    name : string
        A model name from :py:data:`.ROSTER`.
    panel : object like :py:class:`rankdyn.rankings.RankingPanel`
        The data. ``index`` may equal the number of periods to forecast
        past the end of the data.
    index : integer
        The period to forecast.
    config : object
        The model configuration (see :py:func:`.make_config`).
    samples_per_draw : integer, optional
        Rankings simulated per posterior draw.
    per_ranker : boolean, optional
        Fit a separate model to every ranker.
    warm_start : list, optional
        Mean functions to start the chains from (one per fitted model).

    Returns
    -------
    result : object like :py:class:`.WindowResult`
        The forecast.
    models : list
        The final mean function of every chain, for warm starts.

    """
    if not 1 <= index <= panel.n_times:
        raise InvalidInputError(
            f"cannot forecast period {index} of a panel with "
            f"{panel.n_times} periods"
        )
    train = panel.head(index)
    groups = [[j] for j in range(panel.n_rankers)] if per_ranker else [None]
    forecasts, models = [], []
    for key, group in enumerate(groups):
        data = train if group is None else train.select_rankers(group)
        fit_config = _seeded(config, MODEL_STREAM, index, key)
        start = None if warm_start is None else warm_start[key]
        archive = fit_model(name, data, fit_config, warm_start=start)
        rng = derive_rng(
            0 if config is None else config.seed, FORECAST_STREAM, index, key
        )
        forecasts.append(
            forecast_model(
                name, archive, data, fit_config, rng, samples_per_draw
            )
        )
        models.append(None if archive is None else archive.state.model)
    observed = None
    if index < panel.n_times:
        observed = panel.ranks[:, :, index]
    time = period_label(panel, index)
    logger.info("Forecast period %s with %s.", time, name)
    result = WindowResult(
        model=name,
        time=time,
        index=index,
        forecast=combine_forecasts(forecasts),
        observed=observed,
    )
    return result, models


def expanding_window(
    name,
    panel,
    config,
    test_periods,
    threads=None,
    samples_per_draw=1,
    reuse_posterior=False,
    per_ranker=False,
):
    """Forecast the last periods of a panel one step ahead.

    For each of the last ``test_periods`` periods, the model is fitted
    to all earlier periods and forecasts that period.

    Parameters
    ----------
    name : string
        A model name from :py:data:`.ROSTER`.
    panel : object like :py:class:`rankdyn.rankings.RankingPanel`
        The data.
    config : object
        The model configuration (see :py:func:`.make_config`).
    test_periods : integer
        The number of held-out periods.
    threads : integer, optional
        Worker threads (see :py:func:`rankdyn.common.max_threads`).
    samples_per_draw : integer, optional
        Rankings simulated per posterior draw.
    reuse_posterior : boolean, optional
        Start every fit from the final state of the previous one with a
        tenth of the burn-in. The fits then run one after the other and
        the results are an approximation of independent refits.
    per_ranker : boolean, optional
        Fit a separate model to every ranker.

    Returns
    -------
    out : list of objects like :py:class:`.WindowResult`
        The forecasts, in time order.

    Raises
    ------
    InvalidInputError
        If there is no held-out period or nothing to train on.

    """
    if test_periods < 1:
        raise InvalidInputError("at least one test period is needed")
    first = panel.n_times - test_periods
    if first < 1:
        raise InvalidInputError(
            f"cannot hold out {test_periods} of {panel.n_times} periods"
        )
    indices = list(range(first, panel.n_times))
    if reuse_posterior:
        logger.warning(
            "Reusing posteriors between test periods: forecasts are "
            "approximate."
        )
        results, warm = [], None
        for index in indices:
            fit_config = config if warm is None else _short_burnin(config)
            result, warm = forecast_period(
                name,
                panel,
                index,
                fit_config,
                samples_per_draw=samples_per_draw,
                per_ranker=per_ranker,
                warm_start=warm,
            )
            results.append(result)
        return results

    def task(index):
        result, _ = forecast_period(
            name,
            panel,
            index,
            config,
            samples_per_draw=samples_per_draw,
            per_ranker=per_ranker,
        )
        return result

    workers = min(max_threads(threads), len(indices))
    logger.info(
        "Forecasting %i periods with %s on %i thread(s).",
        len(indices),
        name,
        workers,
    )
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(task, indices))


def forecast_frames(results):
    """Return the point and probability tables of forecasts.

    Returns
    -------
    points : object like :py:class:`pandas.DataFrame`
        Columns ``model, time, ranker, item, point_rank`` and, when the
        period was observed, ``observed_rank``.
    probabilities : object like :py:class:`pandas.DataFrame`
        Columns ``model, time, ranker, item, rank, probability``.

    """
    points, probabilities = [], []
    for result in results:
        forecast = result.forecast
        frame = forecast.point_frame()
        if result.observed is not None:
            items = {item: i for i, item in enumerate(forecast.items)}
            rankers = {j: k for k, j in enumerate(forecast.rankers)}
            frame["observed_rank"] = result.observed[
                frame["item"].map(items).to_numpy(),
                frame["ranker"].map(rankers).to_numpy(),
            ]
        frame.insert(0, "time", result.time)
        frame.insert(0, "model", result.model)
        points.append(frame)
        frame = forecast.probability_frame()
        frame.insert(0, "time", result.time)
        frame.insert(0, "model", result.model)
        probabilities.append(frame)
    return (
        pd.concat(points, ignore_index=True),
        pd.concat(probabilities, ignore_index=True),
    )


def kendall_tau_table(points, observed="observed_rank"):
    """Return the Kendall tau distance of every forecast ranking.

    Parameters
    ----------
    points : object like :py:class:`pandas.DataFrame`
        Point forecasts with columns ``model, time, ranker, item,
        point_rank`` and the column named by ``observed``.
    observed : string, optional
        The column holding the ranks to compare to.

    Returns
    -------
    out : object like :py:class:`pandas.DataFrame`
        One row per ``(model, time, ranker)`` with column ``tau``.

    """
    missing = {"model", "time", "ranker", "item", "point_rank", observed}
    missing -= set(points.columns)
    if missing:
        raise InvalidInputError(
            f"missing column(s) {', '.join(sorted(missing))}"
        )
    if points[observed].isna().any():
        raise InvalidInputError("some forecasts have no observed ranking")
    rows = []
    keys = ["model", "time", "ranker"]
    for key, group in points.groupby(keys, sort=False):
        group = group.sort_values("item", kind="stable")
        tau = kendall_tau(
            group["point_rank"].to_numpy(dtype=int),
            group[observed].to_numpy(dtype=int),
        )
        rows.append((*key, tau))
    return pd.DataFrame(rows, columns=[*keys, "tau"])


def ratio_to_benchmark(means, benchmark):
    """Divide mean distances by the benchmark's (NaN if that is zero)."""
    if benchmark not in means.index:
        raise ConfigError(f'benchmark "{benchmark}" has no results')
    reference = means.loc[benchmark]
    if reference == 0:
        logger.warning('Benchmark "%s" has zero mean distance.', benchmark)
        return means * np.nan
    return means / reference


def summarize_taus(taus, benchmark=None):
    """Return the mean distances per period and over all periods.

    Parameters
    ----------
    taus : object like :py:class:`pandas.DataFrame`
        The output of :py:func:`.kendall_tau_table`.
    benchmark : string, optional
        A model to divide the overall means by.

    Returns
    -------
    by_time : object like :py:class:`pandas.DataFrame`
        Columns ``model, time, mean_tau``.
    summary : object like :py:class:`pandas.DataFrame`
        Columns ``model, mean_tau`` and, with a benchmark, ``ratio``.

    """
    by_time = (
        taus.groupby(["model", "time"], sort=False)["tau"]
        .mean()
        .rename("mean_tau")
        .reset_index()
    )
    means = taus.groupby("model", sort=False)["tau"].mean()
    summary = means.rename("mean_tau").to_frame()
    if benchmark is not None:
        summary["ratio"] = ratio_to_benchmark(means, benchmark)
    return by_time, summary.reset_index()


def estimated_ranks(name, panel, archive):
    """Return a model's in-sample ranking estimate, ``(N, M, T)``.

    Static models estimate one ranking per period (the posterior mean
    scores averaged over rankers); the Borda count ranks the mean
    observed ranks of every period; dynamic models rank the posterior
    mean transition means per ranker.
    """
    family = get_variant(name).family
    shape = panel.shape
    if family == "dynamic":
        return fitted_rank_paths(archive)
    if family == "borda":
        periods = [borda_count(panel, time=t) for t in range(shape[2])]
    else:
        periods = [
            posterior_rank_estimate(archive, time=t) for t in range(shape[2])
        ]
    ranks = np.stack([np.asarray(i.ranks) for i in periods], axis=-1)
    return np.broadcast_to(ranks[:, None, :], shape)


@dataclass(frozen=True)
class StudyPlan:
    """A simulation study: scenarios, models and replications.

    Attributes
    ----------
    specs : tuple
        One scenario spec per noise level (see
        :py:func:`rankdyn.simgen.make_scenario`).
    models : tuple of strings
        Model names from :py:data:`.ROSTER`.
    replications : integer
        Data sets simulated per spec.
    settings : dict
        Sampler settings (see :py:func:`.make_config`).
    seed : integer
        The root seed.

    """

    specs: tuple
    models: tuple
    replications: int = 50
    settings: dict = None
    seed: int = 0

    def __post_init__(self):
        if self.replications < 1:
            raise ConfigError("replications must be positive")
        if not self.specs or not self.models:
            raise ConfigError("a study needs scenarios and models")
        static = {isinstance(i, StaticScenarioSpec) for i in self.specs}
        if len(static) > 1:
            raise ConfigError("cannot mix static and dynamic scenarios")
        for name in self.models:
            family = get_variant(name).family
            if static == {True} and family == "dynamic":
                raise ConfigError(
                    f"model {name} needs several periods; use a dynamic "
                    "scenario"
                )


def _study_task(plan, level, replication):
    spec = plan.specs[level]
    data = simulate(
        spec, rng=derive_rng(plan.seed, DATA_STREAM, level, replication)
    )
    truth = data.truth.ranks()
    rows = []
    for number, name in enumerate(plan.models):
        config = make_config(name, plan.settings)
        if config is not None:
            config = dataclasses.replace(
                config,
                seed=derive_seed(
                    plan.seed, MODEL_STREAM, level, replication, number
                ),
            )
        archive = fit_model(name, data.panel, config)
        estimate = estimated_ranks(name, data.panel, archive)
        taus = kendall_tau_arrays(estimate, truth, axis=0)
        rows.append(
            (spec.sigma, replication, name, float(np.mean(taus)))
        )
    logger.info(
        "Finished replication %i at sigma=%g.", replication, spec.sigma
    )
    return rows


def run_study(plan, threads=None):
    """Run a simulation study.

    Every replication simulates a data set, fits every model and
    measures the Kendall tau distance between the estimated and the
    true rankings (averaged over rankers and periods).

    Parameters
    ----------
    plan : object like :py:class:`.StudyPlan`
        What to run.
    threads : integer, optional
        Worker threads (see :py:func:`rankdyn.common.max_threads`).

    Returns
    -------
    out : object like :py:class:`pandas.DataFrame`
        Columns ``sigma, replication, model, tau``.

    """
    tasks = [
        (level, replication)
        for level in range(len(plan.specs))
        for replication in range(plan.replications)
    ]
    workers = min(max_threads(threads), len(tasks))
    logger.info(
        "Running %i replications of %i model(s) on %i thread(s).",
        len(tasks),
        len(plan.models),
        workers,
    )
    with ThreadPoolExecutor(max_workers=workers) as executor:
        results = executor.map(lambda task: _study_task(plan, *task), tasks)
        rows = [row for result in results for row in result]
    return pd.DataFrame(rows, columns=["sigma", "replication", "model", "tau"])


def study_table(results, benchmark):
    """Return mean distance ratios to a benchmark per noise level.

    Returns
    -------
    out : object like :py:class:`pandas.DataFrame`
        One row per ``sigma`` and one column per model; the entries are
        the mean distance of the model divided by that of the benchmark.

    """
    means = results.groupby(["sigma", "model"], sort=False)["tau"].mean()
    table = means.unstack("model")
    table = table[list(dict.fromkeys(results["model"]))]
    if benchmark not in table.columns:
        raise ConfigError(f'benchmark "{benchmark}" has no results')
    reference = table[benchmark]
    if (reference == 0).any():
        logger.warning('Benchmark "%s" has zero mean distance.', benchmark)
    return table.div(reference.where(reference != 0), axis=0)


def reference_frame(panel, truth=None):
    """Return the ranks forecasts are scored against.

    Parameters
    ----------
    panel : object like :py:class:`rankdyn.rankings.RankingPanel`
        The observed rankings.
    truth : object like :py:class:`rankdyn.simgen.ScenarioTruth`, optional
        If given, the rankings of the true mean scores are used instead
        of the observed ones.

    Returns
    -------
    out : object like :py:class:`pandas.DataFrame`
        Columns ``time, ranker, item, reference_rank``.

    """
    ranks = panel.ranks if truth is None else truth.ranks()
    n_items, n_rankers, n_times = panel.shape
    t, j, i = np.indices((n_times, n_rankers, n_items))
    return pd.DataFrame(
        {
            "time": np.asarray(panel.times)[t.ravel()],
            "ranker": np.asarray(panel.rankers)[j.ravel()],
            "item": np.asarray(panel.items)[i.ravel()],
            "reference_rank": ranks[i.ravel(), j.ravel(), t.ravel()],
        }
    )


def attach_reference(points, reference):
    """Add the ``reference_rank`` column to point forecasts.

    Raises
    ------
    DimensionError
        If some forecast has no reference rank (the forecasts and the
        data do not match).

    """
    merged = points.merge(
        reference, on=["time", "ranker", "item"], how="left", validate="m:1"
    )
    if merged["reference_rank"].isna().any():
        missing = merged[merged["reference_rank"].isna()].iloc[0]
        raise DimensionError(
            f"no reference rank for item {missing['item']} of ranker "
            f"{missing['ranker']} at time {missing['time']}"
        )
    return merged
