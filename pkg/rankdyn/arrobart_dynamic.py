# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""This module defines the autoregressive rank-order models.

The latent score of item ``i`` for ranker ``j`` at period ``t`` is
``z_ijt = f(X_ijt) + e_ijt`` where ``X_ijt`` holds the lagged latent
scores (and, for the ``x`` variants, exogenous covariates) and the
observed ranking at period ``t`` is the ranking of ``z_.jt``. The mean
``f`` is a sum of trees (ARROBART) or linear (ARROLinear, see
:py:mod:`rankdyn.baselines`).

One-step-ahead forecasts push every stored posterior draw through the
transition and summarize the simulated rankings.
"""
import dataclasses
import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from rankdyn.bart import BartPrior
from rankdyn.chain import run_chain
from rankdyn.common import (
    ConfigError,
    DimensionError,
    InvalidInputError,
    check_iterations,
)
from rankdyn.design import LAG_INPUTS, Design
from rankdyn.rankings import ranks_from_scores
from rankdyn.thurstone_static import posterior_scores, prior_from_dict

logger = logging.getLogger(__name__)

DYNAMIC_KINDS = ("arrobart", "arrolinear")


@dataclass(frozen=True)
class DynamicModelConfig:
    """Settings of an autoregressive rank-order model.

    Attributes
    ----------
    n_burnin : integer, optional
        Sweeps discarded before storing draws.
    n_draws : integer, optional
        Number of stored draws.
    thin : integer, optional
        Store one draw every ``thin`` sweeps.
    seed : integer, optional
        Root seed of the chain.
    prior : object like :py:class:`rankdyn.bart.BartPrior`, optional
        The tree prior. ARROBART uses 25 trees by default.
    z_prior_mean : float or tuple of floats, optional
        Prior mean of the initial latent state (one value per item, or
        one shared value).
    lag_input : string, optional
        ``"own_scalar_lag"`` (item ``i``'s mean depends on its own
        previous score) or ``"full_vector_lag"`` (on all previous scores
        of the ranker).
    exogenous : boolean, optional
        Use the covariates of the panel (the ``x`` variants).
    lagged_rank_covariate : boolean, optional
        Use the previous observed rank as a covariate (the ``-lag``
        variants).
    model_kind : string, optional
        ``"arrobart"`` or ``"arrolinear"``.

    """

    n_burnin: int = 1000
    n_draws: int = 1000
    thin: int = 1
    seed: int = 0
    prior: BartPrior = field(default_factory=lambda: BartPrior(n_trees=25))
    z_prior_mean: object = 0.0
    lag_input: str = "own_scalar_lag"
    exogenous: bool = False
    lagged_rank_covariate: bool = False
    model_kind: str = "arrobart"

    def __post_init__(self):
        check_iterations(self)
        if self.model_kind not in DYNAMIC_KINDS:
            raise ConfigError(
                f'unknown dynamic model "{self.model_kind}", expected one '
                f"of {', '.join(DYNAMIC_KINDS)}"
            )
        if self.lag_input not in LAG_INPUTS:
            raise ConfigError(
                f'unknown lag input "{self.lag_input}", expected one of '
                f"{', '.join(LAG_INPUTS)}"
            )
        mean = self.z_prior_mean
        if np.ndim(mean) > 0:
            mean = tuple(float(i) for i in np.ravel(mean))
        else:
            mean = float(mean)
        if not np.all(np.isfinite(mean)):
            raise ConfigError("z_prior_mean must be finite")
        object.__setattr__(self, "z_prior_mean", mean)

    @classmethod
    def from_dict(cls, values):
        """Create a configuration from a dict (as stored in archives)."""
        values = dict(values)
        values["prior"] = prior_from_dict(values.get("prior"), 25)
        names = {i.name for i in dataclasses.fields(cls)}
        unknown = set(values) - names
        if unknown:
            raise ConfigError(
                f"unknown setting(s): {', '.join(sorted(unknown))}"
            )
        return cls(**values)

    @property
    def linear(self):
        """Return True for the linear model."""
        return self.model_kind == "arrolinear"

    @property
    def design(self):
        """Return the design of the transition mean."""
        return Design(
            lag_input=self.lag_input,
            exogenous=self.exogenous,
            lagged_rank=self.lagged_rank_covariate,
        )


def check_dynamic_panel(panel, config):
    """Raise if a panel cannot be fitted by an autoregressive model."""
    if panel.n_times < 2:
        raise InvalidInputError("dynamic model requires T ≥ 2")
    if np.ndim(config.z_prior_mean) > 0:
        if len(config.z_prior_mean) != panel.n_items:
            raise DimensionError(
                f"z_prior_mean has {len(config.z_prior_mean)} entries for "
                f"{panel.n_items} items"
            )


def fit_dynamic(
    panel, config, covariates=None, resume=None, warm_start=None
):
    """Fit an autoregressive model (trees or linear, as configured)."""
    panel = panel.with_covariates(covariates)
    check_dynamic_panel(panel, config)
    logger.info(
        "Fitting %s (%s) to %i items, %i rankers and %i periods.",
        config.model_kind,
        config.lag_input,
        *panel.shape,
    )
    return run_chain(
        panel,
        config.design,
        config,
        linear=config.linear,
        resume=resume,
        warm_start=warm_start,
    )


def arrobart_fit(panel, config=None, covariates=None, resume=None):
    """Fit the autoregressive rank-order BART model.

    Every sweep updates the latent paths (see
    :py:func:`rankdyn.latent.sample_latent_path`) and then runs one
    backfitting sweep over the trees with the design assembled from the
    updated lagged scores.

    Parameters
    ----------
    panel : object like :py:class:`rankdyn.rankings.RankingPanel`
        The observed rankings, with at least two periods.
    config : object like :py:class:`.DynamicModelConfig`, optional
        The settings. Defaults are used if not given.
    covariates : object like :py:class:`.CovariateSet`, optional
        Covariates replacing the ones carried by the panel.
    resume : object like :py:class:`rankdyn.archive.PosteriorArchive`, optional
        Continue the chain stored in this archive.

    Returns
    -------
    out : object like :py:class:`rankdyn.archive.PosteriorArchive`
        The posterior draws.

    Raises
    ------
    InvalidInputError
        If the panel has a single period.

    """
    config = config or DynamicModelConfig()
    config = dataclasses.replace(config, model_kind="arrobart")
    return fit_dynamic(panel, config, covariates, resume)


@dataclass
class Forecast:
    """One-step-ahead forecast of the rankings.

    Attributes
    ----------
    probabilities : object like :py:class:`numpy.ndarray`
        ``probabilities[j, i, r]`` is the predictive probability that
        ranker ``j`` gives rank ``r + 1`` to item ``i``.
    point_ranks : object like :py:class:`numpy.ndarray`
        Point forecast, integer ranks with shape ``(N, M)``.
    mean_scores : object like :py:class:`numpy.ndarray`
        Posterior mean predictive scores ``(N, M)``.
    items : tuple of strings
        Item labels.
    rankers : tuple of strings
        Ranker labels.

    """

    probabilities: np.ndarray
    point_ranks: np.ndarray
    mean_scores: np.ndarray
    items: tuple
    rankers: tuple

    def probability_frame(self):
        """Return the rank probability table as a tidy data frame."""
        j, i, r = np.indices(self.probabilities.shape)
        return pd.DataFrame(
            {
                "ranker": np.asarray(self.rankers)[j.ravel()],
                "item": np.asarray(self.items)[i.ravel()],
                "rank": r.ravel() + 1,
                "probability": self.probabilities.ravel(),
            }
        )

    def point_frame(self):
        """Return the point forecast as a tidy data frame."""
        i, j = np.indices(self.point_ranks.shape)
        frame = pd.DataFrame(
            {
                "ranker": np.asarray(self.rankers)[j.ravel()],
                "item": np.asarray(self.items)[i.ravel()],
                "point_rank": self.point_ranks.ravel(),
            }
        )
        return frame.sort_values(["ranker", "point_rank"], kind="stable")


def _predictive_means(archive, panel, design, draw, model):
    """Return the means of the next period's scores for one draw."""
    n_times = panel.n_times
    latent = archive.latent[draw]
    if design.dynamic:
        x = design.period(panel, n_times, latent[:, :, -1])
    elif archive.n_features > 0:
        x = design.period(panel, n_times)
    else:
        # without covariates a static model carries the last scores over
        return latent[:, :, -1], False
    return model.predict(x), True


def forecast_one_step(archive, panel, config, rng, samples_per_draw=1):
    """Forecast the rankings of the period after the panel.

    For every stored draw, the scores of period ``T + 1`` are simulated
    from ``N(f(X_{T+1}), I)`` with the draw's mean function and final
    latent state, and ranked. Static models without covariates carry
    the final latent scores over.

    Parameters
    ----------
    archive : object like :py:class:`rankdyn.archive.PosteriorArchive`
        Posterior draws of a model fitted to ``panel``.
    panel : object like :py:class:`rankdyn.rankings.RankingPanel`
        The panel the model was fitted to. A covariate slice for the
        forecast period is used when present.
    config : object
        The model configuration (it gives the design).
    rng : object like :py:class:`numpy.random.Generator`
        Random numbers for the predictive noise.
    samples_per_draw : integer, optional
        Rankings simulated per posterior draw.

    Returns
    -------
    out : object like :py:class:`.Forecast`
        Rank probabilities and the point forecast (the ranking of the
        mean predictive scores).

    Raises
    ------
    InvalidInputError
        If the archive has no draws or does not match the panel.

    """
    archive.require_draws()
    if tuple(archive.shape) != panel.shape:
        raise DimensionError(
            f"the archive was fitted to a panel of shape {archive.shape}, "
            f"not {panel.shape}"
        )
    if samples_per_draw < 1:
        raise InvalidInputError("samples_per_draw must be positive")
    n_items, n_rankers, _ = panel.shape
    design = config.design
    counts = np.zeros((n_rankers, n_items, n_items))
    mean_scores = np.zeros((n_items, n_rankers))
    item_index = np.arange(n_items)[None, :, None]
    ranker_index = np.arange(n_rankers)[None, None, :]
    for draw, model in enumerate(archive.models()):
        means, noisy = _predictive_means(archive, panel, design, draw, model)
        mean_scores += means
        if noisy:
            noise = rng.standard_normal((samples_per_draw, n_items, n_rankers))
            scores = means[None] + noise
        else:
            scores = np.broadcast_to(
                means, (samples_per_draw, n_items, n_rankers)
            )
        ranks = ranks_from_scores(scores, axis=1) - 1
        np.add.at(counts, (ranker_index, item_index, ranks), 1.0)
    mean_scores /= archive.n_draws
    probabilities = counts / (archive.n_draws * samples_per_draw)
    logger.info(
        "Forecast %i rankers from %i draws.", n_rankers, archive.n_draws
    )
    return Forecast(
        probabilities=probabilities,
        point_ranks=ranks_from_scores(mean_scores, axis=0),
        mean_scores=mean_scores,
        items=panel.items,
        rankers=panel.rankers,
    )


def fitted_rank_paths(archive):
    """Return the in-sample one-step rankings of a fitted model.

    These rank the posterior mean of ``f(X_jt)`` per ranker and period
    (of the latent scores for models without covariates).

    Returns
    -------
    out : object like :py:class:`numpy.ndarray`
        Integer ranks with shape ``(N, M, T)``.

    """
    return ranks_from_scores(posterior_scores(archive), axis=0)
