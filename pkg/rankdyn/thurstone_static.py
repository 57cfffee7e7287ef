# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""This module defines the static rank-order models.

In the static models the latent score of item ``i`` for ranker ``j`` is
``z_ij = f(x_ij) + e_ij`` with ``e_ij ~ N(0, 1)`` and the observed
ranking is the ranking of the scores. ``f`` is a sum of trees (ROBART)
or linear (ROLinear). Panels with several periods are fitted with
independent scores per period, optionally with the previous observed
rank as a covariate (the ``-lag`` variants).
"""
import dataclasses
import logging
from dataclasses import dataclass, field

import numpy as np

from rankdyn.bart import BartPrior
from rankdyn.chain import run_chain
from rankdyn.common import ConfigError, InvalidInputError, check_iterations
from rankdyn.design import Design
from rankdyn.rankings import rank_of_scores

logger = logging.getLogger(__name__)

STATIC_KINDS = ("robart", "rolinear")


def prior_from_dict(values, n_trees):
    """Return a :py:class:`rankdyn.bart.BartPrior` from a (partial) dict."""
    values = dict(values or {})
    values.setdefault("n_trees", n_trees)
    if "move_probabilities" in values:
        values["move_probabilities"] = tuple(values["move_probabilities"])
    try:
        return BartPrior(**values)
    except TypeError as error:
        raise ConfigError(f"unknown prior setting: {error}") from error


@dataclass(frozen=True)
class StaticModelConfig:
    """Settings of a static rank-order model.

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
        The tree prior. ROBART uses 50 trees by default.
    model_kind : string, optional
        ``"robart"`` or ``"rolinear"``.
    lagged_rank : boolean, optional
        Use the previous observed rank as a covariate.

    """

    n_burnin: int = 1000
    n_draws: int = 1000
    thin: int = 1
    seed: int = 0
    prior: BartPrior = field(default_factory=lambda: BartPrior(n_trees=50))
    model_kind: str = "robart"
    lagged_rank: bool = False

    def __post_init__(self):
        check_iterations(self)
        if self.model_kind not in STATIC_KINDS:
            raise ConfigError(
                f'unknown static model "{self.model_kind}", expected one of '
                f"{', '.join(STATIC_KINDS)}"
            )

    @classmethod
    def from_dict(cls, values):
        """Create a configuration from a dict (as stored in archives)."""
        values = dict(values)
        values["prior"] = prior_from_dict(values.get("prior"), 50)
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
        return self.model_kind == "rolinear"

    @property
    def design(self):
        """Return the design of the mean function."""
        return Design(
            lag_input=None, exogenous=True, lagged_rank=self.lagged_rank
        )


def fit_static(panel, config, covariates=None, resume=None, warm_start=None):
    """Fit a static model (trees or linear, as configured)."""
    panel = panel.with_covariates(covariates)
    logger.info(
        "Fitting %s to %i items, %i rankers and %i periods.",
        config.model_kind,
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


def robart_fit(panel, config=None, covariates=None, resume=None):
    """Fit the rank-order BART model.

    The chain alternates a Gibbs sweep over the latent scores (each
    drawn from a truncated normal given its neighbours in the ranking)
    and a backfitting sweep over the trees.

    Parameters
    ----------
    panel : object like :py:class:`rankdyn.rankings.RankingPanel`
        The observed rankings.
    config : object like :py:class:`.StaticModelConfig`, optional
        The settings. Defaults are used if not given.
    covariates : object like :py:class:`.CovariateSet`, optional
        Covariates replacing the ones carried by the panel.
    resume : object like :py:class:`rankdyn.archive.PosteriorArchive`, optional
        Continue the chain stored in this archive.

    Returns
    -------
    out : object like :py:class:`rankdyn.archive.PosteriorArchive`
        The posterior draws.

    """
    config = config or StaticModelConfig()
    config = dataclasses.replace(config, model_kind="robart")
    return fit_static(panel, config, covariates, resume)


def rolinear_fit(panel, config=None, covariates=None, resume=None):
    """Fit the linear rank-order model.

    The chain alternates the latent score sweep and a conjugate draw of
    the intercept and slopes under independent ``N(0, 100)`` priors.
    See :py:func:`.robart_fit` for the parameters.
    """
    config = config or StaticModelConfig(model_kind="rolinear")
    config = dataclasses.replace(config, model_kind="rolinear")
    return fit_static(panel, config, covariates, resume)


def posterior_scores(archive):
    """Return posterior mean scores per item, ranker and period.

    These are the posterior means of the fitted ``f(X)`` when the mean
    function has covariates, and of the latent scores otherwise (a
    constant mean carries no information on the items).

    Returns
    -------
    out : object like :py:class:`numpy.ndarray`
        Scores with shape ``(N, M, T)``.

    """
    archive.require_draws()
    if archive.n_features > 0:
        return archive.fitted_mean
    return archive.latent.mean(axis=0)


def posterior_rank_estimate(archive, time=-1):
    """Return the point ranking of a fitted model.

    The ranking of the posterior mean scores, averaged over rankers, at
    one period (the last by default). Ties go to the lower item index.

    Parameters
    ----------
    archive : object like :py:class:`rankdyn.archive.PosteriorArchive`
        The posterior draws.
    time : integer, optional
        The period to summarize.

    Returns
    -------
    out : object like :py:class:`rankdyn.rankings.Ranking`
        The estimated ranking.

    Raises
    ------
    InvalidInputError
        If the archive has no draws.

    """
    scores = posterior_scores(archive)
    if not -scores.shape[2] <= time < scores.shape[2]:
        raise InvalidInputError(f"no period {time} in the archive")
    return rank_of_scores(np.mean(scores[:, :, time], axis=1))
