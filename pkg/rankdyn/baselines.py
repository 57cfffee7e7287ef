# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""This module defines the baselines the rank-order models are compared to.

* The Borda count, ranking items by their mean observed rank.
* ARROLinear, the autoregressive model with a linear transition mean
  ``alpha + phi * z_{ij,t-1} + x'beta``. It shares the latent path
  sampler of ARROBART; the coefficients are drawn from their conjugate
  normal posterior.
"""
import dataclasses
from dataclasses import dataclass

import numpy as np

from rankdyn.arrobart_dynamic import DynamicModelConfig, fit_dynamic
from rankdyn.common import InvalidInputError
from rankdyn.rankings import RankingPanel, rank_of_scores


@dataclass(frozen=True)
class BordaScores:
    """Mean observed rank of every item.

    Attributes
    ----------
    means : object like :py:class:`numpy.ndarray`
        The mean ranks, each in ``[1, N]``.
    items : tuple of strings
        Item labels.

    """

    means: np.ndarray
    items: tuple

    def ranking(self):
        """Return the Borda ranking (ties go to the lower item index)."""
        return rank_of_scores(self.means)


def borda_scores(panel, time=-1):
    """Return the mean rank of every item over the rankers at one time.

    Parameters
    ----------
    panel : object like :py:class:`rankdyn.rankings.RankingPanel`
        The observed rankings. A plain ``(N, M)`` array of ranks is
        also accepted.
    time : integer, optional
        The period to aggregate (the last by default).

    Returns
    -------
    out : object like :py:class:`.BordaScores`
        The mean ranks.

    """
    if not isinstance(panel, RankingPanel):
        panel = RankingPanel(ranks=np.asarray(panel))
    if not -panel.n_times <= time < panel.n_times:
        raise InvalidInputError(f"no period {time} in the panel")
    means = panel.ranks[:, :, time].mean(axis=1)
    return BordaScores(means=means, items=panel.items)


def borda_count(panel, time=-1):
    """Aggregate rankings by ascending mean rank.

    Parameters
    ----------
    panel : object like :py:class:`rankdyn.rankings.RankingPanel`
        The observed rankings, or an ``(N, M)`` array of ranks.
    time : integer, optional
        The period to aggregate (the last by default).

    Returns
    -------
    out : object like :py:class:`rankdyn.rankings.Ranking`
        The Borda ranking. Items with equal mean rank are ordered by
        item index.

    Examples
    --------
    >>> borda_count([[1, 2, 1], [2, 1, 3], [3, 3, 2]]).ranks
    (1, 2, 3)

    """
    return borda_scores(panel, time=time).ranking()


def arrolinear_fit(panel, config=None, covariates=None, resume=None):
    """Fit the autoregressive linear rank-order model.

    The transition mean is ``alpha + phi * z_{ij,t-1}`` plus, with
    ``exogenous`` or ``lagged_rank_covariate`` set, linear terms in the
    covariates. The coefficients have independent ``N(0, 100)`` priors.

    Parameters
    ----------
    panel : object like :py:class:`rankdyn.rankings.RankingPanel`
        The observed rankings, with at least two periods.
    config : object like :py:class:`.DynamicModelConfig`, optional
        The settings (the tree prior is ignored).
    covariates : object like :py:class:`.CovariateSet`, optional
        Covariates replacing the ones carried by the panel.
    resume : object like :py:class:`rankdyn.archive.PosteriorArchive`, optional
        Continue the chain stored in this archive.

    Returns
    -------
    out : object like :py:class:`rankdyn.archive.PosteriorArchive`
        The posterior draws; ``coefficients[:, 0]`` is ``alpha`` and
        ``coefficients[:, 1]`` is ``phi``.

    """
    config = config or DynamicModelConfig(model_kind="arrolinear")
    config = dataclasses.replace(config, model_kind="arrolinear")
    return fit_dynamic(panel, config, covariates, resume)
