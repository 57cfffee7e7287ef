# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""This module assembles regression designs from latent scores and covariates.

The covariates of item ``i``, ranker ``j`` at period ``t`` are, in order:

* the lagged latent scores (dynamic models only): the item's own
  ``z[i, j, t-1]``, followed by the whole vector ``z[:, j, t-1]`` for
  the full-vector lag;
* the lagged observed rank ``tau[i, j, t-1]`` (the mid-rank ``(N+1)/2``
  at the first period) when requested;
* the exogenous item, ranker and item/ranker covariates.
"""
from dataclasses import dataclass

import numpy as np

from rankdyn.common import ConfigError, DimensionError

LAG_INPUTS = ("own_scalar_lag", "full_vector_lag")


@dataclass(frozen=True)
class Design:
    """Which covariates enter the mean function.

    Attributes
    ----------
    lag_input : string, optional
        One of ``"own_scalar_lag"`` or ``"full_vector_lag"`` for the
        autoregressive models, None for the static ones.
    exogenous : boolean, optional
        If True, the covariates carried by the panel are used.
    lagged_rank : boolean, optional
        If True, the previous observed rank is used.

    """

    lag_input: str = None
    exogenous: bool = False
    lagged_rank: bool = False

    def __post_init__(self):
        if self.lag_input is not None and self.lag_input not in LAG_INPUTS:
            raise ConfigError(
                f'unknown lag input "{self.lag_input}", expected one of '
                f"{', '.join(LAG_INPUTS)}"
            )

    @property
    def dynamic(self):
        """Return True if the mean depends on lagged latent scores."""
        return self.lag_input is not None

    @property
    def full_lag(self):
        """Return True for the full-vector lag."""
        return self.lag_input == "full_vector_lag"

    def uses_lagged_rank(self, panel):
        """Return True if the lagged observed rank is a covariate."""
        flagged = panel.covariates is not None and panel.covariates.lagged_rank
        return self.lagged_rank or flagged

    def uses_covariates(self, panel):
        """Return True if exogenous covariates enter the design."""
        return (
            self.exogenous
            and panel.covariates is not None
            and panel.covariates.n_features > 0
        )

    def feature_names(self, panel):
        """Return the names of the design columns."""
        names = []
        if self.dynamic:
            names.append("lag_own")
        if self.full_lag:
            names.extend(f"lag_{item}" for item in panel.items)
        if self.uses_lagged_rank(panel):
            names.append("lagged_rank")
        if self.uses_covariates(panel):
            for key in ("item", "ranker", "pair"):
                if getattr(panel.covariates, key) is not None:
                    names.extend(panel.covariates.names[key])
        return names

    def n_features(self, panel):
        """Return the number of design columns K."""
        return len(self.feature_names(panel))

    def period(self, panel, time, z_prev=None):
        """Return the covariates of one period.

        Parameters
        ----------
        panel : object like :py:class:`rankdyn.rankings.RankingPanel`
            The observed rankings (and covariates).
        time : integer
            The (0-based) period. ``time = T`` is the period after the
            panel, used for forecasting.
        z_prev : object like :py:class:`numpy.ndarray`, optional
            The latent scores of the previous period, shape ``(N, M)``.
            Required for the dynamic designs.

        Returns
        -------
        out : object like :py:class:`numpy.ndarray`
            The covariates with shape ``(N, M, K)``.

        """
        n_items, n_rankers, _ = panel.shape
        blocks = []
        if self.dynamic:
            if z_prev is None:
                raise DimensionError("a dynamic design needs lagged scores")
            z_prev = np.asarray(z_prev, dtype=float)
            if z_prev.shape != (n_items, n_rankers):
                raise DimensionError(
                    f"lagged scores have shape {z_prev.shape}, expected "
                    f"{(n_items, n_rankers)}"
                )
            blocks.append(z_prev[:, :, None])
            if self.full_lag:
                blocks.append(
                    np.broadcast_to(
                        z_prev.T[None, :, :], (n_items, n_rankers, n_items)
                    )
                )
        if self.uses_lagged_rank(panel):
            if time == 0:
                lagged = np.full((n_items, n_rankers), (n_items + 1) / 2)
            else:
                lagged = panel.ranks[:, :, time - 1].astype(float)
            blocks.append(lagged[:, :, None])
        if self.uses_covariates(panel):
            blocks.append(
                panel.covariates.features(time, n_items, n_rankers)
            )
        if not blocks:
            return np.zeros((n_items, n_rankers, 0))
        return np.concatenate(blocks, axis=-1)

    def build(self, panel, z=None, z0=None):
        """Return the full design with shape ``(N, M, T, K)``.

        Parameters
        ----------
        panel : object like :py:class:`rankdyn.rankings.RankingPanel`
            The observed rankings (and covariates).
        z : object like :py:class:`numpy.ndarray`, optional
            Latent scores ``(N, M, T)``; needed for dynamic designs.
        z0 : object like :py:class:`numpy.ndarray`, optional
            Initial latent state ``(N, M)``; needed for dynamic designs.

        """
        periods = []
        for time in range(panel.n_times):
            z_prev = None
            if self.dynamic:
                z_prev = z0 if time == 0 else z[:, :, time - 1]
            periods.append(self.period(panel, time, z_prev))
        return np.stack(periods, axis=2)
