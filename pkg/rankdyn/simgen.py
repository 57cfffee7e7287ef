# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""This module simulates ranking panels with known latent scores.

Static scenarios rank ``M`` noisy copies ``z_j ~ N(gamma, sigma^2 I)``
of item scores ``gamma_i = g(x_i)``:

1. ``gamma_i = x_i' beta`` with ``beta = (3, 2, -1, -0.5)``,
   independent covariates;
2. ``gamma_i = x_i' beta + |x_i|^2`` with ``beta = (3, 2, 1)`` and
   correlated covariates (``rho = 0.5``);
3. ``gamma_i = |x_i|^2`` with four correlated covariates.

Dynamic scenarios follow latent paths
``z_ijt ~ N(gamma_ijt, sigma^2)`` started from ``z_ij0 ~ N(0, 1)``:

1. ``gamma_ijt = 0.1 z_ij,t-1^2``;
2. ``gamma_ijt = 0.05 z_ij,t-1 + 0.1 z_ij,t-1^2``;
3. ``gamma_ijt = 0.1 z_ij,t-1 x_ij,t-1,1`` with three correlated
   covariates redrawn every period.

In the third dynamic scenario the covariates of period ``t`` are stored
as ``x_{t-1}``, the values known when period ``t`` is forecast, and one
extra slice holds the covariates of the period after the panel.
"""
import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import pandas as pd
from scipy.linalg import cholesky, toeplitz

from rankdyn.common import ConfigError, InvalidInputError, derive_rng
from rankdyn.rankings import CovariateSet, RankingPanel, ranks_from_scores

logger = logging.getLogger(__name__)

STATIC_SCENARIOS = {
    1: {"n_features": 4, "rho": 0.0, "beta": (3.0, 2.0, -1.0, -0.5)},
    2: {"n_features": 3, "rho": 0.5, "beta": (3.0, 2.0, 1.0)},
    3: {"n_features": 4, "rho": 0.5, "beta": None},
}
DYNAMIC_SCENARIOS = (1, 2, 3)


def gen_correlated_covariates(n_rows, n_features, rho, rng):
    """Draw rows of correlated standard normal covariates.

    Parameters
    ----------
    n_rows : integer
        Number of rows.
    n_features : integer
        Number of covariates ``K_x``.
    rho : float
        The correlation of neighbouring covariates; covariates ``l``
        and ``m`` have correlation ``rho^|l - m|``.
    rng : object like :py:class:`numpy.random.Generator`
        The random number generator.

    Returns
    -------
    out : object like :py:class:`numpy.ndarray`
        The covariates, shape ``(n_rows, n_features)``.

    Raises
    ------
    InvalidInputError
        If ``|rho| >= 1`` or ``n_features < 1``.

    """
    if not abs(rho) < 1:
        raise InvalidInputError(f"|rho| must be below 1, got {rho}")
    if n_features < 1:
        raise InvalidInputError("at least one covariate is needed")
    covariance = toeplitz(rho ** np.arange(n_features))
    factor = cholesky(covariance, lower=True)
    return rng.standard_normal((n_rows, n_features)) @ factor.T


class SimulatedData(NamedTuple):
    """A simulated panel and the truth it was generated from."""

    panel: RankingPanel
    covariates: CovariateSet
    truth: "ScenarioTruth"


@dataclass
class ScenarioTruth:
    """The true scores behind a simulated panel.

    Attributes
    ----------
    gamma : object like :py:class:`numpy.ndarray`
        The mean scores ``(N, M, T)``.
    latent : object like :py:class:`numpy.ndarray`, optional
        The latent scores ``(N, M, T)`` (dynamic scenarios).

    """

    gamma: np.ndarray
    latent: np.ndarray = None

    def ranks(self):
        """Return the true rankings ``rank(gamma)``, shape ``(N, M, T)``."""
        return ranks_from_scores(self.gamma, axis=0)


def _check_sigma(sigma):
    if not sigma > 0:
        raise ConfigError(f"sigma must be positive, got {sigma}")


@dataclass(frozen=True)
class StaticScenarioSpec:
    """Settings of a static simulation.

    Attributes
    ----------
    scenario : integer
        1, 2 or 3.
    sigma : float
        Standard deviation of the rankers' noise.
    n_items : integer, optional
        Number of items N.
    n_rankers : integer, optional
        Number of rankers M.
    seed : integer, optional
        Root seed.

    """

    scenario: int
    sigma: float
    n_items: int = 20
    n_rankers: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.scenario not in STATIC_SCENARIOS:
            raise ConfigError(f"unknown static scenario {self.scenario}")
        _check_sigma(self.sigma)
        if self.n_items < 2 or self.n_rankers < 1:
            raise ConfigError("need at least two items and one ranker")

    @property
    def n_features(self):
        """Return the number of covariates ``K_x``."""
        return STATIC_SCENARIOS[self.scenario]["n_features"]

    @property
    def rho(self):
        """Return the correlation of neighbouring covariates."""
        return STATIC_SCENARIOS[self.scenario]["rho"]

    @property
    def beta(self):
        """Return the linear coefficients (None for scenario 3)."""
        return STATIC_SCENARIOS[self.scenario]["beta"]

    def scores(self, x):
        """Return the true item scores ``gamma`` for covariates ``x``."""
        x = np.asarray(x, dtype=float)
        gamma = np.zeros(len(x))
        if self.beta is not None:
            gamma += x @ np.asarray(self.beta)
        if self.scenario in (2, 3):
            gamma += np.sum(x**2, axis=1)
        return gamma


def gen_static_scenario(spec, rng=None):
    """Simulate a static panel.

    Parameters
    ----------
    spec : object like :py:class:`.StaticScenarioSpec`
        The scenario.
    rng : object like :py:class:`numpy.random.Generator`, optional
        The random number generator. Derived from ``spec.seed`` if not
        given.

    Returns
    -------
    out : object like :py:class:`.SimulatedData`
        The panel (with the item covariates attached), the covariates
        and the true scores.

    """
    rng = derive_rng(spec.seed) if rng is None else rng
    x = gen_correlated_covariates(spec.n_items, spec.n_features, spec.rho, rng)
    gamma = spec.scores(x)
    noise = rng.standard_normal((spec.n_items, spec.n_rankers))
    z = gamma[:, None] + spec.sigma * noise
    covariates = CovariateSet(item=x[:, None, :])
    panel = RankingPanel(
        ranks=ranks_from_scores(z, axis=0)[:, :, None],
        covariates=covariates,
    )
    gamma = np.broadcast_to(gamma[:, None, None], panel.shape).copy()
    truth = ScenarioTruth(gamma=gamma)
    logger.debug(
        "Simulated static scenario %i: N=%i, M=%i, sigma=%g.",
        spec.scenario,
        spec.n_items,
        spec.n_rankers,
        spec.sigma,
    )
    return SimulatedData(panel, covariates, truth)


@dataclass(frozen=True)
class DynamicScenarioSpec:
    """Settings of a dynamic simulation.

    Attributes
    ----------
    scenario : integer
        1, 2 or 3.
    sigma : float
        Standard deviation of the transition noise.
    n_items : integer, optional
        Number of items N.
    n_rankers : integer, optional
        Number of rankers M.
    n_times : integer, optional
        Number of periods T.
    rho : float, optional
        Correlation of neighbouring covariates (scenario 3).
    n_features : integer, optional
        Number of covariates (scenario 3).
    seed : integer, optional
        Root seed.

    """

    scenario: int
    sigma: float
    n_items: int = 20
    n_rankers: int = 5
    n_times: int = 52
    rho: float = 0.5
    n_features: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.scenario not in DYNAMIC_SCENARIOS:
            raise ConfigError(f"unknown dynamic scenario {self.scenario}")
        _check_sigma(self.sigma)
        if self.n_items < 2 or self.n_rankers < 1 or self.n_times < 2:
            raise ConfigError(
                "need at least two items, one ranker and two periods"
            )
        if self.scenario == 3 and self.n_features < 1:
            raise ConfigError("scenario 3 needs at least one covariate")

    def mean(self, z_prev, x_prev=None):
        """Return ``gamma_t`` given the previous scores (and covariates)."""
        if self.scenario == 1:
            return 0.1 * z_prev**2
        if self.scenario == 2:
            return 0.05 * z_prev + 0.1 * z_prev**2
        return 0.1 * z_prev * x_prev[..., 0]


def gen_dynamic_scenario(spec, rng=None):
    """Simulate a dynamic panel.

    Parameters
    ----------
    spec : object like :py:class:`.DynamicScenarioSpec`
        The scenario.
    rng : object like :py:class:`numpy.random.Generator`, optional
        The random number generator. Derived from ``spec.seed`` if not
        given.

    Returns
    -------
    out : object like :py:class:`.SimulatedData`
        The panel, the covariates (scenario 3, otherwise None) and the
        true means and latent paths.

    """
    rng = derive_rng(spec.seed) if rng is None else rng
    n_items, n_rankers, n_times = spec.n_items, spec.n_rankers, spec.n_times
    x = None
    if spec.scenario == 3:
        rows = n_items * n_rankers * (n_times + 1)
        x = gen_correlated_covariates(rows, spec.n_features, spec.rho, rng)
        x = x.reshape(n_items, n_rankers, n_times + 1, spec.n_features)
    z = np.empty((n_items, n_rankers, n_times))
    gamma = np.empty_like(z)
    z_prev = rng.standard_normal((n_items, n_rankers))
    for time in range(n_times):
        x_prev = None if x is None else x[:, :, time]
        gamma[:, :, time] = spec.mean(z_prev, x_prev)
        noise = rng.standard_normal((n_items, n_rankers))
        z[:, :, time] = gamma[:, :, time] + spec.sigma * noise
        z_prev = z[:, :, time]
    covariates = None if x is None else CovariateSet(pair=x)
    panel = RankingPanel(
        ranks=ranks_from_scores(z, axis=0), covariates=covariates
    )
    logger.debug(
        "Simulated dynamic scenario %i: N=%i, M=%i, T=%i, sigma=%g.",
        spec.scenario,
        n_items,
        n_rankers,
        n_times,
        spec.sigma,
    )
    return SimulatedData(
        panel, covariates, ScenarioTruth(gamma=gamma, latent=z)
    )


def make_scenario(name, sigma, seed=0, **sizes):
    """Return the scenario spec for a name like ``"static3"`` or ``"dyn1"``.

    Parameters
    ----------
    name : string
        ``"static1"`` to ``"static3"`` or ``"dyn1"`` to ``"dyn3"``.
    sigma : float
        The noise standard deviation.
    seed : integer, optional
        Root seed.
    **sizes
        Overrides of ``n_items``, ``n_rankers`` (and ``n_times`` for
        dynamic scenarios).

    Raises
    ------
    ConfigError
        If the name is unknown.

    """
    sizes = {key: value for key, value in sizes.items() if value is not None}
    for prefix, spec in (
        ("static", StaticScenarioSpec),
        ("dyn", DynamicScenarioSpec),
    ):
        if name.startswith(prefix) and name[len(prefix):].isdigit():
            try:
                return spec(
                    scenario=int(name[len(prefix):]),
                    sigma=sigma,
                    seed=seed,
                    **sizes,
                )
            except TypeError as error:
                raise ConfigError(
                    f"invalid setting for scenario {name}: {error}"
                ) from error
    raise ConfigError(
        f'unknown scenario "{name}", expected static1-3 or dyn1-3'
    )


def simulate(spec, rng=None):
    """Simulate a panel for a static or dynamic spec."""
    if isinstance(spec, StaticScenarioSpec):
        return gen_static_scenario(spec, rng)
    return gen_dynamic_scenario(spec, rng)


def truth_to_frame(truth, panel):
    """Return the truth as a tidy frame ``time,ranker,item,gamma[,latent]``."""
    n_items, n_rankers, n_times = panel.shape
    i, j, t = np.indices((n_items, n_rankers, n_times))
    columns = {
        "time": np.asarray(panel.times)[t.ravel()],
        "ranker": np.asarray(panel.rankers)[j.ravel()],
        "item": np.asarray(panel.items)[i.ravel()],
        "gamma": truth.gamma.ravel(),
    }
    if truth.latent is not None:
        columns["latent"] = truth.latent.ravel()
    frame = pd.DataFrame(columns)
    # one row per (time, ranker, item), like the ranking files
    order = np.lexsort((i.ravel(), j.ravel(), t.ravel()))
    return frame.iloc[order].reset_index(drop=True)


def write_truth_csv(truth, panel, path):
    """Write the truth sidecar of a simulated panel."""
    frame = truth_to_frame(truth, panel)
    frame.to_csv(path, index=False, float_format="%.17g")
    logger.info("Wrote truth for %i rows to %s", len(frame), path)


def read_truth_csv(path, panel):
    """Read a truth sidecar and align it with a panel.

    Raises
    ------
    InvalidInputError
        If some (time, ranker, item) cell of the panel is missing.

    """
    frame = pd.read_csv(
        path,
        dtype={"time": str, "ranker": str, "item": str},
        float_precision="round_trip",
    )
    missing = {"time", "ranker", "item", "gamma"} - set(frame.columns)
    if missing:
        raise InvalidInputError(
            f"{path}: missing column(s) {', '.join(sorted(missing))}"
        )
    index = pd.MultiIndex.from_product(
        [panel.times[: panel.n_times], panel.rankers, panel.items],
        names=["time", "ranker", "item"],
    )
    frame = frame.set_index(["time", "ranker", "item"])
    try:
        frame = frame.loc[index]
    except KeyError as error:
        raise InvalidInputError(
            f"{path}: the truth does not cover every cell of the panel"
        ) from error

    def values(column):
        flat = frame[column].to_numpy(dtype=float)
        shape = (panel.n_times, panel.n_rankers, panel.n_items)
        return flat.reshape(shape).transpose(2, 1, 0)

    latent = values("latent") if "latent" in frame.columns else None
    return ScenarioTruth(gamma=values("gamma"), latent=latent)
