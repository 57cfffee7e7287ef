# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""This module runs the Gibbs samplers shared by all rank-order models.

A sweep first updates the latent scores given the mean function and then
the mean function (a forest or linear coefficients) given the latent
scores.

Random streams are derived from the root seed: ``(0,)`` drives the mean
function updates and ``(1, j)`` the latent scores of ranker ``j``.
"""
import dataclasses
import logging
import time

import numpy as np

from rankdyn.archive import ChainState, PosteriorArchive
from rankdyn.bart import Forest, SweepStats, make_cutpoints, update_forest
from rankdyn.common import ConfigError, derive_rng, rng_from_state, rng_state
from rankdyn.latent import (
    LatentState,
    initial_latent_scores,
    sample_latent_path,
)
from rankdyn.linear import LinearCoefficients, draw_linear_coefficients

logger = logging.getLogger(__name__)


class ForestModel:
    """A sum-of-trees mean function updated by backfitting.

    Parameters
    ----------
    prior : object like :py:class:`rankdyn.bart.BartPrior`
        The prior (it also gives the number of trees).
    n_features : integer
        The design dimension.
    forest : object like :py:class:`rankdyn.bart.Forest`, optional
        Starting forest. Defaults to single-leaf trees at zero.

    """

    def __init__(self, prior, n_features, forest=None):
        self.prior = prior
        if forest is None:
            forest = Forest.constant(prior.n_trees, n_features)
        self.forest = forest
        self.stats = SweepStats()

    def predict(self, x):
        """Evaluate the forest."""
        return self.forest.predict(x)

    def update(self, x, targets, rng):
        """Run one backfitting sweep on the design rows ``x``."""
        cutpoints = make_cutpoints(x, self.prior.n_cutpoints)
        _, stats = update_forest(
            self.forest, x, targets, self.prior, rng, cutpoints=cutpoints
        )
        self.stats.merge(stats)

    def snapshot(self):
        """Return a copy of the current forest."""
        return self.forest.copy()

    def diagnostics(self):
        """Return acceptance rates per tree move."""
        rates = self.stats.rates()
        return {f"accept_{move}": rate for move, rate in rates.items()}


class LinearModel:
    """A linear mean function with a conjugate normal prior."""

    def __init__(self, n_features, coefficients=None):
        if coefficients is None:
            coefficients = LinearCoefficients.zeros(n_features)
        self.coefficients = coefficients

    def predict(self, x):
        """Evaluate the linear mean."""
        return self.coefficients.predict(x)

    def update(self, x, targets, rng):
        """Draw the coefficients given the latent scores."""
        self.coefficients = draw_linear_coefficients(x, targets, rng)

    def snapshot(self):
        """Return the current coefficients."""
        return self.coefficients

    def diagnostics(self):
        """Return nothing (the coefficient draw is exact)."""
        return {}


def config_to_dict(config):
    """Return a model configuration as a JSON serializable dict."""

    def convert(value):
        if isinstance(value, dict):
            return {key: convert(item) for key, item in value.items()}
        if isinstance(value, (list, tuple)):
            return [convert(item) for item in value]
        if isinstance(value, np.ndarray):
            return value.tolist()
        if isinstance(value, np.generic):
            return value.item()
        return value

    return convert(dataclasses.asdict(config))


def make_model(linear, prior, n_features, saved=None):
    """Return the mean function for a chain.

    Parameters
    ----------
    linear : boolean
        If True a :py:class:`.LinearModel` is made, otherwise a
        :py:class:`.ForestModel`.
    prior : object like :py:class:`rankdyn.bart.BartPrior`
        The tree prior (ignored for linear models).
    n_features : integer
        The design dimension.
    saved : object, optional
        A forest or coefficients to start from.

    """
    if linear:
        if saved is not None and not isinstance(saved, LinearCoefficients):
            raise ConfigError("cannot resume a linear model from a forest")
        return LinearModel(n_features, saved)
    if saved is not None and not isinstance(saved, Forest):
        raise ConfigError("cannot resume a tree model from coefficients")
    if saved is not None:
        saved = saved.copy()
    return ForestModel(prior, n_features, saved)


def _initial_state(panel, design, z_prior):
    z = initial_latent_scores(panel.ranks)
    z0 = None
    if design.dynamic:
        z0 = np.broadcast_to(
            np.broadcast_to(z_prior, (panel.n_items,))[:, None],
            (panel.n_items, panel.n_rankers),
        ).copy()
    return LatentState(z=z, z0=z0)


def run_chain(
    panel, design, config, linear=False, resume=None, warm_start=None
):
    """Run a Gibbs chain and store its draws.

    Parameters
    ----------
    panel : object like :py:class:`rankdyn.rankings.RankingPanel`
        The observed rankings.
    design : object like :py:class:`rankdyn.design.Design`
        How the covariates of the mean function are assembled.
    config : object like :py:class:`rankdyn.thurstone_static.StaticModelConfig`
        The sampler configuration: ``n_burnin``, ``n_draws``, ``thin``,
        ``seed``, ``prior`` and (dynamic models) ``z_prior_mean``.
    linear : boolean, optional
        If True, the mean function is linear, otherwise a forest.
    resume : object like :py:class:`rankdyn.archive.PosteriorArchive`, optional
        An archive whose chain is continued for ``n_draws`` more draws
        (without burn-in). The new draws are appended to it.
    warm_start : object, optional
        A forest or coefficients to start a new chain from (for
        example the final state of a fit to fewer periods).

    Returns
    -------
    out : object like :py:class:`rankdyn.archive.PosteriorArchive`
        The stored draws.

    """
    n_items, n_rankers, n_times = panel.shape
    n_features = design.n_features(panel)
    z_prior = np.broadcast_to(
        np.asarray(getattr(config, "z_prior_mean", 0.0), dtype=float),
        (n_items,),
    )
    if resume is not None:
        if resume.state is None:
            raise ConfigError("the archive has no chain state to resume")
        if tuple(resume.shape) != panel.shape:
            raise ConfigError(
                f"the archive was fitted to a panel of shape {resume.shape}, "
                f"not {panel.shape}"
            )
        saved = resume.state
        model = make_model(linear, config.prior, n_features, saved.model)
        state = LatentState(z=saved.z.copy(), z0=saved.z0)
        main = rng_from_state(saved.rng["main"])
        rankers = [
            rng_from_state(saved.rng[f"ranker_{j}"]) for j in range(n_rankers)
        ]
        sweeps = saved.sweeps
        fitted_sum = saved.fitted_sum.copy()
        stored = resume.n_draws
        n_burnin = 0
    else:
        model = make_model(linear, config.prior, n_features, warm_start)
        state = _initial_state(panel, design, z_prior)
        main = derive_rng(config.seed, 0)
        rankers = [derive_rng(config.seed, 1, j) for j in range(n_rankers)]
        sweeps = 0
        fitted_sum = np.zeros(panel.shape)
        stored = 0
        n_burnin = config.n_burnin
    forests, coefficients, latent, initial = [], [], [], []
    acceptance = []
    total = n_burnin + config.n_draws * config.thin
    start = time.perf_counter()
    for sweep in range(total):
        state = sample_latent_path(
            state, model, panel, design, rankers, z_prior=z_prior
        )
        acceptance.append(state.acceptance)
        x = design.build(panel, state.z, state.z0)
        x_flat = x.reshape(state.z.size, n_features)
        model.update(x_flat, state.z.ravel(), main)
        sweeps += 1
        if sweep + 1 == n_burnin:
            logger.info(
                "Burn-in finished after %i sweeps (%.2f s).",
                n_burnin,
                time.perf_counter() - start,
            )
        if sweep < n_burnin or (sweep - n_burnin + 1) % config.thin:
            continue
        fitted_sum += model.predict(x)
        snapshot = model.snapshot()
        if linear:
            coefficients.append(snapshot.values)
        else:
            forests.append(snapshot)
        latent.append(state.z.copy())
        if state.z0 is not None:
            initial.append(state.z0.copy())
        logger.debug("Stored draw %i.", len(latent))
    elapsed = time.perf_counter() - start
    diagnostics = model.diagnostics()
    if design.dynamic and acceptance:
        diagnostics["accept_latent"] = float(np.nanmean(acceptance))
    logger.info(
        "Sampled %i draws in %i sweeps (%.2f s, %.4f s per sweep); "
        "acceptance %s",
        len(latent),
        total,
        elapsed,
        elapsed / max(total, 1),
        diagnostics,
    )
    rng = {"main": rng_state(main)}
    rng.update(
        {f"ranker_{j}": rng_state(stream) for j, stream in enumerate(rankers)}
    )
    n_stored = stored + len(latent)
    archive = PosteriorArchive(
        config=config_to_dict(config),
        seed=config.seed,
        shape=panel.shape,
        forests=forests,
        coefficients=np.array(coefficients) if linear else None,
        latent=np.array(latent) if latent else None,
        initial=np.array(initial) if initial else None,
        fitted_mean=fitted_sum / n_stored if n_stored else None,
        diagnostics=diagnostics,
        n_features=n_features,
        state=ChainState(
            model=model.snapshot(),
            z=state.z.copy(),
            z0=None if state.z0 is None else state.z0.copy(),
            rng=rng,
            sweeps=sweeps,
            fitted_sum=fitted_sum,
        ),
    )
    if resume is not None:
        resume.extend(archive)
        return resume
    return archive
