# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""This module defines the latent score updates of the rank-order samplers.

Observed rankings are augmented with latent scores ``z`` such that, for
every ranker and period, ranking the scores reproduces the observed
ranking (rank 1 holds the smallest score). The score of an item is
confined between the scores of its neighbours in the observed ranking:
the item ranked just before it (lower bound) and just after it (upper
bound).

Random numbers are drawn per ranker: every sweep, each ranker's stream
gives a block of uniforms indexed by (period, item), so the updates of a
ranker do not depend on how many other rankers are fitted alongside.
"""
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri
from scipy.stats import truncnorm

from rankdyn.common import (
    DimensionError,
    InvalidInputError,
    InvariantViolation,
)


@dataclass
class LatentState:
    """The latent scores of a chain.

    Attributes
    ----------
    z : object like :py:class:`numpy.ndarray`
        Latent scores with shape ``(N, M, T)``.
    z0 : object like :py:class:`numpy.ndarray`, optional
        The initial state ``z_{j,0}`` of the dynamic models, ``(N, M)``.
    acceptance : float, optional
        Fraction of accepted site proposals in the last sweep (dynamic
        models only).

    """

    z: np.ndarray
    z0: np.ndarray = None
    acceptance: float = np.nan

    def copy(self):
        """Return a copy of the state."""
        return LatentState(
            z=self.z.copy(),
            z0=None if self.z0 is None else self.z0.copy(),
            acceptance=self.acceptance,
        )


def truncated_normal_ppf(u, mu, lower, upper):
    """Map uniforms to ``N(mu, 1)`` truncated to ``(lower, upper)``.

    The inverse distribution function of :py:data:`scipy.stats.truncnorm`
    is used, which stays accurate far in the tails. Results are kept
    strictly inside the bounds.
    """
    mu = np.asarray(mu, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    draws = truncnorm.ppf(u, lower - mu, upper - mu) + mu
    low = np.nextafter(lower, np.inf)
    high = np.nextafter(upper, -np.inf)
    bad = ~np.isfinite(draws)
    if np.any(bad):
        middle = np.where(
            np.isfinite(lower) & np.isfinite(upper),
            0.5 * (lower + upper),
            np.where(np.isfinite(lower), lower + 1.0, upper - 1.0),
        )
        draws = np.where(bad, middle, draws)
    return np.clip(draws, low, high)


def truncated_normal_draw(mu, lower, upper, rng, size=None):
    """Draw from a unit-variance normal restricted to an interval.

    Parameters
    ----------
    mu : float or array_like
        The mean of the untruncated normal.
    lower : float or array_like
        The lower bound (may be ``-inf``).
    upper : float or array_like
        The upper bound (may be ``inf``).
    rng : object like :py:class:`numpy.random.Generator`
        The random number generator.
    size : integer or tuple of integers, optional
        Number of draws. Defaults to the broadcast shape of the inputs.

    Returns
    -------
    out : float or object like :py:class:`numpy.ndarray`
        Draws lying strictly inside ``(lower, upper)``.

    Raises
    ------
    InvalidInputError
        If ``lower >= upper`` or ``mu`` is not finite.

    Examples
    --------
    >>> import numpy as np
    >>> x = truncated_normal_draw(0.0, 5.0, 6.0, np.random.default_rng(1))
    >>> 5.0 < x < 6.0
    True

    """
    mu, lower, upper = np.broadcast_arrays(
        np.asarray(mu, dtype=float),
        np.asarray(lower, dtype=float),
        np.asarray(upper, dtype=float),
    )
    if np.any(np.isnan(lower)) or np.any(np.isnan(upper)):
        raise InvalidInputError("truncation bounds must not be NaN")
    if not np.all(np.isfinite(mu)):
        raise InvalidInputError("the mean must be finite")
    if np.any(lower >= upper):
        raise InvalidInputError("the lower bound must be below the upper")
    if size is None:
        size = mu.shape
    u = rng.random(size)
    draws = truncated_normal_ppf(u, mu, lower, upper)
    if np.ndim(draws) == 0:
        return float(draws)
    return draws


def initial_latent_scores(ranks):
    """Return scores satisfying the rankings exactly.

    The rank ``tau`` of ``N`` items is mapped to the standard normal
    quantile of ``(tau - 0.5) / N``.
    """
    ranks = np.asarray(ranks)
    return ndtri((ranks - 0.5) / ranks.shape[0])


def check_ordering(z, ranks):
    """Raise if the latent scores do not reproduce the observed ranks.

    Raises
    ------
    InvariantViolation
        If some score vector is tied or ordered differently from the
        ranking it augments.

    """
    ranks = np.asarray(ranks)
    if np.shape(z) != ranks.shape:
        raise InvariantViolation("latent scores and ranks differ in shape")
    ordered = np.take_along_axis(z, np.argsort(ranks, axis=0), axis=0)
    if not np.all(np.diff(ordered, axis=0) > 0):
        raise InvariantViolation(
            "latent scores do not follow the observed rankings"
        )


def _ranker_streams(rng, n_rankers):
    """Return one generator per ranker."""
    if isinstance(rng, np.random.Generator):
        return [rng] * n_rankers
    streams = list(rng)
    if len(streams) != n_rankers:
        raise DimensionError(
            f"expected {n_rankers} random streams, got {len(streams)}"
        )
    return streams


def ranker_uniforms(rng, n_slices, n_items, n_rankers):
    """Draw the uniforms of one sweep, shape ``(slices, N, M, 2)``.

    Ranker ``j`` draws its block ``(slices, N, 2)`` from its own stream
    (or, given a single generator, in ranker order).
    """
    blocks = [
        stream.random((n_slices, n_items, 2))
        for stream in _ranker_streams(rng, n_rankers)
    ]
    return np.stack(blocks, axis=2)


def _checkerboard(n_items):
    """Split rank positions into two sets with no adjacent positions."""
    starts = [i for i in (0, 1) if i < n_items]
    return [np.arange(start, n_items, 2) for start in starts]


def _update_slice(z, means, order, u, forward=None, joint=False, batches=None):
    """Update the scores of one slice of cells.

    Parameters
    ----------
    z : object like :py:class:`numpy.ndarray`
        Scores ``(N, C)``, one column per cell.
    means : object like :py:class:`numpy.ndarray`
        Means of the measurement factor ``(N, C)``.
    order : object like :py:class:`numpy.ndarray`
        Item at each rank position ``(N, C)``, or None for
        unconstrained scores.
    u : object like :py:class:`numpy.ndarray`
        Uniforms ``(N, C, 2)`` indexed by item: proposal, acceptance.
    forward : callable, optional
        Maps candidate scores ``(N, C)`` to the log density of the next
        period for every item ``(N, C)``. Without it the truncated
        normal draw is an exact Gibbs update.
    joint : boolean, optional
        If True, the forward density of every item depends on all
        scores of its column, so log densities are summed per column.
    batches : list of arrays, optional
        Groups of rank positions (or items if unconstrained) updated
        together.

    Returns
    -------
    z : object like :py:class:`numpy.ndarray`
        The updated scores.
    accepted : integer
        The number of accepted proposals.
    proposed : integer
        The number of proposals.

    """
    n_items, n_cells = z.shape
    z = z.copy()
    constrained = order is not None
    if not constrained:
        order = np.broadcast_to(np.arange(n_items)[:, None], z.shape)
    current = None if forward is None else forward(z)
    accepted = proposed = 0
    edge = np.full((1, n_cells), np.inf)
    for positions in batches:
        items = order[positions]
        if constrained:
            ordered = np.take_along_axis(z, order, axis=0)
            padded = np.concatenate([-edge, ordered, edge], axis=0)
            lower, upper = padded[positions], padded[positions + 2]
        else:
            lower = np.full(items.shape, -np.inf)
            upper = np.full(items.shape, np.inf)
        mu = np.take_along_axis(means, items, axis=0)
        draw_u = np.take_along_axis(u[..., 0], items, axis=0)
        proposal = truncated_normal_ppf(draw_u, mu, lower, upper)
        if forward is None:
            np.put_along_axis(z, items, proposal, axis=0)
            continue
        candidate = z.copy()
        np.put_along_axis(candidate, items, proposal, axis=0)
        densities = forward(candidate)
        change = densities - current
        if joint:
            log_ratio = np.broadcast_to(change.sum(axis=0), items.shape)
        else:
            log_ratio = np.take_along_axis(change, items, axis=0)
        accept_u = np.take_along_axis(u[..., 1], items, axis=0)
        accept = accept_u < np.exp(np.minimum(log_ratio, 0.0))
        old = np.take_along_axis(z, items, axis=0)
        np.put_along_axis(z, items, np.where(accept, proposal, old), axis=0)
        if joint:
            current = np.where(accept[0][None, :], densities, current)
        else:
            mask = np.zeros(z.shape, dtype=bool)
            np.put_along_axis(mask, items, accept, axis=0)
            current = np.where(mask, densities, current)
        accepted += int(np.count_nonzero(accept))
        proposed += accept.size
    return z, accepted, proposed


def sample_latent_scores_static(z, means, ranks, rng):
    """Run one Gibbs sweep over the latent scores of the static model.

    Each score ``z[i, j, t]`` is drawn from ``N(means[i, j, t], 1)``
    truncated between the scores of the items ranked just before and
    just after item ``i``. Items at rank positions of the same parity
    do not bound each other and are drawn together.

    Parameters
    ----------
    z : object like :py:class:`numpy.ndarray`
        Current scores ``(N, M)`` or ``(N, M, T)``, consistent with
        ``ranks``.
    means : object like :py:class:`numpy.ndarray`
        The fitted means ``f(X)``, same shape as ``z``.
    ranks : object like :py:class:`numpy.ndarray`
        The observed ranks, same shape as ``z``.
    rng : object like :py:class:`numpy.random.Generator` or list
        A generator, or one generator per ranker.

    Returns
    -------
    out : object like :py:class:`numpy.ndarray`
        The updated scores.

    Raises
    ------
    InvariantViolation
        If ``z`` is not consistent with ``ranks`` before or after the
        sweep.

    """
    z = np.asarray(z, dtype=float)
    static = z.ndim == 2
    if static:
        z = z[:, :, None]
        means = np.asarray(means, dtype=float)[:, :, None]
        ranks = np.asarray(ranks)[:, :, None]
    if z.shape != np.shape(means) or z.shape != np.shape(ranks):
        raise DimensionError("scores, means and ranks must have equal shapes")
    n_items, n_rankers, n_times = z.shape
    check_ordering(z, ranks)
    uniforms = ranker_uniforms(rng, n_times, n_items, n_rankers)
    # (T, N, M, 2) -> (N, M * T, 2) with cells in (ranker, time) order
    uniforms = uniforms.transpose(1, 2, 0, 3).reshape(n_items, -1, 2)
    order = np.argsort(ranks, axis=0).reshape(n_items, -1)
    new, _, _ = _update_slice(
        z.reshape(n_items, -1),
        np.asarray(means, dtype=float).reshape(n_items, -1),
        order,
        uniforms,
        batches=_checkerboard(n_items),
    )
    new = new.reshape(z.shape)
    check_ordering(new, ranks)
    return new[:, :, 0] if static else new


def sample_latent_path(state, model, panel, design, rng, z_prior=None):
    """Run one sweep over the latent path of an autoregressive model.

    The initial state and then the periods ``t = 1, ..., T`` are visited
    in forward order. A score ``z[i, j, t]`` is proposed from
    ``N(f(X[i, j, t]), 1)`` truncated to its ordering interval and
    accepted with the ratio of the next period's transition density,
    ``prod_i' N(z[i', j, t+1] | f(X[i', j, t+1]), 1)``, at the proposed
    and current values. At the last period every proposal is accepted.
    The initial state is proposed from its prior ``N(z_prior, 1)`` and
    accepted with the first transition density.

    With the own-scalar lag, only item ``i``'s next mean depends on
    ``z[i, j, t]``, so items at rank positions of equal parity are
    updated together. With the full-vector lag, positions are visited
    one at a time. Rankers are always updated in parallel.

    Parameters
    ----------
    state : object like :py:class:`.LatentState`
        The current latent path and initial state.
    model : object
        The mean function, with a ``predict(x)`` method (a forest or
        linear coefficients).
    panel : object like :py:class:`rankdyn.rankings.RankingPanel`
        The observed rankings.
    design : object like :py:class:`rankdyn.design.Design`
        How the covariates are assembled.
    rng : object like :py:class:`numpy.random.Generator` or list
        A generator, or one generator per ranker.
    z_prior : array_like, optional
        Prior mean of the initial state (per item). Defaults to zero.

    Returns
    -------
    out : object like :py:class:`.LatentState`
        The updated state.

    Raises
    ------
    InvariantViolation
        If the state is not consistent with the rankings.

    """
    if not design.dynamic:
        design_x = design.build(panel)
        z = sample_latent_scores_static(
            state.z, model.predict(design_x), panel.ranks, rng
        )
        return LatentState(z=z)
    n_items, n_rankers, n_times = panel.shape
    ranks = panel.ranks
    check_ordering(state.z, ranks)
    z = state.z.copy()
    if z_prior is None:
        z_prior = np.zeros(n_items)
    z_prior = np.broadcast_to(np.asarray(z_prior, dtype=float), (n_items,))
    prior_mean = np.broadcast_to(z_prior[:, None], (n_items, n_rankers))
    z0 = prior_mean.copy() if state.z0 is None else state.z0.copy()
    uniforms = ranker_uniforms(rng, n_times + 1, n_items, n_rankers)
    joint = design.full_lag

    def forward_density(time):
        def density(candidate):
            means = model.predict(design.period(panel, time, candidate))
            return -0.5 * (z[:, :, time] - means) ** 2

        return density

    if joint:
        item_batches = [np.array([i]) for i in range(n_items)]
        rank_batches = [np.array([r]) for r in range(n_items)]
    else:
        item_batches = [np.arange(n_items)]
        rank_batches = _checkerboard(n_items)
    z0, accepted, proposed = _update_slice(
        z0,
        prior_mean,
        None,
        uniforms[0],
        forward=forward_density(0),
        joint=joint,
        batches=item_batches,
    )
    order = np.argsort(ranks, axis=0)
    for time in range(n_times):
        z_prev = z0 if time == 0 else z[:, :, time - 1]
        means = model.predict(design.period(panel, time, z_prev))
        forward = forward_density(time + 1) if time < n_times - 1 else None
        z[:, :, time], acc, prop = _update_slice(
            z[:, :, time],
            means,
            order[:, :, time],
            uniforms[time + 1],
            forward=forward,
            joint=joint,
            batches=rank_batches,
        )
        accepted += acc
        proposed += prop
    check_ordering(z, ranks)
    acceptance = accepted / proposed if proposed else np.nan
    return LatentState(z=z, z0=z0, acceptance=acceptance)
