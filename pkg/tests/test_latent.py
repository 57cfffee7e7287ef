# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""Tests for the truncated normal draws and latent score sweeps."""
import numpy as np
import pytest
from scipy import integrate
from scipy.stats import norm

from rankdyn.bart import Forest
from rankdyn.common import (
    DimensionError,
    InvalidInputError,
    InvariantViolation,
    derive_rng,
)
from rankdyn.design import Design
from rankdyn.latent import (
    LatentState,
    check_ordering,
    initial_latent_scores,
    sample_latent_path,
    sample_latent_scores_static,
    truncated_normal_draw,
)
from rankdyn.linear import LinearCoefficients
from rankdyn.rankings import RankingPanel


def truncated_moments(mu, lower, upper):
    """Return the mean, variance and fourth central moment by quadrature."""

    def integral(function):
        value, _ = integrate.quad(
            lambda x: function(x) * norm.pdf(x - mu),
            lower,
            upper,
            epsabs=0.0,
            epsrel=1e-10,
        )
        return value

    mass = integral(lambda x: 1.0)
    mean = integral(lambda x: x) / mass
    var = integral(lambda x: (x - mean) ** 2) / mass
    fourth = integral(lambda x: (x - mean) ** 4) / mass
    return mean, var, fourth


def test_truncated_draws_stay_inside(rng):
    """Draws lie strictly inside their interval, also in the tails."""
    for lower, upper in [(5.0, 6.0), (-np.inf, -8.0), (0.0, 1e-9)]:
        draws = truncated_normal_draw(0.0, lower, upper, rng, size=1000)
        assert np.all(draws > lower)
        assert np.all(draws < upper)
    single = truncated_normal_draw(0.0, 5.0, 6.0, np.random.default_rng(1))
    assert isinstance(single, float)
    assert 5.0 < single < 6.0


def test_truncated_draws_reject_empty_intervals(rng):
    """The lower bound must be below the upper bound."""
    with pytest.raises(InvalidInputError):
        truncated_normal_draw(0.0, 1.0, 1.0, rng)
    with pytest.raises(InvalidInputError):
        truncated_normal_draw(0.0, 2.0, 1.0, rng)
    with pytest.raises(InvalidInputError):
        truncated_normal_draw(np.nan, 0.0, 1.0, rng)


@pytest.mark.parametrize(
    "mu, lower, upper",
    [
        (0.0, 0.0, np.inf),
        (0.0, 5.0, 6.0),
        (2.0, -1.0, 1.0),
        (0.0, -np.inf, np.inf),
        (4.0, -np.inf, 0.0),
    ],
)
def test_truncated_moments(mu, lower, upper):
    """Sample mean and variance are within 3 standard errors."""
    rng = np.random.default_rng(2024)
    n_draws = 100_000
    draws = truncated_normal_draw(mu, lower, upper, rng, size=n_draws)
    mean, var, fourth = truncated_moments(mu, lower, upper)
    assert abs(draws.mean() - mean) < 3 * np.sqrt(var / n_draws)
    var_error = np.sqrt((fourth - var**2) / n_draws)
    assert abs(draws.var() - var) < 3 * var_error


def test_initial_scores_follow_ranks(small_panel):
    """The initial scores reproduce the rankings exactly."""
    z = initial_latent_scores(small_panel.ranks)
    check_ordering(z, small_panel.ranks)
    np.testing.assert_allclose(
        z[:, 0, 0], norm.ppf([0.125, 0.375, 0.625, 0.875])
    )


def test_check_ordering(small_panel):
    """Scores out of order or tied break the invariant."""
    z = initial_latent_scores(small_panel.ranks)
    swapped = z.copy()
    swapped[[0, 1], 0, 0] = swapped[[1, 0], 0, 0]
    with pytest.raises(InvariantViolation):
        check_ordering(swapped, small_panel.ranks)
    tied = z.copy()
    tied[0, 0, 0] = tied[1, 0, 0]
    with pytest.raises(InvariantViolation):
        check_ordering(tied, small_panel.ranks)


def test_static_sweep_keeps_the_ordering(small_panel, rng):
    """Every sweep keeps the scores consistent with the rankings."""
    z = initial_latent_scores(small_panel.ranks)
    means = rng.standard_normal(z.shape) * 3
    for _ in range(50):
        z = sample_latent_scores_static(z, means, small_panel.ranks, rng)
        check_ordering(z, small_panel.ranks)
    with pytest.raises(DimensionError):
        sample_latent_scores_static(z, means[:, :, :2], small_panel.ranks, rng)


def test_ranker_streams_are_independent(small_panel):
    """A ranker's update does not depend on the other rankers."""
    z = initial_latent_scores(small_panel.ranks)
    means = np.zeros(z.shape)
    both = sample_latent_scores_static(
        z,
        means,
        small_panel.ranks,
        [derive_rng(9, 1, 0), derive_rng(9, 1, 1)],
    )
    alone = sample_latent_scores_static(
        z[:, :1],
        means[:, :1],
        small_panel.ranks[:, :1],
        [derive_rng(9, 1, 0)],
    )
    np.testing.assert_array_equal(both[:, :1], alone)
    with pytest.raises(DimensionError):
        sample_latent_scores_static(
            z, means, small_panel.ranks, [derive_rng(9, 1, 0)]
        )


@pytest.mark.parametrize("lag_input", ["own_scalar_lag", "full_vector_lag"])
def test_latent_path_sweep(small_panel, lag_input):
    """The dynamic sweep keeps the ordering and reports acceptance."""
    design = Design(lag_input=lag_input)
    n_features = design.n_features(small_panel)
    model = LinearCoefficients(np.r_[0.1, 0.5 * np.ones(n_features)])
    state = LatentState(z=initial_latent_scores(small_panel.ranks))
    rngs = [derive_rng(4, 1, j) for j in range(small_panel.n_rankers)]
    for _ in range(20):
        state = sample_latent_path(state, model, small_panel, design, rngs)
    check_ordering(state.z, small_panel.ranks)
    assert state.z0.shape == (4, 2)
    assert 0.0 < state.acceptance <= 1.0


def test_latent_path_with_a_constant_forest(small_panel, rng):
    """With a flat mean every proposal is accepted."""
    design = Design(lag_input="own_scalar_lag")
    model = Forest.constant(3, 1)
    state = LatentState(z=initial_latent_scores(small_panel.ranks))
    state = sample_latent_path(state, model, small_panel, design, rng)
    assert state.acceptance == pytest.approx(1.0)


def order_statistic_bins(rank, n_items, edges):
    """Return bin probabilities of an order statistic of N(0, 1) draws."""
    grid = np.linspace(edges[0], edges[-1], 20001)
    cdf = norm.cdf(grid)
    coefficient = np.prod(np.arange(1, n_items + 1)) / (
        np.prod(np.arange(1, rank)) * np.prod(np.arange(1, n_items - rank + 1))
    )
    density = (
        coefficient
        * norm.pdf(grid)
        * cdf ** (rank - 1)
        * (1 - cdf) ** (n_items - rank)
    )
    bins = np.digitize(grid, edges[1:-1])
    weights = density * (grid[1] - grid[0])
    return np.bincount(bins, weights=weights, minlength=len(edges) - 1)


@pytest.mark.slow
def test_static_sweep_samples_order_statistics():
    """With zero means the scores are ordered standard normals."""
    n_items, n_rankers = 3, 20
    ranks = np.tile(np.array([2, 3, 1])[:, None], (1, n_rankers))
    panel = RankingPanel(ranks=ranks)
    ranks = panel.ranks[:, :, 0]
    rngs = [derive_rng(21, 1, j) for j in range(n_rankers)]
    z = initial_latent_scores(ranks)
    means = np.zeros(z.shape)
    samples = []
    for sweep in range(5500):
        z = sample_latent_scores_static(z, means, ranks, rngs)
        if sweep >= 500:
            samples.append(z.copy())
    samples = np.array(samples)
    edges = np.linspace(-4, 4, 51)
    for item, rank in enumerate([2, 3, 1]):
        counts, _ = np.histogram(samples[:, item].ravel(), bins=edges)
        empirical = counts / samples[:, item].size
        exact = order_statistic_bins(rank, n_items, edges)
        assert 0.5 * np.abs(empirical - exact).sum() < 0.05
