# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""Tests for the simulated scenarios and the Borda count."""
import numpy as np
import pytest

from rankdyn.baselines import borda_count, borda_scores
from rankdyn.common import ConfigError, InvalidInputError
from rankdyn.rankings import RankingPanel
from rankdyn.simgen import (
    DynamicScenarioSpec,
    StaticScenarioSpec,
    gen_correlated_covariates,
    make_scenario,
    read_truth_csv,
    simulate,
    write_truth_csv,
)


@pytest.mark.parametrize(
    "name, n_features", [("static1", 4), ("static2", 3), ("static3", 4)]
)
def test_static_scenarios(name, n_features):
    """Static panels hold one period and the item covariates."""
    data = simulate(make_scenario(name, 1.0, n_items=6, n_rankers=4))
    assert data.panel.shape == (6, 4, 1)
    assert data.covariates.item.shape == (6, 1, n_features)
    assert data.truth.gamma.shape == (6, 4, 1)
    assert data.truth.latent is None


def test_static_scores():
    """Scenario means are linear, or linear plus squares."""
    x = np.array([[1.0, 0.0, 0.0, 1.0], [0.0, 1.0, 1.0, 0.0]])
    np.testing.assert_allclose(
        StaticScenarioSpec(1, 1.0).scores(x), [2.5, 1.0]
    )
    np.testing.assert_allclose(
        StaticScenarioSpec(3, 1.0).scores(x), [2.0, 2.0]
    )
    np.testing.assert_allclose(
        StaticScenarioSpec(2, 1.0).scores(x[:, :3]), [4.0, 5.0]
    )


def test_dynamic_scenarios():
    """Dynamic panels have the requested sizes; scenario 3 has covariates."""
    data = simulate(make_scenario("dyn1", 0.5, n_items=4, n_times=7))
    assert data.panel.shape == (4, 5, 7)
    assert data.covariates is None
    assert data.truth.latent.shape == (4, 5, 7)
    np.testing.assert_array_equal(
        data.panel.ranks, data.truth.latent.argsort(0).argsort(0) + 1
    )
    data = simulate(make_scenario("dyn3", 0.5, n_items=4, n_times=7))
    assert data.covariates.pair.shape == (4, 5, 8, 3)


def test_dynamic_means():
    """The transition means follow the scenario formulas."""
    z = np.array([1.0, -2.0])
    np.testing.assert_allclose(
        DynamicScenarioSpec(1, 1.0).mean(z), [0.1, 0.4]
    )
    np.testing.assert_allclose(
        DynamicScenarioSpec(2, 1.0).mean(z), [0.15, 0.3]
    )
    x = np.array([[2.0, 0.0], [1.0, 5.0]])
    np.testing.assert_allclose(
        DynamicScenarioSpec(3, 1.0).mean(z, x), [0.2, -0.2]
    )


def test_simulation_is_deterministic():
    """Equal seeds give equal panels."""
    first = simulate(make_scenario("dyn2", 1.0, seed=4, n_times=5))
    second = simulate(make_scenario("dyn2", 1.0, seed=4, n_times=5))
    assert first.panel.equals(second.panel)
    np.testing.assert_array_equal(first.truth.gamma, second.truth.gamma)
    other = simulate(make_scenario("dyn2", 1.0, seed=5, n_times=5))
    assert not other.panel.equals(first.panel)


@pytest.mark.parametrize(
    "name, sigma, sizes",
    [
        ("static1", 0.0, {}),
        ("dyn1", -1.0, {}),
        ("static4", 1.0, {}),
        ("walk", 1.0, {}),
        ("static1", 1.0, {"n_times": 5}),
        ("dyn1", 1.0, {"n_times": 1}),
        ("static1", 1.0, {"n_items": 1}),
    ],
)
def test_scenario_errors(name, sigma, sizes):
    """Bad scenario settings are configuration errors."""
    with pytest.raises(ConfigError):
        make_scenario(name, sigma, **sizes)


def test_correlated_covariates(rng):
    """Neighbouring covariates have correlation rho."""
    x = gen_correlated_covariates(20000, 3, 0.5, rng)
    correlation = np.corrcoef(x.T)
    np.testing.assert_allclose(correlation[0, 1], 0.5, atol=0.03)
    np.testing.assert_allclose(correlation[0, 2], 0.25, atol=0.03)
    with pytest.raises(InvalidInputError):
        gen_correlated_covariates(5, 2, 1.0, rng)


def test_truth_round_trip(tmp_path):
    """The truth sidecar reads back exactly."""
    data = simulate(make_scenario("dyn1", 1.0, n_items=3, n_times=4))
    path = tmp_path / "truth.csv"
    write_truth_csv(data.truth, data.panel, path)
    truth = read_truth_csv(path, data.panel)
    np.testing.assert_array_equal(truth.gamma, data.truth.gamma)
    np.testing.assert_array_equal(truth.latent, data.truth.latent)
    bigger = simulate(make_scenario("dyn1", 1.0, n_items=4, n_times=4))
    with pytest.raises(InvalidInputError):
        read_truth_csv(path, bigger.panel)


def test_borda_count():
    """Items are ordered by their mean rank."""
    ranks = [[1, 2, 1], [2, 1, 3], [3, 3, 2]]
    assert borda_count(ranks).ranks == (1, 2, 3)
    np.testing.assert_allclose(
        borda_scores(ranks).means, [4 / 3, 2.0, 8 / 3]
    )
    # a tie goes to the item listed first
    assert borda_count([[1, 2], [2, 1]]).ranks == (1, 2)


def test_borda_count_per_period(small_panel):
    """The Borda count aggregates the rankers of one period."""
    np.testing.assert_allclose(
        borda_scores(small_panel, time=2).means, [1.0, 2.5, 3.0, 3.5]
    )
    # the first two items tie in the first period
    assert borda_count(small_panel, time=0).ranks == (1, 2, 3, 4)
    with pytest.raises(InvalidInputError):
        borda_count(small_panel, time=3)
    panel = RankingPanel(ranks=np.array([[1], [2]]))
    assert borda_count(panel).ranks == (1, 2)
