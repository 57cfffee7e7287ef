# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""Shared fixtures for the rankdyn tests."""
import numpy as np
import pytest

from rankdyn.bart import DecisionTree, Forest, Node
from rankdyn.rankings import RankingPanel
from rankdyn.simgen import make_scenario, simulate

# Short chains, enough to exercise the samplers:
FAST = {"n_burnin": 5, "n_draws": 4, "n_trees": 5, "seed": 11}


@pytest.fixture
def rng():
    """Return a seeded generator."""
    return np.random.default_rng(1234)


@pytest.fixture
def fast_settings():
    """Return sampler settings for short chains."""
    return dict(FAST)


@pytest.fixture
def small_panel():
    """Return a panel of 4 items, 2 rankers and 3 periods."""
    ranks = np.array(
        [
            [[1, 2, 1], [2, 1, 1]],
            [[2, 1, 3], [1, 2, 2]],
            [[3, 3, 2], [4, 3, 4]],
            [[4, 4, 4], [3, 4, 3]],
        ]
    )
    return RankingPanel(
        ranks=ranks,
        items=("a", "b", "c", "d"),
        rankers=("x", "y"),
        times=("2001", "2002", "2003"),
    )


@pytest.fixture
def dynamic_data():
    """Return a small simulated dynamic data set."""
    spec = make_scenario(
        "dyn2", 1.0, seed=3, n_items=5, n_rankers=2, n_times=6
    )
    return simulate(spec)


@pytest.fixture
def static_data():
    """Return a small simulated static data set."""
    spec = make_scenario("static1", 1.0, seed=5, n_items=8, n_rankers=3)
    return simulate(spec)


@pytest.fixture
def step_forest():
    """Return a one-tree forest over one covariate: -0.5 or 0.5."""
    root = Node(var=0, cut=0.0, left=Node(mu=-0.5), right=Node(mu=0.5))
    return Forest([DecisionTree(1, root)])


@pytest.fixture
def two_tree_forest():
    """Return a forest of two trees splitting at -1 and at 1."""
    first = Node(var=0, cut=-1.0, left=Node(mu=-0.25), right=Node(mu=0.25))
    second = Node(var=0, cut=1.0, left=Node(mu=0.0), right=Node(mu=0.5))
    return Forest([DecisionTree(1, first), DecisionTree(1, second)])
