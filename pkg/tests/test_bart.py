# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""Tests for the sum-of-trees prior, sampler and forest format."""
import numpy as np
import pytest

from rankdyn.bart import (
    BartPrior,
    DecisionTree,
    Forest,
    Node,
    dump_forest,
    induced_partition,
    leaf_posterior,
    leaf_scale,
    load_forest,
    log_tree_prior,
    make_cutpoints,
    node_split_probability,
    propose_tree_move,
    sample_leaf_values,
    sample_prior_tree,
    update_forest,
)
from rankdyn.common import (
    ConfigError,
    DimensionError,
    InvalidInputError,
    UnsupportedForOracleError,
)


@pytest.mark.parametrize(
    "settings",
    [
        {"alpha": 1.0},
        {"alpha": 0.0},
        {"beta": -1.0},
        {"k_sigma": 0.0},
        {"n_trees": 0},
        {"n_cutpoints": 0},
        {"move_probabilities": (0.5, 0.5)},
        {"move_probabilities": (0.2, 0.2, 0.2)},
        {"move_probabilities": (0.0, 0.5, 0.5)},
    ],
)
def test_prior_validation(settings):
    """Out of range hyperparameters are configuration errors."""
    with pytest.raises(ConfigError):
        BartPrior(**settings)


def test_split_probability():
    """The split probability decays with depth."""
    prior = BartPrior()
    assert node_split_probability(0, prior) == pytest.approx(0.95)
    assert node_split_probability(1, prior) == pytest.approx(0.2375)
    assert node_split_probability(2, prior) == pytest.approx(0.95 / 9)
    with pytest.raises(InvalidInputError):
        node_split_probability(-1, prior)


def test_tree_evaluation_goes_left_at_the_cut(step_forest):
    """Values at the cut belong to the left child."""
    x = np.array([[-1.0], [0.0], [1e-12], [3.0]])
    np.testing.assert_array_equal(
        step_forest.predict(x), [-0.5, -0.5, 0.5, 0.5]
    )
    tree = step_forest.trees[0]
    assert tree.n_leaves == 2
    assert tree.depth == 1
    assert tree.is_valid()
    with pytest.raises(DimensionError):
        step_forest.predict(np.zeros((2, 3)))


def test_forest_predict_keeps_leading_dimensions(two_tree_forest):
    """Designs with several leading dimensions are evaluated cellwise."""
    x = np.linspace(-3, 3, 24).reshape(2, 3, 4, 1)
    values = two_tree_forest.predict(x)
    assert values.shape == (2, 3, 4)
    flat = two_tree_forest.predict(x.reshape(-1, 1))
    np.testing.assert_array_equal(values.ravel(), flat)


def test_invalid_tree():
    """A split outside the region of its node is detected."""
    inner = Node(var=0, cut=2.0, left=Node(), right=Node())
    root = Node(var=0, cut=1.0, left=inner, right=Node())
    assert not DecisionTree(1, root).is_valid()


def test_cutpoints():
    """Cutpoints are interior quantiles that split the data."""
    x = np.column_stack([np.arange(10.0), np.zeros(10)])
    with pytest.warns(UserWarning, match="constant"):
        cutpoints = make_cutpoints(x, 4)
    assert len(cutpoints) == 2
    assert np.all(np.diff(cutpoints[0]) > 0)
    assert cutpoints[0].max() < 9.0
    assert cutpoints[1].size == 0


def test_prior_trees(rng):
    """Trees drawn from the prior are valid and have a finite prior."""
    prior = BartPrior()
    cutpoints = make_cutpoints(rng.standard_normal((50, 2)), 10)
    for _ in range(20):
        tree = sample_prior_tree(prior, cutpoints, rng, leaf_sd=0.1)
        assert tree.is_valid()
        assert np.isfinite(log_tree_prior(tree, prior, cutpoints))


def test_log_tree_prior_of_a_stump():
    """A stump has the prior of one split and two leaves."""
    prior = BartPrior()
    cutpoints = [np.array([-1.0, 0.0, 1.0])]
    stump = DecisionTree(1, Node(var=0, cut=0.0, left=Node(), right=Node()))
    # each child still has one candidate, so it may split
    expected = (
        np.log(0.95) - np.log(3) + 2 * np.log1p(-0.2375)
    )
    assert log_tree_prior(stump, prior, cutpoints) == pytest.approx(expected)
    leaf = DecisionTree(1)
    assert log_tree_prior(leaf, prior, cutpoints) == pytest.approx(
        np.log1p(-0.95)
    )
    odd = DecisionTree(1, Node(var=0, cut=0.5, left=Node(), right=Node()))
    with pytest.raises(InvalidInputError):
        log_tree_prior(odd, prior, cutpoints)


@pytest.mark.parametrize("cut", [-1.0, 1.0])
def test_log_tree_prior_of_an_edge_cut(cut):
    """A child left without candidates is a leaf with probability one."""
    prior = BartPrior()
    cutpoints = [np.array([-1.0, 0.0, 1.0])]
    stump = DecisionTree(1, Node(var=0, cut=cut, left=Node(), right=Node()))
    expected = np.log(0.95) - np.log(3) + np.log1p(-0.2375)
    value = log_tree_prior(stump, prior, cutpoints)
    assert value == pytest.approx(expected)
    # one child is terminal with certainty instead of with 1 - 0.2375
    both_may_split = np.log(0.95) - np.log(3) + 2 * np.log1p(-0.2375)
    assert value > both_may_split
    # the certain leaf cannot grow either
    grown = DecisionTree(1, Node(var=0, cut=cut, left=Node(), right=Node()))
    edge = grown.root.left if cut < 0 else grown.root.right
    edge.make_split(0, cut)
    assert not grown.is_valid()


def test_leaf_posterior():
    """The leaf posterior is the conjugate normal update."""
    mean, var = leaf_posterior([0, 4], [0.0, 2.0], 0.0, 1.0)
    np.testing.assert_allclose(var, [1.0, 0.2])
    np.testing.assert_allclose(mean, [0.0, 0.4])


def test_leaf_scale():
    """The sum of the leaves spans the targets with k_sigma sds."""
    prior = BartPrior(n_trees=4, k_sigma=2.0)
    assert leaf_scale([-1.0, 3.0], prior) == pytest.approx(4.0 / 8.0)
    assert leaf_scale([1.0, 1.0], prior) == pytest.approx(2.0 / 8.0)


def test_dump_and_load(two_tree_forest):
    """The text format reads back to the same forest."""
    text = dump_forest(two_tree_forest)
    assert text.splitlines()[0] == "forest 2 1"
    forest = load_forest(text)
    assert dump_forest(forest) == text
    x = np.linspace(-2, 2, 9)[:, None]
    np.testing.assert_array_equal(
        forest.predict(x), two_tree_forest.predict(x)
    )
    with pytest.raises(InvalidInputError):
        load_forest("trees 1 1\n")
    with pytest.raises(InvalidInputError):
        load_forest("forest 1 1\ntree 0\n0 split 0 0.5\nend\n")


def test_induced_partition(two_tree_forest):
    """The overlay of the trees gives three cells and their values."""
    cells = induced_partition(two_tree_forest)
    assert [cell.interval() for cell in cells] == [
        (-np.inf, -1.0),
        (-1.0, 1.0),
        (1.0, np.inf),
    ]
    np.testing.assert_allclose(
        [cell.value for cell in cells], [-0.25, 0.25, 0.75]
    )
    constant = induced_partition(Forest.constant(3, 1, mu=0.5))
    assert len(constant) == 1
    assert constant[0].value == pytest.approx(1.5)


def test_induced_partition_needs_one_covariate():
    """Forests splitting on other covariates have no 1D partition."""
    root = Node(var=1, cut=0.0, left=Node(), right=Node())
    with pytest.raises(UnsupportedForOracleError):
        induced_partition(Forest([DecisionTree(2, root)]))


def test_update_forest_keeps_fits(rng):
    """The returned fits are the fits of the updated trees."""
    x = rng.uniform(-2, 2, (200, 2))
    y = np.where(x[:, 0] > 0, 1.0, -1.0)
    prior = BartPrior(n_trees=5)
    forest = Forest.constant(prior.n_trees, 2)
    fits = None
    for _ in range(5):
        fits, stats = update_forest(forest, x, y, prior, rng, fits=fits)
    expected = np.array([tree.evaluate(x) for tree in forest.trees])
    np.testing.assert_allclose(fits, expected)
    assert set(stats.rates()) <= {"grow", "prune", "change"}


@pytest.mark.slow
def test_forest_learns_a_step(rng):
    """Backfitting recovers a step function observed with unit noise."""
    x = rng.uniform(-2, 2, (1000, 1))
    truth = np.where(x[:, 0] > 0, 2.0, -2.0)
    y = truth + rng.standard_normal(len(x))
    prior = BartPrior(n_trees=20)
    forest = Forest.constant(prior.n_trees, 1)
    fits = None
    predictions = []
    for sweep in range(300):
        fits, _ = update_forest(forest, x, y, prior, rng, fits=fits)
        if sweep >= 100:
            predictions.append(fits.sum(axis=0))
    error = np.mean((np.mean(predictions, axis=0) - truth) ** 2)
    assert error < 0.05


def tree_sizes(trees):
    """Return the relative frequencies of 1, 2, ..., 6 or more leaves."""
    sizes = np.minimum([tree.n_leaves for tree in trees], 6)
    return np.bincount(sizes, minlength=7)[1:] / len(sizes)


def test_grow_is_accepted_on_a_split_signal():
    """A split of the residuals at zero is found by GROW proposals."""
    x = np.linspace(-2, 2, 200)[:, None]
    noise = np.random.default_rng(5).standard_normal(len(x))
    residuals = np.where(x[:, 0] > 0, 2.0, -2.0) + 0.5 * noise
    prior = BartPrior(n_trees=1)
    cutpoints = make_cutpoints(x, prior.n_cutpoints)
    leaf_sd = leaf_scale(residuals, prior)
    accepted = 0
    for seed in range(1000):
        tree, move, ok = propose_tree_move(
            DecisionTree(1),
            x,
            residuals,
            prior,
            cutpoints,
            leaf_sd,
            np.random.default_rng(seed),
        )
        # a single leaf can only grow
        assert move == "grow"
        if ok:
            accepted += 1
            assert tree.n_leaves == 2
    assert accepted / 1000 > 0.5


@pytest.mark.slow
def test_tree_size_under_pure_noise():
    """Noise residuals keep tree sizes within the prior's range."""
    rng = np.random.default_rng(17)
    prior = BartPrior()
    x = rng.uniform(-1, 1, (100, 1))
    cutpoints = make_cutpoints(x, prior.n_cutpoints)
    prior_sizes = [
        sample_prior_tree(prior, cutpoints, rng).n_leaves
        for _ in range(5000)
    ]
    tree = DecisionTree(1)
    sizes = []
    for _ in range(3000):
        residuals = rng.standard_normal(len(x))
        leaf_sd = leaf_scale(residuals, prior)
        tree, _, _ = propose_tree_move(
            tree, x, residuals, prior, cutpoints, leaf_sd, rng
        )
        sizes.append(tree.n_leaves)
    sizes = np.array(sizes[500:])
    assert np.mean(sizes > 1) > 0.2
    assert np.quantile(sizes, 0.9) <= np.quantile(prior_sizes, 0.99)
    assert np.mean(sizes) <= np.mean(prior_sizes) + 0.5


@pytest.mark.slow
def test_tree_moves_keep_the_joint_prior():
    """Forward draws and successive conditional draws agree.

    Trees drawn from the prior are compared with a chain alternating
    data draws given the tree and tree updates given the data; both
    sample the prior if the updates leave the posterior invariant.
    """
    rng = np.random.default_rng(99)
    prior = BartPrior(n_trees=1)
    x = np.linspace(-1, 1, 30)[:, None]
    cutpoints = make_cutpoints(x, 9)
    leaf_sd = 1.0
    forward = [
        sample_prior_tree(prior, cutpoints, rng, leaf_sd=leaf_sd)
        for _ in range(20000)
    ]
    tree = sample_prior_tree(prior, cutpoints, rng, leaf_sd=leaf_sd)
    backward = []
    for step in range(42000):
        y = tree.evaluate(x) + rng.standard_normal(len(x))
        tree, _, _ = propose_tree_move(
            tree, x, y, prior, cutpoints, leaf_sd, rng
        )
        sample_leaf_values(tree, x, y, leaf_sd, rng)
        if step >= 2000:
            backward.append(tree.copy())
    distance = 0.5 * np.abs(tree_sizes(forward) - tree_sizes(backward)).sum()
    assert distance < 0.05
    forward_depth = np.mean([tree.depth for tree in forward])
    backward_depth = np.mean([tree.depth for tree in backward])
    assert backward_depth == pytest.approx(forward_depth, abs=0.1)


@pytest.mark.slow
def test_forest_learns_a_parabola():
    """The posterior mean fit of a parabola tracks it on new points."""
    rng = np.random.default_rng(2)
    x = rng.uniform(-3, 3, (500, 1))
    y = x[:, 0] ** 2 + rng.standard_normal(len(x))
    grid = np.linspace(-2.9, 2.9, 100)[:, None]
    prior = BartPrior(n_trees=50)
    forest = Forest.constant(prior.n_trees, 1)
    fits = None
    predictions = []
    for sweep in range(300):
        fits, _ = update_forest(forest, x, y, prior, rng, fits=fits)
        if sweep >= 100:
            predictions.append(forest.predict(grid))
    fitted = np.mean(predictions, axis=0)
    correlation = np.corrcoef(fitted, grid[:, 0] ** 2)[0, 1]
    assert correlation >= 0.9
