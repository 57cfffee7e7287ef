# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""This module defines Bayesian additive regression trees.

A forest is a sum of binary decision trees. Interior nodes hold a rule
``x[var] <= cut`` (true goes left) and leaves hold a parameter ``mu``.
The methods here implement the regularization prior, the
Metropolis-Hastings tree moves (GROW, PRUNE and CHANGE), the conjugate
leaf draws under unit observation noise, the backfitting sweep over all
trees and a line-oriented text format for forests.
"""
import logging
import warnings
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from rankdyn.common import (
    ConfigError,
    DimensionError,
    InvalidInputError,
    UnsupportedForOracleError,
)

logger = logging.getLogger(__name__)

MOVES = ("grow", "prune", "change")


@dataclass(frozen=True)
class BartPrior:
    """Hyperparameters of the sum-of-trees prior.

    Attributes
    ----------
    alpha : float, optional
        Base of the split probability ``alpha * (1 + d)**(-beta)``.
    beta : float, optional
        Depth penalty of the split probability.
    k_sigma : float, optional
        Spread multiplier for the leaf prior; larger values shrink the
        leaves harder.
    n_trees : integer, optional
        The number of trees S.
    n_cutpoints : integer, optional
        Number of candidate splitting values per covariate.
    move_probabilities : tuple of floats, optional
        Probabilities of proposing GROW, PRUNE and CHANGE.

    """

    alpha: float = 0.95
    beta: float = 2.0
    k_sigma: float = 2.0
    n_trees: int = 50
    n_cutpoints: int = 100
    move_probabilities: tuple = (0.25, 0.25, 0.5)

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ConfigError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.beta < 0:
            raise ConfigError(f"beta must be >= 0, got {self.beta}")
        if self.k_sigma <= 0:
            raise ConfigError(f"k_sigma must be > 0, got {self.k_sigma}")
        if int(self.n_trees) < 1:
            raise ConfigError(f"n_trees must be >= 1, got {self.n_trees}")
        if int(self.n_cutpoints) < 1:
            raise ConfigError(
                f"n_cutpoints must be >= 1, got {self.n_cutpoints}"
            )
        probabilities = tuple(float(i) for i in self.move_probabilities)
        if len(probabilities) != len(MOVES) or min(probabilities) < 0:
            raise ConfigError(
                "move_probabilities must be three nonnegative numbers"
            )
        if not np.isclose(sum(probabilities), 1.0) or probabilities[0] == 0:
            raise ConfigError(
                "move_probabilities must sum to one with a positive grow "
                "probability"
            )
        object.__setattr__(self, "move_probabilities", probabilities)
        object.__setattr__(self, "n_trees", int(self.n_trees))
        object.__setattr__(self, "n_cutpoints", int(self.n_cutpoints))


class Node:
    """A node in a decision tree.

    A node is a leaf when it has no children. Leaves use ``mu``, interior
    nodes use ``var`` and ``cut``.
    """

    __slots__ = ("var", "cut", "mu", "left", "right")

    def __init__(self, mu=0.0, var=-1, cut=np.nan, left=None, right=None):
        self.mu = float(mu)
        self.var = int(var)
        self.cut = float(cut)
        self.left = left
        self.right = right

    @property
    def is_leaf(self):
        """Return True if the node is terminal."""
        return self.left is None

    def copy(self):
        """Return a deep copy of the subtree rooted here."""
        if self.is_leaf:
            return Node(mu=self.mu)
        return Node(
            var=self.var,
            cut=self.cut,
            left=self.left.copy(),
            right=self.right.copy(),
        )

    def make_leaf(self, mu=0.0):
        """Turn this node into a leaf."""
        self.var, self.cut, self.mu = -1, np.nan, float(mu)
        self.left = self.right = None

    def make_split(self, var, cut):
        """Turn this leaf into an interior node with two new leaves."""
        self.var, self.cut, self.mu = int(var), float(cut), 0.0
        self.left, self.right = Node(), Node()


class DecisionTree:
    """A binary regression tree over ``n_features`` covariates.

    Parameters
    ----------
    n_features : integer
        The covariate dimension the tree is defined over.
    root : object like :py:class:`.Node`, optional
        The root node. A single leaf with ``mu = 0`` is used if not given.

    """

    def __init__(self, n_features, root=None):
        self.n_features = int(n_features)
        self.root = Node() if root is None else root

    def copy(self):
        """Return a deep copy of the tree."""
        return DecisionTree(self.n_features, self.root.copy())

    def walk(self):
        """Yield ``(node, depth, lower, upper)`` in preorder.

        ``lower`` and ``upper`` are arrays with the bounds of the region
        of the node: it holds ``x`` with ``lower < x <= upper``.
        """
        lower = np.full(self.n_features, -np.inf)
        upper = np.full(self.n_features, np.inf)
        stack = [(self.root, 0, lower, upper)]
        while stack:
            node, depth, lower, upper = stack.pop()
            yield node, depth, lower, upper
            if node.is_leaf:
                continue
            left_upper = upper.copy()
            left_upper[node.var] = min(upper[node.var], node.cut)
            right_lower = lower.copy()
            right_lower[node.var] = max(lower[node.var], node.cut)
            stack.append((node.right, depth + 1, right_lower, upper))
            stack.append((node.left, depth + 1, lower, left_upper))

    def leaves(self):
        """Return the leaves in preorder."""
        return [node for node, _, _, _ in self.walk() if node.is_leaf]

    def interior(self):
        """Return the interior nodes in preorder."""
        return [node for node, _, _, _ in self.walk() if not node.is_leaf]

    @property
    def n_leaves(self):
        """Return the number of leaves b."""
        return len(self.leaves())

    @property
    def depth(self):
        """Return the depth of the deepest leaf."""
        return max(depth for _, depth, _, _ in self.walk())

    def split_variables(self):
        """Return the set of covariates used by some split."""
        return {node.var for node in self.interior()}

    def is_valid(self):
        """Return True if every split cuts its region in two parts."""
        for node, _, lower, upper in self.walk():
            if node.is_leaf:
                continue
            if not lower[node.var] < node.cut < upper[node.var]:
                return False
        return True

    def leaf_index(self, x):
        """Return the preorder leaf number for each row of ``x``."""
        x = _check_design(x, self.n_features)
        out = np.empty(len(x), dtype=np.intp)
        stack = [(self.root, np.arange(len(x)))]
        leaf = 0
        while stack:
            node, rows = stack.pop()
            if node.is_leaf:
                out[rows] = leaf
                leaf += 1
                continue
            go_left = x[rows, node.var] <= node.cut
            stack.append((node.right, rows[~go_left]))
            stack.append((node.left, rows[go_left]))
        return out

    def leaf_values(self):
        """Return the leaf parameters in preorder."""
        return np.array([node.mu for node in self.leaves()])

    def evaluate(self, x):
        """Evaluate the tree for the rows of ``x``."""
        return self.leaf_values()[self.leaf_index(x)]


class Forest:
    """A sum of decision trees.

    Parameters
    ----------
    trees : list of objects like :py:class:`.DecisionTree`
        The trees, all over the same covariate dimension.
    n_features : integer, optional
        The covariate dimension. Taken from the first tree if not given.

    """

    def __init__(self, trees, n_features=None):
        trees = list(trees)
        if not trees:
            raise InvalidInputError("a forest needs at least one tree")
        if n_features is None:
            n_features = trees[0].n_features
        for tree in trees:
            if tree.n_features != n_features:
                raise DimensionError(
                    "all trees must use the same covariate dimension"
                )
        self.trees = trees
        self.n_features = int(n_features)

    @classmethod
    def constant(cls, n_trees, n_features, mu=0.0):
        """Return a forest of single-leaf trees, each with value ``mu``."""
        return cls(
            [DecisionTree(n_features, Node(mu=mu)) for _ in range(n_trees)],
            n_features,
        )

    @property
    def n_trees(self):
        """Return S, the number of trees."""
        return len(self.trees)

    def copy(self):
        """Return a deep copy of the forest."""
        return Forest([tree.copy() for tree in self.trees], self.n_features)

    def split_variables(self):
        """Return the set of covariates used by some split."""
        used = set()
        for tree in self.trees:
            used |= tree.split_variables()
        return used

    def predict(self, x):
        """Evaluate the forest for the rows of a design matrix.

        ``x`` may have any number of leading dimensions; the last one
        holds the covariates.
        """
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n_features:
            raise DimensionError(
                f"expected {self.n_features} covariates, got {x.shape[-1]}"
            )
        flat = x.reshape(int(np.prod(x.shape[:-1])), self.n_features)
        total = np.zeros(len(flat))
        for tree in self.trees:
            total += tree.evaluate(flat)
        return total.reshape(x.shape[:-1])


def _check_design(x, n_features):
    """Return ``x`` as a 2D design matrix with ``n_features`` columns."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != n_features:
        raise DimensionError(
            f"expected rows with {n_features} covariates, got shape {x.shape}"
        )
    return x


def evaluate_tree(tree, x):
    """Evaluate a tree at a covariate vector.

    Parameters
    ----------
    tree : object like :py:class:`.DecisionTree`
        The tree to evaluate.
    x : array_like
        A covariate vector of dimension ``K_x``, or a matrix with one
        vector per row.

    Returns
    -------
    out : float or object like :py:class:`numpy.ndarray`
        The parameter of the leaf containing ``x``. A split sends
        ``x[var] <= cut`` to the left.

    Raises
    ------
    DimensionError
        If ``x`` does not have ``K_x`` components.

    """
    values = tree.evaluate(x)
    if np.ndim(x) == 1:
        return float(values[0])
    return values


def evaluate_forest(forest, x):
    """Evaluate the sum of trees at a covariate vector (or matrix rows)."""
    if np.ndim(x) == 1:
        return float(forest.predict(np.asarray(x, dtype=float)[None, :])[0])
    return forest.predict(x)


def node_split_probability(depth, prior):
    """Return the prior probability that a node at ``depth`` splits.

    Examples
    --------
    >>> node_split_probability(1, BartPrior())
    0.2375

    """
    if depth < 0:
        raise InvalidInputError(f"depth must be >= 0, got {depth}")
    return prior.alpha * (1.0 + depth) ** (-prior.beta)


def make_cutpoints(x, n_cutpoints):
    """Return candidate splitting values for each covariate.

    The candidates are ``n_cutpoints`` equally spaced interior quantiles
    of the observed values, with duplicates removed. A value that would
    send every observation left is dropped.

    Parameters
    ----------
    x : array_like
        The design matrix with one row per observation.
    n_cutpoints : integer
        The number of quantiles to use per covariate.

    Returns
    -------
    out : list of objects like :py:class:`numpy.ndarray`
        The sorted candidates for each covariate.

    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise DimensionError(f"expected a design matrix, got shape {x.shape}")
    probabilities = np.linspace(0, 1, n_cutpoints + 2)[1:-1]
    cutpoints = []
    for column in x.T:
        cuts = np.unique(np.quantile(column, probabilities))
        cutpoints.append(cuts[cuts < column.max()])
    empty = [k for k, cuts in enumerate(cutpoints) if cuts.size == 0]
    if empty and len(x) > 1:
        warnings.warn(
            f"Covariate(s) {empty} are constant and cannot be split on."
        )
    return cutpoints


def _available(cuts, lower, upper):
    """Return the slice of sorted ``cuts`` strictly inside (lower, upper)."""
    start = np.searchsorted(cuts, lower, side="right")
    stop = np.searchsorted(cuts, upper, side="left")
    return start, max(start, stop)


def _split_counts(cutpoints, lower, upper):
    """Return how many cutpoints each covariate has inside a region."""
    counts = np.zeros(len(cutpoints), dtype=np.intp)
    for k, cuts in enumerate(cutpoints):
        start, stop = _available(cuts, lower[k], upper[k])
        counts[k] = stop - start
    return counts


def _cut_is_candidate(cutpoints, var, cut, lower, upper):
    cuts = cutpoints[var]
    start, stop = _available(cuts, lower[var], upper[var])
    return bool(np.any(cuts[start:stop] == cut))


def log_tree_prior(tree, prior, cutpoints, strict=True):
    """Return the log prior probability of a tree structure.

    A node at depth ``d`` splits with probability ``alpha*(1+d)**-beta``
    when it has at least one candidate split; otherwise it is a leaf
    with probability one. The splitting variable is uniform over the
    covariates with candidates inside the node's region and the
    splitting value is uniform over those candidates.

    Parameters
    ----------
    tree : object like :py:class:`.DecisionTree`
        The tree to evaluate.
    prior : object like :py:class:`.BartPrior`
        The prior hyperparameters.
    cutpoints : list of objects like :py:class:`numpy.ndarray`
        The candidate splitting values for each covariate.
    strict : boolean, optional
        If False, splits on values outside the candidate set are
        accepted and scored as if they were one of the candidates. The
        sampler uses this since candidates are refreshed every sweep.

    Returns
    -------
    out : float
        The log prior.

    Raises
    ------
    InvalidInputError
        If ``strict`` and some split value is not a candidate.

    """
    total = 0.0
    for node, depth, lower, upper in tree.walk():
        counts = _split_counts(cutpoints, lower, upper)
        n_vars = np.count_nonzero(counts)
        split = node_split_probability(depth, prior)
        if node.is_leaf:
            if n_vars > 0:
                total += np.log1p(-split)
            continue
        n_cuts = counts[node.var]
        if not _cut_is_candidate(cutpoints, node.var, node.cut, lower, upper):
            if strict:
                raise InvalidInputError(
                    f"split value {node.cut!r} of covariate {node.var} is "
                    "not in the candidate set"
                )
            if n_cuts == 0:
                n_vars += 1
                n_cuts = 1
        total += np.log(split) - np.log(n_vars) - np.log(n_cuts)
    return float(total)


def sample_prior_tree(prior, cutpoints, rng, leaf_sd=None, leaf_mean=0.0):
    """Draw a tree from the tree prior.

    Parameters
    ----------
    prior : object like :py:class:`.BartPrior`
        The prior hyperparameters.
    cutpoints : list of objects like :py:class:`numpy.ndarray`
        The candidate splitting values for each covariate.
    rng : object like :py:class:`numpy.random.Generator`
        The random number generator.
    leaf_sd : float, optional
        If given, leaves are drawn from ``N(leaf_mean, leaf_sd**2)``,
        otherwise they are set to ``leaf_mean``.
    leaf_mean : float, optional
        The prior mean of the leaves.

    Returns
    -------
    out : object like :py:class:`.DecisionTree`
        The drawn tree.

    """
    n_features = len(cutpoints)
    tree = DecisionTree(n_features)
    lower = np.full(n_features, -np.inf)
    upper = np.full(n_features, np.inf)
    stack = [(tree.root, 0, lower, upper)]
    while stack:
        node, depth, lower, upper = stack.pop()
        counts = _split_counts(cutpoints, lower, upper)
        options = np.flatnonzero(counts)
        split = node_split_probability(depth, prior)
        if options.size and rng.random() < split:
            var = options[rng.integers(options.size)]
            start, _ = _available(cutpoints[var], lower[var], upper[var])
            cut = cutpoints[var][start + rng.integers(counts[var])]
            node.make_split(var, cut)
            left_upper = upper.copy()
            left_upper[var] = cut
            right_lower = lower.copy()
            right_lower[var] = cut
            stack.append((node.right, depth + 1, right_lower, upper))
            stack.append((node.left, depth + 1, lower, left_upper))
        elif leaf_sd is None:
            node.mu = leaf_mean
        else:
            node.mu = leaf_mean + leaf_sd * rng.standard_normal()
    return tree


def leaf_scale(targets, prior):
    """Return the leaf prior standard deviation sigma_mu.

    It is chosen so that the sum of S leaves, ``N(0, S*sigma_mu**2)``,
    puts ``k_sigma`` standard deviations on half the range of the
    targets.
    """
    targets = np.asarray(targets, dtype=float)
    spread = np.ptp(targets) if targets.size > 1 else 0.0
    if spread <= 0:
        spread = 2.0
    return spread / (2.0 * prior.k_sigma * np.sqrt(prior.n_trees))


def leaf_posterior(n_obs, total, leaf_mean, leaf_var):
    """Return the conjugate posterior mean and variance of leaf values.

    Parameters
    ----------
    n_obs : array_like
        The number of observations in each leaf.
    total : array_like
        The sum of residuals in each leaf.
    leaf_mean : float
        The prior mean of a leaf.
    leaf_var : float
        The prior variance of a leaf.

    Returns
    -------
    mean : object like :py:class:`numpy.ndarray`
        The posterior means.
    var : object like :py:class:`numpy.ndarray`
        The posterior variances.

    """
    n_obs = np.asarray(n_obs, dtype=float)
    var = 1.0 / (1.0 / leaf_var + n_obs)
    mean = var * (leaf_mean / leaf_var + np.asarray(total, dtype=float))
    return mean, var


def _log_marginal(n_obs, total, leaf_mean, leaf_var):
    """Log marginal likelihood of the residuals, up to tree-free terms."""
    var = 1.0 / (1.0 / leaf_var + n_obs)
    precision_mean = leaf_mean / leaf_var + total
    return float(
        np.sum(
            0.5 * np.log(var / leaf_var)
            + 0.5 * precision_mean**2 * var
            - 0.5 * leaf_mean**2 / leaf_var
        )
    )


def _leaf_statistics(index, residuals, n_leaves):
    n_obs = np.bincount(index, minlength=n_leaves).astype(float)
    total = np.bincount(index, weights=residuals, minlength=n_leaves)
    return n_obs, total


def _move_probabilities(tree, prior):
    """Return the move probabilities renormalized over possible moves."""
    probabilities = np.array(prior.move_probabilities)
    if tree.root.is_leaf:
        probabilities[1:] = 0.0
    return probabilities / probabilities.sum()


def _find(tree, target):
    """Return ``(depth, lower, upper)`` for a node of the tree."""
    for node, depth, lower, upper in tree.walk():
        if node is target:
            return depth, lower, upper
    raise KeyError("node is not in the tree")


def _prunable(tree):
    """Return interior nodes whose children are both leaves."""
    return [
        node
        for node in tree.interior()
        if node.left.is_leaf and node.right.is_leaf
    ]


def _propose_grow(tree, prior, cutpoints, rng):
    """Propose a GROW move; return (new tree, log proposal ratio)."""
    proposal = tree.copy()
    leaves = proposal.leaves()
    node = leaves[rng.integers(len(leaves))]
    _, lower, upper = _find(proposal, node)
    counts = _split_counts(cutpoints, lower, upper)
    options = np.flatnonzero(counts)
    if options.size == 0:
        return None, 0.0
    var = options[rng.integers(options.size)]
    start, _ = _available(cutpoints[var], lower[var], upper[var])
    cut = cutpoints[var][start + rng.integers(counts[var])]
    forward = (
        np.log(_move_probabilities(tree, prior)[0])
        - np.log(len(leaves))
        - np.log(options.size)
        - np.log(counts[var])
    )
    node.make_split(var, cut)
    backward = np.log(_move_probabilities(proposal, prior)[1]) - np.log(
        len(_prunable(proposal))
    )
    return proposal, backward - forward


def _propose_prune(tree, prior, cutpoints, rng):
    """Propose a PRUNE move; return (new tree, log proposal ratio)."""
    proposal = tree.copy()
    candidates = _prunable(proposal)
    node = candidates[rng.integers(len(candidates))]
    _, lower, upper = _find(proposal, node)
    counts = _split_counts(cutpoints, lower, upper)
    n_vars = max(np.count_nonzero(counts), 1)
    n_cuts = max(counts[node.var], 1)
    forward = np.log(_move_probabilities(tree, prior)[1]) - np.log(
        len(candidates)
    )
    node.make_leaf()
    backward = (
        np.log(_move_probabilities(proposal, prior)[0])
        - np.log(proposal.n_leaves)
        - np.log(n_vars)
        - np.log(n_cuts)
    )
    return proposal, backward - forward


def _propose_change(tree, prior, cutpoints, rng):
    """Propose a CHANGE move; return (new tree, log proposal ratio)."""
    proposal = tree.copy()
    interior = proposal.interior()
    node = interior[rng.integers(len(interior))]
    _, lower, upper = _find(proposal, node)
    counts = _split_counts(cutpoints, lower, upper)
    options = np.flatnonzero(counts)
    if options.size == 0:
        return None, 0.0
    old_cuts = max(counts[node.var], 1)
    var = options[rng.integers(options.size)]
    start, _ = _available(cutpoints[var], lower[var], upper[var])
    cut = cutpoints[var][start + rng.integers(counts[var])]
    node.var, node.cut = int(var), float(cut)
    if not proposal.is_valid():
        return None, 0.0
    return proposal, np.log(counts[var]) - np.log(old_cuts)


_PROPOSALS = {
    "grow": _propose_grow,
    "prune": _propose_prune,
    "change": _propose_change,
}


def _mh_step(tree, x, residuals, prior, cutpoints, leaf_mean, leaf_var, rng):
    """Run one MH tree move.

    Returns the (possibly unchanged) tree, the move name, whether it
    was accepted and the leaf index of every observation.
    """
    move = MOVES[rng.choice(len(MOVES), p=_move_probabilities(tree, prior))]
    index = tree.leaf_index(x)
    proposal, log_ratio = _PROPOSALS[move](tree, prior, cutpoints, rng)
    if proposal is None:
        return tree, move, False, index
    new_index = proposal.leaf_index(x)
    current = _log_marginal(
        *_leaf_statistics(index, residuals, tree.n_leaves),
        leaf_mean,
        leaf_var,
    )
    proposed = _log_marginal(
        *_leaf_statistics(new_index, residuals, proposal.n_leaves),
        leaf_mean,
        leaf_var,
    )
    log_accept = (
        proposed
        - current
        + log_tree_prior(proposal, prior, cutpoints, strict=False)
        - log_tree_prior(tree, prior, cutpoints, strict=False)
        + log_ratio
    )
    if np.log(rng.random()) < log_accept:
        return proposal, move, True, new_index
    return tree, move, False, index


def propose_tree_move(
    tree, x, residuals, prior, cutpoints, leaf_sd, rng, leaf_mean=0.0
):
    """Run one Metropolis-Hastings step on a tree structure.

    A move is picked among GROW, PRUNE and CHANGE with the prior's move
    probabilities, renormalized over the moves possible for the tree.
    The acceptance ratio uses the marginal likelihood of the residuals
    with the leaves integrated out under unit noise. A GROW on a leaf
    without candidate splits and a CHANGE that invalidates a descendant
    split are rejected.

    Parameters
    ----------
    tree : object like :py:class:`.DecisionTree`
        The current tree.
    x : object like :py:class:`numpy.ndarray`
        The design matrix, one row per observation.
    residuals : object like :py:class:`numpy.ndarray`
        The partial residuals the tree is fitted to.
    prior : object like :py:class:`.BartPrior`
        The prior hyperparameters.
    cutpoints : list of objects like :py:class:`numpy.ndarray`
        The candidate splitting values for each covariate.
    leaf_sd : float
        The leaf prior standard deviation sigma_mu.
    rng : object like :py:class:`numpy.random.Generator`
        The random number generator.
    leaf_mean : float, optional
        The leaf prior mean mu_mu.

    Returns
    -------
    tree : object like :py:class:`.DecisionTree`
        The proposed tree if accepted, otherwise the current one.
    move : string
        The proposed move.
    accepted : boolean
        True if the proposal was accepted.

    """
    x = _check_design(x, tree.n_features)
    residuals = np.asarray(residuals, dtype=float)
    if len(residuals) != len(x):
        raise DimensionError("residuals and design rows do not match")
    new_tree, move, accepted, _ = _mh_step(
        tree, x, residuals, prior, cutpoints, leaf_mean, leaf_sd**2, rng
    )
    return new_tree, move, accepted


def sample_leaf_values(
    tree, x, residuals, leaf_sd, rng, leaf_mean=0.0, leaf_index=None
):
    """Draw the leaves of a tree from their conjugate posterior.

    With ``n`` observations and residual mean ``rbar`` in a leaf, its
    value is drawn from ``N(m, v)`` with ``v = 1/(1/sigma_mu**2 + n)``
    and ``m = v*(mu_mu/sigma_mu**2 + n*rbar)``. Empty leaves are drawn
    from the prior. The tree is updated in place and returned.
    """
    if leaf_index is None:
        leaf_index = tree.leaf_index(x)
    leaves = tree.leaves()
    n_obs, total = _leaf_statistics(
        leaf_index, np.asarray(residuals, dtype=float), len(leaves)
    )
    mean, var = leaf_posterior(n_obs, total, leaf_mean, leaf_sd**2)
    draws = mean + np.sqrt(var) * rng.standard_normal(len(leaves))
    for node, value in zip(leaves, draws):
        node.mu = float(value)
    return tree


def partial_residuals(targets, forest, s, x):
    """Return the residuals of the targets without tree ``s``.

    ``R_s = z - sum_{k != s} g_k(x)``.
    """
    targets = np.asarray(targets, dtype=float)
    residual = targets.copy()
    for k, tree in enumerate(forest.trees):
        if k != s:
            residual -= tree.evaluate(x)
    return residual


@dataclass
class SweepStats:
    """Counts of proposed and accepted tree moves."""

    proposed: Counter = field(default_factory=Counter)
    accepted: Counter = field(default_factory=Counter)

    def add(self, move, accepted):
        """Record one move."""
        self.proposed[move] += 1
        if accepted:
            self.accepted[move] += 1

    def merge(self, other):
        """Add the counts of another record."""
        self.proposed.update(other.proposed)
        self.accepted.update(other.accepted)

    def rates(self):
        """Return the acceptance rate of each move."""
        return {
            move: self.accepted[move] / self.proposed[move]
            for move in MOVES
            if self.proposed[move]
        }


def update_forest(forest, x, targets, prior, rng, fits=None, cutpoints=None):
    """Run one backfitting sweep over all trees of a forest.

    For every tree the partial residuals are formed, the structure is
    updated by one MH move and the leaves are redrawn. The leaf prior
    is ``N(0, sigma_mu**2)`` with sigma_mu from :py:func:`.leaf_scale`.

    Parameters
    ----------
    forest : object like :py:class:`.Forest`
        The forest, updated in place.
    x : object like :py:class:`numpy.ndarray`
        The design matrix.
    targets : object like :py:class:`numpy.ndarray`
        The regression targets (the latent scores).
    prior : object like :py:class:`.BartPrior`
        The prior hyperparameters.
    rng : object like :py:class:`numpy.random.Generator`
        The random number generator.
    fits : object like :py:class:`numpy.ndarray`, optional
        The fit of each tree, shape ``(S, n)``. It is recomputed if not
        given and updated in place otherwise.
    cutpoints : list of objects like :py:class:`numpy.ndarray`, optional
        Candidate splitting values, made from ``x`` if not given.

    Returns
    -------
    fits : object like :py:class:`numpy.ndarray`
        The updated fit of each tree.
    stats : object like :py:class:`.SweepStats`
        Counts of proposed and accepted moves.

    """
    x = _check_design(x, forest.n_features)
    targets = np.asarray(targets, dtype=float)
    if cutpoints is None:
        cutpoints = make_cutpoints(x, prior.n_cutpoints)
    if fits is None:
        fits = np.array([tree.evaluate(x) for tree in forest.trees])
    leaf_sd = leaf_scale(targets, prior)
    total = fits.sum(axis=0)
    stats = SweepStats()
    for s, tree in enumerate(forest.trees):
        residuals = targets - (total - fits[s])
        tree, move, accepted, index = _mh_step(
            tree, x, residuals, prior, cutpoints, 0.0, leaf_sd**2, rng
        )
        stats.add(move, accepted)
        sample_leaf_values(tree, x, residuals, leaf_sd, rng, leaf_index=index)
        forest.trees[s] = tree
        new_fit = tree.leaf_values()[index]
        total += new_fit - fits[s]
        fits[s] = new_fit
    logger.debug("Forest sweep acceptance: %s", stats.rates())
    return fits, stats


@dataclass(frozen=True)
class PartitionCell:
    """A region on which a forest is constant.

    Attributes
    ----------
    bounds : dict
        Maps a covariate index to the interval ``(lower, upper]``
        covered by the cell along it.
    value : float
        The forest value ``mu_tilde`` on the cell.

    """

    bounds: dict
    value: float

    def interval(self, dimension=0):
        """Return ``(lower, upper)`` along a covariate."""
        return self.bounds.get(dimension, (-np.inf, np.inf))

    @property
    def lower(self):
        """Return the lower end of the first interval."""
        return next(iter(self.bounds.values()))[0]

    @property
    def upper(self):
        """Return the upper end of the first interval."""
        return next(iter(self.bounds.values()))[1]


def induced_partition(forest, dimension=0):
    """Return the cells on which a forest over one covariate is constant.

    Every tree partitions the real line into intervals; their overlay
    gives the cells ``C_k`` with values ``mu_tilde_k = sum_s mu_s``.

    Parameters
    ----------
    forest : object like :py:class:`.Forest`
        A forest splitting only on ``dimension``.
    dimension : integer, optional
        The covariate the cells are defined along.

    Returns
    -------
    out : list of objects like :py:class:`.PartitionCell`
        Disjoint cells ``(lower, upper]`` covering the real line, sorted
        along the covariate. The end cells are unbounded.

    Raises
    ------
    UnsupportedForOracleError
        If the forest splits on another covariate.

    """
    other = forest.split_variables() - {dimension}
    if other:
        raise UnsupportedForOracleError(
            f"forest splits on covariate(s) {sorted(other)}, not only on "
            f"{dimension}"
        )
    cuts = sorted(
        {node.cut for tree in forest.trees for node in tree.interior()}
    )
    edges = [-np.inf] + cuts + [np.inf]
    points = np.array(cuts + [cuts[-1] + 1.0 if cuts else 0.0])
    x = np.zeros((len(points), forest.n_features))
    x[:, dimension] = points
    values = forest.predict(x)
    return [
        PartitionCell(bounds={dimension: (lower, upper)}, value=float(value))
        for lower, upper, value in zip(edges[:-1], edges[1:], values)
    ]


def dump_forest(forest):
    """Return a text representation of a forest.

    The format has a header line ``forest S K`` followed by one block
    per tree::

        tree 0
        0 split 1 0.25
        1 leaf - -0.5
        2 leaf - 0.75
        end

    Nodes are listed in preorder as ``node_id kind var cut|mu``.
    Floats are written with ``repr`` so that they are read back
    exactly.
    """
    lines = [f"forest {forest.n_trees} {forest.n_features}"]
    for s, tree in enumerate(forest.trees):
        lines.append(f"tree {s}")
        for node_id, (node, _, _, _) in enumerate(tree.walk()):
            if node.is_leaf:
                lines.append(f"{node_id} leaf - {node.mu!r}")
            else:
                lines.append(f"{node_id} split {node.var} {node.cut!r}")
        lines.append("end")
    return "\n".join(lines) + "\n"


def _parse_subtree(rows, position):
    """Build the subtree starting at ``rows[position]`` (preorder)."""
    if position >= len(rows):
        raise InvalidInputError("forest text ends inside a tree")
    kind, var, value = rows[position]
    if kind == "leaf":
        return Node(mu=value), position + 1
    left, position = _parse_subtree(rows, position + 1)
    right, position = _parse_subtree(rows, position)
    return Node(var=var, cut=value, left=left, right=right), position


def load_forest(text):
    """Read a forest written by :py:func:`.dump_forest`.

    Raises
    ------
    InvalidInputError
        If the text is not a valid forest.

    """
    lines = [line.split() for line in text.splitlines() if line.strip()]
    try:
        tag, n_trees, n_features = lines[0]
        n_trees, n_features = int(n_trees), int(n_features)
    except (IndexError, ValueError) as error:
        raise InvalidInputError("malformed forest header") from error
    if tag != "forest":
        raise InvalidInputError(f'expected "forest", got "{tag}"')
    trees = []
    block = None
    for number, line in enumerate(lines[1:], start=2):
        try:
            if line[0] == "tree":
                block = []
            elif line[0] == "end":
                root, used = _parse_subtree(block, 0)
                if used != len(block):
                    raise InvalidInputError(
                        f"line {number}: extra nodes after the tree"
                    )
                trees.append(DecisionTree(n_features, root))
                block = None
            else:
                _, kind, var, value = line
                if kind not in ("leaf", "split"):
                    raise InvalidInputError(
                        f'line {number}: unknown node kind "{kind}"'
                    )
                var = -1 if kind == "leaf" else int(var)
                block.append((kind, var, float(value)))
        except InvalidInputError:
            raise
        except (TypeError, ValueError, AttributeError) as error:
            raise InvalidInputError(
                f"line {number}: malformed forest line"
            ) from error
    if block is not None or len(trees) != n_trees:
        raise InvalidInputError(
            f"expected {n_trees} complete trees, found {len(trees)}"
        )
    return Forest(trees, n_features)
