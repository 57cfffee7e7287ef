# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""This module computes exact filtering, predictive and smoothing laws.

For a fixed forest over the own lagged score, the transition mean
``g(z_{t-1})`` is constant on the cells ``C_k`` induced by the forest
(products of intervals, one per item), with value ``mu_k``. The
filtering law of the latent scores of one ranker is then a finite
mixture of normals truncated to the ordering set ``A_t`` of the
observed ranking::

    p(z_t | tau_1:t) ~ 1(z_t in A_t) sum_k N(z_t | mu_k, I) q_kt

with ``q_k1`` the prior mass of ``C_k`` and the recursion::

    q_k,t+1 = sum_m q_mt P(z in C_k and A_t | z ~ N(mu_m, I)).

The backward functions ``r_t`` of the smoothing law are constant on the
cells, so they are vectors over the cells as well.

Probabilities of the form ``P(z in C_k and A | z ~ N(mu, I))`` are
computed on a fine grid of bins along the real line (the bin edges
include the forest cutpoints, so the cells are resolved exactly): the
independent bin masses of the items are chained over the rank positions,
and items falling in the same bin are ordered with probability
``1 / n!``.

The exact laws are only tractable for a handful of items; a bootstrap
particle filter is provided as an independent reference.
"""
import itertools
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy.special import ndtr
from scipy.stats import norm

from rankdyn.bart import Forest, induced_partition
from rankdyn.common import InvalidInputError, UnsupportedForOracleError
from rankdyn.rankings import ranks_from_scores

logger = logging.getLogger(__name__)

# Half-width of the integration grid (unit-variance mass beyond is tiny):
GRID_BOUND = 8.0
# Default number of grid bins on [-GRID_BOUND, GRID_BOUND]:
GRID_BINS = 4000
# Grids coarser than this give a warning:
COARSE_BINS = 400
# Default histogram for marginal laws:
HISTOGRAM_EDGES = np.linspace(-GRID_BOUND, GRID_BOUND, 51)
MAX_FILTER_ITEMS = 3
MAX_SMOOTHING_ITEMS = 2
MAX_SMOOTHING_TIMES = 4


def interval_mass(lower, upper, mean):
    """Return ``P(lower < z <= upper)`` for ``z ~ N(mean, 1)``.

    Tails are computed on the side where they are small, so masses far
    from the mean keep their relative accuracy.
    """
    lower, upper, mean = np.broadcast_arrays(lower, upper, mean)
    left = ndtr(upper - mean) - ndtr(lower - mean)
    right = ndtr(mean - lower) - ndtr(mean - upper)
    return np.where(lower > mean, right, left)


def _exclusive_cumsum(values):
    """Return sums over the strictly lower bins (last axis)."""
    total = np.cumsum(values, axis=-1)
    return np.concatenate(
        [np.zeros(values.shape[:-1] + (1,)), total[..., :-1]], axis=-1
    )


def _exclusive_reverse_cumsum(values):
    """Return sums over the strictly higher bins (last axis)."""
    return _exclusive_cumsum(values[..., ::-1])[..., ::-1]


def _forward(masses):
    """Chain bin masses over rank positions, lowest rank first.

    ``masses`` has shape ``(..., P, B)`` (positions, bins). The message
    of position ``r`` has shape ``(..., B, P)``: entry ``[b, l]`` is the
    probability that the first ``r + 1`` positions are ordered, position
    ``r`` lies in bin ``b`` and the last ``l + 1`` positions share it.
    """
    n_positions = masses.shape[-2]
    runs = np.arange(2, n_positions + 1)
    alpha = np.zeros(masses.shape[:-2] + (masses.shape[-1], n_positions))
    alpha[..., 0] = masses[..., 0, :]
    alphas = [alpha]
    for position in range(1, n_positions):
        mass = masses[..., position, :]
        new = np.zeros_like(alpha)
        new[..., 0] = mass * _exclusive_cumsum(alpha.sum(axis=-1))
        new[..., 1:] = mass[..., None] * alpha[..., :-1] / runs
        alpha = new
        alphas.append(alpha)
    return alphas


def _backward(masses):
    """Return the messages of the positions above each position."""
    n_positions = masses.shape[-2]
    runs = np.arange(2, n_positions + 1)
    beta = np.ones(masses.shape[:-2] + (masses.shape[-1], n_positions))
    betas = [beta]
    for position in range(n_positions - 2, -1, -1):
        mass = masses[..., position + 1, :]
        above = _exclusive_reverse_cumsum(mass * beta[..., 0])
        new = np.repeat(above[..., None], n_positions, axis=-1)
        new[..., :-1] += mass[..., None] * beta[..., 1:] / runs
        beta = new
        betas.append(beta)
    return betas[::-1]


def ordered_mass(masses, order=None):
    """Return the probability of an ordering region.

    Parameters
    ----------
    masses : object like :py:class:`numpy.ndarray`
        Bin masses ``(..., N, B)`` of independent scores, one row per
        item.
    order : array_like, optional
        The item at each rank position (lowest score first). Without
        it, the scores are unconstrained.

    Returns
    -------
    out : object like :py:class:`numpy.ndarray`
        The probabilities, shape ``(...)``.

    """
    if order is None:
        return np.prod(masses.sum(axis=-1), axis=-1)
    alphas = _forward(masses[..., np.asarray(order), :])
    return alphas[-1].sum(axis=(-2, -1))


def ordered_marginals(masses, order=None):
    """Return the per-item bin masses of an ordering region.

    Entry ``[..., i, b]`` is the probability that the scores lie in the
    region and item ``i`` falls in bin ``b``. See
    :py:func:`.ordered_mass` for the parameters.
    """
    if order is None:
        totals = masses.sum(axis=-1, keepdims=True)
        others = np.empty_like(totals)
        for item in range(masses.shape[-2]):
            rest = np.delete(totals, item, axis=-2)
            others[..., item, :] = np.prod(rest, axis=-2)
        return masses * others
    order = np.asarray(order)
    ordered = masses[..., order, :]
    alphas, betas = _forward(ordered), _backward(ordered)
    marginals = np.empty_like(masses)
    for position, item in enumerate(order):
        marginals[..., item, :] = (alphas[position] * betas[position]).sum(
            axis=-1
        )
    return marginals


class Lattice:
    """Bins of the real line resolving forest cells and histogram bins.

    Parameters
    ----------
    cells : list of objects like :py:class:`rankdyn.bart.PartitionCell`
        The cells ``(lower, upper]`` of a forest over one covariate.
    n_bins : integer, optional
        Number of regular bins on ``[-8, 8]``.
    histogram_edges : array_like, optional
        Edges of the bins reported by marginal laws.

    """

    def __init__(self, cells, n_bins=GRID_BINS, histogram_edges=None):
        if histogram_edges is None:
            histogram_edges = HISTOGRAM_EDGES
        self.histogram_edges = np.asarray(histogram_edges, dtype=float)
        self.cuts = np.array([cell.upper for cell in cells[:-1]])
        self.values = np.array([cell.value for cell in cells])
        inner = np.linspace(-GRID_BOUND, GRID_BOUND, n_bins + 1)
        edges = np.unique(
            np.concatenate([inner, self.cuts, self.histogram_edges])
        )
        self.edges = np.concatenate([[-np.inf], edges, [np.inf]])
        # bins are (lower, upper], like the cells
        self.bin_cell = np.searchsorted(self.cuts, self.edges[1:], "left")
        self._starts = np.searchsorted(self.edges, self.histogram_edges)

    @property
    def n_cells(self):
        """Return the number of cells along one axis."""
        return len(self.values)

    def masses(self, means):
        """Return bin masses ``(..., B)`` of ``N(mean, 1)`` scores."""
        means = np.asarray(means, dtype=float)[..., None]
        return interval_mass(self.edges[:-1], self.edges[1:], means)

    def cell_masks(self, cells):
        """Return ``(..., N, B)`` masks of the bins of cell tuples."""
        cells = np.asarray(cells)
        return self.bin_cell == cells[..., None]

    def cell_of(self, scores):
        """Return the cell index of every score."""
        return np.searchsorted(self.cuts, scores, "left")

    def histogram(self, bin_masses):
        """Sum bin masses ``(..., B)`` into the histogram bins."""
        inside = bin_masses[..., : self._starts[-1]]
        return np.add.reduceat(inside, self._starts[:-1], axis=-1)


@dataclass
class MixtureRepresentation:
    """A finite mixture of (truncated) normal laws of a score vector.

    Component ``c`` is ``N(means[c], I)`` restricted to the ordering set
    of ``ranks`` (if given) and to the cell ``regions[c]`` (if given),
    with normalizer ``normalizers[c]`` (its probability under the
    untruncated normal).

    Attributes
    ----------
    kind : string
        ``"filtering"``, ``"predictive"`` or ``"smoothing"``.
    time : integer
        The (0-based) period described.
    weights : object like :py:class:`numpy.ndarray`
        Component weights, summing to one.
    means : object like :py:class:`numpy.ndarray`
        Component means ``(C, N)``.
    normalizers : object like :py:class:`numpy.ndarray`
        Component normalizers ``(C,)``.
    cells : object like :py:class:`numpy.ndarray`
        The cell tuple each component mean belongs to ``(C, N)``.
    ranks : object like :py:class:`numpy.ndarray`, optional
        The observed ranking restricting the scores.
    regions : object like :py:class:`numpy.ndarray`, optional
        Cell tuples restricting the scores ``(C, N)`` (smoothing).
    backward : object like :py:class:`numpy.ndarray`, optional
        The backward function on the cells, scaled to a maximum of one
        (smoothing).

    """

    kind: str
    time: int
    weights: np.ndarray
    means: np.ndarray
    normalizers: np.ndarray
    cells: np.ndarray
    ranks: np.ndarray = None
    regions: np.ndarray = None
    backward: np.ndarray = None
    lattice: Lattice = field(default=None, repr=False)

    @property
    def n_components(self):
        """Return the number of components."""
        return len(self.weights)

    def density(self, z):
        """Evaluate the mixture density at score vectors ``(..., N)``."""
        z = np.asarray(z, dtype=float)
        kernel = np.prod(norm.pdf(z[..., None, :] - self.means), axis=-1)
        kernel = kernel / self.normalizers
        if self.regions is not None:
            cells = self.lattice.cell_of(z)
            inside = np.all(cells[..., None, :] == self.regions, axis=-1)
            kernel = np.where(inside, kernel, 0.0)
        value = kernel @ self.weights
        if self.ranks is not None:
            ordered = np.all(ranks_from_scores(z, axis=-1) == self.ranks, -1)
            value = np.where(ordered, value, 0.0)
        return value

    def marginals(self):
        """Return the marginal law of every item on the histogram bins.

        Returns
        -------
        out : object like :py:class:`numpy.ndarray`
            Probabilities ``(N, H)``; row ``i`` is the law of item
            ``i``'s score over the bins of ``lattice.histogram_edges``.

        """
        masses = self.lattice.masses(self.means)
        if self.regions is not None:
            masses = masses * self.lattice.cell_masks(self.regions)
        order = None
        if self.ranks is not None:
            order = np.argsort(self.ranks, kind="stable")
        bins = ordered_marginals(masses, order)
        scale = self.weights / self.normalizers
        return self.lattice.histogram(np.tensordot(scale, bins, axes=1))


@dataclass
class FilterState:
    """The filtering law of one period.

    Attributes
    ----------
    time : integer
        The (0-based) period.
    ranks : object like :py:class:`numpy.ndarray`
        The observed ranking at this period.
    cells : object like :py:class:`numpy.ndarray`
        The cell tuples ``k`` ``(K, N)``.
    means : object like :py:class:`numpy.ndarray`
        The transition means ``mu_k`` ``(K, N)``.
    q : object like :py:class:`numpy.ndarray`
        Predictive cell probabilities ``q_kt``, scaled to sum to one.
    log_scale : float
        ``log p(tau_1:t-1)``, the log of the scale removed from ``q``.
    normalizers : object like :py:class:`numpy.ndarray`
        ``n_kt``, the probability of the ordering set under
        ``N(mu_k, I)``.
    weights : object like :py:class:`numpy.ndarray`
        The filtering mixture weights ``q_kt n_kt / sum(q n)``.

    """

    time: int
    ranks: np.ndarray
    cells: np.ndarray
    means: np.ndarray
    q: np.ndarray
    log_scale: float
    normalizers: np.ndarray
    weights: np.ndarray
    lattice: Lattice = field(default=None, repr=False)

    @property
    def evidence(self):
        """Return ``p(tau_t | tau_1:t-1)``."""
        return float(self.q @ self.normalizers)

    @property
    def log_likelihood(self):
        """Return ``log p(tau_1:t)``."""
        return self.log_scale + np.log(self.evidence)

    def unnormalized_density(self, z):
        """Evaluate ``1(z in A_t) sum_k N(z | mu_k, I) q_kt``."""
        z = np.asarray(z, dtype=float)
        kernel = np.prod(norm.pdf(z[..., None, :] - self.means), axis=-1)
        value = (kernel @ self.q) * np.exp(self.log_scale)
        ordered = np.all(ranks_from_scores(z, axis=-1) == self.ranks, -1)
        return np.where(ordered, value, 0.0)

    def mixture(self):
        """Return the filtering law as a mixture of truncated normals."""
        return MixtureRepresentation(
            kind="filtering",
            time=self.time,
            weights=self.weights,
            means=self.means,
            normalizers=self.normalizers,
            cells=self.cells,
            ranks=self.ranks,
            lattice=self.lattice,
        )

    def density(self, z):
        """Evaluate the filtering density."""
        return self.mixture().density(z)

    def marginals(self):
        """Return the marginal laws on the histogram bins."""
        return self.mixture().marginals()


class _Oracle:
    """Shared setup of the exact laws of one ranker."""

    def __init__(self, forest, panel, config, ranker, n_bins, edges):
        if not isinstance(forest, Forest):
            raise UnsupportedForOracleError("the oracles need a forest")
        design = config.design
        if design.lag_input != "own_scalar_lag":
            raise UnsupportedForOracleError(
                "the oracles need the own scalar lag"
            )
        if design.n_features(panel) != 1 or forest.n_features != 1:
            raise UnsupportedForOracleError(
                "the oracles need a forest over the lagged score only"
            )
        if not 0 <= ranker < panel.n_rankers:
            raise InvalidInputError(f"no ranker {ranker} in the panel")
        if n_bins < COARSE_BINS:
            warnings.warn(
                f"An oracle grid of {n_bins} bins is coarse; expect "
                "quadrature errors above 1e-4."
            )
        self.n_items = panel.n_items
        self.ranks = panel.ranks[:, ranker, :]
        self.lattice = Lattice(induced_partition(forest), n_bins, edges)
        self.cells = np.array(
            list(
                itertools.product(
                    range(self.lattice.n_cells), repeat=self.n_items
                )
            )
        )
        self.means = self.lattice.values[self.cells]
        self.masses = self.lattice.masses(self.means)
        self.z_prior = np.broadcast_to(
            np.asarray(config.z_prior_mean, dtype=float), (self.n_items,)
        )
        self._cell_masses = {}
        logger.debug(
            "Oracle with %i cells per item and %i bins.",
            self.lattice.n_cells,
            len(self.lattice.edges) - 1,
        )

    def order(self, time):
        """Return the item at each rank position at a period."""
        return np.argsort(self.ranks[:, time], kind="stable")

    def prior_q(self):
        """Return the prior cell probabilities of the initial state."""
        lower = np.concatenate([[-np.inf], self.lattice.cuts])
        upper = np.concatenate([self.lattice.cuts, [np.inf]])
        mass = interval_mass(lower, upper, self.z_prior[:, None])
        return np.prod(mass[np.arange(self.n_items), self.cells], axis=-1)

    def normalizers(self, time):
        """Return ``n_kt`` for every cell."""
        return ordered_mass(self.masses, self.order(time))

    def cell_masses(self, time):
        """Return ``I[k, m] = P(z in C_k and A_t | z ~ N(mu_m, I))``."""
        if time not in self._cell_masses:
            order = self.order(time)
            masks = self.lattice.cell_masks(self.cells)
            self._cell_masses[time] = np.stack(
                [ordered_mass(self.masses * mask, order) for mask in masks]
            )
        return self._cell_masses[time]

    def filter(self, stop=None):
        """Run the filtering recursion over the first ``stop`` periods."""
        stop = self.ranks.shape[1] if stop is None else stop
        q = self.prior_q()
        log_scale = 0.0
        states = []
        for time in range(stop):
            normalizers = self.normalizers(time)
            evidence = q @ normalizers
            if not evidence > 0:
                raise InvalidInputError(
                    f"the ranking at period {time} has probability zero "
                    "under the forest"
                )
            states.append(
                FilterState(
                    time=time,
                    ranks=self.ranks[:, time].copy(),
                    cells=self.cells,
                    means=self.means,
                    q=q,
                    log_scale=log_scale,
                    normalizers=normalizers,
                    weights=q * normalizers / evidence,
                    lattice=self.lattice,
                )
            )
            log_scale += np.log(evidence)
            q = self.cell_masses(time) @ q / evidence
        return states, q


def _check_items(panel, limit, what):
    if panel.n_items > limit:
        raise UnsupportedForOracleError(
            f"the exact {what} handles at most {limit} items, got "
            f"{panel.n_items}"
        )


def exact_filter_oracle(
    forest,
    panel,
    config,
    ranker=0,
    n_bins=GRID_BINS,
    histogram_edges=None,
):
    """Return the exact filtering laws of a fixed own-lag forest.

    Parameters
    ----------
    forest : object like :py:class:`rankdyn.bart.Forest`
        A forest over the single lagged-score covariate.
    panel : object like :py:class:`rankdyn.rankings.RankingPanel`
        The observed rankings (at most three items).
    config : object like :py:class:`.DynamicModelConfig`
        Gives the prior mean of the initial state and the design.
    ranker : integer, optional
        The ranker whose rankings are filtered.
    n_bins : integer, optional
        Number of integration bins on ``[-8, 8]``.
    histogram_edges : array_like, optional
        Bins of the marginal laws. Defaults to 50 bins on ``[-8, 8]``.

    Returns
    -------
    out : list of objects like :py:class:`.FilterState`
        One filtering law per period.

    Raises
    ------
    UnsupportedForOracleError
        If the panel has too many items, or the forest or design use
        other covariates than the own lagged score.

    """
    _check_items(panel, MAX_FILTER_ITEMS, "filter")
    oracle = _Oracle(forest, panel, config, ranker, n_bins, histogram_edges)
    states, _ = oracle.filter()
    return states


def predictive_mixture_oracle(
    forest,
    panel,
    config,
    time=None,
    ranker=0,
    n_bins=GRID_BINS,
    histogram_edges=None,
):
    """Return the one-step-ahead predictive law of the latent scores.

    The law of ``z_t`` given the rankings before ``t`` is the normal
    mixture ``sum_k N(mu_k, I) q_kt`` (normalized). See
    :py:func:`.exact_filter_oracle` for the parameters.

    Parameters
    ----------
    time : integer, optional
        The (0-based) period predicted. Defaults to the period after
        the panel.

    Returns
    -------
    out : object like :py:class:`.MixtureRepresentation`
        The predictive mixture (untruncated components).

    """
    _check_items(panel, MAX_FILTER_ITEMS, "predictive law")
    time = panel.n_times if time is None else time
    if not 0 <= time <= panel.n_times:
        raise InvalidInputError(f"cannot predict period {time}")
    oracle = _Oracle(forest, panel, config, ranker, n_bins, histogram_edges)
    _, q = oracle.filter(stop=time)
    return MixtureRepresentation(
        kind="predictive",
        time=time,
        weights=q / q.sum(),
        means=oracle.means,
        normalizers=np.ones(len(q)),
        cells=oracle.cells,
        lattice=oracle.lattice,
    )


def exact_smoothing_oracle(
    forest,
    panel,
    config,
    ranker=0,
    n_bins=GRID_BINS,
    histogram_edges=None,
):
    """Return the exact smoothing laws of a fixed own-lag forest.

    The smoothing law at ``t`` is the filtering law reweighted by the
    backward function ``r_t(z) = P(tau_t+1:T | z_t = z)``, which takes
    one value per cell. Its components are indexed by the pair (cell of
    the mean, cell of the score). See :py:func:`.exact_filter_oracle`
    for the parameters; the panel may have at most two items and four
    periods.

    Returns
    -------
    out : list of objects like :py:class:`.MixtureRepresentation`
        One smoothing law per period. The last equals the filtering
        law of the last period.

    """
    _check_items(panel, MAX_SMOOTHING_ITEMS, "smoother")
    if panel.n_times > MAX_SMOOTHING_TIMES:
        raise UnsupportedForOracleError(
            f"the exact smoother handles at most {MAX_SMOOTHING_TIMES} "
            f"periods, got {panel.n_times}"
        )
    oracle = _Oracle(forest, panel, config, ranker, n_bins, histogram_edges)
    states, _ = oracle.filter()
    n_times = len(states)
    n_cells = len(oracle.cells)
    backward = np.ones(n_cells)
    smoothers = [None] * n_times
    for time in range(n_times - 1, -1, -1):
        if time < n_times - 1:
            backward = oracle.cell_masses(time + 1).T @ backward
            if not backward.max() > 0:
                raise InvalidInputError(
                    f"the rankings after period {time} have probability "
                    "zero under the forest"
                )
            backward = backward / backward.max()
        # mass[k, m]: mean cell m, score cell k
        mass = oracle.cell_masses(time)
        joint = states[time].q[None, :] * backward[:, None] * mass
        region, mean = np.nonzero(joint > 0)
        weights = joint[region, mean]
        smoothers[time] = MixtureRepresentation(
            kind="smoothing",
            time=time,
            weights=weights / weights.sum(),
            means=oracle.means[mean],
            normalizers=mass[region, mean],
            cells=oracle.cells[mean],
            ranks=states[time].ranks,
            regions=oracle.cells[region],
            backward=backward,
            lattice=oracle.lattice,
        )
    return smoothers


def oracle_frame(mixtures):
    """Return mixture weights as a tidy data frame.

    Parameters
    ----------
    mixtures : list
        Objects like :py:class:`.MixtureRepresentation` or
        :py:class:`.FilterState`.

    Returns
    -------
    out : object like :py:class:`pandas.DataFrame`
        Columns ``time``, ``kind``, ``cell``, ``region``, ``weight`` and
        ``normalizer``; cells are written as dash-separated indices.

    """
    rows = []
    for mixture in mixtures:
        if isinstance(mixture, FilterState):
            mixture = mixture.mixture()
        for c in range(mixture.n_components):
            region = ""
            if mixture.regions is not None:
                region = "-".join(str(i) for i in mixture.regions[c])
            rows.append(
                {
                    "time": mixture.time,
                    "kind": mixture.kind,
                    "cell": "-".join(str(i) for i in mixture.cells[c]),
                    "region": region,
                    "weight": mixture.weights[c],
                    "normalizer": mixture.normalizers[c],
                }
            )
    return pd.DataFrame(rows)


@dataclass
class ParticleFilterResult:
    """Equally weighted particles of the filtering laws.

    Attributes
    ----------
    particles : list of objects like :py:class:`numpy.ndarray`
        One ``(P, N)`` array per period.
    log_likelihood : float
        Estimate of ``log p(tau_1:T)``.

    """

    particles: list
    log_likelihood: float

    def marginals(self, time, edges=None):
        """Return the histogram of every item's score at a period.

        Returns
        -------
        out : object like :py:class:`numpy.ndarray`
            Bin probabilities ``(N, H)``.

        """
        edges = HISTOGRAM_EDGES if edges is None else np.asarray(edges)
        cloud = self.particles[time]
        counts = [np.histogram(column, bins=edges)[0] for column in cloud.T]
        return np.array(counts) / len(cloud)


def particle_filter(forest, panel, config, n_particles, rng, ranker=0):
    """Run a bootstrap particle filter for one ranker.

    Particles are propagated through the transition
    ``z_t ~ N(f(z_{t-1}), I)`` and weighted by the indicator that they
    reproduce the observed ranking; survivors are resampled
    uniformly.

    Parameters
    ----------
    forest : object
        The mean function (anything with ``predict``) over the own
        lagged score.
    panel : object like :py:class:`rankdyn.rankings.RankingPanel`
        The observed rankings.
    config : object like :py:class:`.DynamicModelConfig`
        Gives the prior mean of the initial state.
    n_particles : integer
        Number of particles.
    rng : object like :py:class:`numpy.random.Generator`
        The random number generator.
    ranker : integer, optional
        The ranker whose rankings are filtered.

    Returns
    -------
    out : object like :py:class:`.ParticleFilterResult`
        The particles of every period.

    Raises
    ------
    InvalidInputError
        If no particle reproduces a ranking.

    """
    n_items = panel.n_items
    z_prior = np.broadcast_to(
        np.asarray(config.z_prior_mean, dtype=float), (n_items,)
    )
    z = z_prior + rng.standard_normal((n_particles, n_items))
    particles = []
    log_likelihood = 0.0
    for time in range(panel.n_times):
        z = forest.predict(z[:, :, None]) + rng.standard_normal(z.shape)
        alive = np.all(
            ranks_from_scores(z, axis=1) == panel.ranks[:, ranker, time],
            axis=1,
        )
        survivors = np.flatnonzero(alive)
        if survivors.size == 0:
            raise InvalidInputError(
                f"no particle reproduces the ranking at period {time}; "
                "use more particles"
            )
        log_likelihood += np.log(survivors.size / n_particles)
        z = z[rng.choice(survivors, size=n_particles)]
        particles.append(z.copy())
    return ParticleFilterResult(
        particles=particles, log_likelihood=log_likelihood
    )
