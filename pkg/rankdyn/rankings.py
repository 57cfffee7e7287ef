# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""This module defines rankings, panels of rankings and ranking metrics.

Ranks are 1-based: rank 1 is the most preferred item and it is
held by the item with the *smallest* latent score.
"""
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from rankdyn.common import (
    DimensionError,
    InvalidInputError,
    RankingValidationError,
    as_finite_array,
)

# Column prefixes for covariates in the CSV ranking schema:
COV_PREFIX = "cov_"
ITEM_PREFIX = "cov_item_"
RANKER_PREFIX = "cov_ranker_"
PAIR_PREFIX = "cov_pair_"
CSV_COLUMNS = ("time", "ranker", "item", "rank")


def _ranking_errors(ranks):
    """Return a list of problems that prevent ``ranks`` being a permutation."""
    size = len(ranks)
    errors = []
    seen = set()
    for rank in ranks:
        if rank < 1 or rank > size:
            errors.append(f"rank {rank} out of range")
        elif rank in seen:
            errors.append(f"duplicate rank {rank}")
        seen.add(rank)
    for rank in range(1, size + 1):
        if rank not in seen:
            errors.append(f"missing rank {rank}")
    return errors


@dataclass(frozen=True)
class Ranking:
    """A full ranking of N items.

    Attributes
    ----------
    ranks : tuple of integers
        ``ranks[i]`` is the rank of item ``i``. This is a permutation
        of ``1, ..., N``.

    """

    ranks: tuple

    def __post_init__(self):
        ranks = tuple(int(i) for i in self.ranks)
        errors = _ranking_errors(ranks)
        if errors:
            raise RankingValidationError(errors[0])
        object.__setattr__(self, "ranks", ranks)

    def __len__(self):
        return len(self.ranks)

    @property
    def n_items(self):
        """Return the number of ranked items."""
        return len(self.ranks)

    def as_array(self):
        """Return the ranks as an integer array."""
        return np.array(self.ranks, dtype=np.int_)

    def order(self):
        """Return item indices (0-based) from most to least preferred."""
        return np.argsort(self.as_array(), kind="stable")

    def prefers(self, i, j):
        """Return True if item ``i`` is preferred to item ``j``."""
        return self.ranks[i] < self.ranks[j]


def validate_ranking(raw):
    """Validate raw integer ranks and return a :py:class:`.Ranking`.

    Parameters
    ----------
    raw : array_like of integers
        The candidate ranks, ``raw[i]`` being the rank of item ``i``.

    Returns
    -------
    out : object like :py:class:`.Ranking`
        The validated ranking.

    Raises
    ------
    RankingValidationError
        If the input has a duplicate, missing or out-of-range rank.
        The message names the offending entry.

    """
    values = np.asarray(raw)
    if values.ndim != 1:
        raise RankingValidationError("a ranking must be one-dimensional")
    if values.size and not np.issubdtype(values.dtype, np.integer):
        finite = np.all(np.isfinite(values))
        if not finite or np.any(values != np.round(values)):
            raise RankingValidationError("ranks must be integers")
    return Ranking(tuple(int(i) for i in values))


def rank_of_scores(scores):
    """Return the ranking implied by latent scores.

    The smallest score gets rank 1. Ties are broken by the item index,
    so the item appearing first gets the better rank.

    Parameters
    ----------
    scores : array_like
        The latent scores ``z_1, ..., z_N``.

    Returns
    -------
    out : object like :py:class:`.Ranking`
        The ranking of the scores.

    Raises
    ------
    InvalidInputError
        If some score is not finite.

    Examples
    --------
    >>> rank_of_scores([0.3, -1.2, 2.0]).ranks
    (2, 1, 3)

    """
    values = as_finite_array(scores, "scores")
    return Ranking(tuple(ranks_from_scores(values)))


def ranks_from_scores(scores, axis=0):
    """Return 1-based ranks of scores along an axis (array version).

    This is the array counterpart of :py:func:`.rank_of_scores`,
    used by the samplers to rank many score vectors at once.

    Parameters
    ----------
    scores : array_like
        The scores.
    axis : integer, optional
        The axis holding the items.

    Returns
    -------
    ranks : object like :py:class:`numpy.ndarray`
        Integer ranks with the same shape as ``scores``.

    """
    scores = np.asarray(scores, dtype=float)
    order = np.argsort(scores, axis=axis, kind="stable")
    ranks = np.empty_like(order)
    positions = np.arange(1, scores.shape[axis] + 1)
    shape = [1] * scores.ndim
    shape[axis] = -1
    np.put_along_axis(ranks, order, positions.reshape(shape), axis=axis)
    return ranks


def _as_ranks(ranking):
    if isinstance(ranking, Ranking):
        return ranking.as_array()
    return validate_ranking(ranking).as_array()


def kendall_tau(rank_a, rank_b):
    """Return the normalized Kendall tau distance between two rankings.

    The distance is the fraction of item pairs that the two rankings
    order differently.

    Parameters
    ----------
    rank_a : object like :py:class:`.Ranking` or array_like
        The first ranking.
    rank_b : object like :py:class:`.Ranking` or array_like
        The second ranking.

    Returns
    -------
    out : float
        The distance in ``[0, 1]``.

    Raises
    ------
    DimensionError
        If the rankings have different lengths.
    InvalidInputError
        If fewer than two items are ranked.

    """
    ranks_a = _as_ranks(rank_a)
    ranks_b = _as_ranks(rank_b)
    if len(ranks_a) != len(ranks_b):
        raise DimensionError(
            f"rankings have different lengths ({len(ranks_a)} and "
            f"{len(ranks_b)})"
        )
    size = len(ranks_a)
    if size < 2:
        raise InvalidInputError("Kendall tau needs at least two items")
    return float(kendall_tau_arrays(ranks_a, ranks_b))


def kendall_tau_arrays(ranks_a, ranks_b, axis=0):
    """Return Kendall tau distances between stacks of rank vectors.

    No validation is done here; see :py:func:`.kendall_tau`.

    Parameters
    ----------
    ranks_a : array_like
        Ranks, with the items along ``axis``.
    ranks_b : array_like
        Ranks of the same shape as ``ranks_a``.
    axis : integer, optional
        The axis holding the items.

    Returns
    -------
    out : float or object like :py:class:`numpy.ndarray`
        The distances, with ``axis`` removed.

    """
    ranks_a = np.moveaxis(np.asarray(ranks_a), axis, 0)
    ranks_b = np.moveaxis(np.asarray(ranks_b), axis, 0)
    size = ranks_a.shape[0]
    first, second = np.triu_indices(size, k=1)
    sign_a = np.sign(ranks_a[first] - ranks_a[second])
    sign_b = np.sign(ranks_b[first] - ranks_b[second])
    discordant = np.sum(sign_a * sign_b < 0, axis=0)
    return discordant / (size * (size - 1) / 2)


@dataclass(frozen=True, eq=False)
class CovariateSet:
    """Exogenous covariates for a panel of rankings.

    Each array may hold ``T`` time slices or ``T + 1`` slices, the last
    one holding the covariates of the period to forecast.

    Attributes
    ----------
    item : object like :py:class:`numpy.ndarray`, optional
        Item covariates ``x^a``, shape ``(N, T, K_a)``.
    ranker : object like :py:class:`numpy.ndarray`, optional
        Ranker covariates ``x^r``, shape ``(M, T, K_r)``.
    pair : object like :py:class:`numpy.ndarray`, optional
        Item/ranker covariates ``w``, shape ``(N, M, T, K_w)``.
    lagged_rank : boolean, optional
        If True, the previous observed rank is used as a covariate.
    names : dict, optional
        Column names for the ``"item"``, ``"ranker"`` and ``"pair"``
        covariates.

    """

    item: np.ndarray = None
    ranker: np.ndarray = None
    pair: np.ndarray = None
    lagged_rank: bool = False
    names: dict = field(default_factory=dict)

    def __post_init__(self):
        ndims = {"item": 3, "ranker": 3, "pair": 4}
        names = dict(self.names)
        for key, ndim in ndims.items():
            values = getattr(self, key)
            if values is None:
                continue
            values = as_finite_array(values, f"{key} covariates").copy()
            if values.ndim != ndim:
                raise DimensionError(
                    f"{key} covariates must have {ndim} dimensions, "
                    f"got shape {values.shape}"
                )
            values.setflags(write=False)
            object.__setattr__(self, key, values)
            if key not in names:
                names[key] = tuple(
                    f"{key}{k + 1}" for k in range(values.shape[-1])
                )
        object.__setattr__(self, "names", names)

    def dims(self):
        """Return ``(K_a, K_r, K_w)``."""
        return tuple(
            0 if getattr(self, key) is None else getattr(self, key).shape[-1]
            for key in ("item", "ranker", "pair")
        )

    @property
    def n_features(self):
        """Return the number of exogenous covariates ``K_a + K_r + K_w``."""
        return sum(self.dims())

    def n_slices(self):
        """Return the number of time slices (None if there are none)."""
        slices = set()
        if self.item is not None:
            slices.add(self.item.shape[1])
        if self.ranker is not None:
            slices.add(self.ranker.shape[1])
        if self.pair is not None:
            slices.add(self.pair.shape[2])
        if len(slices) > 1:
            raise DimensionError(
                f"covariates disagree on the number of periods: {slices}"
            )
        return slices.pop() if slices else None

    def check(self, n_items, n_rankers, n_times):
        """Check the covariates against panel dimensions.

        Raises
        ------
        DimensionError
            If the covariates are not aligned with the panel.

        """
        if self.item is not None and self.item.shape[0] != n_items:
            raise DimensionError(
                f"item covariates are for {self.item.shape[0]} items, "
                f"panel has {n_items}"
            )
        if self.ranker is not None and self.ranker.shape[0] != n_rankers:
            raise DimensionError(
                f"ranker covariates are for {self.ranker.shape[0]} rankers, "
                f"panel has {n_rankers}"
            )
        if self.pair is not None and self.pair.shape[:2] != (
            n_items,
            n_rankers,
        ):
            raise DimensionError(
                f"pair covariates have shape {self.pair.shape[:2]}, "
                f"panel has ({n_items}, {n_rankers})"
            )
        slices = self.n_slices()
        if slices is not None and slices not in (n_times, n_times + 1):
            raise DimensionError(
                f"covariates have {slices} periods, panel has {n_times}"
            )

    def features(self, time, n_items, n_rankers):
        """Assemble the exogenous covariates of one period.

        Parameters
        ----------
        time : integer
            The time slice, clipped to the last available slice.
        n_items : integer
            The number of items N.
        n_rankers : integer
            The number of rankers M.

        Returns
        -------
        out : object like :py:class:`numpy.ndarray`
            The covariates ``(x^a, x^r, w)`` with shape ``(N, M, K)``.

        """
        blocks = []
        slices = self.n_slices()
        if slices is None:
            return np.zeros((n_items, n_rankers, 0))
        time = min(time, slices - 1)
        if self.item is not None:
            blocks.append(
                np.broadcast_to(
                    self.item[:, None, time, :],
                    (n_items, n_rankers, self.item.shape[-1]),
                )
            )
        if self.ranker is not None:
            blocks.append(
                np.broadcast_to(
                    self.ranker[None, :, time, :],
                    (n_items, n_rankers, self.ranker.shape[-1]),
                )
            )
        if self.pair is not None:
            blocks.append(self.pair[:, :, time, :])
        return np.concatenate(blocks, axis=-1)

    def slice_times(self, stop):
        """Return covariates for the first ``stop`` periods.

        The slice for period ``stop`` (the next one) is kept when it
        exists, so that a truncated panel can still be forecast.
        """
        kept = {}
        for key, axis in (("item", 1), ("ranker", 1), ("pair", 2)):
            values = getattr(self, key)
            if values is not None:
                index = [slice(None)] * values.ndim
                index[axis] = slice(0, stop + 1)
                values = values[tuple(index)]
            kept[key] = values
        return CovariateSet(
            lagged_rank=self.lagged_rank, names=dict(self.names), **kept
        )

    def select_rankers(self, rankers):
        """Return the covariates of some rankers only."""
        rankers = list(rankers)
        return CovariateSet(
            item=self.item,
            ranker=None if self.ranker is None else self.ranker[rankers],
            pair=None if self.pair is None else self.pair[:, rankers],
            lagged_rank=self.lagged_rank,
            names=dict(self.names),
        )

    def equals(self, other):
        """Return True if two covariate sets hold the same values."""
        if not isinstance(other, CovariateSet):
            return False
        if self.lagged_rank != other.lagged_rank:
            return False
        for key in ("item", "ranker", "pair"):
            mine, theirs = getattr(self, key), getattr(other, key)
            if (mine is None) != (theirs is None):
                return False
            if mine is not None and not np.array_equal(mine, theirs):
                return False
        return True


@dataclass(frozen=True, eq=False)
class RankingPanel:
    """Full rankings indexed by ranker and time.

    Attributes
    ----------
    ranks : object like :py:class:`numpy.ndarray`
        Integer ranks with shape ``(N, M, T)``; ``ranks[:, j, t]``
        is the ranking of ranker ``j`` at time ``t``. ``T = 1`` is
        the static case.
    covariates : object like :py:class:`.CovariateSet`, optional
        Exogenous covariates.
    items : tuple of strings, optional
        Item labels.
    rankers : tuple of strings, optional
        Ranker labels.
    times : tuple of strings, optional
        Time labels. May have one extra entry naming the period of the
        forecast covariate slice.

    """

    ranks: np.ndarray
    covariates: CovariateSet = None
    items: tuple = None
    rankers: tuple = None
    times: tuple = None

    def __post_init__(self):
        ranks = np.array(self.ranks)
        if ranks.ndim == 2:
            ranks = ranks[:, :, None]
        if ranks.ndim != 3:
            raise DimensionError(
                f"ranks must have shape (N, M, T), got {ranks.shape}"
            )
        if ranks.size == 0:
            raise InvalidInputError("the panel is empty")
        if not np.issubdtype(ranks.dtype, np.integer):
            if np.any(ranks != np.round(ranks)):
                raise RankingValidationError("ranks must be integers")
        ranks = ranks.astype(np.int_)
        n_items, n_rankers, n_times = ranks.shape
        expected = np.arange(1, n_items + 1)[:, None, None]
        valid = np.all(np.sort(ranks, axis=0) == expected, axis=0)
        if not np.all(valid):
            j, t = np.argwhere(~valid)[0]
            errors = _ranking_errors(list(ranks[:, j, t]))
            raise RankingValidationError(
                f"ranker {j}, time {t}: {errors[0]}"
            )
        ranks.setflags(write=False)
        object.__setattr__(self, "ranks", ranks)
        labels = {
            "items": n_items,
            "rankers": n_rankers,
            "times": n_times,
        }
        for key, size in labels.items():
            value = getattr(self, key)
            if value is None:
                value = tuple(str(i + 1) for i in range(size))
            value = tuple(str(i) for i in value)
            allowed = (size, size + 1) if key == "times" else (size,)
            if len(value) not in allowed:
                raise DimensionError(
                    f"{len(value)} {key} labels for {size} {key}"
                )
            object.__setattr__(self, key, value)
        if self.covariates is not None:
            self.covariates.check(n_items, n_rankers, n_times)

    @property
    def n_items(self):
        """Return N, the number of items."""
        return self.ranks.shape[0]

    @property
    def n_rankers(self):
        """Return M, the number of rankers."""
        return self.ranks.shape[1]

    @property
    def n_times(self):
        """Return T, the number of periods."""
        return self.ranks.shape[2]

    @property
    def shape(self):
        """Return ``(N, M, T)``."""
        return self.ranks.shape

    def ranking(self, ranker, time):
        """Return the ranking of a ranker at a time."""
        return Ranking(tuple(self.ranks[:, ranker, time]))

    def order(self):
        """Return item indices by rank position, shape ``(N, M, T)``.

        ``order()[r, j, t]`` is the item holding rank ``r + 1``.
        """
        return np.argsort(self.ranks, axis=0, kind="stable")

    def head(self, n_times):
        """Return the panel restricted to the first ``n_times`` periods."""
        if not 1 <= n_times <= self.n_times:
            raise InvalidInputError(
                f"cannot keep {n_times} of {self.n_times} periods"
            )
        covariates = None
        if self.covariates is not None:
            covariates = self.covariates.slice_times(n_times)
        return RankingPanel(
            ranks=self.ranks[:, :, :n_times],
            covariates=covariates,
            items=self.items,
            rankers=self.rankers,
            times=self.times[: n_times + 1],
        )

    def select_rankers(self, rankers):
        """Return the panel restricted to some rankers (by index)."""
        rankers = list(rankers)
        covariates = None
        if self.covariates is not None:
            covariates = self.covariates.select_rankers(rankers)
        return RankingPanel(
            ranks=self.ranks[:, rankers, :],
            covariates=covariates,
            items=self.items,
            rankers=tuple(self.rankers[j] for j in rankers),
            times=self.times,
        )

    def with_covariates(self, covariates):
        """Return the panel with other covariates (itself if None)."""
        if covariates is None:
            return self
        return RankingPanel(
            ranks=self.ranks,
            covariates=covariates,
            items=self.items,
            rankers=self.rankers,
            times=self.times,
        )

    def equals(self, other):
        """Return True if two panels hold the same data and labels."""
        if not isinstance(other, RankingPanel):
            return False
        if not np.array_equal(self.ranks, other.ranks):
            return False
        if (self.items, self.rankers) != (other.items, other.rankers):
            return False
        if self.times[: self.n_times] != other.times[: other.n_times]:
            return False
        if (self.covariates is None) != (other.covariates is None):
            return False
        if self.covariates is not None:
            return self.covariates.equals(other.covariates)
        return True


def _dense_index(column):
    """Map opaque labels to dense indices in order of first appearance."""
    labels = tuple(pd.unique(column))
    lookup = {label: i for i, label in enumerate(labels)}
    return labels, column.map(lookup).to_numpy()


def _fill_covariates(frame, columns, index, shape, label):
    """Scatter covariate columns into an array, checking consistency."""
    values = np.full(shape + (len(columns),), np.nan)
    data = frame[list(columns)].to_numpy(dtype=float)
    for row, (idx, line) in enumerate(zip(zip(*index), frame["_line"])):
        current = values[idx]
        if np.any(np.isnan(data[row])):
            raise RankingValidationError(
                f"missing {label} covariate value", line=line
            )
        if not np.all(np.isnan(current)) and not np.array_equal(
            current, data[row]
        ):
            raise RankingValidationError(
                f"{label} covariates differ between rows of the same "
                f"{label}",
                line=line,
            )
        values[idx] = data[row]
    if np.any(np.isnan(values)):
        raise RankingValidationError(f"incomplete {label} covariates")
    return values


def read_ranking_csv(path):
    """Read a panel of full rankings from a CSV file.

    The file has one row per item, ranker and time with the columns
    ``time,ranker,item,rank`` followed by optional covariate columns.
    Columns named ``cov_item_*`` hold item covariates, ``cov_ranker_*``
    ranker covariates and any other ``cov_*`` column item/ranker
    covariates. Times, rankers and items are opaque labels mapped to
    indices in order of first appearance. Rows of a final period with
    an empty ``rank`` carry the covariates of the period to forecast.

    Parameters
    ----------
    path : string or object like :py:class:`pathlib.Path`
        The file to read.

    Returns
    -------
    out : object like :py:class:`.RankingPanel`
        The panel read from the file.

    Raises
    ------
    RankingValidationError
        If the file is not a complete panel of full rankings. The
        message gives the line number where possible.

    """
    try:
        frame = pd.read_csv(
            path,
            dtype={"time": str, "ranker": str, "item": str},
            float_precision="round_trip",
        )
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as error:
        msg = f"cannot parse {path}: {error}"
        raise RankingValidationError(msg) from error
    missing = [i for i in CSV_COLUMNS if i not in frame.columns]
    if missing:
        raise RankingValidationError(
            f"missing column(s) {', '.join(missing)}", line=1
        )
    unknown = [
        i
        for i in frame.columns
        if i not in CSV_COLUMNS and not i.startswith(COV_PREFIX)
    ]
    if unknown:
        raise RankingValidationError(
            f"unknown column(s) {', '.join(unknown)}", line=1
        )
    frame["_line"] = np.arange(len(frame)) + 2
    if frame.empty:
        raise RankingValidationError("the file holds no rankings")
    times, time_idx = _dense_index(frame["time"])
    rankers, ranker_idx = _dense_index(frame["ranker"])
    items, item_idx = _dense_index(frame["item"])
    duplicated = frame.duplicated(subset=["time", "ranker", "item"])
    if duplicated.any():
        line = frame.loc[duplicated, "_line"].iloc[0]
        raise RankingValidationError(
            "duplicate (time, ranker, item) row", line=line
        )
    rank = pd.to_numeric(frame["rank"], errors="coerce")
    bad = frame["rank"].notna() & (rank.isna() | (rank != rank.round()))
    if bad.any():
        line = frame.loc[bad, "_line"].iloc[0]
        raise RankingValidationError(
            f'rank "{frame.loc[bad, "rank"].iloc[0]}" is not an integer',
            line=line,
        )
    unranked = sorted(set(time_idx[rank.isna().to_numpy()]))
    n_times = len(times)
    forecast_slice = False
    if unranked:
        last = n_times - 1
        whole = np.all(rank.isna().to_numpy()[time_idx == last])
        if unranked != [last] or not whole or n_times < 2:
            line = frame.loc[rank.isna(), "_line"].iloc[0]
            raise RankingValidationError(
                "missing rank (partial rankings are not supported)",
                line=line,
            )
        forecast_slice = True
        n_times -= 1
    shape = (len(items), len(rankers), n_times)
    ranks = np.zeros(shape, dtype=np.int_)
    observed = (time_idx < n_times)
    ranks[item_idx[observed], ranker_idx[observed], time_idx[observed]] = (
        rank.to_numpy()[observed].astype(np.int_)
    )
    filled = np.zeros(shape, dtype=bool)
    filled[item_idx[observed], ranker_idx[observed], time_idx[observed]] = True
    if not np.all(filled):
        i, j, t = np.argwhere(~filled)[0]
        raise RankingValidationError(
            f"no rank for item {items[i]}, ranker {rankers[j]}, "
            f"time {times[t]} (the panel must be complete)"
        )
    for j, t in np.ndindex(len(rankers), n_times):
        errors = _ranking_errors(list(ranks[:, j, t]))
        if errors:
            cell = (ranker_idx == j) & (time_idx == t)
            line = frame.loc[cell, "_line"].min()
            raise RankingValidationError(
                f"ranker {rankers[j]}, time {times[t]}: {errors[0]}",
                line=line,
            )
    covariates = _read_covariates(
        frame, (item_idx, ranker_idx, time_idx), shape, forecast_slice
    )
    return RankingPanel(
        ranks=ranks,
        covariates=covariates,
        items=items,
        rankers=rankers,
        times=times,
    )


def _read_covariates(frame, index, shape, forecast_slice):
    """Collect covariate columns of a ranking CSV file."""
    item_idx, ranker_idx, time_idx = index
    n_items, n_rankers, n_times = shape
    slices = n_times + 1 if forecast_slice else n_times
    columns = [i for i in frame.columns if i.startswith(COV_PREFIX)]
    if not columns:
        return None
    item_cols = [i for i in columns if i.startswith(ITEM_PREFIX)]
    ranker_cols = [i for i in columns if i.startswith(RANKER_PREFIX)]
    pair_cols = [i for i in columns if i not in item_cols + ranker_cols]
    arrays, names = {}, {}
    if item_cols:
        arrays["item"] = _fill_covariates(
            frame, item_cols, (item_idx, time_idx), (n_items, slices), "item"
        )
        names["item"] = tuple(i[len(ITEM_PREFIX):] for i in item_cols)
    if ranker_cols:
        arrays["ranker"] = _fill_covariates(
            frame,
            ranker_cols,
            (ranker_idx, time_idx),
            (n_rankers, slices),
            "ranker",
        )
        names["ranker"] = tuple(i[len(RANKER_PREFIX):] for i in ranker_cols)
    if pair_cols:
        arrays["pair"] = _fill_covariates(
            frame,
            pair_cols,
            (item_idx, ranker_idx, time_idx),
            (n_items, n_rankers, slices),
            "item/ranker",
        )
        names["pair"] = tuple(
            i[len(PAIR_PREFIX):] if i.startswith(PAIR_PREFIX) else
            i[len(COV_PREFIX):]
            for i in pair_cols
        )
    return CovariateSet(names=names, **arrays)


def panel_to_frame(panel):
    """Return the panel as a data frame in the CSV ranking schema.

    Parameters
    ----------
    panel : object like :py:class:`.RankingPanel`
        The panel to convert.

    Returns
    -------
    out : object like :py:class:`pandas.DataFrame`
        One row per time, ranker and item.

    """
    covariates = panel.covariates
    slices = panel.n_times
    if covariates is not None and covariates.n_slices() == panel.n_times + 1:
        slices += 1
    times = list(panel.times)
    while len(times) < slices:
        times.append(str(len(times) + 1))
    rows = []
    for t in range(slices):
        for j in range(panel.n_rankers):
            for i in range(panel.n_items):
                row = {
                    "time": times[t],
                    "ranker": panel.rankers[j],
                    "item": panel.items[i],
                    "rank": (
                        panel.ranks[i, j, t] if t < panel.n_times else None
                    ),
                }
                if covariates is not None:
                    _add_covariate_columns(row, covariates, i, j, t)
                rows.append(row)
    frame = pd.DataFrame(rows)
    frame["rank"] = frame["rank"].astype("Int64")
    return frame


def _add_covariate_columns(row, covariates, i, j, t):
    prefixes = (
        ("item", ITEM_PREFIX, lambda v: v[i, t]),
        ("ranker", RANKER_PREFIX, lambda v: v[j, t]),
        ("pair", PAIR_PREFIX, lambda v: v[i, j, t]),
    )
    for key, prefix, pick in prefixes:
        values = getattr(covariates, key)
        if values is None:
            continue
        for name, value in zip(covariates.names[key], pick(values)):
            row[f"{prefix}{name}"] = repr(float(value))


def write_ranking_csv(panel, path):
    """Write a panel in the CSV ranking schema.

    Floating point covariates are written with ``repr`` so that reading
    the file back gives identical values.

    Parameters
    ----------
    panel : object like :py:class:`.RankingPanel`
        The panel to write.
    path : string or object like :py:class:`pathlib.Path`
        The file to write to.

    """
    panel_to_frame(panel).to_csv(path, index=False)
