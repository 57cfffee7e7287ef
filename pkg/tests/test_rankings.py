# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""Tests for rankings, panels, Kendall tau and the CSV schema."""
import itertools

import numpy as np
import pandas as pd
import pytest

from rankdyn.common import (
    DimensionError,
    InvalidInputError,
    RankingValidationError,
)
from rankdyn.rankings import (
    CovariateSet,
    RankingPanel,
    kendall_tau,
    kendall_tau_arrays,
    rank_of_scores,
    ranks_from_scores,
    read_ranking_csv,
    validate_ranking,
    write_ranking_csv,
)


def brute_force_tau(first, second):
    """Count discordant pairs one by one."""
    size = len(first)
    pairs = list(itertools.combinations(range(size), 2))
    discordant = sum(
        (first[i] - first[j]) * (second[i] - second[j]) < 0 for i, j in pairs
    )
    return discordant / len(pairs)


@pytest.mark.parametrize(
    "raw, message",
    [
        ([1, 2, 2], "duplicate rank 2"),
        ([1, 2, 4], "rank 4 out of range"),
        ([0, 1, 2], "rank 0 out of range"),
        ([1.5, 2, 3], "integers"),
    ],
)
def test_validate_ranking_errors(raw, message):
    """Invalid rankings name the offending entry."""
    with pytest.raises(RankingValidationError, match=message):
        validate_ranking(raw)


def test_validate_ranking():
    """Valid rankings are accepted, also as whole floats."""
    ranking = validate_ranking([3.0, 1.0, 2.0])
    assert ranking.ranks == (3, 1, 2)
    assert list(ranking.order()) == [1, 2, 0]
    assert ranking.prefers(1, 0)


def test_rank_of_scores():
    """The smallest score is ranked first and ties go to the first item."""
    assert rank_of_scores([0.3, -1.2, 2.0]).ranks == (2, 1, 3)
    assert rank_of_scores([1.0, 0.0, 1.0, 0.0]).ranks == (3, 1, 4, 2)
    with pytest.raises(InvalidInputError):
        rank_of_scores([0.0, np.inf])


def test_ranks_from_scores_along_axis(rng):
    """The array version agrees with ranking one vector at a time."""
    scores = rng.standard_normal((4, 6))
    ranks = ranks_from_scores(scores, axis=0)
    for column in range(6):
        assert tuple(ranks[:, column]) == rank_of_scores(
            scores[:, column]
        ).ranks


def test_kendall_tau_all_pairs_of_five():
    """The distance matches pair counting for every pair of rankings."""
    perms = [np.array(p) + 1 for p in itertools.permutations(range(5))]
    first = np.array([p for p in perms for _ in perms]).T
    second = np.array([q for _ in perms for q in perms]).T
    taus = kendall_tau_arrays(first, second, axis=0)
    expected = [brute_force_tau(p, q) for p in perms for q in perms]
    np.testing.assert_allclose(taus, expected)
    for p, q in zip(perms[:20], perms[::-6]):
        assert kendall_tau(p, q) == pytest.approx(brute_force_tau(p, q))
        assert kendall_tau(p, q) == pytest.approx(kendall_tau(q, p))


def test_kendall_tau_extremes():
    """Identical rankings are at 0 and reversed ones at 1."""
    assert kendall_tau([1, 2, 3, 4], [1, 2, 3, 4]) == 0.0
    assert kendall_tau([1, 2, 3, 4], [4, 3, 2, 1]) == 1.0
    assert kendall_tau([1, 2, 3], [2, 1, 3]) == pytest.approx(1.0 / 3.0)


def test_kendall_tau_errors():
    """Rankings must have equal lengths and at least two items."""
    with pytest.raises(DimensionError):
        kendall_tau([1, 2], [1, 2, 3])
    with pytest.raises(InvalidInputError):
        kendall_tau([1], [1])
    with pytest.raises(RankingValidationError):
        kendall_tau([1, 1], [1, 2])


def test_panel_validation():
    """A panel must hold full rankings."""
    with pytest.raises(RankingValidationError, match="ranker 1, time 0"):
        RankingPanel(ranks=np.array([[[1], [1]], [[2], [1]]]))
    with pytest.raises(DimensionError):
        RankingPanel(ranks=np.ones((2, 2, 2, 2), dtype=int))
    with pytest.raises(DimensionError):
        RankingPanel(ranks=[[1], [2]], items=("a", "b", "c"))


def test_panel_defaults(small_panel):
    """Labels default to 1-based numbers; static panels have T = 1."""
    panel = RankingPanel(ranks=[[1, 2], [2, 1]])
    assert panel.shape == (2, 2, 1)
    assert panel.items == ("1", "2")
    assert panel.times == ("1",)
    assert small_panel.ranking(1, 0).ranks == (2, 1, 4, 3)
    assert small_panel.order()[0, 0, 1] == 1


def test_panel_head_keeps_the_next_covariates(small_panel):
    """Truncating keeps the covariate slice of the next period."""
    item = np.arange(4 * 4, dtype=float).reshape(4, 4, 1)
    panel = small_panel.with_covariates(CovariateSet(item=item))
    head = panel.head(2)
    assert head.shape == (4, 2, 2)
    assert head.times == ("2001", "2002", "2003")
    np.testing.assert_array_equal(head.covariates.item, item[:, :3])
    with pytest.raises(InvalidInputError):
        panel.head(0)


def test_select_rankers(small_panel):
    """Selecting rankers keeps their labels and ranks."""
    panel = small_panel.select_rankers([1])
    assert panel.rankers == ("y",)
    np.testing.assert_array_equal(panel.ranks[:, 0], small_panel.ranks[:, 1])


def test_covariate_features():
    """Item, ranker and pair covariates are stacked per period."""
    covariates = CovariateSet(
        item=np.ones((3, 2, 1)),
        ranker=np.full((2, 2, 2), 2.0),
        pair=np.full((3, 2, 2, 1), 3.0),
    )
    assert covariates.dims() == (1, 2, 1)
    assert covariates.n_features == 4
    features = covariates.features(1, 3, 2)
    assert features.shape == (3, 2, 4)
    np.testing.assert_array_equal(features[0, 0], [1.0, 2.0, 2.0, 3.0])
    with pytest.raises(DimensionError):
        covariates.check(4, 2, 2)
    with pytest.raises(DimensionError):
        covariates.check(3, 2, 5)


def test_csv_round_trip(tmp_path, small_panel):
    """Writing and reading a panel gives the same panel."""
    pair = np.random.default_rng(3).standard_normal((4, 2, 4, 1))
    item = np.random.default_rng(4).standard_normal((4, 4, 2))
    panel = small_panel.with_covariates(CovariateSet(item=item, pair=pair))
    path = tmp_path / "rankings.csv"
    write_ranking_csv(panel, path)
    read = read_ranking_csv(path)
    assert read.equals(panel)
    # the forecast slice is written as rows without a rank
    assert read.times == ("2001", "2002", "2003", "4")
    np.testing.assert_array_equal(read.covariates.pair, pair)


def test_csv_labels_in_order_of_appearance(tmp_path):
    """Opaque labels are indexed in order of first appearance."""
    frame = pd.DataFrame(
        {
            "time": ["w2", "w2", "w1", "w1"],
            "ranker": ["r", "r", "r", "r"],
            "item": ["z", "a", "z", "a"],
            "rank": [2, 1, 1, 2],
        }
    )
    path = tmp_path / "rankings.csv"
    frame.to_csv(path, index=False)
    panel = read_ranking_csv(path)
    assert panel.times == ("w2", "w1")
    assert panel.items == ("z", "a")
    np.testing.assert_array_equal(panel.ranks[:, 0, :], [[2, 1], [1, 2]])


@pytest.mark.parametrize(
    "rows, line, message",
    [
        (
            "1,r,a,1\n1,r,b,1\n",
            2,
            "duplicate rank 1",
        ),
        (
            "1,r,a,1\n1,r,b,2\n1,r,b,1\n",
            4,
            "duplicate",
        ),
        (
            "1,r,a,1\n1,r,b,x\n",
            3,
            "not an integer",
        ),
        (
            "1,r,a,1\n1,r,b,2\n2,r,a,1\n2,r,b,\n",
            5,
            "partial rankings",
        ),
    ],
)
def test_csv_errors_have_line_numbers(tmp_path, rows, line, message):
    """Invalid files are rejected with the line of the problem."""
    path = tmp_path / "bad.csv"
    path.write_text("time,ranker,item,rank\n" + rows)
    with pytest.raises(RankingValidationError, match=message) as error:
        read_ranking_csv(path)
    assert error.value.line == line


def test_csv_unknown_columns(tmp_path):
    """Columns outside the schema are rejected."""
    path = tmp_path / "bad.csv"
    path.write_text("time,ranker,item,rank,score\n1,r,a,1,0.5\n")
    with pytest.raises(RankingValidationError, match="unknown column"):
        read_ranking_csv(path)


def test_csv_incomplete_panel(tmp_path):
    """Every (time, ranker, item) cell must be ranked."""
    path = tmp_path / "bad.csv"
    path.write_text(
        "time,ranker,item,rank\n1,r,a,1\n1,r,b,2\n1,s,a,1\n"
    )
    with pytest.raises(RankingValidationError, match="complete"):
        read_ranking_csv(path)
