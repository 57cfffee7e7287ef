# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""Tests for the matplotlib figures."""
import numpy as np
import pandas as pd
import pytest
from matplotlib import pyplot as plt

from rankdyn.common import InvalidInputError
from rankdyn.mplplotting import (
    plot_rank_paths,
    plot_rank_probabilities,
    plot_tau_by_time,
)
from rankdyn.pipeline import borda_forecast


@pytest.fixture(autouse=True)
def close_figures():
    """Close the figures made by a test."""
    yield
    plt.close("all")


def test_rank_paths(small_panel):
    """One line per item, two with fitted paths; rank 1 is on top."""
    fig, ax1 = plot_rank_paths(small_panel, ranker=1)
    assert len(ax1.lines) == 4
    np.testing.assert_array_equal(
        ax1.lines[0].get_ydata(), small_panel.ranks[0, 1]
    )
    bottom, top = ax1.get_ylim()
    assert bottom > top
    assert ax1.get_title() == "Ranker y"
    fitted = np.flip(small_panel.ranks, axis=0)
    _, ax1 = plot_rank_paths(small_panel, items=[0, 2], fitted=fitted)
    assert len(ax1.lines) == 4
    assert ax1.lines[1].get_linestyle() == "--"
    with pytest.raises(InvalidInputError):
        plot_rank_paths(small_panel, ranker=2)


def test_rank_probabilities(small_panel):
    """The heat map has one row per item."""
    forecast = borda_forecast(small_panel)
    fig, ax1 = plot_rank_probabilities(forecast, ranker=0)
    assert fig is ax1.figure
    labels = [label.get_text() for label in ax1.get_yticklabels()]
    assert labels == ["a", "b", "c", "d"]
    assert ax1.get_xlabel() == "Rank"
    with pytest.raises(InvalidInputError):
        plot_rank_probabilities(forecast, ranker=-1)


def test_tau_by_time():
    """Every model gets a line."""
    by_time = pd.DataFrame(
        {
            "model": ["a", "a", "b", "b"],
            "time": ["1", "2", "1", "2"],
            "mean_tau": [0.1, 0.2, 0.3, 0.25],
        }
    )
    _, ax1 = plot_tau_by_time(by_time)
    assert ax1.get_ylabel() == "Mean Kendall tau distance"
    texts = {text.get_text() for text in ax1.get_legend().get_texts()}
    assert {"a", "b"} <= texts
