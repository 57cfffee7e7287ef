# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""This module defines methods for plotting rankings using matplotlib."""
import numpy as np
import seaborn as sns
from matplotlib import pyplot as plt

from rankdyn.common import InvalidInputError


def _item_colors(n_items, cmap_name):
    """Return one color per item from a color map.

    Parameters
    ----------
    n_items : integer
        The number of colors to pick.
    cmap_name : string
        The name of the color map to use.

    Returns
    -------
    out : object like :py:class:`numpy.ndarray`
        RGBA colors, one row per item.

    """
    cmap = plt.colormaps.get_cmap(cmap_name)
    return cmap(np.linspace(0, 1, max(n_items, 2)))[:n_items]


def _check_ranker(n_rankers, ranker):
    if not 0 <= ranker < n_rankers:
        raise InvalidInputError(
            f"no ranker {ranker} (there are {n_rankers})"
        )


def plot_rank_paths(
    panel, ranker=0, items=None, fitted=None, cmap="viridis", **kwargs
):
    """Plot the observed ranks of items over time for one ranker.

    Parameters
    ----------
    panel : object like :py:class:`rankdyn.rankings.RankingPanel`
        The observed rankings.
    ranker : integer, optional
        The index of the ranker to plot.
    items : list of integers, optional
        Indices of the items to plot (all by default).
    fitted : array_like, optional
        Ranks with shape ``(N, M, T)``, for instance from
        :py:func:`rankdyn.arrobart_dynamic.fitted_rank_paths`. These are
        drawn as dashed lines.
    cmap : string, optional
        Color map used to color the items.
    **kwargs : :py:class:`matplotlib.lines.Line2D` properties, optional
        Extra properties passed to ``axi.plot`` for the observed ranks.

    Returns
    -------
    fig: object like :py:class:`matplotlib.figure.Figure`
        The figure created here.
    ax1 : object like :py:class:`matplotlib.axes.Axes`
        The axes holding the paths.

    """
    _check_ranker(panel.n_rankers, ranker)
    items = range(panel.n_items) if items is None else list(items)
    times = np.arange(panel.n_times)
    colors = _item_colors(len(items), cmap)
    fig, ax1 = plt.subplots(constrained_layout=True)
    for color, i in zip(colors, items):
        ax1.plot(
            times,
            panel.ranks[i, ranker],
            color=color,
            label=panel.items[i],
            **kwargs,
        )
        if fitted is not None:
            ax1.plot(
                times, np.asarray(fitted)[i, ranker], color=color, ls="--"
            )
    ax1.set(
        xlabel="Period",
        ylabel="Rank",
        title=f"Ranker {panel.rankers[ranker]}",
    )
    # rank 1 on top
    ax1.set_ylim(panel.n_items + 0.5, 0.5)
    labels = panel.times[: panel.n_times]
    step = max(1, len(labels) // 10)
    ax1.set_xticks(times[::step], labels[::step])
    if len(items) <= 20:
        ax1.legend(loc="center left", bbox_to_anchor=(1.0, 0.5))
    return fig, ax1


def plot_rank_probabilities(forecast, ranker=0, cmap="Reds", annot=None):
    """Plot the forecast rank probabilities of one ranker as a heat map.

    Items are sorted by their point forecast.

    Parameters
    ----------
    forecast : object like :py:class:`rankdyn.arrobart_dynamic.Forecast`
        The forecast to show.
    ranker : integer, optional
        The index of the ranker to plot.
    cmap : string, optional
        Color map for the probabilities.
    annot : boolean, optional
        Write the probabilities in the cells. By default this is done
        for at most ten items.

    Returns
    -------
    fig: object like :py:class:`matplotlib.figure.Figure`
        The figure created here.
    ax1 : object like :py:class:`matplotlib.axes.Axes`
        The axes holding the heat map.

    """
    probabilities = forecast.probabilities
    _check_ranker(probabilities.shape[0], ranker)
    n_items = probabilities.shape[1]
    order = np.argsort(forecast.point_ranks[:, ranker], kind="stable")
    if annot is None:
        annot = n_items <= 10
    fig, ax1 = plt.subplots(constrained_layout=True)
    sns.heatmap(
        probabilities[ranker][order],
        ax=ax1,
        cmap=cmap,
        vmin=0.0,
        vmax=1.0,
        annot=annot,
        fmt=".2f",
        xticklabels=np.arange(1, n_items + 1),
        yticklabels=np.asarray(forecast.items)[order],
        cbar_kws={"label": "Probability"},
    )
    ax1.set(
        xlabel="Rank",
        ylabel="Item",
        title=f"Ranker {forecast.rankers[ranker]}",
    )
    return fig, ax1


def plot_tau_by_time(by_time, palette="colorblind"):
    """Plot the mean Kendall tau distance per period and model.

    Parameters
    ----------
    by_time : object like :py:class:`pandas.DataFrame`
        Columns ``model, time, mean_tau`` as returned by
        :py:func:`rankdyn.pipeline.summarize_taus`.
    palette : string, optional
        The seaborn palette used for the models.

    Returns
    -------
    fig: object like :py:class:`matplotlib.figure.Figure`
        The figure created here.
    ax1 : object like :py:class:`matplotlib.axes.Axes`
        The axes holding the lines.

    """
    fig, ax1 = plt.subplots(constrained_layout=True)
    sns.lineplot(
        data=by_time,
        x="time",
        y="mean_tau",
        hue="model",
        marker="o",
        palette=palette,
        ax=ax1,
    )
    ax1.set(xlabel="Forecast period", ylabel="Mean Kendall tau distance")
    ax1.spines["top"].set_visible(False)
    ax1.spines["right"].set_visible(False)
    return fig, ax1
