# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""
Rank paths of a simulated panel
===============================

This example simulates a small dynamic panel, fits the linear
autoregressive model and plots the observed ranks of one ranker
together with the ranks of the fitted transition means (dashed).
"""
import seaborn as sns
from matplotlib import pyplot as plt

from rankdyn import DynamicModelConfig, arrolinear_fit, fitted_rank_paths
from rankdyn import make_scenario, plot_rank_paths, simulate

sns.set_context("notebook")

data = simulate(make_scenario("dyn2", 0.5, seed=1, n_items=6, n_times=15))
config = DynamicModelConfig(n_burnin=200, n_draws=200, seed=2)
archive = arrolinear_fit(data.panel, config)
fig, ax1 = plot_rank_paths(
    data.panel, ranker=0, fitted=fitted_rank_paths(archive), lw=3
)
sns.despine(fig=fig)
plt.show()
