# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""
Forecast rank probabilities
===========================

This example forecasts the period after a simulated panel with
ARROBART and shows the probability of every rank for every item.
"""
from matplotlib import pyplot as plt

from rankdyn import DynamicModelConfig, arrobart_fit, forecast_one_step
from rankdyn import make_scenario, plot_rank_probabilities, simulate
from rankdyn.bart import BartPrior
from rankdyn.common import derive_rng

data = simulate(make_scenario("dyn1", 1.0, seed=3, n_items=6, n_times=12))
config = DynamicModelConfig(
    n_burnin=200, n_draws=200, seed=4, prior=BartPrior(n_trees=10)
)
archive = arrobart_fit(data.panel, config)
forecast = forecast_one_step(
    archive, data.panel, config, derive_rng(4, 4), samples_per_draw=5
)
fig, ax1 = plot_rank_probabilities(forecast, ranker=0)
plt.show()
