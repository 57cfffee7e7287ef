# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""
Kendall tau distance of forecasts
=================================

This example forecasts the last periods of a simulated panel with an
expanding window and compares the Kendall tau distance of the linear
autoregressive model with that of the Borda count.
"""
import pandas as pd
from matplotlib import pyplot as plt

from rankdyn import make_scenario, simulate
from rankdyn.mplplotting import plot_tau_by_time
from rankdyn.pipeline import (
    expanding_window,
    forecast_frames,
    kendall_tau_table,
    make_config,
    summarize_taus,
)

data = simulate(make_scenario("dyn2", 0.5, seed=5, n_items=8, n_times=14))
settings = {"n_burnin": 100, "n_draws": 100, "seed": 6}
results = []
for name in ("arrolinear", "borda"):
    results += expanding_window(
        name, data.panel, make_config(name, settings), test_periods=4
    )
points, _ = forecast_frames(results)
by_time, summary = summarize_taus(kendall_tau_table(points), "borda")
print(pd.DataFrame(summary))
fig, ax1 = plot_tau_by_time(by_time)
plt.show()
