# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""
#######
rankdyn
#######

This is rankdyn - A package for modelling rankings that change over
time with nonparametric Thurstone models: rank-order BART for static
rankings, its autoregressive extension for panels of rankings, exact
filtering and smoothing for small instances, simulated scenarios,
baselines and a forecast evaluation harness.

Copyright (C) 2026, the rankdyn developers.

rankdyn is free software: you can redistribute it and/or modify
it under the terms of the GNU Lesser General Public License as published by
the Free Software Foundation, either version 2.1 of the License, or
(at your option) any later version.

rankdyn is distributed in the hope that it will be useful,
but WITHOUT ANY WARRANTY; without even the implied warranty of
MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
GNU Lesser General Public License for more details.
"""
from .archive import PosteriorArchive
from .arrobart_dynamic import (
    DynamicModelConfig,
    arrobart_fit,
    fitted_rank_paths,
    forecast_one_step,
)
from .bart import BartPrior, Forest, induced_partition
from .baselines import arrolinear_fit, borda_count
from .mplplotting import plot_rank_paths, plot_rank_probabilities
from .oracles import (
    exact_filter_oracle,
    exact_smoothing_oracle,
    particle_filter,
    predictive_mixture_oracle,
)
from .rankings import (
    CovariateSet,
    Ranking,
    RankingPanel,
    kendall_tau,
    read_ranking_csv,
    validate_ranking,
    write_ranking_csv,
)
from .simgen import make_scenario, simulate
from .thurstone_static import (
    StaticModelConfig,
    posterior_rank_estimate,
    robart_fit,
    rolinear_fit,
)
from .version import VERSION as __version__

__all__ = [
    "BartPrior",
    "CovariateSet",
    "DynamicModelConfig",
    "Forest",
    "PosteriorArchive",
    "Ranking",
    "RankingPanel",
    "StaticModelConfig",
    "arrobart_fit",
    "arrolinear_fit",
    "borda_count",
    "exact_filter_oracle",
    "exact_smoothing_oracle",
    "fitted_rank_paths",
    "forecast_one_step",
    "induced_partition",
    "kendall_tau",
    "make_scenario",
    "particle_filter",
    "plot_rank_paths",
    "plot_rank_probabilities",
    "posterior_rank_estimate",
    "predictive_mixture_oracle",
    "read_ranking_csv",
    "robart_fit",
    "rolinear_fit",
    "simulate",
    "validate_ranking",
    "write_ranking_csv",
]
