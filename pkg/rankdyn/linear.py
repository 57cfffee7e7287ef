# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""This module defines linear mean functions for the latent scores."""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular

from rankdyn.common import DimensionError, InvalidInputError

# Prior variance of every linear coefficient (intercept included):
PRIOR_VARIANCE = 100.0


@dataclass(frozen=True, eq=False)
class LinearCoefficients:
    """Coefficients of a linear mean ``intercept + x' slopes``.

    Attributes
    ----------
    values : object like :py:class:`numpy.ndarray`
        The intercept followed by one slope per covariate.

    """

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        if values.size < 1 or not np.all(np.isfinite(values)):
            raise InvalidInputError("coefficients must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, n_features):
        """Return all-zero coefficients for ``n_features`` covariates."""
        return cls(np.zeros(n_features + 1))

    @property
    def n_features(self):
        """Return the number of covariates."""
        return self.values.size - 1

    @property
    def intercept(self):
        """Return the intercept."""
        return float(self.values[0])

    @property
    def slopes(self):
        """Return the covariate slopes."""
        return self.values[1:]

    def predict(self, x):
        """Evaluate the linear mean for the rows of a design.

        ``x`` may have any number of leading dimensions; the last one
        holds the covariates.
        """
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n_features:
            raise DimensionError(
                f"expected {self.n_features} covariates, got {x.shape[-1]}"
            )
        return self.values[0] + x @ self.slopes


def draw_linear_coefficients(x, targets, rng, prior_variance=PRIOR_VARIANCE):
    """Draw regression coefficients from their conjugate posterior.

    The model is ``targets = intercept + x' slopes + e`` with unit noise
    and independent ``N(0, prior_variance)`` priors on the coefficients.

    Parameters
    ----------
    x : array_like
        The design matrix, one row per observation.
    targets : array_like
        The targets (latent scores).
    rng : object like :py:class:`numpy.random.Generator`
        The random number generator.
    prior_variance : float, optional
        Prior variance of each coefficient.

    Returns
    -------
    out : object like :py:class:`.LinearCoefficients`
        The drawn coefficients.

    """
    x = np.asarray(x, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if x.ndim != 2 or len(x) != len(targets):
        raise DimensionError("design rows and targets do not match")
    design = np.column_stack([np.ones(len(x)), x])
    precision = design.T @ design + np.eye(design.shape[1]) / prior_variance
    factor = cho_factor(precision, lower=True)
    mean = cho_solve(factor, design.T @ targets)
    noise = rng.standard_normal(design.shape[1])
    draw = mean + solve_triangular(factor[0], noise, lower=True, trans="T")
    return LinearCoefficients(draw)
