# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""Tests for the seed streams, thread settings and errors."""
import numpy as np
import pytest

from rankdyn.common import (
    THREADS_ENV,
    ConfigError,
    DimensionError,
    InvalidInputError,
    InvariantViolation,
    RankingValidationError,
    as_finite_array,
    derive_rng,
    derive_seed,
    max_threads,
    rng_from_state,
    rng_state,
)


def test_derived_streams_are_keyed():
    """Streams depend on the key, not on the order they are made in."""
    first = derive_rng(7, 1, 0).random(5)
    derive_rng(7, 1, 1).random(5)
    again = derive_rng(7, 1, 0).random(5)
    np.testing.assert_array_equal(first, again)
    other = derive_rng(7, 1, 1).random(5)
    assert not np.array_equal(first, other)
    assert derive_seed(7, 3, 2) == derive_seed(7, 3, 2)
    assert derive_seed(7, 3, 2) != derive_seed(7, 2, 3)


def test_rng_state_restores_the_stream(rng):
    """A saved state continues the stream exactly."""
    rng.random(3)
    state = rng_state(rng)
    expected = rng.standard_normal(4)
    restored = rng_from_state(state)
    np.testing.assert_array_equal(restored.standard_normal(4), expected)


def test_max_threads(monkeypatch):
    """The environment variable caps the thread count."""
    monkeypatch.setenv(THREADS_ENV, "2")
    assert max_threads() == 2
    assert max_threads(8) == 2
    assert max_threads(1) == 1
    assert max_threads(0) == 1
    monkeypatch.setenv(THREADS_ENV, "many")
    with pytest.raises(ConfigError):
        max_threads()


def test_exit_codes():
    """Every error kind has its exit code."""
    assert ConfigError("x").exit_code == 2
    assert InvalidInputError("x").exit_code == 2
    assert DimensionError("x").exit_code == 2
    assert RankingValidationError("x").exit_code == 3
    assert InvariantViolation("x").exit_code == 4


def test_line_numbers_in_messages():
    """Validation errors name the offending line."""
    error = RankingValidationError("duplicate rank 2", line=7)
    assert error.line == 7
    assert str(error) == "line 7: duplicate rank 2"


def test_as_finite_array():
    """Non-finite entries are rejected."""
    np.testing.assert_array_equal(as_finite_array([1, 2], "x"), [1.0, 2.0])
    with pytest.raises(InvalidInputError, match="scores"):
        as_finite_array([1.0, np.nan], "scores")
