# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""This module defines common methods and errors for rankdyn."""
import logging
import os

import numpy as np

logger = logging.getLogger(__name__)

# Name of the environment variable capping worker threads:
THREADS_ENV = "RANKDYN_THREADS"


class RankDynError(Exception):
    """Base class for errors raised by rankdyn."""

    exit_code = 1


class ConfigError(RankDynError, ValueError):
    """A configuration value is missing, unknown or out of range."""

    exit_code = 2


class InvalidInputError(RankDynError, ValueError):
    """An argument does not satisfy the precondition of an operation."""

    exit_code = 2


class DimensionError(InvalidInputError):
    """Array shapes or item counts do not agree."""


class UnsupportedForOracleError(InvalidInputError):
    """The exact oracles cannot handle the given forest or panel."""


class RankingValidationError(RankDynError, ValueError):
    """Observed ranking data is not a set of full rankings.

    Parameters
    ----------
    msg : string
        The error message.
    line : integer, optional
        The line in the source file (if any) where the problem was found.

    """

    exit_code = 3

    def __init__(self, msg, line=None):
        if line is not None:
            msg = f"line {line}: {msg}"
        super().__init__(msg)
        self.line = line


class InvariantViolation(RankDynError, RuntimeError):
    """An internal invariant was broken (this is a bug)."""

    exit_code = 4


def derive_seed_sequence(seed, *key):
    """Return the seed sequence for a task.

    Every task (a replication, a test period, a ranker stream, ...) gets
    its own stream keyed by its position, never by the order in which
    workers pick tasks up.

    Parameters
    ----------
    seed : integer
        The root seed.
    *key : integers
        The spawn key identifying the task.

    Returns
    -------
    out : object like :py:class:`numpy.random.SeedSequence`
        The seed sequence for the task.

    """
    spawn_key = tuple(int(i) for i in key)
    return np.random.SeedSequence(int(seed), spawn_key=spawn_key)


def derive_rng(seed, *key):
    """Return a generator for the task identified by ``key``."""
    return np.random.default_rng(derive_seed_sequence(seed, *key))


def derive_seed(seed, *key):
    """Return an integer seed for the task identified by ``key``."""
    sequence = derive_seed_sequence(seed, *key)
    return int(sequence.generate_state(1, np.uint32)[0])


def rng_state(rng):
    """Return the state of a generator as a JSON serializable dict."""
    return rng.bit_generator.state


def rng_from_state(state):
    """Recreate a generator from a state made by :py:func:`.rng_state`."""
    rng = np.random.default_rng()
    rng.bit_generator.state = state
    return rng


def max_threads(requested=None):
    """Return the number of worker threads to use.

    Parameters
    ----------
    requested : integer, optional
        Threads asked for by the caller. It is capped by the
        ``RANKDYN_THREADS`` environment variable.

    Returns
    -------
    out : integer
        The number of threads (at least one).

    """
    cap = os.environ.get(THREADS_ENV)
    available = os.cpu_count() or 1
    if cap is not None:
        try:
            available = max(1, int(cap))
        except ValueError as error:
            raise ConfigError(
                f'{THREADS_ENV} must be an integer, got "{cap}"'
            ) from error
    if requested is None:
        return available
    threads = max(1, min(int(requested), available))
    if threads < requested:
        logger.info("Using %i of %i requested threads.", threads, requested)
    return threads


def as_finite_array(values, name, dtype=float):
    """Convert to an array and check that all entries are finite.

    Parameters
    ----------
    values : array_like
        The values to convert.
    name : string
        Name used in the error message.
    dtype : type, optional
        The type of the returned array.

    Returns
    -------
    out : object like :py:class:`numpy.ndarray`
        The converted values.

    Raises
    ------
    InvalidInputError
        If some entry is NaN or infinite.

    """
    array = np.asarray(values, dtype=dtype)
    if not np.all(np.isfinite(array)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return array


def check_iterations(config):
    """Check the iteration counts of a sampler configuration.

    Raises
    ------
    ConfigError
        If ``n_burnin`` is negative or ``n_draws`` or ``thin`` is not
        positive.

    """
    for key, minimum in (("n_burnin", 0), ("n_draws", 1), ("thin", 1)):
        value = getattr(config, key)
        if int(value) != value or value < minimum:
            raise ConfigError(f"{key} must be an integer >= {minimum}")
