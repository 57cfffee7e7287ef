# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""This module defines the posterior archive and its on-disk format.

An archive is a directory::

    config.json          model configuration, dimensions and diagnostics
    seed.json            the root seed
    forests/draw_XXXXX.txt  one forest per stored draw (tree models)
    coefficients.bin     one coefficient vector per draw (linear models)
    latent.bin           latent paths, (draws, N, M, T)
    initial.bin          initial states, (draws, N, M) (dynamic models)
    fitted_mean.bin      posterior mean of the fitted means, (N, M, T)
    state/               the final chain state, used to resume a chain

Matrices are stored as a little-endian int64 header (number of
dimensions, then each dimension) followed by the float64 values in
row-major order.
"""
import json
import logging
import pathlib
from dataclasses import dataclass, field

import numpy as np

from rankdyn.bart import Forest, dump_forest, load_forest
from rankdyn.common import InvalidInputError
from rankdyn.linear import LinearCoefficients

logger = logging.getLogger(__name__)


def write_matrix(path, array):
    """Write an array in the binary matrix format."""
    array = np.ascontiguousarray(array, dtype="<f8")
    header = np.array([array.ndim, *array.shape], dtype="<i8")
    with open(path, "wb") as output:
        output.write(header.tobytes())
        output.write(array.tobytes())


def read_matrix(path):
    """Read an array written by :py:func:`.write_matrix`.

    Raises
    ------
    InvalidInputError
        If the file is truncated or its header is inconsistent.

    """
    data = pathlib.Path(path).read_bytes()
    if len(data) < 8:
        raise InvalidInputError(f"{path}: missing matrix header")
    ndim = int(np.frombuffer(data[:8], dtype="<i8")[0])
    end = 8 * (ndim + 1)
    if ndim < 0 or len(data) < end:
        raise InvalidInputError(f"{path}: malformed matrix header")
    shape = tuple(int(i) for i in np.frombuffer(data[8:end], dtype="<i8"))
    values = np.frombuffer(data[end:], dtype="<f8")
    if values.size != int(np.prod(shape)):
        raise InvalidInputError(
            f"{path}: expected {int(np.prod(shape))} values, found "
            f"{values.size}"
        )
    return values.reshape(shape).astype(float)


def _write_json(path, data):
    with open(path, "w", encoding="utf-8") as output:
        json.dump(data, output, indent=2, sort_keys=True)
        output.write("\n")


def _read_json(path):
    with open(path, encoding="utf-8") as infile:
        return json.load(infile)


@dataclass
class ChainState:
    """Everything needed to continue a chain exactly.

    Attributes
    ----------
    model : object
        The current forest or linear coefficients.
    z : object like :py:class:`numpy.ndarray`
        The current latent scores.
    z0 : object like :py:class:`numpy.ndarray`
        The current initial state (dynamic models) or None.
    rng : dict
        Bit generator states: ``"main"`` and one ``"ranker_j"`` entry
        per ranker.
    sweeps : integer
        Sweeps run so far, burn-in included.
    fitted_sum : object like :py:class:`numpy.ndarray`
        Sum of the fitted means over the stored draws.

    """

    model: object
    z: np.ndarray
    z0: np.ndarray
    rng: dict
    sweeps: int
    fitted_sum: np.ndarray


@dataclass
class PosteriorArchive:
    """Stored posterior draws of a fitted model.

    Attributes
    ----------
    config : dict
        The configuration the chain was run with (JSON serializable).
    seed : integer
        The root seed.
    shape : tuple of integers
        The panel dimensions ``(N, M, T)``.
    forests : list of objects like :py:class:`rankdyn.bart.Forest`
        One forest per draw (tree models).
    coefficients : object like :py:class:`numpy.ndarray`
        One coefficient vector per draw (linear models).
    latent : object like :py:class:`numpy.ndarray`
        The latent paths, ``(draws, N, M, T)``.
    initial : object like :py:class:`numpy.ndarray`
        The initial states, ``(draws, N, M)``, for dynamic models.
    fitted_mean : object like :py:class:`numpy.ndarray`
        Posterior mean of ``f(X)``, ``(N, M, T)``.
    diagnostics : dict
        Acceptance rates of the sampler.
    state : object like :py:class:`.ChainState`
        The final chain state.
    n_features : integer
        The number of design columns of the mean function.

    """

    config: dict
    seed: int
    shape: tuple
    forests: list = field(default_factory=list)
    coefficients: np.ndarray = None
    latent: np.ndarray = None
    initial: np.ndarray = None
    fitted_mean: np.ndarray = None
    diagnostics: dict = field(default_factory=dict)
    state: ChainState = None
    n_features: int = 0

    @property
    def n_draws(self):
        """Return the number of stored draws."""
        return 0 if self.latent is None else len(self.latent)

    @property
    def model_kind(self):
        """Return the model kind of the configuration."""
        return self.config.get("model_kind")

    @property
    def is_linear(self):
        """Return True if the draws are linear coefficients."""
        return self.coefficients is not None

    def models(self):
        """Return the mean function of every draw."""
        if self.is_linear:
            return [LinearCoefficients(row) for row in self.coefficients]
        return list(self.forests)

    def require_draws(self):
        """Raise if the archive holds no draws."""
        if self.n_draws == 0:
            raise InvalidInputError("the posterior archive is empty")

    def extend(self, other):
        """Append the draws of a continued chain (in place)."""
        self.forests.extend(other.forests)
        if other.coefficients is not None:
            self.coefficients = _stack(self.coefficients, other.coefficients)
        self.latent = _stack(self.latent, other.latent)
        if other.initial is not None:
            self.initial = _stack(self.initial, other.initial)
        self.fitted_mean = other.fitted_mean
        self.diagnostics = other.diagnostics
        self.state = other.state

    def save(self, path):
        """Write the archive to a directory."""
        path = pathlib.Path(path)
        path.mkdir(parents=True, exist_ok=True)
        config = {
            "config": self.config,
            "shape": list(self.shape),
            "n_draws": self.n_draws,
            "diagnostics": self.diagnostics,
            "n_features": self.n_features,
        }
        _write_json(path / "config.json", config)
        _write_json(path / "seed.json", {"seed": int(self.seed)})
        if self.forests:
            forests = path / "forests"
            forests.mkdir(exist_ok=True)
            for i, forest in enumerate(self.forests):
                (forests / f"draw_{i:05d}.txt").write_text(dump_forest(forest))
        if self.coefficients is not None:
            write_matrix(path / "coefficients.bin", self.coefficients)
        if self.latent is not None:
            write_matrix(path / "latent.bin", self.latent)
        if self.initial is not None:
            write_matrix(path / "initial.bin", self.initial)
        if self.fitted_mean is not None:
            write_matrix(path / "fitted_mean.bin", self.fitted_mean)
        if self.state is not None:
            self._save_state(path / "state")
        logger.info("Wrote %i posterior draws to %s", self.n_draws, path)

    def _save_state(self, path):
        path.mkdir(exist_ok=True)
        state = self.state
        if isinstance(state.model, Forest):
            (path / "forest.txt").write_text(dump_forest(state.model))
        else:
            write_matrix(path / "coefficients.bin", state.model.values)
        write_matrix(path / "z.bin", state.z)
        if state.z0 is not None:
            write_matrix(path / "z0.bin", state.z0)
        write_matrix(path / "fitted_sum.bin", state.fitted_sum)
        _write_json(
            path / "state.json", {"rng": state.rng, "sweeps": state.sweeps}
        )

    @classmethod
    def load(cls, path):
        """Read an archive from a directory.

        Raises
        ------
        InvalidInputError
            If the directory is not a valid archive.

        """
        path = pathlib.Path(path)
        if not (path / "config.json").is_file():
            raise InvalidInputError(f"{path} is not a posterior archive")
        meta = _read_json(path / "config.json")
        seed = _read_json(path / "seed.json")["seed"]
        archive = cls(
            config=meta["config"],
            seed=seed,
            shape=tuple(meta["shape"]),
            diagnostics=meta.get("diagnostics", {}),
            n_features=meta.get("n_features", 0),
        )
        forests = path / "forests"
        if forests.is_dir():
            archive.forests = [
                load_forest(i.read_text())
                for i in sorted(forests.glob("draw_*.txt"))
            ]
        for name in ("coefficients", "latent", "initial", "fitted_mean"):
            matrix = path / f"{name}.bin"
            if matrix.is_file():
                setattr(archive, name, read_matrix(matrix))
        if archive.n_draws != meta["n_draws"]:
            raise InvalidInputError(
                f"{path}: expected {meta['n_draws']} draws, found "
                f"{archive.n_draws}"
            )
        if (path / "state").is_dir():
            archive.state = _load_state(path / "state")
        return archive


def _load_state(path):
    if (path / "forest.txt").is_file():
        model = load_forest((path / "forest.txt").read_text())
    else:
        model = LinearCoefficients(read_matrix(path / "coefficients.bin"))
    info = _read_json(path / "state.json")
    z0 = read_matrix(path / "z0.bin") if (path / "z0.bin").is_file() else None
    return ChainState(
        model=model,
        z=read_matrix(path / "z.bin"),
        z0=z0,
        rng=info["rng"],
        sweeps=info["sweeps"],
        fitted_sum=read_matrix(path / "fitted_sum.bin"),
    )


def _stack(first, second):
    if first is None:
        return second
    return np.concatenate([first, second], axis=0)
