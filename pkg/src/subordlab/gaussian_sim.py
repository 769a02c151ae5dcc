"""Exact synthesis of centred stationary Gaussian sequences.

Four exact samplers are available; the cheapest valid one is chosen per
``(model, n)``:

* ``WhiteNoise`` for independent sequences,
* ``AR1Recursion`` for AR(1) (``G_k = phi G_{k-1} + sqrt(1 - phi^2) Z_k``),
* ``CirculantEmbedding`` (Davies–Harte / Wood–Chan) when the minimal
  circulant embedding of length ``2(n - 1)`` is nonnegative definite,
* ``Cholesky`` of the Toeplitz matrix otherwise.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import lru_cache
from typing import BinaryIO, Iterable, Sequence

import numpy as np
from scipy import linalg, signal

from .autocovariance import AutocovarianceModel, rho_lags
from .rng import normal_block

__all__ = [
    "GaussianPath",
    "PathSynthesizer",
    "SimulationError",
    "EMBEDDING_EPS",
    "synthesizer",
    "generate_path",
    "generate_paths",
    "sample_autocovariance",
    "write_paths_binary",
    "read_paths_binary",
]

EMBEDDING_EPS = 1e-12
CHOLESKY_JITTER = 1e-12
METHODS = ("WhiteNoise", "AR1Recursion", "CirculantEmbedding", "Cholesky")


class SimulationError(RuntimeError):
    """Raised when no exact factorisation of the covariance is available."""


@dataclass(frozen=True)
class GaussianPath:
    """One sample path of the stationary sequence.

    Attributes
    ----------
    values : ndarray of shape (n,)
    model : AutocovarianceModel
    seed : int
        64-bit seed of the Philox stream that produced the path.
    method : str
        Sampler used, one of ``METHODS``.
    """

    values: np.ndarray
    model: AutocovarianceModel
    seed: int
    method: str

    @property
    def n(self) -> int:
        return int(self.values.size)


class PathSynthesizer:
    """Precomputed sampler for a fixed model and length.

    The sampler maps ``normals_per_path`` standard normals to one path, so
    each replicate's randomness is a fixed-length block of its own stream.
    """

    def __init__(self, model: AutocovarianceModel, n: int):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.model = model
        self.n = int(n)
        self.embedding_min_eigenvalue = None
        if n == 1 or model.kind == "iid" or (model.kind == "fgn" and model.hurst == 0.5):
            self.method = "WhiteNoise"
            self.normals_per_path = self.n
        elif model.kind == "ar1":
            self.method = "AR1Recursion"
            self.normals_per_path = self.n
            self._innovation_scale = np.sqrt(1.0 - model.phi**2)
        else:
            self._setup_embedding()

    def _setup_embedding(self) -> None:
        n = self.n
        c = rho_lags(self.model, np.arange(n))
        m = 2 * (n - 1)
        row = np.concatenate([c, c[-2:0:-1]])
        eig = np.fft.rfft(row).real
        self.embedding_min_eigenvalue = float(eig.min())
        if eig.min() >= -EMBEDDING_EPS:
            eig = np.clip(eig, 0.0, None)
            half = m // 2
            scale = np.empty(half + 1)
            scale[0] = np.sqrt(eig[0] / m)
            scale[half] = np.sqrt(eig[half] / m)
            scale[1:half] = np.sqrt(eig[1:half] / (2.0 * m))
            self.method = "CirculantEmbedding"
            self.normals_per_path = m
            self._m = m
            self._half = half
            self._scale = scale
            return
        toeplitz = linalg.toeplitz(c) + CHOLESKY_JITTER * np.eye(n)
        try:
            self._factor = np.linalg.cholesky(toeplitz)
        except np.linalg.LinAlgError as exc:
            smallest = float(np.linalg.eigvalsh(toeplitz).min())
            raise SimulationError(
                f"Cholesky failed for {self.model.describe()} at n={n}; "
                f"smallest eigenvalue {smallest:.3e}"
            ) from exc
        self.method = "Cholesky"
        self.normals_per_path = n

    def transform(self, normals: np.ndarray) -> np.ndarray:
        """Map a ``(R, normals_per_path)`` block of normals to ``(R, n)`` paths."""
        z = np.atleast_2d(np.asarray(normals, dtype=float))
        if z.shape[1] != self.normals_per_path:
            raise ValueError("wrong number of normals per path")
        if self.method == "WhiteNoise":
            return z.copy()
        if self.method == "AR1Recursion":
            drive = z * self._innovation_scale
            drive[:, 0] = z[:, 0]
            return signal.lfilter([1.0], [1.0, -self.model.phi], drive, axis=1)
        if self.method == "CirculantEmbedding":
            half = self._half
            coef = z[:, : half + 1] * self._scale
            coef = coef.astype(complex)
            if half > 1:
                coef[:, 1:half] += 1j * z[:, half + 1 :] * self._scale[1:half]
            full = np.fft.irfft(coef, n=self._m, axis=1) * self._m
            return full[:, : self.n]
        # row-by-row keeps each path independent of batch composition
        out = np.empty((z.shape[0], self.n))
        for r in range(z.shape[0]):
            out[r] = self._factor @ z[r]
        return out

    def paths(self, seeds: Sequence[int]) -> np.ndarray:
        """Paths for a list of stream seeds, one row per seed."""
        return self.transform(normal_block(seeds, self.normals_per_path))


@lru_cache(maxsize=64)
def synthesizer(model: AutocovarianceModel, n: int) -> PathSynthesizer:
    """Cached :class:`PathSynthesizer` for ``(model, n)``."""
    return PathSynthesizer(model, n)


def generate_path(model: AutocovarianceModel, n: int, seed: int) -> GaussianPath:
    """Exact sample path of length ``n`` with autocovariance ``model``.

    Examples
    --------
    >>> p = generate_path(AutocovarianceModel.iid(), 4, 7)
    >>> bool(np.array_equal(p.values, generate_path(AutocovarianceModel.iid(), 4, 7).values))
    True
    """
    synth = synthesizer(model, n)
    values = synth.paths([seed])[0]
    return GaussianPath(values=values, model=model, seed=int(seed), method=synth.method)


def generate_paths(model: AutocovarianceModel, n: int, seeds: Sequence[int]) -> np.ndarray:
    """Matrix of paths, one row per seed; row ``r`` equals ``generate_path(model, n, seeds[r])``."""
    return synthesizer(model, n).paths(seeds)


def sample_autocovariance(path, k: int) -> float:
    """Biased sample autocovariance ``(1/n) sum_{j<n-k} x_j x_{j+k}``."""
    x = np.asarray(path.values if isinstance(path, GaussianPath) else path, dtype=float)
    n = x.size
    if not 0 <= k < n:
        raise ValueError(f"lag {k} out of range for length {n}")
    return float(np.dot(x[: n - k], x[k:]) / n)


def write_paths_binary(stream: BinaryIO, paths: Iterable) -> int:
    """Write paths as records of an 8-byte little-endian length then float64 values.

    Returns the number of records written.
    """
    count = 0
    for p in paths:
        x = np.asarray(p.values if isinstance(p, GaussianPath) else p, dtype="<f8")
        stream.write(struct.pack("<Q", x.size))
        stream.write(x.tobytes())
        count += 1
    return count


def read_paths_binary(stream: BinaryIO) -> list[np.ndarray]:
    """Inverse of :func:`write_paths_binary`."""
    out = []
    while True:
        header = stream.read(8)
        if not header:
            return out
        if len(header) != 8:
            raise ValueError("truncated length header")
        (size,) = struct.unpack("<Q", header)
        body = stream.read(8 * size)
        if len(body) != 8 * size:
            raise ValueError("truncated path record")
        out.append(np.frombuffer(body, dtype="<f8").astype(float))
