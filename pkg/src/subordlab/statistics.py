"""Subordinated statistics ``S_n = n^{-1/2} sum_k Phi(G_k)`` and their batch evaluation."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np

from .autocovariance import AutocovarianceModel
from .gaussian_sim import GaussianPath, generate_paths
from .hermite import (
    DEFAULT_Q,
    HermiteExpansion,
    catalog_expansion,
    manual_expansion,
    normalized_hermite_table,
)
from .rng import mix64

__all__ = [
    "KINDS",
    "SubordinatedStatistic",
    "build",
    "evaluate",
    "evaluate_paths",
    "evaluate_batch",
    "batch_seeds",
    "block_bounds",
    "write_batch_csv",
]

KINDS = ("MoM", "ECF_cos", "ECF_sin", "EMGF", "BreuerMajor")
DEFAULT_LAMBDA_MAX = 3.0
_BATCH_CHUNK = 256

_CATALOG_OF_KIND = {"ECF_cos": "ecf_cos", "ECF_sin": "ecf_sin", "EMGF": "emgf"}


@dataclass(frozen=True)
class SubordinatedStatistic:
    """A ``d``-dimensional statistic with catalog-sourced coordinate expansions.

    Attributes
    ----------
    kind : str
        One of ``KINDS``.
    expansions : tuple of HermiteExpansion
        One expansion per coordinate (Breuer–Major repeats the same one).
    lambdas : tuple of float
        Evaluation points for the characteristic and moment generating
        function statistics, empty otherwise.
    partition : tuple of float
        ``0 = t_0 < ... < t_d`` for Breuer–Major block sums, empty otherwise.
    """

    kind: str
    expansions: tuple
    lambdas: tuple = ()
    partition: tuple = ()

    @property
    def d(self) -> int:
        return len(self.expansions)

    @property
    def min_rank(self) -> int:
        return min(e.rank for e in self.expansions)

    def describe(self) -> dict:
        out = {"kind": self.kind, "d": self.d}
        if self.lambdas:
            out["lambdas"] = list(self.lambdas)
        if self.partition:
            out["partition"] = list(self.partition)
        if self.kind == "BreuerMajor":
            out["phi"] = self.expansions[0].to_dict()
        return out


def _coerce_expansion(phi, q_max: int) -> HermiteExpansion:
    if isinstance(phi, HermiteExpansion):
        return phi
    if isinstance(phi, dict) and "name" in phi:
        return catalog_expansion(phi["name"], phi.get("params", {}), q_max)
    if isinstance(phi, (tuple, list)) and len(phi) == 2 and isinstance(phi[0], str):
        return catalog_expansion(phi[0], dict(phi[1]), q_max)
    if isinstance(phi, dict):
        return manual_expansion({int(k): float(v) for k, v in phi.items()})
    raise ValueError("phi must be a HermiteExpansion, a catalog (name, params) pair or a {q: a_q} map")


def build(
    kind: str,
    d: int | None = None,
    lambdas: Sequence[float] | None = None,
    tau: float | None = None,
    phi=None,
    partition: Sequence[float] | None = None,
    lambda_max: float = DEFAULT_LAMBDA_MAX,
    allow_rank_one: bool = False,
    q_max: int = DEFAULT_Q,
) -> SubordinatedStatistic:
    """Construct a statistic.

    Parameters
    ----------
    kind : str
        ``MoM`` (coordinates ``H_{i+1}/sqrt((i+1)!)``), ``ECF_cos``,
        ``ECF_sin``, ``EMGF`` or ``BreuerMajor``.
    d : int, optional
        Dimension; required for ``MoM`` and with ``tau``.
    lambdas : sequence of float, optional
        Explicit evaluation points.
    tau : float, optional
        Use ``lambda_i = i**tau`` for ``i = 1..d``.
    phi : optional
        Breuer–Major function: a ``HermiteExpansion``, a catalog
        ``(name, params)`` pair or a ``{q: a_q}`` map.
    partition : sequence of float, optional
        Breuer–Major partition ``0 = t_0 < t_1 < ... < t_d`` with steps at most 1.
    lambda_max : float
        Upper limit for ``EMGF`` evaluation points.
    allow_rank_one : bool
        Permit a rank-1 Breuer–Major function (comparison mode only).

    Examples
    --------
    >>> build("ECF_cos", d=2, tau=1.0).lambdas
    (1.0, 2.0)
    """
    if kind not in KINDS:
        raise ValueError(f"unknown statistic kind {kind!r}; expected one of {KINDS}")
    if kind == "MoM":
        if d is None or d < 1:
            raise ValueError("MoM needs d >= 1")
        exps = tuple(catalog_expansion("mom_hermite", {"i": i}, q_max) for i in range(1, d + 1))
        return SubordinatedStatistic(kind, exps)
    if kind in _CATALOG_OF_KIND:
        if lambdas is None:
            if tau is None or d is None:
                raise ValueError(f"{kind} needs lambdas or (d, tau)")
            lambdas = [float(i) ** float(tau) for i in range(1, d + 1)]
        lambdas = tuple(float(x) for x in lambdas)
        if not lambdas:
            raise ValueError("at least one evaluation point is required")
        if d is not None and d != len(lambdas):
            raise ValueError("d does not match the number of evaluation points")
        if any(not lam > 0 for lam in lambdas):
            raise ValueError("evaluation points must be > 0")
        if kind == "EMGF" and max(lambdas) > lambda_max:
            raise ValueError(f"EMGF evaluation point {max(lambdas)} exceeds lambda_max={lambda_max}")
        name = _CATALOG_OF_KIND[kind]
        exps = tuple(catalog_expansion(name, {"lam": lam}, q_max) for lam in lambdas)
        return SubordinatedStatistic(kind, exps, lambdas=lambdas)
    # Breuer–Major
    if phi is None or partition is None:
        raise ValueError("BreuerMajor needs phi and partition")
    t = tuple(float(x) for x in partition)
    if len(t) < 2 or t[0] != 0.0:
        raise ValueError("partition must start at 0 and have at least two points")
    steps = np.diff(t)
    if np.any(steps <= 0) or np.any(steps > 1):
        raise ValueError("partition must be strictly increasing with steps at most 1")
    expansion = _coerce_expansion(phi, q_max)
    rank = expansion.rank
    if rank < 1 or (rank < 2 and not allow_rank_one):
        raise ValueError(f"Breuer–Major function has Hermite rank {rank}; rank >= 2 is required")
    return SubordinatedStatistic(kind, tuple(expansion for _ in range(len(t) - 1)), partition=t)


def block_bounds(partition: Sequence[float], n: int) -> list[tuple[int, int]]:
    """Zero-based half-open index ranges ``[floor(n t_{i-1}), floor(n t_i))`` per block."""
    edges = [int(math.floor(n * t)) for t in partition]
    return [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)]


def _coordinate_sums(stat: SubordinatedStatistic, x: np.ndarray) -> np.ndarray:
    """Row sums of each coordinate function over the last axis of ``x``."""
    x = np.atleast_2d(x)
    rows, n = x.shape
    out = np.empty((rows, stat.d))
    if stat.kind == "MoM":
        table = normalized_hermite_table(stat.d + 1, x)
        for i in range(stat.d):
            out[:, i] = table[i + 2].sum(axis=1)
        return out
    if stat.kind == "BreuerMajor":
        f = stat.expansions[0].function()
        values = f(x)
        for i, (lo, hi) in enumerate(block_bounds(stat.partition, n)):
            # empty blocks contribute 0
            out[:, i] = values[:, lo:hi].sum(axis=1) if hi > lo else 0.0
        return out
    for i, lam in enumerate(stat.lambdas):
        if stat.kind == "ECF_cos":
            out[:, i] = np.cos(lam * x).sum(axis=1) - n * math.exp(-0.5 * lam * lam)
        elif stat.kind == "ECF_sin":
            out[:, i] = np.sin(lam * x).sum(axis=1) - lam * math.exp(-0.5 * lam * lam) * x.sum(axis=1)
        else:
            with np.errstate(over="ignore"):
                total = np.exp(lam * x).sum(axis=1)
            if not np.all(np.isfinite(total)):
                raise OverflowError(f"EMGF coordinate {i + 1} (lambda={lam}) overflowed")
            out[:, i] = total - math.exp(0.5 * lam * lam) * (n + lam * x.sum(axis=1))
    return out


def evaluate(stat: SubordinatedStatistic, path) -> np.ndarray:
    """``S_n`` for one path, using the direct coordinate functions.

    Examples
    --------
    >>> float(evaluate(build("MoM", d=1), np.array([2.0]))[0])  # doctest: +ELLIPSIS
    2.1213203435...
    """
    x = np.asarray(path.values if isinstance(path, GaussianPath) else path, dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise ValueError("path must be a non-empty vector")
    return _coordinate_sums(stat, x)[0] / math.sqrt(x.size)


def evaluate_paths(stat: SubordinatedStatistic, paths: np.ndarray) -> np.ndarray:
    """``S_n`` for each row of an ``(R, n)`` path matrix."""
    paths = np.atleast_2d(np.asarray(paths, dtype=float))
    return _coordinate_sums(stat, paths) / math.sqrt(paths.shape[1])


def batch_seeds(master_seed: int, replicates: int, words: Sequence[int] = ()) -> list[int]:
    """Replicate seeds ``mix64(master_seed, *words, r)`` for ``r = 0..R-1``."""
    base = mix64(master_seed, *words)
    return [mix64(base, r) for r in range(replicates)]


def _evaluate_chunk(args) -> np.ndarray:
    stat, model, n, seeds = args
    return evaluate_paths(stat, generate_paths(model, n, seeds))


def evaluate_batch(
    stat: SubordinatedStatistic,
    model: AutocovarianceModel,
    n: int,
    replicates: int,
    master_seed: int,
    words: Sequence[int] = (),
    workers: int = 1,
    chunk: int = _BATCH_CHUNK,
) -> np.ndarray:
    """``(R, d)`` matrix of independent evaluations.

    Row ``r`` uses the stream seeded by ``mix64(master_seed, *words, r)``,
    so it can be regenerated alone and the matrix does not depend on
    ``workers`` or ``chunk``.
    """
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    seeds = batch_seeds(master_seed, replicates, words)
    tasks = [(stat, model, n, seeds[i : i + chunk]) for i in range(0, replicates, chunk)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_evaluate_chunk, tasks))
    else:
        parts = [_evaluate_chunk(t) for t in tasks]
    return np.vstack(parts)


def write_batch_csv(stream: TextIO, matrix: np.ndarray) -> None:
    """CSV with header ``rep,coord_1,...,coord_d`` and one row per replicate."""
    matrix = np.atleast_2d(matrix)
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["rep"] + [f"coord_{i + 1}" for i in range(matrix.shape[1])])
    for r, row in enumerate(matrix):
        writer.writerow([r] + [repr(float(v)) for v in row])
