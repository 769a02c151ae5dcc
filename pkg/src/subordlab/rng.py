"""Counter-based seeding and Box–Muller Gaussian draws.

Every replicate draws from its own Philox stream keyed by a 64-bit sub-seed,
so any row of a Monte Carlo batch can be regenerated in isolation and the
output never depends on how work is scheduled.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "MASK64",
    "KeyedUniforms",
    "splitmix64",
    "mix64",
    "sub_seed",
    "uniforms",
    "box_muller",
    "standard_normals",
    "normal_block",
    "preset_index",
]

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """SplitMix64 finalizer: a bijective avalanche on 64-bit integers."""
    z = (x + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix64(seed: int, *words: int) -> int:
    """Fold integer words into a 64-bit seed.

    ``mix64(mix64(s, a), b) == mix64(s, a, b)``, so a cell seed can be
    derived once and extended with replicate indices later.

    Examples
    --------
    >>> mix64(1, 2, 3) == mix64(mix64(1, 2), 3)
    True
    """
    h = int(seed) & MASK64
    for w in words:
        h = splitmix64(h ^ (int(w) & MASK64))
    return h


def sub_seed(master_seed: int, replicate: int) -> int:
    """Seed of replicate ``replicate`` under ``master_seed``."""
    return mix64(master_seed, replicate)


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed) & MASK64))


class KeyedUniforms:
    """Reusable Philox source that rekeys in place for each seed.

    ``KeyedUniforms().draw(s, k)`` equals ``uniforms(s, k)`` but avoids
    constructing a bit generator per replicate. Instances are not shared
    between threads.
    """

    def __init__(self):
        self._bits = np.random.Philox(key=0)
        self._gen = np.random.Generator(self._bits)
        self._zeros4 = np.zeros(4, dtype=np.uint64)

    def draw(self, seed: int, count: int, out: np.ndarray | None = None) -> np.ndarray:
        self._bits.state = {
            "bit_generator": "Philox",
            "state": {
                "counter": self._zeros4.copy(),
                "key": np.array([int(seed) & MASK64, 0], dtype=np.uint64),
            },
            "buffer": self._zeros4.copy(),
            "buffer_pos": 4,
            "has_uint32": 0,
            "uinteger": 0,
        }
        if out is None:
            return self._gen.random(count)
        self._gen.random(count, out=out)
        return out


def uniforms(seed: int, count: int) -> np.ndarray:
    """``count`` uniforms on [0, 1) from the Philox stream keyed by ``seed``."""
    return _generator(seed).random(count)


def box_muller(u: np.ndarray, count: int | None = None) -> np.ndarray:
    """Standard normals from uniform pairs along the last axis.

    Pairs ``(u1, u2)`` map to ``r cos(2 pi u2)`` and ``r sin(2 pi u2)`` with
    ``r = sqrt(-2 log(1 - u1))``. The output keeps the first ``count``
    values of each row (default: all).
    """
    u = np.asarray(u, dtype=float)
    radius = np.sqrt(-2.0 * np.log1p(-u[..., 0::2]))
    angle = (2.0 * np.pi) * u[..., 1::2]
    out = np.empty(u.shape)
    out[..., 0::2] = radius * np.cos(angle)
    out[..., 1::2] = radius * np.sin(angle)
    if count is None:
        return out
    return out[..., :count]


def standard_normals(seed: int, count: int) -> np.ndarray:
    """``count`` standard normals by Box–Muller on the stream keyed by ``seed``.

    An odd count discards the final sine of the last pair.
    """
    pairs = (count + 1) // 2
    return box_muller(uniforms(seed, 2 * pairs), count)


def normal_block(seeds, count: int) -> np.ndarray:
    """``(len(seeds), count)`` normals; row ``r`` equals ``standard_normals(seeds[r], count)``."""
    width = 2 * ((count + 1) // 2)
    u = np.empty((len(seeds), width))
    source = KeyedUniforms()
    for i, s in enumerate(seeds):
        source.draw(s, width, out=u[i])
    return box_muller(u, count)


_PRESET_IDS = {
    "mom_rate": 1,
    "ecf_rate": 2,
    "emgf_rate": 3,
    "bm_fdd_rate": 4,
    "fgn_eigen": 5,
    "dimension_scaling": 6,
    "custom": 7,
}


def preset_index(name: str) -> int:
    """Stable integer id of a preset, used as a seed word."""
    return _PRESET_IDS[name]
