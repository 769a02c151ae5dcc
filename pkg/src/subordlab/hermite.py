"""Probabilists' Hermite polynomials, Hermite expansions and decay fits.

Coefficients follow ``phi(x) = sum_q a_q H_q(x)`` with ``H_2(x) = x^2 - 1``.
Expansions store ``log|a_q|`` and the sign separately so that coefficients
far below double-precision range (``a_q ~ lambda^q / q!`` at large ``q``)
keep full relative accuracy. The normalized coefficients
``b_q = sqrt(q!) a_q`` are what the covariance formulas consume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np
from numpy.polynomial import hermite as phys_hermite
from scipy.special import gammaln

from .constants import HALF_LOG3, upsilon

__all__ = [
    "Q_CAP",
    "HermiteExpansion",
    "ThetaParams",
    "QuadratureError",
    "CATALOG_NAMES",
    "hermite_eval",
    "normalized_hermite_table",
    "catalog_expansion",
    "catalog_function",
    "reference_theta",
    "manual_expansion",
    "coefficients_quadrature",
    "hermite_rank",
    "fit_theta",
    "certify_theta",
    "DEFAULT_BETA_GRID",
]

Q_CAP = 200
DEFAULT_Q = 60
RANK_TOL = 1e-10
DEFAULT_BETA_GRID = (0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
CATALOG_NAMES = ("ecf_cos", "ecf_sin", "emgf", "mom_hermite", "gauss_density_mod", "gauss_cdf_mod")

_LOG_2PI = math.log(2.0 * math.pi)


class QuadratureError(RuntimeError):
    """Node doubling did not converge; carries the last two iterates."""

    def __init__(self, message: str, previous: np.ndarray, latest: np.ndarray):
        super().__init__(message)
        self.previous = previous
        self.latest = latest


def hermite_eval(q: int, x, q_cap: int = Q_CAP):
    """Evaluate ``H_q(x)`` by the three-term recurrence.

    ``H_{q+1}(x) = x H_q(x) - q H_{q-1}(x)``. Beyond ``q_cap`` the values
    overflow for moderate ``|x|`` and the call is refused.

    Examples
    --------
    >>> hermite_eval(2, 2.0)
    3.0
    >>> hermite_eval(3, 1.0)
    -2.0
    """
    if q < 0:
        raise ValueError("q must be >= 0")
    if q > q_cap:
        raise ValueError(f"q={q} exceeds the evaluation cap {q_cap}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if q == 0:
        return prev if prev.ndim else float(prev)
    cur = x.copy()
    for k in range(1, q):
        prev, cur = cur, x * cur - k * prev
    return cur if cur.ndim else float(cur)


def normalized_hermite_table(q_max: int, x, weight_root=None) -> np.ndarray:
    """Rows ``h_q(x) = H_q(x) / sqrt(q!)`` for ``q = 0..q_max``.

    With ``weight_root`` the rows are multiplied by it, which keeps the
    recurrence bounded when it is a square-root quadrature weight.
    """
    x = np.asarray(x, dtype=float)
    table = np.empty((q_max + 1,) + x.shape)
    table[0] = 1.0 if weight_root is None else weight_root
    if q_max >= 1:
        table[1] = x * table[0]
    for q in range(1, q_max):
        table[q + 1] = (x * table[q] - math.sqrt(q) * table[q - 1]) / math.sqrt(q + 1)
    return table


# --------------------------------------------------------------------------
# expansions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class HermiteExpansion:
    """Hermite coefficients ``a_0..a_Q`` of one coordinate function.

    Attributes
    ----------
    log_abs : ndarray
        ``log|a_q|``, ``-inf`` where ``a_q == 0``.
    sign : ndarray
        Sign of ``a_q`` in {-1, 0, 1}.
    source : str
        ``"catalog"``, ``"quadrature"`` or ``"manual"``.
    name : str or None
        Catalog entry name.
    params : tuple
        Catalog parameters as sorted ``(key, value)`` pairs.
    support_max : int or None
        Largest ``q`` with ``a_q != 0`` when the expansion is known to be
        finite, otherwise ``None``.
    notes : tuple of str
        Warnings attached at construction (for example admissibility).
    """

    log_abs: np.ndarray
    sign: np.ndarray
    source: str
    name: str | None = None
    params: tuple = ()
    support_max: int | None = None
    notes: tuple = field(default=())

    @property
    def q_max(self) -> int:
        return int(self.log_abs.size - 1)

    @property
    def is_finite(self) -> bool:
        return self.support_max is not None

    @property
    def coeffs(self) -> np.ndarray:
        """``a_q`` for ``q = 0..q_max`` (may underflow to 0 at large ``q``)."""
        return self.sign * np.exp(self.log_abs)

    @property
    def normalized(self) -> np.ndarray:
        """``b_q = sqrt(q!) a_q``, computed in log space."""
        q = np.arange(self.log_abs.size)
        return self.sign * np.exp(self.log_abs + 0.5 * gammaln(q + 1.0))

    @property
    def rank(self) -> int:
        return hermite_rank(self)

    @property
    def param_dict(self) -> dict:
        return dict(self.params)

    def coefficient(self, q: int) -> float:
        if q > self.q_max:
            return float(self.extend(q).coefficient(q))
        return float(self.sign[q] * math.exp(self.log_abs[q])) if self.sign[q] else 0.0

    def extend(self, q_max: int) -> "HermiteExpansion":
        """Same expansion with coefficients available up to at least ``q_max``."""
        if q_max <= self.q_max:
            return self
        if self.source == "catalog":
            return catalog_expansion(self.name, self.param_dict, q_max)
        if self.is_finite:
            pad = q_max - self.q_max
            return HermiteExpansion(
                log_abs=np.concatenate([self.log_abs, np.full(pad, -np.inf)]),
                sign=np.concatenate([self.sign, np.zeros(pad)]),
                source=self.source,
                name=self.name,
                params=self.params,
                support_max=self.support_max,
                notes=self.notes,
            )
        raise ValueError("quadrature expansions cannot be extended; recompute with a larger Q_max")

    def series_value(self, x, q_max: int | None = None):
        """Truncated series ``sum_{q<=q_max} a_q H_q(x)`` via normalized polynomials."""
        q_max = self.q_max if q_max is None else q_max
        exp = self.extend(q_max)
        b = exp.normalized[: q_max + 1]
        table = normalized_hermite_table(q_max, x)
        return np.tensordot(b, table, axes=(0, 0))

    def function(self) -> Callable[[np.ndarray], np.ndarray]:
        """Direct vectorised evaluation of the coordinate function."""
        if self.source == "catalog":
            return catalog_function(self.name, self.param_dict)
        if self.is_finite:
            n = self.support_max
            return lambda x: self.series_value(x, n)
        raise ValueError("no closed form available for a quadrature expansion")

    def to_dict(self) -> dict:
        """JSON record ``{source, params, coeffs[(q, a_q)...], rank}``."""
        nz = np.nonzero(self.sign)[0]
        return {
            "source": self.source,
            "name": self.name,
            "params": self.param_dict,
            "coeffs": [[int(q), float(self.sign[q] * math.exp(self.log_abs[q]))] for q in nz],
            "log_abs_coeffs": [[int(q), float(self.log_abs[q])] for q in nz],
            "rank": self.rank,
            "q_max": self.q_max,
            "support_max": self.support_max,
            "notes": list(self.notes),
        }


def _params_tuple(params: dict) -> tuple:
    return tuple(sorted((str(k), float(v) if not isinstance(v, int) else v) for k, v in params.items()))


def _empty(q_max: int):
    return np.full(q_max + 1, -np.inf), np.zeros(q_max + 1)


def _catalog_arrays(name: str, p: dict, q_max: int):
    log_abs, sign = _empty(q_max)
    q = np.arange(q_max + 1, dtype=float)
    lgq = gammaln(q + 1.0)
    if name in ("ecf_cos", "ecf_sin", "emgf"):
        lam = float(p["lam"])
        if not lam > 0:
            raise ValueError("lambda must be > 0")
        if name == "ecf_cos":
            mask = (q >= 2) & (q % 2 == 0)
            log_abs[mask] = q[mask] * math.log(lam) - 0.5 * lam * lam - lgq[mask]
            sign[mask] = np.where((q[mask] // 2) % 2 == 0, 1.0, -1.0)
        elif name == "ecf_sin":
            mask = (q >= 3) & (q % 2 == 1)
            log_abs[mask] = q[mask] * math.log(lam) - 0.5 * lam * lam - lgq[mask]
            sign[mask] = np.where(((q[mask] - 1) // 2) % 2 == 0, 1.0, -1.0)
        else:
            mask = q >= 2
            log_abs[mask] = 0.5 * lam * lam + q[mask] * math.log(lam) - lgq[mask]
            sign[mask] = 1.0
        return log_abs, sign, None
    if name == "mom_hermite":
        i = int(p["i"])
        if i < 1:
            raise ValueError("method-of-moments coordinate index must be >= 1")
        top = i + 1
        if top > q_max:
            log_abs, sign = _empty(top)
            q_max = top
        log_abs[top] = -0.5 * float(gammaln(top + 1.0))
        sign[top] = 1.0
        return log_abs, sign, top
    if name in ("gauss_density_mod", "gauss_cdf_mod"):
        s2 = float(p["sigma2"])
        if not s2 > 0:
            raise ValueError("sigma2 must be > 0")
        log1s = math.log(s2 + 1.0)
        if name == "gauss_density_mod":
            mask = (q >= 2) & (q % 2 == 0)
            h = q[mask] / 2.0
            log_abs[mask] = -gammaln(h + 1.0) - h * math.log(2.0) - 0.5 * (_LOG_2PI + (q[mask] + 1.0) * log1s)
            sign[mask] = np.where(h % 2 == 0, 1.0, -1.0)
        else:
            mask = (q >= 3) & (q % 2 == 1)
            h = (q[mask] - 1.0) / 2.0
            log_abs[mask] = (
                -np.log(q[mask]) - gammaln(h + 1.0) - h * math.log(2.0) - 0.5 * (_LOG_2PI + q[mask] * log1s)
            )
            sign[mask] = np.where(h % 2 == 0, 1.0, -1.0)
        return log_abs, sign, None
    raise ValueError(f"unknown catalog entry {name!r}; expected one of {CATALOG_NAMES}")


def catalog_expansion(name: str, params: dict, q_max: int = DEFAULT_Q) -> HermiteExpansion:
    """Closed-form Hermite coefficients of a catalog function.

    Parameters
    ----------
    name : str
        ``ecf_cos``, ``ecf_sin``, ``emgf`` (parameter ``lam``),
        ``mom_hermite`` (parameter ``i``: coordinate ``H_{i+1}/sqrt((i+1)!)``),
        ``gauss_density_mod`` or ``gauss_cdf_mod`` (parameter ``sigma2``).
    params : dict
    q_max : int
        Highest coefficient index to generate.

    Examples
    --------
    >>> e = catalog_expansion("ecf_cos", {"lam": 1.0}, 4)
    >>> round(e.coefficient(2), 12) == round(-math.exp(-0.5) / 2, 12)
    True
    """
    log_abs, sign, support = _catalog_arrays(name, params, q_max)
    notes = []
    if name in ("gauss_density_mod", "gauss_cdf_mod"):
        s2 = float(params["sigma2"])
        for label, m in (("d_R", upsilon()), ("d_C", -HALF_LOG3)):
            threshold = math.exp(-2.0 * m) - 1.0
            if s2 <= threshold:
                notes.append(
                    f"sigma2={s2:g} <= {threshold:.6g}: kappa=-log(sigma2+1)/2 is not below the {label} threshold"
                )
    return HermiteExpansion(
        log_abs=log_abs,
        sign=sign,
        source="catalog",
        name=name,
        params=_params_tuple(params),
        support_max=support,
        notes=tuple(notes),
    )


def catalog_function(name: str, params: dict) -> Callable[[np.ndarray], np.ndarray]:
    """Direct vectorised form of a catalog function (rank-adjusted)."""
    if name == "ecf_cos":
        lam = float(params["lam"])
        shift = math.exp(-0.5 * lam * lam)
        return lambda x: np.cos(lam * np.asarray(x)) - shift
    if name == "ecf_sin":
        lam = float(params["lam"])
        slope = lam * math.exp(-0.5 * lam * lam)
        return lambda x: np.sin(lam * np.asarray(x)) - slope * np.asarray(x)
    if name == "emgf":
        lam = float(params["lam"])
        level = math.exp(0.5 * lam * lam)
        return lambda x: np.exp(lam * np.asarray(x)) - level * (1.0 + lam * np.asarray(x))
    if name == "mom_hermite":
        top = int(params["i"]) + 1
        scale = 1.0 / math.sqrt(math.factorial(top))
        return lambda x: scale * hermite_eval(top, np.asarray(x, dtype=float))
    if name == "gauss_density_mod":
        s2 = float(params["sigma2"])
        norm = 1.0 / math.sqrt(2.0 * math.pi * s2)
        shift = 1.0 / math.sqrt(2.0 * math.pi * (s2 + 1.0))
        return lambda x: norm * np.exp(-np.square(x) / (2.0 * s2)) - shift
    if name == "gauss_cdf_mod":
        from scipy.special import ndtr

        s2 = float(params["sigma2"])
        sd = math.sqrt(s2)
        slope = 1.0 / math.sqrt(2.0 * math.pi * (s2 + 1.0))
        return lambda x: ndtr(np.asarray(x) / sd) - 0.5 - slope * np.asarray(x)
    raise ValueError(f"unknown catalog entry {name!r}")


def manual_expansion(coeffs: dict[int, float] | Sequence[float]) -> HermiteExpansion:
    """Finite expansion from explicit coefficients ``{q: a_q}`` or a dense list."""
    if not isinstance(coeffs, dict):
        coeffs = {q: float(a) for q, a in enumerate(coeffs)}
    if not coeffs:
        raise ValueError("empty coefficient set")
    top = max(int(q) for q in coeffs)
    log_abs, sign = _empty(top)
    for q, a in coeffs.items():
        if q < 0:
            raise ValueError("negative Hermite index")
        if a != 0:
            log_abs[q] = math.log(abs(a))
            sign[q] = math.copysign(1.0, a)
    nz = np.nonzero(sign)[0]
    support = int(nz.max()) if nz.size else 0
    return HermiteExpansion(log_abs=log_abs, sign=sign, source="manual", support_max=support)


# --------------------------------------------------------------------------
# quadrature
# --------------------------------------------------------------------------


@lru_cache(maxsize=16)
def _gauss_nodes(nodes: int):
    t, w = phys_hermite.hermgauss(nodes)
    # x = sqrt(2) t maps the physicists' weight e^{-t^2} to the standard Gaussian
    return math.sqrt(2.0) * t, np.sqrt(w / math.sqrt(math.pi))


def _normalized_coefficients(phi, q_max: int, nodes: int) -> np.ndarray:
    x, root_w = _gauss_nodes(nodes)
    live = root_w > 0
    with np.errstate(over="ignore", invalid="ignore"):
        values = np.where(live, np.asarray(phi(x), dtype=float), 0.0)
    if not np.all(np.isfinite(values[live])):
        raise QuadratureError("function is not finite at quadrature nodes", np.array([]), np.array([]))
    table = normalized_hermite_table(q_max, x, weight_root=root_w)
    return table @ (root_w * values)


def coefficients_quadrature(
    phi: Callable[[np.ndarray], np.ndarray],
    q_max: int,
    nodes: int | None = None,
    max_nodes: int = 1024,
    rtol: float = 1e-8,
) -> HermiteExpansion:
    """Hermite coefficients ``a_q = E[phi(G) H_q(G)] / q!`` by Gauss–Hermite quadrature.

    The node count doubles until successive normalized coefficient vectors
    agree to ``rtol`` relative to their scale. Coefficients below
    ``1e-10 * max|a_q|`` are treated as exact zeros.

    Raises
    ------
    QuadratureError
        When doubling stops converging before ``max_nodes``.
    """
    if q_max < 0:
        raise ValueError("q_max must be >= 0")
    count = max(2 * q_max, 16) if nodes is None else int(nodes)
    if count < 2 * q_max:
        raise ValueError("nodes must be at least 2 * q_max")
    previous = _normalized_coefficients(phi, q_max, count)
    while True:
        count *= 2
        if count > max_nodes:
            raise QuadratureError(
                f"node doubling did not reach relative change {rtol:g} within {max_nodes} nodes",
                previous,
                latest,
            )
        latest = _normalized_coefficients(phi, q_max, count)
        scale = max(1.0, float(np.max(np.abs(latest))))
        if np.max(np.abs(latest - previous)) <= rtol * scale:
            break
        previous = latest
    q = np.arange(q_max + 1)
    a = latest / np.exp(0.5 * gammaln(q + 1.0))
    peak = float(np.max(np.abs(a))) if a.size else 0.0
    keep = np.abs(a) > RANK_TOL * peak
    log_abs = np.full(q_max + 1, -np.inf)
    log_abs[keep] = np.log(np.abs(a[keep]))
    sign = np.where(keep, np.sign(a), 0.0)
    return HermiteExpansion(log_abs=log_abs, sign=sign, source="quadrature")


def hermite_rank(expansion: HermiteExpansion, tol: float = RANK_TOL) -> int:
    """Smallest ``q`` with ``|a_q| > tol * max|a_q|``.

    Raises
    ------
    ValueError
        If every coefficient is zero.
    """
    nz = np.nonzero(expansion.sign)[0]
    if nz.size == 0:
        raise ValueError("all-zero expansion has no Hermite rank")
    logs = expansion.log_abs[nz]
    cutoff = float(np.max(logs)) + math.log(tol)
    return int(nz[np.argmax(logs > cutoff)])


# --------------------------------------------------------------------------
# decay parameters
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ThetaParams:
    """Decay parameters ``|a_q| <= c e^{kappa q} / (q!)^beta`` with admissibility flags.

    ``log_c`` carries the constant in log space so that constants below
    the double-precision range (``c = e^{-lambda^2/2}`` at large
    ``lambda``) stay exact; ``c`` is its exponential.
    """

    beta: float
    kappa: float
    c: float
    admissible_dR: bool
    admissible_dC: bool
    log_c: float | None = None

    def __post_init__(self):
        if self.log_c is None:
            object.__setattr__(self, "log_c", math.log(self.c))

    @classmethod
    def of(cls, beta: float, kappa: float, c: float | None = None, log_c: float | None = None) -> "ThetaParams":
        if not 0.5 <= beta <= 1.0:
            raise ValueError("beta must lie in [1/2, 1]")
        if log_c is None:
            if c is None or not c > 0:
                raise ValueError("c must be > 0")
            log_c = math.log(c)
        if not math.isfinite(log_c):
            raise ValueError("log c must be finite")
        high = beta > 0.5
        return cls(
            beta=float(beta),
            kappa=float(kappa),
            c=math.exp(log_c) if c is None else float(c),
            admissible_dR=bool(high or kappa < upsilon()),
            admissible_dC=bool(high or kappa < -HALF_LOG3),
            log_c=float(log_c),
        )

    def log_bound(self, q) -> np.ndarray:
        """``log c + kappa q - beta log q!``."""
        q = np.asarray(q, dtype=float)
        return self.log_c + self.kappa * q - self.beta * gammaln(q + 1.0)

    def bound(self, q) -> np.ndarray:
        """Envelope ``c e^{kappa q} / (q!)^beta``."""
        return np.exp(self.log_bound(q))

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "kappa": self.kappa,
            "c": self.c,
            "log_c": self.log_c,
            "admissible_dR": self.admissible_dR,
            "admissible_dC": self.admissible_dC,
        }


def _as_list(expansions) -> list[HermiteExpansion]:
    if isinstance(expansions, HermiteExpansion):
        return [expansions]
    return list(expansions)


def certify_theta(theta: ThetaParams, expansions) -> bool:
    """True when ``log|a_q| <= log c + kappa q - beta log q!`` for every computed ``q >= 2``.

    The comparison runs in log space, the representation in which both the
    coefficients and the constant are stored.
    """
    for e in _as_list(expansions):
        q = np.arange(2, e.q_max + 1)
        if q.size == 0:
            continue
        if np.any(e.log_abs[2:] > theta.log_bound(q)):
            return False
    return True


def _pooled_log_coefficients(expansions: list[HermiteExpansion]):
    top = max(e.q_max for e in expansions)
    pooled = np.full(top + 1, -np.inf)
    for e in expansions:
        pooled[: e.q_max + 1] = np.maximum(pooled[: e.q_max + 1], e.log_abs)
    q = np.arange(top + 1)
    keep = (q >= 2) & np.isfinite(pooled)
    return q[keep].astype(float), pooled[keep]


# a tail-slope growth rate above this (per unit log q) marks super-exponential growth
_GROWTH_TOL = 0.05


def _fit_one_beta(q: np.ndarray, logs: np.ndarray, beta: float):
    y = logs + beta * gammaln(q + 1.0)
    if q.size == 1:
        return True, 0.0
    slopes = np.diff(y) / np.diff(q)
    mids = 0.5 * (q[1:] + q[:-1])
    tail = slice(slopes.size // 2, None) if slopes.size >= 4 else slice(0, None)
    s, m = slopes[tail], mids[tail]
    growth = 0.0
    if s.size >= 2:
        growth = float(np.polyfit(np.log(m), s, 1)[0])
    if growth > _GROWTH_TOL:
        return False, float(s[-1])
    kappa = float(np.max(s))
    if s.size >= 3:
        # extrapolate s = kappa_inf + b / q to catch slopes still rising
        design = np.column_stack([np.ones_like(m), 1.0 / m])
        coef, *_ = np.linalg.lstsq(design, s, rcond=None)
        if coef[0] > kappa and coef[0] - kappa < 1.0:
            kappa = float(coef[0])
    return True, kappa


def _minimal_log_c(expansions, beta: float, kappa: float) -> float:
    q_all, logs = _pooled_log_coefficients(expansions)
    log_c = float(np.max(logs - kappa * q_all + beta * gammaln(q_all + 1.0)))
    for _ in range(64):
        if certify_theta(ThetaParams.of(beta, kappa, log_c=log_c), expansions):
            return log_c
        log_c = float(np.nextafter(log_c, np.inf)) + 4e-16 * max(1.0, abs(log_c))
    raise RuntimeError("could not certify the fitted decay parameters")


def fit_theta(expansions, beta_grid: Iterable[float] = DEFAULT_BETA_GRID) -> ThetaParams:
    """Fit ``(beta, kappa, c)`` certifying the decay of all coordinates.

    For each ``beta`` on the grid the log-envelope
    ``y_q = max_i log|a_{i,q}| + beta log q!`` is formed over the computed
    ``q >= 2``. A ``beta`` whose envelope keeps steepening (slopes growing
    like a positive multiple of ``log q``) is rejected. Otherwise ``kappa``
    is the asymptotic slope of ``y`` (largest tail slope or its
    extrapolation) and ``c`` is the smallest constant making the bound hold
    at every computed ``q``. Among accepted values the one admissible for
    more distances wins, then the larger ``beta``, then the smaller ``kappa``.

    Raises
    ------
    ValueError
        If no coefficient beyond ``q = 1`` is nonzero.
    """
    expansions = _as_list(expansions)
    q, logs = _pooled_log_coefficients(expansions)
    if q.size == 0:
        raise ValueError("no nonzero Hermite coefficient beyond q = 1")
    best = None
    best_key = None
    for beta in beta_grid:
        ok, kappa = _fit_one_beta(q, logs, float(beta))
        if not ok:
            continue
        log_c = _minimal_log_c(expansions, float(beta), kappa)
        theta = ThetaParams.of(float(beta), kappa, log_c=log_c)
        key = (int(theta.admissible_dR) + int(theta.admissible_dC), theta.beta, -theta.kappa)
        if best_key is None or key > best_key:
            best, best_key = theta, key
    if best is None:
        raise ValueError("no beta on the grid yields a convergent envelope")
    return best


def reference_theta(name: str, params: dict, q_max: int = DEFAULT_Q) -> ThetaParams:
    """Decay parameters derived analytically for a catalog function.

    ``ecf_cos``/``ecf_sin``: ``(1, log lam, 1)``; ``emgf``:
    ``(1, log lam, e^{lam^2/2})``; ``mom_hermite``: ``(1/2, 0, 1)``;
    Gaussian modifications: ``(1/2, -log(sigma2 + 1)/2, c)`` with ``c`` the
    supremum of the decreasing sequence ``|a_q| sqrt(q!) (sigma2+1)^{q/2}``,
    attained at the first nonzero index.
    """
    if name in ("ecf_cos", "ecf_sin"):
        return ThetaParams.of(1.0, math.log(float(params["lam"])), 1.0)
    if name == "emgf":
        lam = float(params["lam"])
        return ThetaParams.of(1.0, math.log(lam), math.exp(0.5 * lam * lam))
    if name == "mom_hermite":
        return ThetaParams.of(0.5, 0.0, 1.0)
    if name in ("gauss_density_mod", "gauss_cdf_mod"):
        kappa = -0.5 * math.log(float(params["sigma2"]) + 1.0)
        e = catalog_expansion(name, params, q_max)
        first = hermite_rank(e)
        log_c = float(e.log_abs[first] + 0.5 * gammaln(first + 1.0) - kappa * first)
        return ThetaParams.of(0.5, kappa, log_c=log_c)
    raise ValueError(f"unknown catalog entry {name!r}")
