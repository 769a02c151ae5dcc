"""Autocovariance models of stationary Gaussian sequences and their norms.

Every model has unit variance, ``rho(0) == 1``, and is symmetric in the lag.
The slowly varying factor of power-law decay is fixed to one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import integrate

__all__ = [
    "AutocovarianceModel",
    "Dependence",
    "DivergentSeriesError",
    "SlowVariationNote",
    "rho",
    "rho_lags",
    "truncated_norm",
    "tail_sum",
    "weighted_partial_sum",
    "full_sum",
    "classify_dependence",
]

KINDS = ("iid", "ar1", "fgn", "powerlaw", "table")

# lags per vectorised chunk when summing long heads
_CHUNK = 1 << 20


class DivergentSeriesError(ValueError):
    """Raised when a lag series required by a formula does not converge."""


@dataclass(frozen=True)
class SlowVariationNote:
    """Marker: the only slowly varying factor implemented is ``L == 1``."""


@dataclass(frozen=True)
class AutocovarianceModel:
    """Parametric autocovariance of a unit-variance stationary Gaussian sequence.

    Use the named constructors (:meth:`iid`, :meth:`ar1`, :meth:`fgn`,
    :meth:`power_law`, :meth:`table`) rather than the raw initializer.

    Parameters
    ----------
    kind : str
        One of ``"iid"``, ``"ar1"``, ``"fgn"``, ``"powerlaw"``, ``"table"``.
    phi : float
        AR(1) coefficient, ``|phi| < 1``.
    hurst : float
        Hurst index of fractional Gaussian noise, in ``(0, 1)``.
    ctilde, mu : float
        Power-law scale in ``(0, 1]`` and decay exponent ``mu > 0``.
    values : tuple of float
        Table of ``rho(0), rho(1), ...`` with ``values[0] == 1``.
    """

    kind: str
    phi: float = 0.0
    hurst: float = 0.5
    ctilde: float = 1.0
    mu: float = 1.0
    values: tuple = field(default=(1.0,))

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown autocovariance kind {self.kind!r}")
        if self.kind == "ar1" and not abs(self.phi) < 1:
            raise ValueError("AR(1) requires |phi| < 1")
        if self.kind == "fgn" and not 0 < self.hurst < 1:
            raise ValueError("fGn requires H in (0, 1)")
        if self.kind == "powerlaw":
            if not 0 < self.ctilde <= 1:
                raise ValueError("power law requires ctilde in (0, 1]")
            if not self.mu > 0:
                raise ValueError("power law requires mu > 0")
        if self.kind == "table":
            vals = tuple(float(v) for v in self.values)
            if not vals or vals[0] != 1.0:
                raise ValueError("table must start with rho(0) = 1")
            if any(abs(v) > 1 for v in vals) or not all(np.isfinite(vals)):
                raise ValueError("table entries must be finite with |rho| <= 1")
            object.__setattr__(self, "values", vals)

    # constructors -----------------------------------------------------
    @classmethod
    def iid(cls) -> "AutocovarianceModel":
        return cls("iid")

    @classmethod
    def ar1(cls, phi: float) -> "AutocovarianceModel":
        return cls("ar1", phi=float(phi))

    @classmethod
    def fgn(cls, hurst: float) -> "AutocovarianceModel":
        return cls("fgn", hurst=float(hurst))

    @classmethod
    def power_law(cls, ctilde: float, mu: float) -> "AutocovarianceModel":
        return cls("powerlaw", ctilde=float(ctilde), mu=float(mu))

    @classmethod
    def table(cls, values) -> "AutocovarianceModel":
        return cls("table", values=tuple(float(v) for v in values))

    # evaluation -------------------------------------------------------
    def __call__(self, k):
        return rho_lags(self, k)

    def to_config(self) -> dict[str, Any]:
        """Serialize to a JSON-ready record ``{kind, params...}``."""
        if self.kind == "iid":
            return {"kind": "iid"}
        if self.kind == "ar1":
            return {"kind": "ar1", "phi": self.phi}
        if self.kind == "fgn":
            return {"kind": "fgn", "H": self.hurst}
        if self.kind == "powerlaw":
            return {"kind": "powerlaw", "ctilde": self.ctilde, "mu": self.mu}
        return {"kind": "table", "values": list(self.values)}

    @classmethod
    def from_config(cls, record: dict[str, Any]) -> "AutocovarianceModel":
        kind = str(record["kind"]).lower()
        if kind == "iid":
            return cls.iid()
        if kind == "ar1":
            return cls.ar1(record["phi"])
        if kind == "fgn":
            return cls.fgn(record.get("H", record.get("hurst")))
        if kind in ("powerlaw", "power_law"):
            return cls.power_law(record.get("ctilde", 1.0), record["mu"])
        if kind == "table":
            return cls.table(record["values"])
        raise ValueError(f"unknown autocovariance kind {kind!r}")

    def describe(self) -> str:
        cfg = self.to_config()
        params = ", ".join(f"{k}={v}" for k, v in cfg.items() if k not in ("kind", "values"))
        return f"{self.kind}({params})" if params else self.kind


def _gen_binom(a: float, i: int) -> float:
    out = 1.0
    for t in range(i):
        out *= (a - t) / (t + 1)
    return out


# beyond this lag the second difference cancels badly; use the even series
# rho(k) = k^{2H} sum_j binom(2H, 2j) k^{-2j}
_FGN_SERIES_FROM = 8.0
_FGN_SERIES_TERMS = 12


def _fgn_positive_lags(k, hurst: float):
    two_h = 2.0 * hurst
    k = np.asarray(k, dtype=float)
    direct = 0.5 * ((k + 1.0) ** two_h + np.abs(k - 1.0) ** two_h - 2.0 * k**two_h)
    far = k >= _FGN_SERIES_FROM
    if np.any(far):
        kf = k[far] if k.ndim else k
        inv2 = 1.0 / (kf * kf)
        acc = np.zeros_like(kf)
        power = np.ones_like(kf)
        for j in range(1, _FGN_SERIES_TERMS + 1):
            power = power * inv2
            acc = acc + _gen_binom(two_h, 2 * j) * power
        series = kf**two_h * acc
        if k.ndim:
            direct = direct.copy()
            direct[far] = series
        else:
            direct = series
    return direct


def rho_lags(model: AutocovarianceModel, k) -> np.ndarray:
    """Vectorised autocovariance at integer lags ``k`` (any sign)."""
    lag = np.abs(np.asarray(k, dtype=np.int64))
    out = np.zeros(lag.shape, dtype=float)
    zero = lag == 0
    pos = ~zero
    out[zero] = 1.0
    if not pos.any():
        return out
    kp = lag[pos].astype(float)
    if model.kind == "iid":
        pass
    elif model.kind == "ar1":
        out[pos] = model.phi ** kp
    elif model.kind == "fgn":
        if model.hurst != 0.5:
            out[pos] = _fgn_positive_lags(kp, model.hurst)
    elif model.kind == "powerlaw":
        out[pos] = model.ctilde * (1.0 + kp) ** (-model.mu)
    else:
        table = np.asarray(model.values)
        inside = lag[pos] < table.size
        vals = np.zeros(kp.shape)
        vals[inside] = table[lag[pos][inside]]
        out[pos] = vals
    return out


def rho(model: AutocovarianceModel, k: int) -> float:
    """Autocovariance at a single integer lag.

    Table models return 0 beyond their stored range.

    Examples
    --------
    >>> rho(AutocovarianceModel.ar1(0.5), 3)
    0.125
    """
    return float(rho_lags(model, np.array([int(k)]))[0])


def _positive_lag_sum(model: AutocovarianceModel, stop: int, p: float, weight_n: int | None = None) -> float:
    """Sum of ``|rho(k)|**p`` (optionally times ``k / weight_n``) for 1 <= k < stop."""
    total = 0.0
    start = 1
    while start < stop:
        end = min(stop, start + _CHUNK)
        k = np.arange(start, end)
        terms = np.abs(rho_lags(model, k)) ** p
        if weight_n is not None:
            terms = terms * (k / weight_n)
        total += float(np.sum(terms))
        start = end
    return total


def truncated_norm(model: AutocovarianceModel, n: int, p: float = 1.0) -> float:
    """``(sum_{|k|<n} |rho(k)|^p)^(1/p)``, the l^p norm of the truncated sequence."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if p < 1:
        raise ValueError("p must be >= 1")
    if model.kind == "iid" or (model.kind == "fgn" and model.hurst == 0.5):
        return 1.0
    if model.kind == "ar1":
        a = abs(model.phi) ** p
        head = a * (1.0 - a ** (n - 1)) / (1.0 - a) if a > 0 else 0.0
    elif model.kind == "table":
        stop = min(n, len(model.values))
        head = _positive_lag_sum(model, stop, p)
    else:
        head = _positive_lag_sum(model, n, p)
    return (1.0 + 2.0 * head) ** (1.0 / p)


def weighted_partial_sum(model: AutocovarianceModel, n: int, m: float) -> float:
    """``sum_{|k|<n} (|k|/n) |rho(k)|^m`` as an exact finite sum."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return 0.0
    stop = min(n, len(model.values)) if model.kind == "table" else n
    return 2.0 * _positive_lag_sum(model, stop, m, weight_n=n)


def _check_convergence(model: AutocovarianceModel, m: float) -> None:
    if model.kind == "fgn" and model.hurst > 0.5 and not m * (2.0 - 2.0 * model.hurst) > 1.0:
        raise DivergentSeriesError(
            f"sum |rho|^{m} diverges for fGn with H={model.hurst}: needs m(2-2H) > 1"
        )
    if model.kind == "fgn" and model.hurst < 0.5 and not m * (2.0 - 2.0 * model.hurst) > 1.0:
        raise DivergentSeriesError(f"sum |rho|^{m} diverges: needs m(2-2H) > 1")
    if model.kind == "powerlaw" and not m * model.mu > 1.0:
        raise DivergentSeriesError(
            f"sum |rho|^{m} diverges for power law with mu={model.mu}: needs m*mu > 1"
        )


def _tail_integral(model: AutocovarianceModel, a: float, m: float) -> float:
    """``int_a^inf |rho(x)|^m dx`` for the smooth continuation of the model."""
    if model.kind == "powerlaw":
        s = m * model.mu
        return model.ctilde**m * (1.0 + a) ** (1.0 - s) / (s - 1.0)
    return _fgn_tail_integral(a, model.hurst, m)


def _fgn_tail_integral(a: float, hurst: float, m: float) -> float:
    """``int_a^inf |rho(x)|^m dx`` for fGn with ``a`` in the series range.

    The leading power ``|c_1|^m x^{-p}`` integrates in closed form; the
    relative correction decays like ``x^{-2}`` and is integrated after the
    substitution ``x = a / t``.
    """
    if a < _FGN_SERIES_FROM:
        raise ValueError("fGn tail integral needs a in the series range")
    two_h = 2.0 * hurst
    p = m * (2.0 - two_h)
    coef = [_gen_binom(two_h, 2 * j) for j in range(1, _FGN_SERIES_TERMS + 1)]
    c1 = coef[0]
    ratios = np.array(coef[1:]) / c1
    lead = abs(c1) ** m * a ** (1.0 - p) / (p - 1.0)

    def correction(t):
        if t == 0.0:
            return 0.0
        x = a / t
        inv2 = 1.0 / (x * x)
        u = float(np.sum(ratios * inv2 ** np.arange(1, ratios.size + 1)))
        return t ** (p - 2.0) * np.expm1(m * np.log1p(u))

    corr, _ = integrate.quad(correction, 0.0, 1.0, epsabs=0.0, epsrel=1e-12, limit=200)
    return lead + abs(c1) ** m * a ** (1.0 - p) * corr


def tail_sum(model: AutocovarianceModel, n: int, m: float, tol: float = 1e-10) -> float:
    """Two-sided tail ``sum_{|k|>=n} |rho(k)|^m`` with absolute error <= ``tol``.

    Power-law and fGn tails use a direct head sum up to a cut-off ``K``
    followed by a convexity bracket of the remainder,
    ``int_{K+1}^inf f + f(K+1)/2 <= sum_{k>K} f(k) <= int_{K+1/2}^inf f``,
    doubling ``K`` until the bracket is narrower than ``tol``.

    Raises
    ------
    DivergentSeriesError
        If the lag series does not converge for this ``m``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if m < 1:
        raise ValueError("m must be >= 1")
    if model.kind == "iid" or (model.kind == "fgn" and model.hurst == 0.5):
        return 0.0
    if model.kind == "ar1":
        a = abs(model.phi) ** m
        return 2.0 * a**n / (1.0 - a) if a > 0 else 0.0
    if model.kind == "table":
        size = len(model.values)
        if n >= size:
            return 0.0
        k = np.arange(n, size)
        return 2.0 * float(np.sum(np.abs(rho_lags(model, k)) ** m))
    _check_convergence(model, m)

    cutoff = max(n + 64, 256)
    while True:
        k = np.arange(cutoff - 2, cutoff + 3, dtype=float)
        f = np.abs(rho_lags(model, k.astype(np.int64))) ** m
        second = f[:-2] - 2.0 * f[1:-1] + f[2:]
        convex = bool(np.all(second >= -1e-300)) and bool(np.all(np.diff(f) <= 0))
        if convex:
            f_next = float(np.abs(rho(model, cutoff + 1)) ** m)
            lower = _tail_integral(model, cutoff + 1.0, m) + 0.5 * f_next
            upper = _tail_integral(model, cutoff + 0.5, m)
            # two-sided, so the bracket width doubles
            if 2.0 * max(upper - lower, 0.0) <= tol or cutoff > (1 << 34):
                break
        cutoff *= 2
    head = _positive_lag_sum(model, cutoff + 1, m) - _positive_lag_sum(model, n, m)
    return 2.0 * (head + 0.5 * (lower + upper))


def full_sum(model: AutocovarianceModel, power: int, tol: float = 1e-12) -> float:
    """Signed lag sum ``sum_{k in Z} rho(k)^power`` over all integers."""
    if power < 1:
        raise ValueError("power must be >= 1")
    if model.kind == "iid" or (model.kind == "fgn" and model.hurst == 0.5):
        return 1.0
    if model.kind == "ar1":
        a = model.phi**power
        return 1.0 + 2.0 * a / (1.0 - a)
    if model.kind == "table":
        vals = np.asarray(model.values[1:])
        return 1.0 + 2.0 * float(np.sum(vals**power))
    if model.kind == "fgn" and model.hurst < 0.5:
        # lags >= 1 are all negative for H < 1/2
        sign = -1.0 if power % 2 else 1.0
        return 1.0 + sign * tail_sum(model, 1, power, tol)
    return 1.0 + tail_sum(model, 1, power, tol)


@dataclass(frozen=True)
class Dependence:
    """Dependence regime: ``"SRD"``, ``"LRD"`` or ``"Unknown"`` with decay exponent."""

    regime: str
    mu: float | None = None


def classify_dependence(model: AutocovarianceModel) -> Dependence:
    """Route a model to the short- or long-range dependence regime.

    Long-range dependence is recognised for ``mu in (2/3, 1)``; slower decay
    falls outside both regimes and is reported as unknown.
    """
    if model.kind in ("iid", "ar1", "table"):
        return Dependence("SRD", float("inf"))
    if model.kind == "fgn":
        if model.hurst == 0.5:
            return Dependence("SRD", float("inf"))
        mu = 2.0 - 2.0 * model.hurst
        if model.hurst < 0.5:
            return Dependence("SRD", mu)
        if mu > 2.0 / 3.0:
            return Dependence("LRD", mu)
        return Dependence("Unknown", mu)
    if model.mu >= 1.0:
        return Dependence("SRD", model.mu)
    if model.mu > 2.0 / 3.0:
        return Dependence("LRD", model.mu)
    return Dependence("Unknown", model.mu)
