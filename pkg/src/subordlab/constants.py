"""Scalar constants and helper functions shared by the bound formulas."""

from __future__ import annotations

import math
from functools import lru_cache

__all__ = [
    "lambert_w",
    "upsilon",
    "log_plus",
    "r_constant",
    "log_r_constant",
    "HALF_LOG3",
    "LOG24_HALF",
    "FIVE_OVER_4E",
]

HALF_LOG3 = 0.5 * math.log(3.0)
LOG24_HALF = 0.5 * math.log(24.0)
FIVE_OVER_4E = 5.0 / (4.0 * math.e)
_INV_E = math.exp(-1.0)


def lambert_w(x: float, tol: float = 1e-15, max_iter: int = 100) -> float:
    """Principal branch of the Lambert W function by Halley iteration.

    Parameters
    ----------
    x : float
        Argument, ``x >= -1/e``.

    Returns
    -------
    float
        ``w`` with ``w * exp(w) == x`` and ``w >= -1``.

    Examples
    --------
    >>> lambert_w(0.0)
    0.0
    >>> round(lambert_w(math.e), 12)
    1.0
    """
    x = float(x)
    if math.isnan(x) or x < -_INV_E - 4e-16:
        raise ValueError("lambert_w requires x >= -1/e")
    if x <= -_INV_E:
        return -1.0
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return math.inf
    # branch-point series, moderate range, then asymptotic start
    if x < -0.25:
        p = math.sqrt(2.0 * (math.e * x + 1.0))
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p**3
    elif x < 3.0:
        w = math.log1p(x)
        w = w * (1.0 - math.log1p(w) / (2.0 + w))
    else:
        l1 = math.log(x)
        l2 = math.log(l1)
        w = l1 - l2 + l2 / l1
    for _ in range(max_iter):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w_next = w - step
        if abs(w_next - w) <= tol * (1.0 + abs(w_next)):
            w = w_next
            break
        w = w_next
    return w


@lru_cache(maxsize=None)
def upsilon() -> float:
    """The constant ``log(W(e^{-1+1/(2e)}) / e^{1/(2e)}) / 2 - log(24)/2 - 5/(4e)``, about -2.709."""
    half_inv_e = 1.0 / (2.0 * math.e)
    w = lambert_w(math.exp(-1.0 + half_inv_e))
    return 0.5 * (math.log(w) - half_inv_e) - LOG24_HALF - FIVE_OVER_4E


def log_plus(x: float) -> float:
    """``|log x|`` floored at one, for ``x > 0``."""
    x = float(x)
    if not x > 0:
        raise ValueError("log_plus requires x > 0")
    return max(abs(math.log(x)), 1.0)


def _check_beta(beta: float) -> None:
    if not 0.5 <= beta <= 1.0:
        raise ValueError("beta must lie in [1/2, 1]")


def log_r_constant(beta: float, kappa: float) -> float:
    """Natural log of :func:`r_constant`."""
    _check_beta(beta)
    return (
        math.log(2.0)
        + 1.0 / (2.0 * math.e)
        + math.log(beta)
        + (kappa + LOG24_HALF + FIVE_OVER_4E) / beta
        + math.log(2.0) / (2.0 * beta)
    )


def r_constant(beta: float, kappa: float) -> float:
    """Dimension exponent ``2 e^{1/(2e)} beta e^{(kappa + log(24)/2 + 5/(4e))/beta} 2^{1/(2 beta)}``."""
    return math.exp(log_r_constant(beta, kappa))
