"""Berry–Esseen bound formulas for subordinated Gaussian statistics.

Every formula is evaluated in log space: the dimension factor ``psi`` can
exceed ``e^700`` long before the other factors become small. Reports carry
both ``log_value`` and ``value`` (``inf`` on overflow). The universal
constant is unknown; it enters as a user-supplied ``scale`` (default 1), so
no value here is a certified bound.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .autocovariance import AutocovarianceModel, tail_sum, truncated_norm, weighted_partial_sum
from .constants import (
    FIVE_OVER_4E,
    HALF_LOG3,
    LOG24_HALF,
    lambert_w,
    log_plus,
    r_constant,
    upsilon,
)
from .covariance import jacobi_eigenvalues
from .hermite import ThetaParams

__all__ = [
    "BoundReport",
    "Admissibility",
    "DISTANCES",
    "lambert_w",
    "upsilon",
    "log_plus",
    "r_constant",
    "psi",
    "log_psi",
    "log_psi_from_log_d",
    "sigma_factor",
    "bound_main",
    "bound_fixed_cov",
    "bound_srd_lrd",
    "bound_mom",
    "finite_expansion_delta",
    "finite_expansion_psi",
    "bound_finite_expansion",
    "admissibility",
    "MOM_EXPONENT",
    "MOM_PRIOR_EXPONENT",
]

DISTANCES = ("dR", "dC", "dW")
MOM_EXPONENT = math.log(3.0)
MOM_PRIOR_EXPONENT = 1.5 * math.log(2.0)
_LOG_MAX = math.log(np.finfo(float).max)
_HALF_INV_E = 1.0 / (2.0 * math.e)
_NOT_CERTIFIED = "scale C is user-supplied; the value is not a certified bound"


def _check_distance(distance: str, allowed=DISTANCES) -> None:
    if distance not in allowed:
        raise ValueError(f"distance must be one of {allowed}, got {distance!r}")


def _log_plus_of_log(log_x: float) -> float:
    """``log_plus(x)`` from ``log x``."""
    return max(abs(log_x), 1.0)


def _log_x(n: int, rho_norm_1: float) -> float:
    """``log(n^{-1/2} ||rho_n||_1^{3/2})``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not rho_norm_1 > 0:
        raise ValueError("rho_norm_1 must be > 0")
    return 1.5 * math.log(rho_norm_1) - 0.5 * math.log(n)


@dataclass
class BoundReport:
    """One evaluated bound.

    Attributes
    ----------
    distance : str
        ``dR``, ``dC`` or ``dW``.
    formula_id : str
        Which bound was evaluated (``main``, ``fixed_covariance``, ``srd``,
        ``lrd``, ``method_of_moments``, ``finite_expansion``).
    value : float
        ``exp(log_value)``; ``inf`` when it overflows.
    log_value : float
        Natural log of the value.
    admissible : bool
        Whether the decay parameters meet the formula's hypotheses.
    inputs : dict
        Echo of the inputs and intermediate factors.
    scale_C : float
        The user-supplied constant.
    notes : list of str
    """

    distance: str
    formula_id: str
    value: float
    log_value: float
    admissible: bool
    inputs: dict
    scale_C: float
    notes: list = field(default_factory=list)

    @property
    def certified(self) -> bool:
        """Always ``False``: the universal constant is unknown."""
        return False

    def to_dict(self) -> dict:
        return {
            "distance": self.distance,
            "formula_id": self.formula_id,
            "value": self.value if math.isfinite(self.value) else None,
            "log_value": self.log_value,
            "admissible": self.admissible,
            "inputs": self.inputs,
            "scale_C": self.scale_C,
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _report(distance, formula_id, log_value, admissible, inputs, scale, theta=None, c_multiplier=False, notes=()):
    if not scale > 0:
        raise ValueError("scale must be > 0")
    log_value = float(log_value) + math.log(scale)
    notes = [_NOT_CERTIFIED] + list(notes)
    if c_multiplier:
        if theta is None:
            raise ValueError("the constant multiplier needs theta")
        # C ~ c^2 log_plus(c) for dR, c^2 otherwise
        extra = 2.0 * theta.log_c
        if distance == "dR":
            extra += math.log(_log_plus_of_log(theta.log_c))
        log_value += extra
        inputs = dict(inputs, c_multiplier_log=extra)
        notes.append("scale multiplied by the decay-constant factor")
    if not admissible:
        notes.append("theta outside the admissible range; value shown for exploration only")
    value = math.exp(log_value) if log_value < _LOG_MAX else math.inf
    if theta is not None:
        inputs = dict(inputs, theta=theta.to_dict())
    return BoundReport(distance, formula_id, value, log_value, bool(admissible), inputs, float(scale), notes)


def _admissible_for(theta: ThetaParams | None, distance: str) -> bool:
    if theta is None:
        return True
    return theta.admissible_dR if distance == "dR" else theta.admissible_dC


# --------------------------------------------------------------------------
# dimension factor
# --------------------------------------------------------------------------


def log_psi(beta: float, kappa: float, d: int) -> float:
    """``log psi``, where ``psi(d) = L e^{r L}`` with ``L = log_plus(d)^{1/(2 beta)}``.

    Examples
    --------
    >>> round(log_psi(1.0, 0.0, 1), 6)  # psi(1) = e^r
    26.378168
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    return log_psi_from_log_d(beta, kappa, math.log(d))


def log_psi_from_log_d(beta: float, kappa: float, log_d: float) -> float:
    """:func:`log_psi` taking ``log d``, for dimensions beyond float range."""
    if not log_d >= 0:
        raise ValueError("log_d must be >= 0")
    ell = max(log_d, 1.0) ** (1.0 / (2.0 * beta))
    return math.log(ell) + r_constant(beta, kappa) * ell


def psi(beta: float, kappa: float, d: int) -> float:
    """Dimension factor ``log_plus(d)^{1/(2beta)} exp(r log_plus(d)^{1/(2beta)})``; ``inf`` on overflow."""
    lv = log_psi(beta, kappa, d)
    return math.exp(lv) if lv < _LOG_MAX else math.inf


def _sigma_conventions(d: int, sigma_star_sq: float, sigma_min_sq: float, sigma_max_sq: float):
    """Underline, overline and starred sigma with the ``d <= 2`` conventions."""
    lo = math.sqrt(sigma_min_sq)
    hi = math.sqrt(sigma_max_sq)
    if d <= 2:
        return min(lo, 1.0), max(hi, 1.0), min(sigma_star_sq, 1.0)
    return lo, hi, sigma_star_sq


def sigma_factor(d: int, sigma_star_sq: float, sigma_min_sq: float = 1.0, sigma_max_sq: float = 1.0) -> float:
    """``log_plus(sigma_hi s / sigma_lo) / s`` with ``s`` the adjusted smallest eigenvalue.

    ``sigma_min_sq`` and ``sigma_max_sq`` are the extreme diagonal entries;
    for ``d <= 2`` they are clipped to 1 from below/above and ``s`` to 1
    from above.
    """
    if not sigma_star_sq > 0 or not sigma_min_sq > 0 or not sigma_max_sq > 0:
        raise ValueError("sigma values must be > 0")
    lo, hi, s = _sigma_conventions(d, sigma_star_sq, sigma_min_sq, sigma_max_sq)
    return log_plus(hi * s / lo) / s


# --------------------------------------------------------------------------
# bounds with Sigma_n = cov(S_n)
# --------------------------------------------------------------------------


def bound_main(
    distance: str,
    n: int,
    d: int,
    rho_norm_1: float,
    sigma_star_sq: float,
    theta: ThetaParams | None = None,
    sigma_dagger: float | None = None,
    scale: float = 1.0,
    c_multiplier: bool = False,
) -> BoundReport:
    """Bound against the Gaussian with the exact covariance.

    With ``x = n^{-1/2} ||rho_n||_1^{3/2}``:

    * ``dR``: ``C psi(d) x log_plus(x) log_plus(s) / s``
    * ``dC``: ``C d^{65/24} x / s^{3/2}``
    * ``dW``: ``C d^{3/2} x sigma_dagger / s``

    where ``s`` is the smallest eigenvalue (of the correlation matrix for
    ``dR``/``dC``, of the covariance for ``dW``).

    Examples
    --------
    >>> round(bound_main("dC", 10**4, 4, 1.0, 1.0).value, 6)
    0.427149
    """
    _check_distance(distance)
    if not sigma_star_sq > 0:
        raise ValueError("sigma_star_sq must be > 0")
    if distance == "dR" and theta is None:
        raise ValueError("dR needs theta for the dimension factor")
    lx = _log_x(n, rho_norm_1)
    inputs = {"n": n, "d": d, "rho_norm_1": rho_norm_1, "sigma_star_sq": sigma_star_sq, "x": math.exp(lx)}
    if distance == "dR":
        lp = log_psi(theta.beta, theta.kappa, d)
        lv = lp + lx + math.log(_log_plus_of_log(lx)) + math.log(log_plus(sigma_star_sq)) - math.log(sigma_star_sq)
        inputs["log_psi"] = lp
    elif distance == "dC":
        lv = (65.0 / 24.0) * math.log(d) + lx - 1.5 * math.log(sigma_star_sq)
    else:
        if sigma_dagger is None:
            raise ValueError("dW needs sigma_dagger")
        if not sigma_dagger > 0:
            raise ValueError("sigma_dagger must be > 0")
        lv = 1.5 * math.log(d) + lx + math.log(sigma_dagger) - math.log(sigma_star_sq)
        inputs["sigma_dagger"] = sigma_dagger
    return _report(distance, "main", lv, _admissible_for(theta, distance), inputs, scale, theta, c_multiplier)


# --------------------------------------------------------------------------
# bounds against a fixed covariance
# --------------------------------------------------------------------------


def bound_fixed_cov(
    distance: str,
    n: int,
    d: int,
    model: AutocovarianceModel,
    m: int,
    theta: ThetaParams | None,
    sigma,
    rho_norm_1: float | None = None,
    scale: float = 1.0,
    c_multiplier: bool = False,
    tol: float = 1e-10,
) -> BoundReport:
    """Bound against a fixed covariance ``sigma`` (typically the limit).

    The rate term gains the tail ``sum_{|k|>=n} |rho(k)|^m`` and the
    weighted head ``sum_{|k|<n} (|k|/n) |rho(k)|^m``. ``sigma`` is a
    ``d x d`` matrix; its extreme diagonal entries and eigenvalues feed the
    sigma factors.
    """
    _check_distance(distance)
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != (d, d):
        raise ValueError(f"sigma must be {d}x{d}")
    if distance == "dR" and theta is None:
        raise ValueError("dR needs theta for the dimension factor")
    if rho_norm_1 is None:
        rho_norm_1 = truncated_norm(model, n, 1.0)
    eig = jacobi_eigenvalues(sigma)
    s_star = float(eig[0])
    if not s_star > 0:
        raise ValueError("sigma must be positive definite")
    diag = np.diag(sigma)
    s_min, s_max = float(diag.min()), float(diag.max())
    tail = tail_sum(model, n, m, tol)
    weighted = weighted_partial_sum(model, n, m)
    lx = _log_x(n, rho_norm_1)
    inputs = {
        "n": n,
        "d": d,
        "m": m,
        "model": model.to_config(),
        "rho_norm_1": rho_norm_1,
        "x": math.exp(lx),
        "tail": tail,
        "weighted": weighted,
        "sigma_star_sq": s_star,
        "sigma_min_sq": s_min,
        "sigma_max_sq": s_max,
    }
    extra = tail + weighted
    if distance == "dR":
        ell = log_plus(d) ** (1.0 / (2.0 * theta.beta))
        lead = lx + r_constant(theta.beta, theta.kappa) * ell - math.log(log_plus(d))
        log_delta = np.logaddexp(lead, math.log(extra)) if extra > 0 else lead
        lo, hi, s = _sigma_conventions(d, s_star, s_min, s_max)
        lv = (
            math.log(log_plus(d))
            + log_delta
            + math.log(_log_plus_of_log(log_delta))
            + math.log(log_plus(hi * s / lo))
            - math.log(s)
        )
        inputs["log_delta"] = float(log_delta)
    else:
        three = math.exp(lx) + extra
        inputs["rate_terms"] = three
        if distance == "dC":
            lv = (65.0 / 24.0) * math.log(d) + math.log(three) + math.log(s_star**-1.5 + 1.0)
        else:
            s_dagger = math.sqrt(float(eig[-1]))
            inputs["sigma_dagger"] = s_dagger
            lv = 1.5 * math.log(d) + math.log(three) + math.log(s_dagger) - math.log(s_star)
    return _report(distance, "fixed_covariance", lv, _admissible_for(theta, distance), inputs, scale, theta, c_multiplier)


def bound_srd_lrd(
    case: str,
    distance: str,
    n: int,
    d: int,
    mu: float,
    theta: ThetaParams | None,
    sigma_star_sq: float,
    sigma_min_sq: float = 1.0,
    sigma_max_sq: float = 1.0,
    sigma_dagger: float | None = None,
    scale: float = 1.0,
    c_multiplier: bool = False,
) -> BoundReport:
    """Reduced fixed-covariance bounds under short- or long-range dependence.

    The slowly varying factor is taken as 1, and the norm of ``rho`` and
    ``mu`` are folded into the scale. The rate factor is
    ``log_plus(n)/sqrt(n)`` (``SRD``, ``dR``), ``n^{-1/2}`` (``SRD``,
    ``dC``/``dW``), ``y log_plus(y)`` (``LRD``, ``dR``) or ``y``
    (``LRD``, ``dC``/``dW``) with ``y = n^{-(3 mu - 2)/2}``.
    """
    _check_distance(distance)
    if case not in ("SRD", "LRD"):
        raise ValueError("case must be 'SRD' or 'LRD'")
    if case == "SRD" and not mu >= 1.0:
        raise ValueError("SRD needs mu >= 1")
    if case == "LRD" and not 2.0 / 3.0 < mu < 1.0:
        raise ValueError("LRD needs mu in (2/3, 1)")
    if n < 1:
        raise ValueError("n must be >= 1")
    if not sigma_star_sq > 0:
        raise ValueError("sigma_star_sq must be > 0")
    if distance == "dR" and theta is None:
        raise ValueError("dR needs theta for the dimension factor")
    if case == "SRD":
        exponent = -0.5
        log_y = -0.5 * math.log(n)
        log_rate = log_y + (math.log(log_plus(n)) if distance == "dR" else 0.0)
    else:
        exponent = -(3.0 * mu - 2.0) / 2.0
        log_y = exponent * math.log(n)
        log_rate = log_y + (math.log(_log_plus_of_log(log_y)) if distance == "dR" else 0.0)
    inputs = {
        "case": case,
        "n": n,
        "d": d,
        "mu": mu,
        "rate_exponent": exponent,
        "rate_factor": math.exp(log_rate),
        "sigma_star_sq": sigma_star_sq,
    }
    if distance == "dR":
        sf = sigma_factor(d, sigma_star_sq, sigma_min_sq, sigma_max_sq)
        lp = log_psi(theta.beta, theta.kappa, d)
        inputs.update(sigma_factor=sf, log_psi=lp)
        lv = lp + log_rate + math.log(sf)
    elif distance == "dC":
        lv = (65.0 / 24.0) * math.log(d) + log_rate + math.log(sigma_star_sq**-1.5 + 1.0)
    else:
        if sigma_dagger is None or not sigma_dagger > 0:
            raise ValueError("dW needs sigma_dagger > 0")
        inputs["sigma_dagger"] = sigma_dagger
        lv = 1.5 * math.log(d) + log_rate + math.log(sigma_dagger) - math.log(sigma_star_sq)
    notes = ["slowly varying factor taken as 1; norm of rho and mu folded into the scale"]
    return _report(
        distance, case.lower(), lv, _admissible_for(theta, distance), inputs, scale, theta, c_multiplier, notes
    )


# --------------------------------------------------------------------------
# method of moments and finite expansions
# --------------------------------------------------------------------------


def bound_mom(n: int, d: int, rho_norm_1: float = 1.0, scale: float = 1.0) -> BoundReport:
    """Method-of-moments bound ``C d^{125/24} 3^d n^{-1/2} ||rho_n||_1^{3/2}``.

    The report also carries the growth exponent ``log 3`` next to the
    ``3 log(2) / 2`` exponent of the earlier Wiener-chaos bound.

    Examples
    --------
    >>> round(bound_mom(10**4, 2).value, 5)
    3.32742
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    lx = _log_x(n, rho_norm_1)
    lv = (125.0 / 24.0) * math.log(d) + MOM_EXPONENT * d + lx
    inputs = {
        "n": n,
        "d": d,
        "rho_norm_1": rho_norm_1,
        "x": math.exp(lx),
        "exponent_in_d": MOM_EXPONENT,
        "prior_exponent_in_d": MOM_PRIOR_EXPONENT,
    }
    return _report("dC", "method_of_moments", lv, True, inputs, scale)


def _check_finite_theta(theta: ThetaParams, N: int) -> None:
    if N < 2:
        raise ValueError("N must be >= 2")
    if theta.beta == 0.5 and theta.kappa > 0:
        raise ValueError("beta = 1/2 needs kappa <= 0")


def _half_log3_case(kappa: float) -> str:
    # exact comparisons; the caller passes -log(3)/2 for the boundary case
    if kappa < -HALF_LOG3:
        return "below"
    if kappa == -HALF_LOG3:
        return "boundary"
    return "above"


def finite_expansion_delta(d: int, n: int, N: int, theta: ThetaParams, rho_norm_1: float = 1.0) -> dict:
    """Rate term for functions with Hermite support in ``q <= N``.

    ``x (2e log(2d^2 - 1 + e^{N-2}) / (N-1))^{N-1}``, times
    ``N^{7/2} e^{N(2 kappa + log 3)}`` when ``beta = 1/2`` and
    ``kappa >= -log(3)/2``. Returns the logs of each factor.
    """
    _check_finite_theta(theta, N)
    lx = _log_x(n, rho_norm_1)
    inner = math.log(2.0 * d * d - 1.0 + math.exp(N - 2))
    log_power = (N - 1) * math.log(2.0 * math.e * inner / (N - 1))
    if theta.beta == 0.5 and _half_log3_case(theta.kappa) != "below":
        log_growth = 3.5 * math.log(N) + N * (2.0 * theta.kappa + math.log(3.0))
    else:
        log_growth = 0.0
    return {
        "log_x": lx,
        "log_power_factor": log_power,
        "power_factor": math.exp(log_power),
        "log_growth_factor": log_growth,
        "log_delta": lx + log_power + log_growth,
    }


def finite_expansion_psi(N: int, theta: ThetaParams) -> float:
    """``Psi(N, beta)``: 1, the boundary product of sums, or ``N^{5/2} e^{(2 kappa + log 3) N}``.

    Examples
    --------
    >>> t = ThetaParams.of(0.5, -HALF_LOG3, 1.0)
    >>> round(finite_expansion_psi(3, t), 3)
    4.041
    """
    _check_finite_theta(theta, N)
    if theta.beta > 0.5:
        return 1.0
    case = _half_log3_case(theta.kappa)
    if case == "below":
        return 1.0
    if case == "boundary":
        q = np.arange(2, N + 1, dtype=float)
        return float(np.sqrt(q).sum() * (1.0 / np.sqrt(q)).sum())
    return N**2.5 * math.exp((2.0 * theta.kappa + math.log(3.0)) * N)


def bound_finite_expansion(
    distance: str,
    n: int,
    d: int,
    N: int,
    theta: ThetaParams,
    rho_norm_1: float,
    sigma_star_sq: float,
    scale: float = 1.0,
    c_multiplier: bool = False,
) -> BoundReport:
    """Bounds for coordinate functions with finite Hermite expansions.

    * ``dR``: ``C log_plus(d) D log_plus(D) log_plus(s) / s`` with ``D``
      from :func:`finite_expansion_delta`.
    * ``dC``: ``C d^{65/24} Psi(N, beta) x / s^{3/2}``.
    """
    _check_distance(distance, ("dR", "dC"))
    if not sigma_star_sq > 0:
        raise ValueError("sigma_star_sq must be > 0")
    parts = finite_expansion_delta(d, n, N, theta, rho_norm_1)
    inputs = {"n": n, "d": d, "N": N, "rho_norm_1": rho_norm_1, "sigma_star_sq": sigma_star_sq}
    inputs.update(parts)
    if distance == "dR":
        ld = parts["log_delta"]
        lv = (
            math.log(log_plus(d))
            + ld
            + math.log(_log_plus_of_log(ld))
            + math.log(log_plus(sigma_star_sq))
            - math.log(sigma_star_sq)
        )
    else:
        big_psi = finite_expansion_psi(N, theta)
        inputs["psi_factor"] = big_psi
        lv = (65.0 / 24.0) * math.log(d) + math.log(big_psi) + parts["log_x"] - 1.5 * math.log(sigma_star_sq)
    # kappa <= 0 at beta = 1/2 is all this bound needs
    return _report(distance, "finite_expansion", lv, True, inputs, scale, theta, c_multiplier)


# --------------------------------------------------------------------------
# admissibility
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Admissibility:
    """Outcome of an admissibility check with the binding thresholds.

    ``kappa_threshold`` is the strict upper limit on ``kappa`` (``None``
    when ``beta > 1/2`` leaves ``kappa`` free); ``lambda_threshold`` is the
    strict upper limit on the growth exponent of ``d(n) <= n^lambda`` and
    ``zeta_interval`` the open interval containing the attained rate.
    """

    admissible: bool
    regime: str
    kappa_threshold: float | None = None
    lambda_threshold: float | None = None
    zeta_interval: tuple | None = None
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "admissible": self.admissible,
            "regime": self.regime,
            "kappa_threshold": self.kappa_threshold,
            "lambda_threshold": self.lambda_threshold,
            "zeta_interval": list(self.zeta_interval) if self.zeta_interval else None,
            "reason": self.reason,
        }


def _poly_kappa_threshold(lam: float, scale: float) -> float:
    return math.log(scale / (4.0 * math.exp(_HALF_INV_E) * lam)) / 2.0 - LOG24_HALF - FIVE_OVER_4E


def admissibility(
    theta: ThetaParams,
    regime: str,
    lam: float | None = None,
    dependence: str = "SRD",
    mu: float | None = None,
) -> Admissibility:
    """Check the decay parameters against a bound's hypotheses.

    Parameters
    ----------
    regime : str
        ``dR``, ``dC`` or ``dW`` for fixed dimension, ``dR_poly`` or
        ``dC_poly`` for a dimension growing like ``n^lam``.
    lam : float, optional
        Growth exponent, required for the polynomial regimes.
    dependence : str
        ``SRD`` or ``LRD`` for the polynomial regimes.
    mu : float, optional
        Decay exponent in ``(2/3, 1)`` for ``LRD``.

    Examples
    --------
    >>> admissibility(ThetaParams.of(0.5, -3.0, 1.0), "dR").admissible
    True
    """
    if regime in ("dR", "dC", "dW"):
        if theta.beta > 0.5:
            return Admissibility(True, regime, reason="beta > 1/2 leaves kappa free")
        limit = upsilon() if regime == "dR" else -HALF_LOG3
        ok = theta.kappa < limit
        return Admissibility(ok, regime, kappa_threshold=limit, reason=f"kappa={theta.kappa:.6g} vs {limit:.6g}")
    if regime not in ("dR_poly", "dC_poly"):
        raise ValueError(f"unknown regime {regime!r}")
    if lam is None or not lam > 0:
        raise ValueError("polynomial regimes need lam > 0")
    if dependence == "SRD":
        factor = 1.0
        zeta = (0.0, 0.5)
    elif dependence == "LRD":
        if mu is None or not 2.0 / 3.0 < mu < 1.0:
            raise ValueError("LRD needs mu in (2/3, 1)")
        factor = 3.0 * mu - 2.0  # 1 - 3 alpha with alpha = 1 - mu
        zeta = (0.0, factor / 2.0)
    else:
        raise ValueError("dependence must be 'SRD' or 'LRD'")
    if regime == "dR_poly":
        if theta.beta > 0.5:
            return Admissibility(True, regime, zeta_interval=zeta, reason="beta > 1/2 leaves kappa free")
        limit = min(_poly_kappa_threshold(lam, factor), upsilon())
        ok = theta.kappa < limit
        return Admissibility(ok, regime, kappa_threshold=limit, zeta_interval=zeta, reason=f"kappa={theta.kappa:.6g} vs {limit:.6g}")
    lam_limit = factor * 12.0 / 65.0
    kappa_limit = None if theta.beta > 0.5 else -HALF_LOG3
    ok = lam < lam_limit and (kappa_limit is None or theta.kappa < kappa_limit)
    reason = f"lambda={lam:.6g} vs {lam_limit:.6g}"
    if kappa_limit is not None:
        reason += f"; kappa={theta.kappa:.6g} vs {kappa_limit:.6g}"
    return Admissibility(ok, regime, kappa_threshold=kappa_limit, lambda_threshold=lam_limit, zeta_interval=zeta, reason=reason)
