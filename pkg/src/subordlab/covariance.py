"""Exact covariance of subordinated statistics, eigenvalue certificates and correlation criteria.

The covariance of two coordinates follows from Mehler's identity
``E[H_q(X) H_l(Y)] = delta_{ql} q! rho^q``:

``Cov(S_i, S_j) = sum_l b_{i,l} b_{j,l} sum_{|k|<n} (1 - |k|/n) rho(k)^l``

with normalized coefficients ``b_l = sqrt(l!) a_l``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .autocovariance import AutocovarianceModel, full_sum, rho_lags, tail_sum, truncated_norm
from .hermite import ThetaParams, fit_theta
from .statistics import SubordinatedStatistic, block_bounds

__all__ = [
    "CovarianceReport",
    "TruncationError",
    "jacobi_eigenvalues",
    "gershgorin_lower",
    "correlation",
    "exact_cov",
    "limiting_cov",
    "cov_discrepancy",
    "covariance_report",
    "zeta_tau",
    "fgn_rho_decay_bound",
    "fgn_l2_bound",
    "fgn_analytic_bound",
    "l2_criterion",
    "prop27_fgn_check",
]

JACOBI_TOL = 1e-12
PSD_TOL = 1e-10
Q_HARD_CAP = 16384


class TruncationError(ValueError):
    """Raised when the decay majorant cannot bound the Mehler series tail."""


# --------------------------------------------------------------------------
# eigenvalues
# --------------------------------------------------------------------------


def jacobi_eigenvalues(a, tol: float = JACOBI_TOL, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by the cyclic Jacobi method, ascending.

    Sweeps continue until the off-diagonal Frobenius norm is at most
    ``tol`` times the Frobenius norm of the matrix.

    Examples
    --------
    >>> jacobi_eigenvalues([[1.0, 0.3], [0.3, 1.0]]).round(12).tolist()
    [0.7, 1.3]
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("square matrix required")
    if not np.allclose(a, a.T, rtol=0, atol=1e-12 * max(1.0, float(np.abs(a).max(initial=0.0)))):
        raise ValueError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    d = a.shape[0]
    scale = float(np.linalg.norm(a))
    if d == 1 or scale == 0.0:
        return np.sort(np.diag(a))
    upper = np.triu_indices(d, 1)
    for _ in range(max_sweeps):
        # summed directly; the difference of squared norms cancels below sqrt(eps)
        off = math.sqrt(2.0) * float(np.linalg.norm(a[upper]))
        if off <= tol * scale:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(apq) < 1e-150 * abs(diff):
                    t = apq / diff
                else:
                    theta = diff / (2.0 * apq)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                a[p, q] = a[q, p] = 0.0
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    return np.sort(np.diag(a))


def gershgorin_lower(corr) -> float:
    """``1 - ||Lambda - I||_inf`` (maximal absolute off-diagonal row sum)."""
    corr = np.asarray(corr, dtype=float)
    off = np.abs(corr - np.diag(np.diag(corr)))
    return 1.0 - float(off.sum(axis=1).max(initial=0.0))


def correlation(sigma) -> np.ndarray:
    """Correlation matrix of a covariance matrix with positive diagonal."""
    sigma = np.asarray(sigma, dtype=float)
    diag = np.diag(sigma)
    if np.any(diag <= 0):
        raise ValueError("covariance has a non-positive diagonal entry")
    s = 1.0 / np.sqrt(diag)
    corr = sigma * s[:, None] * s[None, :]
    np.fill_diagonal(corr, 1.0)
    return corr


# --------------------------------------------------------------------------
# reports
# --------------------------------------------------------------------------


@dataclass
class CovarianceReport:
    """Covariance, correlation, eigenvalue extremes and truncation diagnostics.

    ``sigma_star_sq`` and ``sigma_dagger_sq`` refer to the correlation
    matrix ``lam`` (the convention of the bounds with ``Sigma_n = cov(S_n)``);
    ``cov_sigma_star_sq`` and ``cov_sigma_dagger_sq`` refer to ``sigma``
    itself (the convention of the Wasserstein bound).
    """

    d: int
    n: int | None
    sigma: np.ndarray
    lam: np.ndarray
    sigma_star_sq: float
    sigma_dagger_sq: float
    cov_sigma_star_sq: float
    cov_sigma_dagger_sq: float
    gershgorin_lower: float
    q_used: int
    tail: float
    psd_clipped: bool = False
    notes: list = field(default_factory=list)

    @property
    def lambda_offdiag_inf(self) -> float:
        """``||Lambda - I||_inf``."""
        return 1.0 - self.gershgorin_lower

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "n": self.n,
            "sigma": self.sigma.tolist(),
            "lambda": self.lam.tolist(),
            "sigma_star_sq": self.sigma_star_sq,
            "sigma_dagger_sq": self.sigma_dagger_sq,
            "cov_sigma_star_sq": self.cov_sigma_star_sq,
            "cov_sigma_dagger_sq": self.cov_sigma_dagger_sq,
            "gershgorin_lower": self.gershgorin_lower,
            "truncation": {"Q_used": self.q_used, "tail": self.tail},
            "psd_clipped": self.psd_clipped,
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def covariance_report(sigma, n: int | None = None, q_used: int = 0, tail: float = 0.0) -> CovarianceReport:
    """Assemble a report from a covariance matrix."""
    sigma = np.asarray(sigma, dtype=float)
    sigma = 0.5 * (sigma + sigma.T)
    d = sigma.shape[0]
    trace = float(np.trace(sigma))
    cov_eig = jacobi_eigenvalues(sigma)
    floor = -PSD_TOL * max(trace, 1e-300)
    if cov_eig[0] < floor:
        raise ValueError(f"covariance is not positive semidefinite: smallest eigenvalue {cov_eig[0]:.3e}")
    lam = correlation(sigma)
    lam_eig = jacobi_eigenvalues(lam)
    clipped = bool(cov_eig[0] < 0 or lam_eig[0] < 0)
    notes = ["negative eigenvalue within tolerance clipped to 0"] if clipped else []
    return CovarianceReport(
        d=d,
        n=n,
        sigma=sigma,
        lam=lam,
        sigma_star_sq=max(float(lam_eig[0]), 0.0),
        sigma_dagger_sq=float(lam_eig[-1]),
        cov_sigma_star_sq=max(float(cov_eig[0]), 0.0),
        cov_sigma_dagger_sq=float(cov_eig[-1]),
        gershgorin_lower=gershgorin_lower(lam),
        q_used=int(q_used),
        tail=float(tail),
        psd_clipped=clipped,
        notes=notes,
    )


# --------------------------------------------------------------------------
# Mehler series
# --------------------------------------------------------------------------


def _majorant_tail(theta: ThetaParams, q: int) -> float:
    """``sum_{l>q} c^2 e^{2 kappa l} (l!)^{1-2 beta}``, or ``inf`` when it diverges."""
    log_c2 = 2.0 * theta.log_c
    if theta.beta == 0.5:
        if theta.kappa >= 0:
            return math.inf
        return math.exp(log_c2 + 2.0 * theta.kappa * (q + 1)) / -math.expm1(2.0 * theta.kappa)
    l = q + 1
    log_term = log_c2 + 2.0 * theta.kappa * l + (1.0 - 2.0 * theta.beta) * float(gammaln(l + 1.0))
    # term ratio e^{2 kappa} (l+1)^{1-2 beta} decreases in l
    ratio = math.exp(2.0 * theta.kappa) * (l + 1.0) ** (1.0 - 2.0 * theta.beta)
    if ratio >= 1.0:
        return math.inf
    return math.exp(log_term) / (1.0 - ratio)


def _choose_truncation(stat: SubordinatedStatistic, lag_bound: float, tol: float, q_max, theta):
    """Number of Mehler terms and the bound on the neglected tail.

    Each coordinate gets its own decay parameters (fitted unless ``theta``
    is given) and the tail bound is the largest coordinate majorant, which
    bounds every entry by Cauchy–Schwarz.
    """
    if all(e.is_finite for e in stat.expansions):
        top = max(e.support_max for e in stat.expansions)
        return top, 0.0
    if any(e.source == "quadrature" for e in stat.expansions):
        cap = min(e.q_max for e in stat.expansions if e.source == "quadrature")
        q_max = cap if q_max is None else min(q_max, cap)
    thetas = []
    for e in stat.expansions:
        if e.is_finite:
            continue
        t = theta if theta is not None else fit_theta(e)
        if t.beta == 0.5 and t.kappa >= 0:
            raise TruncationError(
                "decay majorant diverges (beta = 1/2, kappa >= 0) for an infinite expansion; "
                "use a finite Hermite expansion instead"
            )
        thetas.append(t)

    def bound(q: int) -> float:
        return lag_bound * max(_majorant_tail(t, q) for t in thetas)

    if q_max is not None:
        return q_max, bound(q_max)
    q = max(max(e.rank for e in stat.expansions), 8)
    while q < Q_HARD_CAP:
        tail = bound(q)
        if tail <= tol:
            return q, tail
        q = int(q * 1.5) + 1
    return Q_HARD_CAP, bound(Q_HARD_CAP)


def _normalized_matrix(stat: SubordinatedStatistic, q: int) -> np.ndarray:
    """``(d, q + 1)`` matrix of normalized coefficients ``b_{i,l}``, ``l = 0..q``."""
    rows = []
    for e in stat.expansions:
        b = e.extend(q).normalized[: q + 1] if e.q_max < q else e.normalized[: q + 1]
        if b.size < q + 1:
            b = np.concatenate([b, np.zeros(q + 1 - b.size)])
        rows.append(b)
    return np.vstack(rows)


def _power_sums(r: np.ndarray, weights: np.ndarray, q: int) -> np.ndarray:
    """``sum_k weights_k r_k^l`` for ``l = 0..q`` using running powers."""
    out = np.empty(q + 1)
    power = np.ones_like(r)
    out[0] = float(weights.sum())
    for l in range(1, q + 1):
        power *= r
        out[l] = float(np.dot(weights, power))
    return out


def _power_series(r: np.ndarray, coef: np.ndarray) -> np.ndarray:
    """``sum_l coef_l r^l`` evaluated elementwise by running powers."""
    out = np.full_like(r, coef[0])
    power = np.ones_like(r)
    for l in range(1, coef.size):
        power *= r
        if coef[l] != 0.0:
            out += coef[l] * power
    return out


def exact_cov(
    stat: SubordinatedStatistic,
    model: AutocovarianceModel,
    n: int,
    q_max: int | None = None,
    tol: float = 1e-12,
    theta: ThetaParams | None = None,
) -> CovarianceReport:
    """Exact ``cov(S_n)`` by the Mehler series.

    The series stops at the first ``Q`` where the decay majorant
    ``||rho_n||_1 sum_{l>Q} c^2 e^{2 kappa l} (l!)^{1 - 2 beta}`` is below
    ``tol``; finite expansions are summed exactly. Pass ``q_max`` to fix the
    number of terms.

    Raises
    ------
    TruncationError
        For an infinite expansion with ``beta = 1/2`` and ``kappa >= 0``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    lag_bound = truncated_norm(model, n, 1.0)
    q, tail = _choose_truncation(stat, lag_bound, tol, q_max, theta)
    b = _normalized_matrix(stat, q)
    b[:, 0] = 0.0
    r = rho_lags(model, np.arange(n))
    if stat.kind == "BreuerMajor":
        sigma = _block_covariance(stat, b[0], r, n)
    else:
        weights = 1.0 - np.arange(n) / n
        weights[1:] *= 2.0
        w = _power_sums(r, weights, q)
        sigma = (b * w[None, :]) @ b.T
    report = covariance_report(sigma, n=n, q_used=q, tail=tail)
    if tail > tol:
        report.notes.append(f"Mehler tail bound {tail:.3e} exceeds tolerance {tol:.1e}")
    return report


def _block_covariance(stat: SubordinatedStatistic, b: np.ndarray, r: np.ndarray, n: int) -> np.ndarray:
    """Breuer–Major block covariance via lag pair counts."""
    blocks = block_bounds(stat.partition, n)
    d = len(blocks)
    # g(v) = sum_l b_l^2 rho(v)^l for v = 0..n-1
    g = _power_series(r, b * b)
    lags = np.arange(-(n - 1), n)
    g_full = g[np.abs(lags)]
    sigma = np.zeros((d, d))
    for i, (si, ei) in enumerate(blocks):
        for j, (sj, ej) in enumerate(blocks):
            if j < i:
                continue
            # pairs (k, k + v) with k in block i and k + v in block j
            count = np.minimum(ei, ej - lags) - np.maximum(si, sj - lags)
            count = np.clip(count, 0, None)
            sigma[i, j] = sigma[j, i] = float(np.dot(count, g_full)) / n
    return sigma


def limiting_cov(
    stat: SubordinatedStatistic,
    model: AutocovarianceModel,
    m: int | None = None,
    tol: float = 1e-12,
    theta: ThetaParams | None = None,
) -> np.ndarray:
    """The ``n -> infinity`` covariance ``sum_{l>=m} b_{i,l} b_{j,l} sum_{k in Z} rho(k)^l``.

    For Breuer–Major block sums the limit is ``sigma^2 Diag(t_i - t_{i-1})``.

    Raises
    ------
    DivergentSeriesError
        When ``sum_k |rho(k)|^m`` diverges.
    """
    m = stat.min_rank if m is None else int(m)
    lag_bound = 1.0 + tail_sum(model, 1, m)
    q, _ = _choose_truncation(stat, lag_bound, tol, None, theta)
    b = _normalized_matrix(stat, q)
    sums = np.zeros(q + 1)
    for l in range(m, q + 1):
        if np.any(b[:, l] != 0):
            sums[l] = full_sum(model, l)
    b[:, :m] = 0.0
    if stat.kind == "BreuerMajor":
        s2 = float(np.dot(b[0] ** 2, sums))
        return s2 * np.diag(np.diff(stat.partition))
    return (b * sums[None, :]) @ b.T


def cov_discrepancy(sigma_a, sigma_b, mode: str = "max_correlation_gap") -> float:
    """Gap between a reference covariance and another, both scaled by the reference diagonal.

    ``max_correlation_gap`` returns the largest entrywise gap and
    ``hilbert_schmidt`` the Frobenius norm of the gap matrix.
    """
    a = np.asarray(sigma_a, dtype=float)
    b = np.asarray(sigma_b, dtype=float)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrices must be square with equal dimensions")
    s = 1.0 / np.sqrt(np.diag(a))
    gap = (a - b) * s[:, None] * s[None, :]
    if mode == "max_correlation_gap":
        return float(np.abs(gap).max())
    if mode == "hilbert_schmidt":
        return float(np.sqrt(np.sum(gap * gap)))
    raise ValueError(f"unknown discrepancy mode {mode!r}")


# --------------------------------------------------------------------------
# characteristic-function correlation criteria
# --------------------------------------------------------------------------


def _zeta_bracket(tau: float) -> float:
    p2, p3 = 2.0**tau, 3.0**tau
    first = math.exp(p2 - p2 * p2 / 2.0) * (2.0 + 1.0 / (tau * 2.0 ** (tau - 1.0) * (p2 - 1.0)))
    second = math.exp(p3 - p3 * p3 / 2.0) * (1.0 + 1.0 / (tau * 3.0 ** (tau - 1.0) * (p3 - 1.0)))
    return first + second


def _zeta_numerator(tau: float) -> float:
    return 2.0 * math.exp(0.5) * (1.0 - math.exp(-1.0)) * (1.0 - math.exp(-(4.0**tau)))


def zeta_tau(tau: float) -> float:
    """Threshold on ``||rho||_2^2`` keeping cosine correlations at ``lambda_i = i^tau`` away from singular.

    Examples
    --------
    >>> round(zeta_tau(1.0), 8)
    0.61361063
    """
    if not tau >= 1.0:
        raise ValueError("tau must be >= 1")
    return _zeta_numerator(tau) / _zeta_bracket(tau)


def fgn_rho_decay_bound(hurst: float, v) -> np.ndarray:
    """``2^{2-2H} H (1-2H) |v|^{2H-2}``, valid for fGn with ``H < 1/2`` and ``|v| >= 2``."""
    v = np.abs(np.asarray(v, dtype=float))
    return 2.0 ** (2.0 - 2.0 * hurst) * hurst * (1.0 - 2.0 * hurst) * v ** (2.0 * hurst - 2.0)


def fgn_l2_bound(hurst: float) -> float:
    """Upper bound on ``||rho||_2^2`` for fGn with ``H < 1/2``; at most 3/2."""
    h = hurst
    r1 = 1.0 - 2.0 ** (2.0 * h - 1.0)
    r2 = 2.0 ** (2.0 * h) - 3.0 ** (2.0 * h) / 2.0 - 0.5
    return 1.0 + 2.0 * r1 * r1 + 2.0 * r2 * r2 + 4.0 * h * h * (1.0 - 2.0 * h) ** 2 / (3.0 - 4.0 * h)


def fgn_analytic_bound(tau: float) -> float:
    """``H``-free bound ``(3/2) / zeta(tau)`` on ``||Lambda_n - I||_inf`` for fGn with ``H < 1/2``."""
    return 1.5 / zeta_tau(tau)


@dataclass(frozen=True)
class L2Criterion:
    """Outcome of comparing ``||rho||_2^2`` against ``zeta(tau)``."""

    rho_l2_sq: float
    zeta: float
    holds: bool
    lower_bound: float
    message: str


def l2_criterion(model: AutocovarianceModel, tau: float) -> L2Criterion:
    """Check ``||rho||_2^2 < zeta(tau)``; when it holds ``inf sigma_*^2 >= 1 - ||rho||_2^2 / zeta``."""
    rho2 = full_sum(model, 2)
    z = zeta_tau(tau)
    holds = rho2 < z
    msg = (
        f"criterion holds: inf sigma_*^2 >= {1.0 - rho2 / z:.6g}"
        if holds
        else f"||rho||_2^2 = {rho2:.6g} >= zeta({tau:g}) = {z:.6g}; increase tau"
    )
    return L2Criterion(rho2, z, holds, 1.0 - rho2 / z if holds else -math.inf, msg)


@dataclass
class FgnEigenCheck:
    """Grid results of the exact and analytic correlation bounds for fGn."""

    hurst: float
    tau: float
    analytic_bound: float
    rows: list
    min_margin: float
    exact_within_analytic: bool

    def to_dict(self) -> dict:
        return {
            "H": self.hurst,
            "tau": self.tau,
            "analytic_bound": self.analytic_bound,
            "rows": self.rows,
            "min_sigma_star_lower": self.min_margin,
            "exact_within_analytic": self.exact_within_analytic,
        }


def prop27_fgn_check(hurst: float, tau: float, n_grid, d_grid, tol: float = 1e-13) -> FgnEigenCheck:
    """Exact ``||Lambda_n - I||_inf`` for cosine statistics at ``lambda_i = i^tau`` under fGn.

    Each row records ``n``, ``d``, the exact norm, the Gershgorin margin
    ``1 - ||Lambda_n - I||_inf`` and the smallest correlation eigenvalue.
    """
    from .statistics import build

    if not 0 < hurst < 0.5:
        raise ValueError("H must lie in (0, 1/2)")
    model = AutocovarianceModel.fgn(hurst)
    bound = fgn_analytic_bound(tau)
    rows = []
    for d in d_grid:
        stat = build("ECF_cos", d=int(d), tau=tau)
        for n in n_grid:
            rep = exact_cov(stat, model, int(n), tol=tol)
            norm = rep.lambda_offdiag_inf
            rows.append(
                {
                    "n": int(n),
                    "d": int(d),
                    "lambda_offdiag_inf": norm,
                    "sigma_star_lower": 1.0 - norm,
                    "sigma_star_sq": rep.sigma_star_sq,
                    "Q_used": rep.q_used,
                }
            )
    margins = [r["sigma_star_lower"] for r in rows]
    return FgnEigenCheck(
        hurst=hurst,
        tau=tau,
        analytic_bound=bound,
        rows=rows,
        min_margin=min(margins),
        exact_within_analytic=all(r["lambda_offdiag_inf"] <= bound for r in rows),
    )
