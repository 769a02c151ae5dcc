"""Monte Carlo distances between a sample of ``S_n`` and a centred Gaussian.

All estimators are maxima over finite test families, so they under-estimate
the supremum over the full class (rectangles, convex sets, Lipschitz
functions) up to sampling error. Half-widths are 95% union bounds over the
family.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np
from scipy import integrate
from scipy.special import ndtr, ndtri

from .rng import mix64, standard_normals

__all__ = [
    "RectangleFamily",
    "BallFamily",
    "DistanceEstimate",
    "RateFit",
    "default_family",
    "gaussian_rect_prob",
    "gaussian_rect_probs",
    "box_frequencies",
    "estimate_dR",
    "estimate_dC_ball",
    "estimate_dW1_marginal",
    "rate_fit",
    "union_half_width",
    "write_estimates_csv",
    "CSV_COLUMNS",
]

DEFAULT_LEVELS = 25
DEFAULT_RANDOM = 200
DEFAULT_N_REF = 10**6
INFINITE_SIDE_PROB = 0.25
CSV_COLUMNS = ("n", "d", "method", "point", "half_width", "family_size", "replicates", "seed")
_REF_CHUNK = 1 << 17


# --------------------------------------------------------------------------
# families
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RectangleFamily:
    """Boxes ``{x : lower < x <= upper}`` stored as two ``(F, d)`` arrays.

    Endpoints may be ``-inf``/``+inf``; ``construction`` records how the
    family was built.
    """

    lower: np.ndarray
    upper: np.ndarray
    construction: str = "custom"

    def __post_init__(self):
        lo = np.atleast_2d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_2d(np.asarray(self.upper, dtype=float))
        if lo.shape != hi.shape:
            raise ValueError("lower and upper must have the same shape")
        if np.any(lo > hi):
            raise ValueError("every box needs lower <= upper")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def size(self) -> int:
        return int(self.lower.shape[0])

    @property
    def d(self) -> int:
        return int(self.lower.shape[1])

    def __len__(self) -> int:
        return self.size

    def union(self, other: "RectangleFamily") -> "RectangleFamily":
        return RectangleFamily(
            np.vstack([self.lower, other.lower]),
            np.vstack([self.upper, other.upper]),
            f"{self.construction}+{other.construction}",
        )

    def subset(self, index) -> "RectangleFamily":
        return RectangleFamily(self.lower[index], self.upper[index], self.construction)

    def transform(self, funcs) -> "RectangleFamily":
        """Apply one increasing map per coordinate to every endpoint."""
        lo = self.lower.copy()
        hi = self.upper.copy()
        for i, f in enumerate(funcs):
            lo[:, i] = f(lo[:, i])
            hi[:, i] = f(hi[:, i])
        return RectangleFamily(lo, hi, self.construction)

    @staticmethod
    def _levels(scales: np.ndarray, levels: int) -> np.ndarray:
        """``(levels, d)`` quantiles ``Phi^{-1}(j/(levels+1)) * scale_i``."""
        p = np.arange(1, levels + 1) / (levels + 1.0)
        return ndtri(p)[:, None] * scales[None, :]

    @classmethod
    def quantile_grid(cls, scales, levels: int = DEFAULT_LEVELS) -> "RectangleFamily":
        """One-coordinate intervals between any two grid levels (or the infinities).

        Includes every one-sided box ``(-inf, x_i]`` and ``(x_i, inf)`` at
        the grid levels.
        """
        scales = np.asarray(scales, dtype=float)
        d = scales.size
        grid = cls._levels(scales, levels)
        n_ends = levels + 2
        a, b = np.triu_indices(n_ends, k=1)
        # drop the full line (-inf, inf)
        keep = ~((a == 0) & (b == n_ends - 1))
        a, b = a[keep], b[keep]
        lows, ups = [], []
        for i in range(d):
            column = np.concatenate([[-np.inf], grid[:, i], [np.inf]])
            lo = np.full((a.size, d), -np.inf)
            hi = np.full((a.size, d), np.inf)
            lo[:, i] = column[a]
            hi[:, i] = column[b]
            lows.append(lo)
            ups.append(hi)
        return cls(np.vstack(lows), np.vstack(ups), "quantile_grid")

    @classmethod
    def orthants(cls, scales, levels: int = DEFAULT_LEVELS, max_boxes: int = 4096) -> "RectangleFamily":
        """Lower orthants ``(-inf, x]`` with corners on the grid.

        Uses the full product grid when it has at most ``max_boxes`` corners,
        otherwise corners at a common quantile level in every coordinate.
        Upper orthants ``(x, inf)`` are added the same way.
        """
        scales = np.asarray(scales, dtype=float)
        d = scales.size
        grid = cls._levels(scales, levels)
        if levels**d <= max_boxes:
            idx = np.stack(np.meshgrid(*[np.arange(levels)] * d, indexing="ij"), axis=-1).reshape(-1, d)
            corners = grid[idx, np.arange(d)[None, :]]
        else:
            corners = grid
        inf = np.full_like(corners, np.inf)
        lower = np.vstack([-inf, corners])
        upper = np.vstack([corners, inf])
        return cls(lower, upper, "orthants")

    @classmethod
    def random(
        cls, scales, count: int = DEFAULT_RANDOM, seed: int = 0, infinite_prob: float = INFINITE_SIDE_PROB
    ) -> "RectangleFamily":
        """Boxes with endpoints at random marginal quantiles.

        Each side is replaced by the matching infinity with probability
        ``infinite_prob``.
        """
        scales = np.asarray(scales, dtype=float)
        d = scales.size
        u = _uniform_block(seed, 4 * count * d).reshape(4, count, d)
        q = np.sort(ndtri(u[:2]), axis=0) * scales
        lo, hi = q[0], q[1]
        lo = np.where(u[2] < infinite_prob, -np.inf, lo)
        hi = np.where(u[3] < infinite_prob, np.inf, hi)
        return cls(lo, hi, "random")


def _uniform_block(seed: int, count: int) -> np.ndarray:
    """Uniforms in (0, 1) from the normal stream (through the normal CDF)."""
    return ndtr(standard_normals(seed, count))


def default_family(
    sigma, levels: int = DEFAULT_LEVELS, random_count: int = DEFAULT_RANDOM, seed: int = 0
) -> RectangleFamily:
    """Quantile grid, random boxes and orthants on the reference marginals."""
    scales = np.sqrt(np.diag(np.atleast_2d(np.asarray(sigma, dtype=float))))
    fam = RectangleFamily.quantile_grid(scales, levels)
    if random_count > 0:
        fam = fam.union(RectangleFamily.random(scales, random_count, seed))
    fam = fam.union(RectangleFamily.orthants(scales, levels))
    return RectangleFamily(fam.lower, fam.upper, "default")


@dataclass(frozen=True)
class BallFamily:
    """Centred ellipsoids ``{x : x^T W x <= r}``, one radius list per weight matrix."""

    weights: tuple
    radii: tuple

    def __post_init__(self):
        ws = []
        for w in self.weights:
            w = np.atleast_2d(np.asarray(w, dtype=float))
            if not np.allclose(w, w.T):
                raise ValueError("weight matrices must be symmetric")
            if np.linalg.eigvalsh(w)[0] <= 0:
                raise ValueError("weight matrices must be positive definite")
            ws.append(w)
        if len(ws) != len(self.radii):
            raise ValueError("one radius list per weight matrix is required")
        radii = tuple(np.asarray(r, dtype=float) for r in self.radii)
        if any(np.any(r < 0) for r in radii):
            raise ValueError("radii must be >= 0")
        object.__setattr__(self, "weights", tuple(ws))
        object.__setattr__(self, "radii", radii)

    @property
    def size(self) -> int:
        return int(sum(r.size for r in self.radii))

    @classmethod
    def default(cls, sigma, levels: int = DEFAULT_LEVELS) -> "BallFamily":
        """Euclidean balls and ``Sigma^{-1}`` ellipsoids at quantile radii of the reference."""
        sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
        p = np.arange(1, levels + 1) / (levels + 1.0)
        weights = (np.eye(sigma.shape[0]), np.linalg.inv(sigma))
        radii = []
        for w in weights:
            # radii at quantiles of x^T W x under the reference, by a moderate MC
            z = _reference_draws(sigma, 20000, seed=0x5EED)
            radii.append(np.quantile(np.einsum("ij,jk,ik->i", z, w, z), p))
        return cls(weights, tuple(radii))


# --------------------------------------------------------------------------
# probabilities and frequencies
# --------------------------------------------------------------------------


def _is_diagonal(sigma: np.ndarray) -> bool:
    return bool(np.all(sigma[~np.eye(sigma.shape[0], dtype=bool)] == 0.0))


def _check_psd(sigma: np.ndarray) -> None:
    if sigma.shape[0] != sigma.shape[1] or not np.allclose(sigma, sigma.T):
        raise ValueError("Sigma must be symmetric")
    if np.linalg.eigvalsh(sigma)[0] < -1e-12 * max(1.0, float(np.trace(sigma))):
        raise ValueError("Sigma must be positive semidefinite")


def _reference_draws(sigma: np.ndarray, count: int, seed: int) -> np.ndarray:
    """``count`` draws from ``N(0, sigma)`` via a symmetric square root."""
    w, v = np.linalg.eigh(sigma)
    root = v * np.sqrt(np.clip(w, 0.0, None))
    z = standard_normals(seed, count * sigma.shape[0]).reshape(count, sigma.shape[0])
    return z @ root.T


def _box_mass_1d(lo, hi, scale):
    """``P(lo < s Z <= hi)`` with tail-aware differences."""
    a = lo / scale
    b = hi / scale
    # use upper tails on the right half for accuracy
    right = a > 0
    out = np.where(right, ndtr(-a) - ndtr(-b), ndtr(b) - ndtr(a))
    return np.clip(out, 0.0, 1.0)


def _endpoint_index(ends: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Position of each endpoint in ``ends``; ``-inf`` maps to -1 and ``inf`` to ``len(ends)``."""
    idx = np.searchsorted(ends, values)
    idx = np.where(values == -np.inf, -1, idx)
    return np.where(values == np.inf, ends.size, idx)


def _pair_counts(x: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Counts of 2-column points in boxes, by a cumulative histogram of endpoint cells."""
    ends, cells, box_lo, box_hi = [], [], [], []
    for c in range(2):
        e = np.unique(np.concatenate([lo[:, c], hi[:, c]]))
        e = e[np.isfinite(e)]
        ends.append(e)
        # number of endpoints strictly below each point; x <= e_k  iff  cell <= k
        cells.append(np.searchsorted(e, x[:, c], side="left"))
        box_lo.append(_endpoint_index(e, lo[:, c]) + 1)
        box_hi.append(_endpoint_index(e, hi[:, c]) + 1)
    shape = (ends[0].size + 1, ends[1].size + 1)
    hist = np.bincount(cells[0] * shape[1] + cells[1], minlength=shape[0] * shape[1]).reshape(shape)
    cum = np.zeros((shape[0] + 1, shape[1] + 1), dtype=np.int64)
    cum[1:, 1:] = hist.cumsum(axis=0).cumsum(axis=1)
    # clip the +inf index onto the last cell
    a_lo, a_hi = np.minimum(box_lo[0], shape[0]), np.minimum(box_hi[0], shape[0])
    b_lo, b_hi = np.minimum(box_lo[1], shape[1]), np.minimum(box_hi[1], shape[1])
    return cum[a_hi, b_hi] - cum[a_lo, b_hi] - cum[a_hi, b_lo] + cum[a_lo, b_lo]


def box_frequencies(samples: np.ndarray, family: RectangleFamily) -> np.ndarray:
    """Fraction of sample rows inside each box.

    Boxes constraining one coordinate are counted by binary search on the
    sorted coordinate, boxes constraining two by a cumulative histogram,
    the rest by direct comparison.
    """
    x = np.atleast_2d(np.asarray(samples, dtype=float))
    R = x.shape[0]
    lo, hi = family.lower, family.upper
    constrained = np.isfinite(lo) | np.isfinite(hi)
    ncon = constrained.sum(axis=1)
    out = np.empty(family.size)
    out[ncon == 0] = 1.0
    for i in range(family.d):
        rows = np.flatnonzero((ncon == 1) & constrained[:, i])
        if rows.size:
            col = np.sort(x[:, i])
            count = np.searchsorted(col, hi[rows, i], side="right") - np.searchsorted(col, lo[rows, i], side="right")
            out[rows] = count / R
    two = np.flatnonzero(ncon == 2)
    if two.size:
        pairs = [tuple(np.flatnonzero(constrained[f])) for f in two]
        for pair in sorted(set(pairs)):
            rows = two[[p == pair for p in pairs]]
            cols = list(pair)
            out[rows] = _pair_counts(x[:, cols], lo[np.ix_(rows, cols)], hi[np.ix_(rows, cols)]) / R
    for f in np.flatnonzero(ncon > 2):
        mask = np.ones(R, dtype=bool)
        for i in np.flatnonzero(constrained[f]):
            mask &= (x[:, i] > lo[f, i]) & (x[:, i] <= hi[f, i])
        out[f] = mask.mean()
    return out


def gaussian_rect_probs(
    sigma, family: RectangleFamily, n_ref: int = DEFAULT_N_REF, seed: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Reference probabilities and standard errors for every box.

    Boxes constraining a single coordinate, and every box when ``sigma`` is
    diagonal, use exact products of normal CDF differences (standard error
    0). Other boxes use ``n_ref`` Monte Carlo draws.
    """
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    _check_psd(sigma)
    if family.d != sigma.shape[0]:
        raise ValueError("family dimension does not match Sigma")
    scales = np.sqrt(np.diag(sigma))
    lo, hi = family.lower, family.upper
    constrained = np.isfinite(lo) | np.isfinite(hi)
    exact = (constrained.sum(axis=1) <= 1) | _is_diagonal(sigma)
    probs = np.empty(family.size)
    se = np.zeros(family.size)
    if np.any(exact):
        with np.errstate(invalid="ignore", divide="ignore"):
            mass = np.ones(int(exact.sum()))
            for i in range(family.d):
                if scales[i] == 0.0:
                    m = ((lo[exact, i] < 0) & (hi[exact, i] >= 0)).astype(float)
                else:
                    m = _box_mass_1d(lo[exact, i], hi[exact, i], scales[i])
                mass *= m
        probs[exact] = mass
    rest = np.flatnonzero(~exact)
    if rest.size:
        if n_ref < 1:
            raise ValueError("n_ref must be >= 1")
        counts = np.zeros(rest.size)
        sub = family.subset(rest)
        done = 0
        chunk_id = 0
        while done < n_ref:
            m = min(_REF_CHUNK, n_ref - done)
            z = _reference_draws(sigma, m, mix64(seed, chunk_id))
            counts += box_frequencies(z, sub) * m
            done += m
            chunk_id += 1
        p = counts / n_ref
        probs[rest] = p
        se[rest] = np.sqrt(p * (1.0 - p) / n_ref)
    return probs, se


def gaussian_rect_prob(sigma, lower, upper, n_ref: int = DEFAULT_N_REF, seed: int = 0) -> tuple[float, float]:
    """``P(lower < Z <= upper)`` for ``Z ~ N(0, sigma)`` with its standard error.

    Examples
    --------
    >>> gaussian_rect_prob(np.eye(2), [-np.inf, -np.inf], [0.0, 0.0])
    (0.25, 0.0)
    """
    fam = RectangleFamily(np.atleast_2d(lower), np.atleast_2d(upper))
    p, s = gaussian_rect_probs(sigma, fam, n_ref, seed)
    return float(p[0]), float(s[0])


# --------------------------------------------------------------------------
# estimators
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DistanceEstimate:
    """A distance estimate with a 95% half-width.

    ``method`` records the estimator and its lower-bound semantics.
    """

    point: float
    half_width: float
    family_size: int
    replicates: int
    method: str
    argmax: int = -1

    def to_row(self, n: int | None = None, d: int | None = None, seed: int | None = None) -> dict:
        return {
            "n": n,
            "d": d,
            "method": self.method,
            "point": self.point,
            "half_width": self.half_width,
            "family_size": self.family_size,
            "replicates": self.replicates,
            "seed": seed,
        }


def union_half_width(family_size: int, replicates: int, level: float = 0.05) -> float:
    """Hoeffding half-width ``sqrt(log(2F/level) / (2R))`` uniform over ``F`` sets."""
    return math.sqrt(math.log(2.0 * family_size / level) / (2.0 * replicates))


def estimate_dR(
    samples,
    sigma_ref=None,
    family: RectangleFamily | None = None,
    reference_probs=None,
    n_ref: int = DEFAULT_N_REF,
    seed: int = 0,
) -> DistanceEstimate:
    """Largest gap between empirical and reference box probabilities.

    Parameters
    ----------
    samples : (R, d) array
    sigma_ref : (d, d) array, optional
        Reference covariance; needed unless ``reference_probs`` is given.
    family : RectangleFamily, optional
        Defaults to :func:`default_family` of ``sigma_ref``.
    reference_probs : array, optional
        Precomputed reference probabilities for ``family``.

    Examples
    --------
    >>> fam = RectangleFamily([[-np.inf]], [[np.inf]])
    >>> estimate_dR(np.zeros((1000, 1)), np.eye(1), fam).point
    0.0
    """
    x = np.atleast_2d(np.asarray(samples, dtype=float))
    R = x.shape[0]
    if family is None:
        if sigma_ref is None:
            raise ValueError("a family or a reference covariance is required")
        family = default_family(sigma_ref, seed=seed)
    if family.size == 0:
        raise ValueError("family is empty")
    ref_se = np.zeros(family.size)
    if reference_probs is None:
        if sigma_ref is None:
            raise ValueError("reference covariance or probabilities required")
        reference_probs, ref_se = gaussian_rect_probs(sigma_ref, family, n_ref, mix64(seed, 1))
    gaps = np.abs(box_frequencies(x, family) - np.asarray(reference_probs, dtype=float))
    k = int(np.argmax(gaps))
    # union bound for the sample, plus the reference MC error at the same level
    hw = union_half_width(family.size, R)
    if np.any(ref_se > 0):
        hw += float(ndtri(1.0 - 0.025 / family.size) * ref_se.max())
    return DistanceEstimate(float(gaps[k]), hw, family.size, R, f"rectangles/{family.construction}/lower-bound", k)


def estimate_dC_ball(
    samples, sigma_ref, balls: BallFamily | None = None, n_ref: int = DEFAULT_N_REF, seed: int = 0
) -> DistanceEstimate:
    """Largest gap over centred balls and ellipsoids (a lower bound on the convex distance)."""
    x = np.atleast_2d(np.asarray(samples, dtype=float))
    sigma = np.atleast_2d(np.asarray(sigma_ref, dtype=float))
    _check_psd(sigma)
    R = x.shape[0]
    balls = BallFamily.default(sigma) if balls is None else balls
    emp = []
    ref = np.concatenate([np.zeros(r.size) for r in balls.radii])
    for w, r in zip(balls.weights, balls.radii):
        qf = np.sort(np.einsum("ij,jk,ik->i", x, w, x))
        emp.append(np.searchsorted(qf, r, side="right") / R)
    emp = np.concatenate(emp)
    done = 0
    chunk_id = 0
    while done < n_ref:
        m = min(_REF_CHUNK, n_ref - done)
        z = _reference_draws(sigma, m, mix64(seed, 2, chunk_id))
        parts = []
        for w, r in zip(balls.weights, balls.radii):
            qf = np.sort(np.einsum("ij,jk,ik->i", z, w, z))
            parts.append(np.searchsorted(qf, r, side="right"))
        ref += np.concatenate(parts)
        done += m
        chunk_id += 1
    ref /= n_ref
    # a radius-0 ball has probability 0 under both laws
    zero = np.concatenate([r == 0 for r in balls.radii])
    ref[zero] = 0.0
    emp[zero] = 0.0
    gaps = np.abs(emp - ref)
    k = int(np.argmax(gaps))
    hw = union_half_width(balls.size, R) + union_half_width(balls.size, n_ref)
    return DistanceEstimate(float(gaps[k]), hw, balls.size, R, "balls/lower-bound", k)


def _normal_antiderivative(x, s):
    """``G(x) = x Phi(x/s) + s phi(x/s)``, so that ``G' = Phi(x/s)`` and ``G(-inf) = 0``."""
    z = x / s
    return x * ndtr(z) + s * np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)


def _w1_to_normal(values: np.ndarray, s: float) -> float:
    """``int |F_R(x) - Phi(x/s)| dx`` for the empirical CDF of ``values``."""
    v = np.sort(values)
    R = v.size
    if s == 0.0:
        return float(np.mean(np.abs(v)))
    # left tail: int_{-inf}^{v_1} Phi, right tail: int_{v_R}^{inf} (1 - Phi)
    left = _normal_antiderivative(v[0], s)
    right = _normal_antiderivative(-v[-1], s)
    a, b = v[:-1], v[1:]
    c = np.arange(1, R) / R
    xc = s * ndtri(c)
    ga, gb = _normal_antiderivative(a, s), _normal_antiderivative(b, s)
    gc = _normal_antiderivative(np.clip(xc, a, b), s)
    xcc = np.clip(xc, a, b)
    # on [a, xc] Phi <= c, on [xc, b] Phi >= c
    below = c * (xcc - a) - (gc - ga)
    above = (gb - gc) - c * (b - xcc)
    return float(left + right + np.sum(below + above))


_W1_NOISE = None


def _w1_noise_constant() -> float:
    """``int sqrt(Phi(z)(1 - Phi(z))) dz``, the same-law noise scale of the W1 estimate."""
    global _W1_NOISE
    if _W1_NOISE is None:
        _W1_NOISE = integrate.quad(lambda z: math.sqrt(ndtr(z) * ndtr(-z)), -np.inf, np.inf)[0]
    return _W1_NOISE


def estimate_dW1_marginal(samples, sigma_ref) -> DistanceEstimate:
    """Largest one-dimensional W1 distance between a coordinate and ``N(0, Sigma_ii)``.

    Coordinate projections are 1-Lipschitz, so this lower-bounds the
    multivariate W1 distance. Each integral ``int |F_R - Phi|`` is exact
    for the empirical CDF. The half-width is ``1.96 s J / sqrt(R)`` with
    ``J = int sqrt(Phi (1 - Phi))``, an upper bound on the same-law mean
    scaled to a 95% level.
    """
    x = np.atleast_2d(np.asarray(samples, dtype=float))
    sigma = np.atleast_2d(np.asarray(sigma_ref, dtype=float))
    if x.shape[1] != sigma.shape[0]:
        raise ValueError("sample dimension does not match Sigma")
    scales = np.sqrt(np.diag(sigma))
    dist = np.array([_w1_to_normal(x[:, i], scales[i]) for i in range(x.shape[1])])
    k = int(np.argmax(dist))
    R = x.shape[0]
    hw = 1.96 * float(scales.max()) * _w1_noise_constant() / math.sqrt(R)
    return DistanceEstimate(float(dist[k]), hw, x.shape[1], R, "marginal_w1/lower-bound", k)


# --------------------------------------------------------------------------
# rate fitting and output
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    residuals: np.ndarray
    mode: str

    def to_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept, "residuals": self.residuals.tolist(), "mode": self.mode}


def rate_fit(points: Sequence[tuple[float, float]], mode: str = "loglog") -> RateFit:
    """Least-squares slope of ``log est`` (or ``log(est / log n)``) against ``log n``.

    Examples
    --------
    >>> round(rate_fit([(n, n ** -0.5) for n in (16, 64, 256)]).slope, 12)
    -0.5
    """
    if mode not in ("loglog", "loglog_logcorrected"):
        raise ValueError("mode must be 'loglog' or 'loglog_logcorrected'")
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3:
        raise ValueError("at least 3 points are required")
    n, est = pts[:, 0], pts[:, 1]
    if np.any(est <= 0):
        raise ValueError("estimates must be > 0")
    if np.any(n <= 1):
        raise ValueError("n must be > 1")
    y = np.log(est)
    if mode == "loglog_logcorrected":
        y = y - np.log(np.log(n))
    x = np.log(n)
    design = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    return RateFit(float(coef[0]), float(coef[1]), resid, mode)


def write_estimates_csv(stream: TextIO, rows: Sequence[dict]) -> None:
    """CSV with columns ``n,d,method,point,half_width,family_size,replicates,seed``."""
    writer = csv.DictWriter(stream, fieldnames=list(CSV_COLUMNS), lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if row.get(k) is None else row[k]) for k in CSV_COLUMNS})
