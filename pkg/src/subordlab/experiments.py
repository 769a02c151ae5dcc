"""Config-driven experiment presets: rate sweeps, eigenvalue checks and dimension sweeps.

A run is a grid of ``(n, d)`` cells. Each Monte Carlo cell draws
``replicates`` statistics with replicate seeds
``mix64(master_seed, preset_id, n, d, r)``, compares them with the Gaussian
of exact covariance and evaluates the bound formulas. Outputs are CSV tables
and a JSON summary; with a fixed ``master_seed`` they are byte-identical
across runs and worker counts.
"""

from __future__ import annotations

import copy
import hashlib
import io
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .autocovariance import AutocovarianceModel, classify_dependence, truncated_norm
from .bounds import (
    bound_finite_expansion,
    bound_fixed_cov,
    bound_main,
    bound_mom,
    bound_srd_lrd,
)
from .covariance import cov_discrepancy, exact_cov, limiting_cov, prop27_fgn_check
from .distance import (
    CSV_COLUMNS,
    default_family,
    estimate_dC_ball,
    estimate_dR,
    estimate_dW1_marginal,
    rate_fit,
    write_estimates_csv,
)
from .hermite import fit_theta
from .rng import mix64, preset_index
from .statistics import build, evaluate_batch

__all__ = [
    "SCHEMA_VERSION",
    "PRESETS",
    "OUTPUT_DIR_ENV",
    "BOUND_COLUMNS",
    "COVARIANCE_COLUMNS",
    "ExperimentError",
    "ResultBundle",
    "list_presets",
    "preset_config",
    "resolve_config",
    "run",
    "build_statistic",
]

SCHEMA_VERSION = "1.0"
OUTPUT_DIR_ENV = "SUBORDLAB_OUTPUT_DIR"
DISTANCE_METHODS = ("dR", "dC_ball", "dW1")
BOUND_COLUMNS = ("n", "d", "distance", "formula_id", "value", "log_value", "admissible", "scale_C")
COVARIANCE_COLUMNS = ("n", "d", "sigma_star_sq", "sigma_dagger_sq", "gershgorin_lower", "Q_used", "tail")

_POW2_GRID = [2**k for k in range(8, 15)]

PRESETS: dict[str, dict] = {
    "mom_rate": {
        "description": "Method of moments (normalized Hermite coordinates), n sweep of the rectangle distance",
        "model": {"kind": "iid"},
        "statistic": {"kind": "MoM"},
        "n_grid": _POW2_GRID,
        "d_grid": [2],
    },
    "ecf_rate": {
        "description": "Empirical characteristic function (cosine part) under AR(1), n sweep",
        "model": {"kind": "ar1", "phi": 0.5},
        "statistic": {"kind": "ECF_cos", "tau": 1.0},
        "n_grid": _POW2_GRID,
        "d_grid": [2],
    },
    "emgf_rate": {
        "description": "Empirical moment generating function at lambda = 0.5, 1.0 for iid input, n sweep",
        "model": {"kind": "iid"},
        "statistic": {"kind": "EMGF", "lambdas": [0.5, 1.0]},
        "n_grid": _POW2_GRID,
        "d_grid": [2],
    },
    "bm_fdd_rate": {
        "description": "Block sums of H_2/sqrt(2) over a partition of [0, 1] under AR(1), n sweep",
        "model": {"kind": "ar1", "phi": 0.5},
        "statistic": {"kind": "BreuerMajor", "phi": {"2": 0.7071067811865476}, "partition": [0.0, 0.5, 1.0]},
        "n_grid": _POW2_GRID,
        "d_grid": [2],
    },
    "fgn_eigen": {
        "description": "Exact correlation margin 1 - ||Lambda_n - I||_inf of cosine statistics at lambda_i = i^tau under fGn",
        "model": {"kind": "fgn", "H": 0.3},
        "statistic": {"kind": "ECF_cos", "tau": 1.302},
        "n_grid": [64, 256, 1024],
        "d_grid": [2, 4, 8],
    },
    "dimension_scaling": {
        "description": "Cosine statistics at lambda_i = i^tau under fGn, d sweep at fixed n",
        "model": {"kind": "fgn", "H": 0.3},
        "statistic": {"kind": "ECF_cos", "tau": 1.302},
        "n_grid": [1024],
        "d_grid": [2, 4, 8],
    },
    "custom": {
        "description": "User-supplied model, statistic and grids (defaults: ECF_cos, iid)",
        "model": {"kind": "iid"},
        "statistic": {"kind": "ECF_cos", "tau": 1.0},
        "n_grid": [256, 1024, 4096],
        "d_grid": [2],
    },
}

_DEFAULTS = {
    "replicates": 10_000,
    "n_ref": 10**6,
    "master_seed": 20240101,
    "scale_C": 1.0,
    "distances": list(DISTANCE_METHODS),
    "levels": 25,
    "random_boxes": 200,
    "workers": 1,
    "output_dir": None,
}


class ExperimentError(RuntimeError):
    """A grid cell failed; carries the cell and the partial results."""

    def __init__(self, message: str, cell: tuple, partial: "ResultBundle"):
        super().__init__(message)
        self.cell = cell
        self.partial = partial


def list_presets() -> dict[str, str]:
    """Preset names with one-line descriptions.

    Examples
    --------
    >>> "fgn_eigen" in list_presets()
    True
    """
    return {name: preset["description"] for name, preset in PRESETS.items()}


def preset_config(name: str) -> dict:
    """Full default configuration of a preset."""
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; available: {sorted(PRESETS)}")
    cfg = copy.deepcopy(_DEFAULTS)
    preset = copy.deepcopy(PRESETS[name])
    preset.pop("description")
    cfg.update(preset)
    cfg["preset"] = name
    return cfg


def resolve_config(config: dict) -> dict:
    """Fill preset defaults, apply overrides and validate."""
    name = config.get("preset", "custom")
    cfg = preset_config(name)
    for key, value in config.items():
        if isinstance(value, dict) and isinstance(cfg.get(key), dict) and key != "model":
            merged = dict(cfg[key])
            merged.update(value)
            cfg[key] = merged
        elif value is not None:
            cfg[key] = copy.deepcopy(value)
    if cfg.get("output_dir") is None and os.environ.get(OUTPUT_DIR_ENV):
        cfg["output_dir"] = os.environ[OUTPUT_DIR_ENV]
    cfg["n_grid"] = [int(n) for n in cfg["n_grid"]]
    cfg["d_grid"] = [int(d) for d in cfg["d_grid"]]
    if any(b <= a for a, b in zip(cfg["n_grid"], cfg["n_grid"][1:])) or not cfg["n_grid"]:
        raise ValueError("n_grid must be non-empty and strictly increasing")
    if any(d < 1 for d in cfg["d_grid"]) or not cfg["d_grid"]:
        raise ValueError("d_grid must contain positive dimensions")
    if name != "fgn_eigen" and int(cfg["replicates"]) < 1000:
        raise ValueError("rate presets need replicates >= 1000")
    unknown = set(cfg["distances"]) - set(DISTANCE_METHODS)
    if unknown:
        raise ValueError(f"unknown distance methods {sorted(unknown)}")
    AutocovarianceModel.from_config(cfg["model"])
    return cfg


def build_statistic(options: dict, d: int):
    """Statistic from a config record ``{kind, tau | lambdas | phi, partition}``.

    For ``BreuerMajor`` a grid ``d`` other than the partition's block count
    replaces the partition by ``d`` equal blocks.
    """
    kind = options["kind"]
    if kind == "MoM":
        return build("MoM", d=d)
    if kind in ("ECF_cos", "ECF_sin", "EMGF"):
        if options.get("lambdas") is not None:
            lambdas = [float(x) for x in options["lambdas"]]
            if len(lambdas) != d:
                lambdas = [lambdas[i % len(lambdas)] * (1 + i // len(lambdas)) for i in range(d)]
            return build(kind, lambdas=lambdas, lambda_max=float(options.get("lambda_max", 3.0)))
        return build(kind, d=d, tau=float(options.get("tau", 1.0)))
    if kind == "BreuerMajor":
        phi = options["phi"]
        if isinstance(phi, dict) and "name" not in phi:
            phi = {int(k): float(v) for k, v in phi.items()}
        partition = [float(t) for t in options.get("partition", [])]
        if len(partition) - 1 != d:
            partition = list(np.linspace(0.0, 1.0, d + 1))
        return build("BreuerMajor", phi=phi, partition=partition, allow_rank_one=bool(options.get("allow_rank_one", False)))
    raise ValueError(f"unknown statistic kind {kind!r}")


@dataclass
class ResultBundle:
    """Tables and summary of a run."""

    config: dict
    results: list = field(default_factory=list)
    estimate_rows: list = field(default_factory=list)
    bound_rows: list = field(default_factory=list)
    covariance_rows: list = field(default_factory=list)
    slopes: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "config_echo": self.config,
            "results": self.results,
            "slopes": self.slopes,
        }

    def summary_json(self) -> str:
        return json.dumps(_jsonable(self.summary()), indent=2, sort_keys=True) + "\n"

    def tables(self) -> dict[str, str]:
        """CSV texts keyed by file name."""
        est = io.StringIO()
        write_estimates_csv(est, self.estimate_rows)
        return {
            "estimates.csv": est.getvalue(),
            "bounds.csv": _csv_text(BOUND_COLUMNS, self.bound_rows),
            "covariance.csv": _csv_text(COVARIANCE_COLUMNS, self.covariance_rows),
        }

    def write(self, directory) -> dict[str, str]:
        """Write the tables and ``summary.json``; returns SHA-256 digests by file name."""
        out = Path(directory)
        out.mkdir(parents=True, exist_ok=True)
        files = dict(self.tables())
        files["summary.json"] = self.summary_json()
        digests = {}
        for name, text in files.items():
            data = text.encode("utf-8")
            (out / name).write_bytes(data)
            digests[name] = hashlib.sha256(data).hexdigest()
        return digests


def _csv_text(columns, rows) -> str:
    import csv

    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if row.get(k) is None else row[k]) for k in columns})
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


# --------------------------------------------------------------------------
# cells
# --------------------------------------------------------------------------


def _bounds_for_cell(stat, model, n, d, cov_report, theta, scale, reference_sigma=None) -> list:
    rho1 = truncated_norm(model, n, 1.0)
    s_star = cov_report.sigma_star_sq
    reports = []
    if s_star > 0:
        reports.append(bound_main("dR", n, d, rho1, s_star, theta, scale=scale))
        reports.append(bound_main("dC", n, d, rho1, s_star, theta, scale=scale))
        if cov_report.cov_sigma_star_sq > 0:
            reports.append(
                bound_main(
                    "dW",
                    n,
                    d,
                    rho1,
                    cov_report.cov_sigma_star_sq,
                    theta,
                    sigma_dagger=math.sqrt(cov_report.cov_sigma_dagger_sq),
                    scale=scale,
                )
            )
    if stat.kind == "MoM":
        reports.append(bound_mom(n, d, rho1, scale=scale))
        if s_star > 0:
            N = d + 1
            for dist in ("dR", "dC"):
                reports.append(bound_finite_expansion(dist, n, d, N, theta, rho1, s_star, scale=scale))
    dep = classify_dependence(model)
    if reference_sigma is not None:
        m = stat.min_rank
        for dist in ("dR", "dC", "dW"):
            reports.append(bound_fixed_cov(dist, n, d, model, m, theta, reference_sigma, rho_norm_1=rho1, scale=scale))
    if dep.regime in ("SRD", "LRD") and s_star > 0:
        reports.append(bound_srd_lrd(dep.regime, "dR", n, d, dep.mu, theta, s_star, scale=scale))
    return reports


def _mc_cell(cfg, stat, model, n, d, preset_id):
    seed_words = (preset_id, n, d)
    samples = evaluate_batch(
        stat, model, n, int(cfg["replicates"]), int(cfg["master_seed"]), words=seed_words, workers=int(cfg["workers"])
    )
    report = exact_cov(stat, model, n)
    sigma = report.sigma
    cell_seed = mix64(int(cfg["master_seed"]), *seed_words)
    estimates = {}
    if "dR" in cfg["distances"]:
        fam = default_family(sigma, levels=int(cfg["levels"]), random_count=int(cfg["random_boxes"]), seed=cell_seed)
        estimates["dR"] = estimate_dR(samples, sigma, fam, n_ref=int(cfg["n_ref"]), seed=cell_seed)
    if "dC_ball" in cfg["distances"]:
        estimates["dC_ball"] = estimate_dC_ball(samples, sigma, n_ref=int(cfg["n_ref"]), seed=cell_seed)
    if "dW1" in cfg["distances"]:
        estimates["dW1"] = estimate_dW1_marginal(samples, sigma)
    return report, estimates, cell_seed


def _theta_for(stat):
    return fit_theta(stat.expansions)


def run(config: dict, write: bool = True) -> ResultBundle:
    """Run a preset or custom configuration.

    Returns the result bundle; when an output directory is configured (or
    set through ``SUBORDLAB_OUTPUT_DIR``) and ``write`` is true, the tables
    and summary are written there. A failing cell raises
    :class:`ExperimentError` after flushing the partial results.
    """
    cfg = resolve_config(config)
    bundle = ResultBundle(config=_jsonable(cfg))
    name = cfg["preset"]
    preset_id = preset_index(name)
    model = AutocovarianceModel.from_config(cfg["model"])
    scale = float(cfg["scale_C"])
    out_dir = cfg.get("output_dir") if write else None

    def flush():
        if out_dir:
            bundle.write(out_dir)

    if name == "fgn_eigen":
        hurst = model.hurst
        tau = float(cfg["statistic"].get("tau", 1.302))
        try:
            check = prop27_fgn_check(hurst, tau, cfg["n_grid"], cfg["d_grid"])
        except Exception as exc:  # noqa: BLE001
            flush()
            raise ExperimentError(f"fgn_eigen failed: {exc}", (None, None), bundle) from exc
        bundle.results.append(check.to_dict())
        for row in check.rows:
            bundle.covariance_rows.append(
                {
                    "n": row["n"],
                    "d": row["d"],
                    "sigma_star_sq": row["sigma_star_sq"],
                    "gershgorin_lower": row["sigma_star_lower"],
                    "Q_used": row["Q_used"],
                }
            )
        bundle.slopes = {}
        flush()
        return bundle

    for d in cfg["d_grid"]:
        for n in cfg["n_grid"]:
            try:
                stat = build_statistic(cfg["statistic"], d)
                theta = _theta_for(stat)
                report, estimates, cell_seed = _mc_cell(cfg, stat, model, n, d, preset_id)
                reference = None
                cell = {"n": n, "d": d, "statistic": stat.describe(), "theta": theta.to_dict()}
                if stat.kind == "BreuerMajor":
                    try:
                        reference = limiting_cov(stat, model)
                        cell["limit_discrepancy"] = cov_discrepancy(reference, report.sigma)
                    except ValueError as exc:
                        cell["limit_note"] = str(exc)
                bounds = _bounds_for_cell(stat, model, n, d, report, theta, scale, reference)
            except Exception as exc:  # noqa: BLE001
                flush()
                raise ExperimentError(f"cell (n={n}, d={d}) failed: {exc}", (n, d), bundle) from exc
            cov = report.to_dict()
            cell["covariance"] = cov
            cell["estimates"] = {k: e.to_row(n, d, cell_seed) for k, e in estimates.items()}
            cell["bounds"] = [b.to_dict() for b in bounds]
            bundle.results.append(cell)
            for e in estimates.values():
                bundle.estimate_rows.append(e.to_row(n, d, cell_seed))
            for b in bounds:
                bundle.bound_rows.append(
                    {
                        "n": n,
                        "d": d,
                        "distance": b.distance,
                        "formula_id": b.formula_id,
                        "value": b.value if math.isfinite(b.value) else None,
                        "log_value": b.log_value,
                        "admissible": b.admissible,
                        "scale_C": b.scale_C,
                    }
                )
            bundle.covariance_rows.append(
                {
                    "n": n,
                    "d": d,
                    "sigma_star_sq": report.sigma_star_sq,
                    "sigma_dagger_sq": report.sigma_dagger_sq,
                    "gershgorin_lower": report.gershgorin_lower,
                    "Q_used": report.q_used,
                    "tail": report.tail,
                }
            )
    bundle.slopes = _slopes(bundle, cfg)
    flush()
    return bundle


def _slopes(bundle: ResultBundle, cfg: dict) -> dict:
    slopes = {}
    single_d = len(cfg["d_grid"]) == 1
    for d in cfg["d_grid"]:
        rows = [r for r in bundle.estimate_rows if r["d"] == d]
        for method in sorted({r["method"] for r in rows}):
            pts = [(r["n"], r["point"]) for r in rows if r["method"] == method and r["point"] > 0]
            if len(pts) < 3:
                continue
            short = method.split("/")[0]
            key = short if single_d else f"{short}@d={d}"
            slopes[key] = rate_fit(pts, "loglog").slope
            if short == "rectangles":
                slopes[key + "_logcorrected"] = rate_fit(pts, "loglog_logcorrected").slope
    if len(cfg["n_grid"]) == 1 and len(cfg["d_grid"]) >= 3:
        n = cfg["n_grid"][0]
        rows = [r for r in bundle.estimate_rows if r["n"] == n]
        for method in sorted({r["method"] for r in rows}):
            pts = [(r["d"], r["point"]) for r in rows if r["method"] == method and r["point"] > 0]
            if len(pts) >= 3 and all(p[0] > 1 for p in pts):
                slopes[f"{method.split('/')[0]}_vs_d"] = rate_fit(pts, "loglog").slope
    return slopes


CSV_HELP = (
    "estimates.csv: " + ",".join(CSV_COLUMNS) + " (method tags name the estimator family; "
    "point is the largest gap, half_width a 95% union-bound half-width). "
    "bounds.csv: " + ",".join(BOUND_COLUMNS) + " (value with the user scale C; empty when it overflows; "
    "admissible flags the decay hypotheses). "
    "covariance.csv: " + ",".join(COVARIANCE_COLUMNS) + " (extreme correlation eigenvalues, "
    "Gershgorin margin 1 - ||Lambda - I||_inf, Mehler terms used and tail bound)."
)
