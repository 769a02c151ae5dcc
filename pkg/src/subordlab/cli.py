"""Command-line interface: ``subordlab <command> [options]``."""

from __future__ import annotations

import json
import sys

import click
import numpy as np

from .autocovariance import AutocovarianceModel, truncated_norm
from .bounds import (
    admissibility,
    bound_finite_expansion,
    bound_fixed_cov,
    bound_main,
    bound_mom,
    bound_srd_lrd,
)
from .covariance import covariance_report, exact_cov, limiting_cov
from .distance import (
    default_family,
    estimate_dC_ball,
    estimate_dR,
    estimate_dW1_marginal,
    write_estimates_csv,
)
from .experiments import CSV_HELP, OUTPUT_DIR_ENV, ExperimentError, build_statistic, list_presets, run
from .gaussian_sim import generate_paths, write_paths_binary
from .hermite import CATALOG_NAMES, ThetaParams, catalog_expansion, fit_theta, reference_theta
from .statistics import KINDS, batch_seeds, evaluate_batch, write_batch_csv


def _echo_json(obj) -> None:
    click.echo(json.dumps(obj, indent=2, sort_keys=True))


def _parse_floats(text: str | None):
    if text is None:
        return None
    return [float(x) for x in text.split(",") if x.strip()]


def _parse_ints(text: str | None):
    if text is None:
        return None
    return [int(x) for x in text.split(",") if x.strip()]


def model_options(func):
    """Shared options describing the autocovariance model."""
    opts = [
        click.option("--model", "model_kind", type=click.Choice(["iid", "ar1", "fgn", "powerlaw"]), default="iid",
                     show_default=True, help="Autocovariance model."),
        click.option("--phi", type=float, default=0.5, show_default=True, help="AR(1) coefficient."),
        click.option("--hurst", type=float, default=0.3, show_default=True, help="fGn Hurst index."),
        click.option("--mu", type=float, default=0.8, show_default=True, help="Power-law decay exponent."),
        click.option("--ctilde", type=float, default=1.0, show_default=True, help="Power-law scale in (0, 1]."),
    ]
    for opt in reversed(opts):
        func = opt(func)
    return func


def _model(model_kind, phi, hurst, mu, ctilde) -> AutocovarianceModel:
    if model_kind == "iid":
        return AutocovarianceModel.iid()
    if model_kind == "ar1":
        return AutocovarianceModel.ar1(phi)
    if model_kind == "fgn":
        return AutocovarianceModel.fgn(hurst)
    return AutocovarianceModel.power_law(ctilde, mu)


def statistic_options(func):
    """Shared options describing the statistic."""
    opts = [
        click.option("--stat", "stat_kind", type=click.Choice(list(KINDS)), default="ECF_cos", show_default=True,
                     help="Statistic kind."),
        click.option("--d", "dim", type=int, default=2, show_default=True, help="Dimension."),
        click.option("--tau", type=float, default=1.0, show_default=True, help="Evaluation points lambda_i = i^tau."),
        click.option("--lambdas", type=str, default=None, help="Comma-separated evaluation points (overrides --tau)."),
        click.option("--phi-coeffs", type=str, default="2:0.7071067811865476", show_default=True,
                     help="Block-sum function as q:a_q pairs, comma-separated."),
        click.option("--partition", type=str, default=None, help="Comma-separated block partition 0=t0<...<td."),
    ]
    for opt in reversed(opts):
        func = opt(func)
    return func


def _statistic(stat_kind, dim, tau, lambdas, phi_coeffs, partition):
    options = {"kind": stat_kind, "tau": tau}
    if lambdas:
        options["lambdas"] = _parse_floats(lambdas)
        dim = len(options["lambdas"])
    if stat_kind == "BreuerMajor":
        options["phi"] = {int(k): float(v) for k, v in (p.split(":") for p in phi_coeffs.split(","))}
        if partition:
            options["partition"] = _parse_floats(partition)
            dim = len(options["partition"]) - 1
    return build_statistic(options, dim)


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Berry–Esseen laboratory for subordinated Gaussian statistics."""


# --------------------------------------------------------------------------


@main.command()
@model_options
@click.option("--n", type=int, required=True, help="Path length.")
@click.option("--paths", type=int, default=1, show_default=True, help="Number of paths.")
@click.option("--seed", type=int, default=0, show_default=True, help="Master seed; path r uses mix64(seed, r).")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Binary output (uint32 n then float64 values per path). CSV on stdout if omitted.")
def simulate(model_kind, phi, hurst, mu, ctilde, n, paths, seed, out):
    """Simulate stationary Gaussian paths.

    CSV columns: path, k, value.
    """
    model = _model(model_kind, phi, hurst, mu, ctilde)
    matrix = generate_paths(model, n, batch_seeds(seed, paths))
    if out:
        with open(out, "wb") as fh:
            write_paths_binary(fh, matrix)
        click.echo(f"wrote {paths} paths of length {n} to {out}")
        return
    click.echo("path,k,value")
    for r, row in enumerate(matrix):
        for k, v in enumerate(row):
            click.echo(f"{r},{k},{v!r}")


@main.command()
@click.option("--name", type=click.Choice(list(CATALOG_NAMES)), required=True, help="Catalog function.")
@click.option("--param", "params", multiple=True, help="Parameter as key=value (lam, i, sigma2).")
@click.option("--q-max", type=int, default=30, show_default=True, help="Largest coefficient index.")
@click.option("--fit/--no-fit", default=True, show_default=True, help="Fit decay parameters.")
def coeffs(name, params, q_max, fit):
    """Hermite coefficients of a catalog function as JSON."""
    p = {}
    for item in params:
        key, _, value = item.partition("=")
        p[key.strip()] = float(value)
    if name == "mom_hermite" and "i" in p:
        p["i"] = int(p["i"])
    exp = catalog_expansion(name, p, q_max)
    out = exp.to_dict()
    if fit:
        out["theta_fit"] = fit_theta(exp).to_dict()
        out["theta_reference"] = reference_theta(name, p, q_max).to_dict()
    _echo_json(out)


@main.command()
@statistic_options
@model_options
@click.option("--n", type=int, default=256, show_default=True, help="Sample size.")
@click.option("--limit/--no-limit", default=False, show_default=True, help="Report the n -> infinity covariance.")
@click.option("--tol", type=float, default=1e-12, show_default=True, help="Mehler tail tolerance.")
def cov(stat_kind, dim, tau, lambdas, phi_coeffs, partition, model_kind, phi, hurst, mu, ctilde, n, limit, tol):
    """Exact covariance report (JSON) of a statistic."""
    stat = _statistic(stat_kind, dim, tau, lambdas, phi_coeffs, partition)
    model = _model(model_kind, phi, hurst, mu, ctilde)
    if limit:
        click.echo(covariance_report(limiting_cov(stat, model, tol=tol)).to_json())
    else:
        click.echo(exact_cov(stat, model, n, tol=tol).to_json())


@main.command()
@click.option("--formula", type=click.Choice(["main", "fixed", "srd", "lrd", "mom", "finite", "admissibility"]),
              default="main", show_default=True, help="Which bound to evaluate.")
@click.option("--distance", type=click.Choice(["dR", "dC", "dW"]), default="dR", show_default=True)
@click.option("--n", type=int, default=10_000, show_default=True)
@click.option("--d", "dim", type=int, default=2, show_default=True)
@click.option("--rho-norm", type=float, default=None, help="||rho_n||_1; computed from the model if omitted.")
@click.option("--sigma-star-sq", type=float, default=1.0, show_default=True, help="Smallest correlation eigenvalue.")
@click.option("--sigma-dagger", type=float, default=None, help="Square root of the largest covariance eigenvalue.")
@click.option("--beta", type=float, default=1.0, show_default=True)
@click.option("--kappa", type=float, default=0.0, show_default=True)
@click.option("--c", "c_const", type=float, default=1.0, show_default=True)
@click.option("--N", "n_support", type=int, default=2, show_default=True, help="Largest nonzero Hermite index.")
@click.option("--m", "rank", type=int, default=2, show_default=True, help="Hermite rank for the fixed bound.")
@click.option("--lam", type=float, default=None, help="Dimension growth exponent for admissibility.")
@click.option("--regime", type=click.Choice(["dR", "dC", "dW", "dR_poly", "dC_poly"]), default="dR")
@click.option("--dependence", type=click.Choice(["SRD", "LRD"]), default="SRD")
@click.option("--scale", type=float, default=1.0, show_default=True, help="User constant C.")
@click.option("--c-multiplier/--no-c-multiplier", default=False, help="Multiply C by the decay-constant factor.")
@model_options
def bound(formula, distance, n, dim, rho_norm, sigma_star_sq, sigma_dagger, beta, kappa, c_const, n_support, rank,
          lam, regime, dependence, scale, c_multiplier, model_kind, phi, hurst, mu, ctilde):
    """Evaluate a bound formula (JSON). Values use the user constant C and are not certified."""
    theta = ThetaParams.of(beta, kappa, c_const)
    model = _model(model_kind, phi, hurst, mu, ctilde)
    rho1 = rho_norm if rho_norm is not None else truncated_norm(model, n, 1.0)
    if formula == "admissibility":
        _echo_json(admissibility(theta, regime, lam=lam, dependence=dependence, mu=mu).to_dict())
        return
    if formula == "main":
        rep = bound_main(distance, n, dim, rho1, sigma_star_sq, theta, sigma_dagger, scale, c_multiplier)
    elif formula == "fixed":
        sigma = np.eye(dim) * sigma_star_sq
        rep = bound_fixed_cov(distance, n, dim, model, rank, theta, sigma, rho1, scale, c_multiplier)
    elif formula in ("srd", "lrd"):
        rep = bound_srd_lrd(formula.upper(), distance, n, dim, mu if formula == "lrd" else max(mu, 1.0), theta,
                            sigma_star_sq, sigma_dagger=sigma_dagger, scale=scale, c_multiplier=c_multiplier)
    elif formula == "mom":
        rep = bound_mom(n, dim, rho1, scale)
    else:
        rep = bound_finite_expansion(distance, n, dim, n_support, theta, rho1, sigma_star_sq, scale, c_multiplier)
    click.echo(rep.to_json())


@main.command()
@statistic_options
@model_options
@click.option("--n", type=int, default=256, show_default=True, help="Sample size.")
@click.option("--replicates", type=int, default=10_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--n-ref", type=int, default=10**6, show_default=True, help="Reference Monte Carlo draws.")
@click.option("--samples-out", type=click.Path(dir_okay=False), default=None, help="Also write the sample matrix as CSV.")
def distance(stat_kind, dim, tau, lambdas, phi_coeffs, partition, model_kind, phi, hurst, mu, ctilde, n, replicates,
             seed, n_ref, samples_out):
    """Distance estimates between S_n and the Gaussian with its exact covariance.

    CSV columns: n,d,method,point,half_width,family_size,replicates,seed.
    """
    stat = _statistic(stat_kind, dim, tau, lambdas, phi_coeffs, partition)
    model = _model(model_kind, phi, hurst, mu, ctilde)
    samples = evaluate_batch(stat, model, n, replicates, seed)
    if samples_out:
        with open(samples_out, "w", encoding="utf-8") as fh:
            write_batch_csv(fh, samples)
    sigma = exact_cov(stat, model, n).sigma
    fam = default_family(sigma, seed=seed)
    rows = [
        estimate_dR(samples, sigma, fam, n_ref=n_ref, seed=seed).to_row(n, stat.d, seed),
        estimate_dC_ball(samples, sigma, n_ref=n_ref, seed=seed).to_row(n, stat.d, seed),
        estimate_dW1_marginal(samples, sigma).to_row(n, stat.d, seed),
    ]
    write_estimates_csv(sys.stdout, rows)


@main.command(epilog=CSV_HELP)
@click.option("--preset", type=click.Choice(sorted(list_presets())), default="custom", show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON configuration; flags override its fields.")
@click.option("--n-grid", type=str, default=None, help="Comma-separated, strictly increasing sample sizes.")
@click.option("--d-grid", type=str, default=None, help="Comma-separated dimensions.")
@click.option("--replicates", type=int, default=None)
@click.option("--n-ref", type=int, default=None, help="Reference Monte Carlo draws.")
@click.option("--seed", "master_seed", type=int, default=None, help="Master seed.")
@click.option("--scale", "scale_C", type=float, default=None, help="User constant C for the bounds.")
@click.option("--workers", type=int, default=None, help="Processes for replicate batches.")
@click.option("--output-dir", type=click.Path(file_okay=False), default=None, envvar=OUTPUT_DIR_ENV,
              help=f"Output directory (environment variable {OUTPUT_DIR_ENV}).")
def experiment(preset, config_path, n_grid, d_grid, replicates, n_ref, master_seed, scale_C, workers, output_dir):
    """Run a preset and write estimates.csv, bounds.csv, covariance.csv and summary.json.

    Without an output directory the JSON summary goes to stdout.
    """
    cfg = {}
    if config_path:
        with open(config_path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    if preset != "custom" or "preset" not in cfg:
        cfg["preset"] = preset
    overrides = {
        "n_grid": _parse_ints(n_grid),
        "d_grid": _parse_ints(d_grid),
        "replicates": replicates,
        "n_ref": n_ref,
        "master_seed": master_seed,
        "scale_C": scale_C,
        "workers": workers,
        "output_dir": output_dir,
    }
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    try:
        bundle = run(cfg)
    except (ExperimentError, ValueError) as exc:
        raise click.ClickException(str(exc)) from exc
    if cfg.get("output_dir"):
        click.echo(json.dumps({"output_dir": cfg["output_dir"], "slopes": bundle.slopes}, indent=2, sort_keys=True))
    else:
        click.echo(bundle.summary_json(), nl=False)


@main.command()
def presets():
    """List experiment presets."""
    for name, text in list_presets().items():
        click.echo(f"{name}: {text}")


if __name__ == "__main__":  # pragma: no cover
    main()
