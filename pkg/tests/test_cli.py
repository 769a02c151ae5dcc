import csv
import io
import json

import numpy as np
import pytest
from click.testing import CliRunner

from subordlab.cli import main
from subordlab.distance import CSV_COLUMNS
from subordlab.gaussian_sim import read_paths_binary


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, args):
    result = runner.invoke(main, args, catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return result.output


class TestCli:
    def test_presets(self, runner):
        out = invoke(runner, ["presets"])
        names = [line.split(":")[0] for line in out.strip().splitlines()]
        assert "mom_rate" in names and "fgn_eigen" in names

    def test_coeffs(self, runner):
        out = json.loads(invoke(runner, ["coeffs", "--name", "ecf_cos", "--param", "lam=1", "--q-max", "6"]))
        coeffs = dict((int(q), a) for q, a in out["coeffs"])
        # cos(x) = e^{-1/2} sum_k (-1)^k H_{2k}(x) / (2k)!
        for q in (2, 4, 6):
            expected = np.exp(-0.5) * (-1) ** (q // 2) / float(np.prod(np.arange(1, q + 1)))
            assert coeffs[q] == pytest.approx(expected, rel=1e-10)

    def test_bound_mom(self, runner):
        out = json.loads(invoke(runner, ["bound", "--formula", "mom", "--n", "10000", "--d", "2", "--rho-norm", "1"]))
        assert out["formula_id"] == "method_of_moments"
        assert out["value"] == pytest.approx(3.32742, abs=1e-5)

    def test_bound_admissibility(self, runner):
        out = json.loads(invoke(runner, ["bound", "--formula", "admissibility", "--lam", "0.1"]))
        assert isinstance(out, dict) and out

    def test_cov_iid(self, runner):
        out = json.loads(invoke(runner, ["cov", "--stat", "ECF_cos", "--d", "2", "--n", "16"]))
        lam = np.array(out["lambda"])
        assert lam.shape == (2, 2)
        np.testing.assert_allclose(np.diag(lam), 1.0)
        assert out["sigma_star_sq"] == pytest.approx(1 - abs(lam[0, 1]), rel=1e-12)

    def test_simulate_stdout(self, runner):
        out = invoke(runner, ["simulate", "--model", "ar1", "--n", "8", "--paths", "2", "--seed", "3"])
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["path", "k", "value"]
        assert len(rows) == 1 + 16

    def test_simulate_binary(self, runner, tmp_path):
        out_file = tmp_path / "paths.bin"
        invoke(runner, ["simulate", "--model", "fgn", "--hurst", "0.7", "--n", "32", "--paths", "3", "--out", str(out_file)])
        with open(out_file, "rb") as fh:
            paths = read_paths_binary(fh)
        assert len(paths) == 3
        assert all(p.shape == (32,) and np.all(np.isfinite(p)) for p in paths)

    def test_distance_small(self, runner, tmp_path):
        samples = tmp_path / "s.csv"
        out = invoke(runner, ["distance", "--stat", "ECF_cos", "--d", "2", "--n", "16", "--replicates", "200",
                              "--n-ref", "2000", "--samples-out", str(samples)])
        rows = list(csv.DictReader(io.StringIO(out)))
        assert list(rows[0]) == list(CSV_COLUMNS)
        assert len(rows) == 3
        assert len({r["method"] for r in rows}) == 3
        assert samples.read_text().startswith("rep,coord_1,coord_2")

    def test_experiment_help_documents_columns(self, runner):
        out = invoke(runner, ["experiment", "--help"])
        for col in CSV_COLUMNS:
            assert col in out

    def test_experiment_fgn_eigen(self, runner):
        out = json.loads(invoke(runner, ["experiment", "--preset", "fgn_eigen"]))
        assert out["results"][0]["min_sigma_star_lower"] > 0

    def test_experiment_writes_dir(self, runner, tmp_path):
        out = json.loads(invoke(runner, ["experiment", "--preset", "mom_rate", "--n-grid", "16,32", "--replicates",
                                         "1000", "--n-ref", "5000", "--output-dir", str(tmp_path)]))
        assert out["output_dir"] == str(tmp_path)
        assert (tmp_path / "estimates.csv").exists()

    def test_experiment_rejects_bad_grid(self, runner):
        result = runner.invoke(main, ["experiment", "--preset", "mom_rate", "--n-grid", "32,16"])
        assert result.exit_code != 0
