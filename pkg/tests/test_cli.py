"""CLI (thin client over the in-process service)."""

import numpy as np
import pytest
from click.testing import CliRunner

from fmmlab.cli import main
from fmmlab.matio import loads_mat, read_mat, write_mat


@pytest.fixture()
def runner():
    return CliRunner()


def _invoke(runner, *args):
    result = runner.invoke(main, list(args), catch_exceptions=False)
    return result


def test_matio_roundtrip(tmp_path):
    A = np.arange(6.0).reshape(2, 3) / 7.0
    path = tmp_path / "a.mat"
    write_mat(A, path)
    assert np.array_equal(read_mat(path), A)
    with pytest.raises(ValueError):
        loads_mat("2 2\n1 2 3")
    with pytest.raises(ValueError):
        loads_mat("")


def test_catalog_listing_and_export(runner, tmp_path):
    result = _invoke(runner, "catalog")
    assert result.exit_code == 0 and "asopt" in result.output
    out = tmp_path / "strassen.hm"
    result = _invoke(runner, "catalog", "strassen", "-o", str(out))
    assert result.exit_code == 0 and out.exists()


def test_validate_gamma_bound(runner, tmp_path):
    hm = tmp_path / "s.hm"
    _invoke(runner, "catalog", "strassen", "-o", str(hm))
    result = _invoke(runner, "validate", str(hm))
    assert result.exit_code == 0 and "valid" in result.output
    result = _invoke(runner, "gamma", str(hm))
    assert "14.828427" in result.output
    result = _invoke(runner, "bound", "--k0", "1", "--ell", "1", str(hm))
    assert "1.080000e+02" in result.output


def test_orbit_apply_and_optimize(runner, tmp_path):
    hm = tmp_path / "s.hm"
    out = tmp_path / "moved.hm"
    _invoke(runner, "catalog", "strassen", "-o", str(hm))
    result = _invoke(runner, "orbit", "apply", "--rho", "9/8", "--xi", "-1/2", "-o", str(out), str(hm))
    assert result.exit_code == 0 and out.exists()
    result = _invoke(runner, "validate", str(out))
    assert result.exit_code == 0
    result = _invoke(runner, "optimize-orbit", "--starts", "4")
    assert "12.06603" in result.output


def test_approx_and_sparsify(runner, tmp_path):
    out = tmp_path / "approx.hm"
    result = _invoke(runner, "approx", "--order", "2", "-o", str(out))
    assert result.exit_code == 0 and "12.2034" in result.output
    hm = tmp_path / "asopt.hm"
    _invoke(runner, "catalog", "asopt", "-o", str(hm))
    cob = tmp_path / "cob.hm"
    sparse = tmp_path / "sparse.hm"
    result = _invoke(runner, "sparsify", str(hm), "-o", str(cob), str(sparse))
    assert result.exit_code == 0 and cob.exists() and sparse.exists()
    assert "core additions 12" in result.output
    result = _invoke(runner, "sparsify-rot", "--budget", "36", str(hm))
    assert result.exit_code == 0 and "gamma21" in result.output


def test_slp_command(runner, tmp_path):
    mat = tmp_path / "m.txt"
    mat.write_text("1 1 0\n1 1 1\n")
    result = _invoke(runner, "slp", "optimize", str(mat))
    assert result.exit_code == 0 and "adds=2" in result.output


def test_multiply_command(runner, tmp_path):
    rng = np.random.default_rng(0)
    A = rng.standard_normal((6, 6))
    B = rng.standard_normal((6, 6))
    a_path, b_path, c_path = (tmp_path / f for f in ("a.mat", "b.mat", "c.mat"))
    write_mat(A, a_path)
    write_mat(B, b_path)
    result = _invoke(runner, "multiply", "--alg", "asopt", str(a_path), str(b_path), "-o", str(c_path))
    assert result.exit_code == 0
    assert np.max(np.abs(read_mat(c_path) - A @ B)) < 1e-13
    result = _invoke(
        runner, "multiply", "--alg", "asopt", "--sparse", "--cutoff", "2",
        str(a_path), str(b_path), "-o", str(c_path),
    )
    assert result.exit_code == 0
    assert np.max(np.abs(read_mat(c_path) - A @ B)) < 1e-13


def test_bench_and_tables(runner, tmp_path):
    csv_path = tmp_path / "bench.csv"
    summary_path = tmp_path / "summary.csv"
    result = _invoke(
        runner, "bench", "--algs", "strassen,conventional", "--dists", "normal",
        "--sizes", "8,16", "--seeds", "2", "-o", str(csv_path), "--summary", str(summary_path),
    )
    assert result.exit_code == 0
    text = csv_path.read_text()
    assert text.startswith("alg,dist,n,seed,cutoff,err_max,bound")
    assert len(text.splitlines()) == 1 + 2 * 2 * 2
    # identical invocation writes identical bytes
    again = tmp_path / "bench2.csv"
    _invoke(
        runner, "bench", "--algs", "strassen,conventional", "--dists", "normal",
        "--sizes", "8,16", "--seeds", "2", "-o", str(again),
    )
    assert again.read_text() == text
    result = _invoke(runner, "tables")
    assert result.exit_code == 0 and "all values reproduced" in result.output
