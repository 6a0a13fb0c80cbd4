import json
import subprocess
import sys

import numpy as np
import pytest

from cglasso import io
from cglasso.cli import main
from cglasso.covariance import empirical_covariance, standardize
from cglasso.glasso import solve
from cglasso.hclust import agglomerate, cut_height

from conftest import PAPER_MATRIX


def run(argv, capsys=None):
    try:
        code = main([str(a) for a in argv])
    except SystemExit as exc:
        code = exc.code
    out = capsys.readouterr().out if capsys else ""
    return code, out


@pytest.fixture
def paper_cov(tmp_path):
    path = tmp_path / "S.csv"
    io.write_matrix_csv(path, PAPER_MATRIX)
    return path


@pytest.fixture
def sim_dir(tmp_path):
    out = tmp_path / "sim"
    code, _ = run(["simulate", "--p", 12, "--k-blocks", 2, "--sparsity", 0.4, "--n", 60,
                   "--seed", 3, "--out", out])
    assert code == 0
    return out


def test_components_worked_example(paper_cov, tmp_path, capsys):
    code, out = run(["components", "--cov", paper_cov, "--lambda", 0.79, "--out", tmp_path],
                    capsys)
    assert code == 0 and out.strip() == "3"
    parts = json.loads((tmp_path / "components.json").read_text())
    assert sorted(map(sorted, parts)) == [[0, 1], [2], [3]]
    assert run(["components", "--cov", paper_cov, "--lambda", 0, "--out", tmp_path],
               capsys)[1].strip() == "1"
    assert run(["components", "--cov", paper_cov, "--lambda", 1, "--out", tmp_path],
               capsys)[1].strip() == "4"


def test_simulate_outputs(sim_dir):
    names = {p.name for p in sim_dir.iterdir()}
    assert names == {"X.csv", "theta_true.csv", "sigma_true.csv", "partition_true.json",
                     "meta.json"}
    meta = json.loads((sim_dir / "meta.json").read_text())
    assert {"seed", "s", "block_sizes", "off_block_fraction", "theta_min",
            "generator_name"} <= set(meta)
    assert meta["block_sizes"] == [6, 6]
    x = io.read_data_csv(sim_dir / "X.csv")
    assert (x.n, x.p) == (60, 12)


def test_simulate_usage_errors(tmp_path):
    base = ["simulate", "--p", 10, "--k-blocks", 2, "--sparsity", 0.4, "--out", tmp_path]
    assert run(base)[0] == 2
    assert run(base + ["--n", 20, "--off-block-frac", 1.5])[0] == 2
    assert run(["simulate", "--p", 10, "--blocks", "3,3", "--sparsity", 0.4, "--n", 20,
                "--out", tmp_path])[0] == 2


def test_estimate_cgl_and_glasso(sim_dir, tmp_path, capsys):
    x = sim_dir / "X.csv"
    code, out = run(["estimate", "--input", x, "--method", "cgl", "--linkage", "alc", "--k", 2,
                     "--lambda", 0.3, "--out", tmp_path / "cgl"], capsys)
    assert code == 0 and "clusters=2" in out
    net = json.loads((tmp_path / "cgl" / "network.json").read_text())
    assert len(net["partition"]) == 2 and net["lambdas_used"] == [0.3, 0.3]
    code, out = run(["estimate", "--input", x, "--method", "glasso", "--lambda", 0,
                     "--out", tmp_path / "gl"], capsys)
    assert code == 0
    s = empirical_covariance(standardize(io.read_data_csv(x)))
    inv = np.linalg.inv(s)
    n_pairs = int(np.count_nonzero(np.triu(inv, 1)))
    lines = (tmp_path / "gl" / "edges.csv").read_text().splitlines()
    assert len(lines) - 1 == n_pairs


@pytest.mark.parametrize("rule", ["banerjee", "corollary", "theorem4"])
def test_estimate_lambda_rules(sim_dir, tmp_path, rule, capsys):
    code, _ = run(["estimate", "--input", sim_dir / "X.csv", "--method", "cgl", "--k", 2,
                   "--lambda-rule", rule, "--out", tmp_path], capsys)
    assert code == 0


def test_estimate_cov_needs_n(paper_cov, tmp_path):
    args = ["estimate", "--cov", paper_cov, "--method", "glasso", "--lambda-rule", "banerjee",
            "--out", tmp_path]
    assert run(args)[0] == 2
    assert run(args + ["--n", 50])[0] == 0


def test_estimate_usage_errors(paper_cov, tmp_path):
    base = ["estimate", "--cov", paper_cov, "--out", tmp_path, "--lambda", 0.1]
    assert run(base + ["--method", "cgl", "--k", 0])[0] == 2
    assert run(base + ["--method", "cgl"])[0] == 2
    assert run(base + ["--method", "cgl", "--k", 2, "--linkage", "ward"])[0] == 2
    assert run(base + ["--method", "spice"])[0] == 2
    assert run(base + ["--method", "glasso", "--bogus"])[0] == 2


def test_estimate_runtime_error(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,0\n0,-1\n")
    assert run(["estimate", "--cov", bad, "--method", "glasso", "--lambda", 0.1,
                "--out", tmp_path])[0] == 1


def test_theorem2_end_to_end(tmp_path, capsys):
    rng = np.random.default_rng(8)
    x = rng.standard_normal((40, 10)) @ (np.eye(10) + 0.4 * rng.standard_normal((10, 10)))
    path = tmp_path / "x.csv"
    io.write_matrix_csv(path, x)
    s = empirical_covariance(standardize(x))
    lam = 0.25
    k = cut_height(agglomerate(np.abs(s), "single"), lam).k
    run(["estimate", "--input", path, "--method", "cgl", "--linkage", "slc", "--k", k,
         "--lambda", lam, "--out", tmp_path / "cgl"], capsys)
    run(["estimate", "--input", path, "--method", "glasso", "--lambda", lam,
         "--out", tmp_path / "gl"], capsys)
    edges = [(tmp_path / d / "edges.csv").read_text().splitlines() for d in ("cgl", "gl")]
    pairs = [[tuple(line.split(",")[:2]) for line in e[1:]] for e in edges]
    assert pairs[0] == pairs[1]
    assert len(pairs[0]) == len(solve(s, lam).edges())


def block_constant_cov(path):
    labels = np.repeat([0, 1], 10)
    sim = np.where(labels[:, None] == labels[None, :], 0.7, 0.05)
    np.fill_diagonal(sim, 1.0)
    io.write_matrix_csv(path, sim)


def test_select_k_command(tmp_path, capsys):
    cov = tmp_path / "S.csv"
    block_constant_cov(cov)
    code, out = run(["select-k", "--cov", cov, "--k-max", 5, "--t-repeats", 5,
                     "--out", tmp_path], capsys)
    assert code == 0 and out.strip() == "2"
    lines = (tmp_path / "select_k.csv").read_text().splitlines()
    assert lines[0] == "k,m_k,s_k" and len(lines) == 6
    assert run(["select-k", "--cov", cov, "--k-max", 1, "--out", tmp_path],
               capsys)[1].strip() == "1"
    assert run(["select-k", "--cov", cov, "--k-max", 3, "--t-repeats", 0,
                "--out", tmp_path])[0] == 2


def test_bench_rows_and_markers(sim_dir, tmp_path, capsys):
    code, _ = run(["bench", "--truth-prefix", sim_dir, "--methods", "glasso,cgl", "--k", 2,
                   "--lambda-grid", "0.05:0.9:4", "--replicates", 2, "--seed", 1,
                   "--out", tmp_path], capsys)
    assert code == 0
    lines = (tmp_path / "bench.csv").read_text().splitlines()
    assert lines[0] == "method,linkage,k,lambda,nnz_edges,mse,tpr,fpr,components_recovered,replicate"
    assert len(lines) - 1 == 4 * 2 * 2
    markers = (tmp_path / "bench_markers.csv").read_text().splitlines()
    assert len(markers) - 1 == 2 * 2 * 2
    assert {m.split(",")[-1] for m in markers[1:]} == {"corollary", "banerjee"}


def test_bench_usage_errors(sim_dir, tmp_path):
    base = ["bench", "--truth-prefix", sim_dir, "--replicates", 1, "--out", tmp_path]
    assert run(base + ["--lambda-grid", ""])[0] == 2
    assert run(base + ["--lambda-grid", "0.1:1"])[0] == 2
    assert run(base + ["--lambda-grid", "0.1", "--methods", "clime"])[0] == 2


def test_bench_threads_match_serial(sim_dir, tmp_path, capsys):
    outs = []
    for threads in (1, 3):
        out = tmp_path / f"t{threads}"
        run(["bench", "--truth-prefix", sim_dir, "--lambda-grid", "0.1,0.5", "--replicates", 3,
             "--threads", threads, "--out", out], capsys)
        outs.append((out / "bench.csv").read_bytes())
    assert outs[0] == outs[1]


def test_dump_config(paper_cov, tmp_path, capsys):
    code, out = run(["components", "--cov", paper_cov, "--lambda", 0.5, "--out", tmp_path,
                     "--dump-config"], capsys)
    first, count = out.strip().splitlines()
    assert json.loads(first)["lam"] == 0.5 and count == "2"


def test_module_entry_point(paper_cov, tmp_path):
    proc = subprocess.run([sys.executable, "-m", "cglasso", "components", "--cov", str(paper_cov),
                           "--lambda", "0.79", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "3"
