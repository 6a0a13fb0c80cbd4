"""Lambda-path benchmarks of glasso and CGL against a known truth."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np

from .cgl import fit_partition
from .covariance import empirical_covariance, similarity_matrix, standardize
from .glasso import solve
from .hclust import LinkageMethod, agglomerate, cut_k
from .metrics import edge_confusion, precision_mse, support_components
from .selection import SelectKConfig, banerjee_lambda, select_k, shared_corollary_lambda
from .simgen import sample_mvn

BENCH_COLUMNS = ["method", "linkage", "k", "lambda", "nnz_edges", "mse", "tpr", "fpr",
                 "components_recovered", "replicate"]
MARKER_COLUMNS = BENCH_COLUMNS + ["marker"]


@dataclass(frozen=True)
class MethodSpec:
    """``glasso``, or ``cgl`` with a linkage and a cluster count (``"auto"`` selects K)."""

    method: str
    linkage: Optional[LinkageMethod] = None
    k: Union[int, str, None] = None

    def __post_init__(self):
        if self.method not in ("glasso", "cgl"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.method == "cgl":
            object.__setattr__(self, "linkage", LinkageMethod.parse(self.linkage or "average"))
            if self.k != "auto" and (self.k is None or int(self.k) < 1):
                raise ValueError(f"cgl needs k >= 1 or 'auto', got {self.k!r}")


def _record(spec, linkage, k, lam, theta, truth, replicate):
    conf = edge_confusion(theta, truth.theta_true)
    recovered = support_components(theta) == truth.partition_true
    return [spec.method, linkage, k, float(lam), conf.n_estimated,
            precision_mse(theta, truth.theta_true), conf.tpr, conf.fpr, int(recovered),
            replicate]


def _partition_for(spec, s_tilde, p, k_true, seed):
    if spec.method == "glasso":
        # glasso's components are single-linkage clusters of |S|
        return cut_k(agglomerate(s_tilde, LinkageMethod.SINGLE), min(k_true, p)), "single", "-"
    k = spec.k
    if k == "auto":
        cfg = SelectKConfig(range(1, min(p, 10) + 1), 10, spec.linkage, seed)
        k = select_k(s_tilde, cfg).chosen_k
    k = min(int(k), p)
    return cut_k(agglomerate(s_tilde, spec.linkage), k), spec.linkage.value, k


def run_replicate(truth, n, specs, grid, replicate, seed, alpha=0.05, epsilon=1e-3,
                  glasso_cfg=None):
    """One replicate: fresh data, every method over the grid plus the two marker lambdas."""
    data_seed = int(np.random.SeedSequence([int(seed), int(replicate)])
                    .generate_state(1, np.uint64)[0] >> 1)
    x = standardize(sample_mvn(truth, n, data_seed))
    s = empirical_covariance(x)
    s_tilde = similarity_matrix(s)
    p = s.shape[0]
    rows, markers = [], []
    lam_banerjee = banerjee_lambda(s, n, alpha)
    for spec in specs:
        partition, linkage, k = _partition_for(spec, s_tilde, p, truth.partition_true.k, data_seed)
        lam_corollary = shared_corollary_lambda(s_tilde, partition, epsilon)
        if spec.method == "glasso":
            def fit(lam):
                return solve(s, lam, glasso_cfg).theta
        else:
            def fit(lam):
                return fit_partition(s, partition, [lam] * partition.k, glasso_cfg).theta
        for lam in grid:
            rows.append(_record(spec, linkage, k, lam, fit(lam), truth, replicate))
        for name, lam in (("corollary", lam_corollary), ("banerjee", lam_banerjee)):
            markers.append(_record(spec, linkage, k, lam, fit(lam), truth, replicate) + [name])
    return rows, markers


def run_bench(truth, n, specs: Sequence[MethodSpec], grid, replicates, seed, alpha=0.05,
              epsilon=1e-3, threads=1, glasso_cfg=None):
    """Run every replicate; rows come back in (replicate, method, lambda) order."""
    grid = [float(v) for v in grid]
    if not grid:
        raise ValueError("empty lambda grid")

    def job(r):
        return run_replicate(truth, n, specs, grid, r, seed, alpha, epsilon, glasso_cfg)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, range(int(replicates))))
    else:
        results = [job(r) for r in range(int(replicates))]
    rows: List[list] = [row for r, _ in results for row in r]
    markers: List[list] = [row for _, m in results for row in m]
    return rows, markers


def parse_grid(text):
    """``start:stop:count`` (inclusive linspace) or a comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"bad grid {text!r}; expected start:stop:count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ValueError("grid count must be positive")
        return np.linspace(start, stop, count).tolist()
    values = [float(v) for v in text.split(",") if v.strip()]
    if not values:
        raise ValueError("empty lambda grid")
    return values


def summarize(rows, method, linkage=None, k=None):
    """Mean nnz/mse/tpr/fpr per lambda for one method config, sorted by lambda."""
    sel = [r for r in rows if r[0] == method and (linkage is None or r[1] == linkage)
           and (k is None or r[2] == k)]
    lams = sorted({r[3] for r in sel})
    out = []
    for lam in lams:
        at = np.array([r[4:8] for r in sel if r[3] == lam], dtype=float)
        out.append((lam, *at.mean(axis=0)))
    return np.array(out)
