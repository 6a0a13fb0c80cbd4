"""Cluster graphical lasso: cluster features on |S|, then solve glasso per cluster."""
from dataclasses import dataclass, field
from typing import List, Sequence, Union

import numpy as np

from .covariance import check_symmetric
from .errors import ClusterSolveError, DimensionMismatch, InvalidK, LengthMismatch
from .glasso import GlassoConfig, GlassoFit, solve
from .hclust import LinkageMethod, agglomerate, cut_k
from .partition import Partition


@dataclass(frozen=True)
class CglConfig:
    linkage: LinkageMethod = LinkageMethod.AVERAGE
    k: int = 1
    lambdas: Union[float, Sequence[float]] = 0.1
    glasso_cfg: GlassoConfig = field(default_factory=GlassoConfig)

    def __post_init__(self):
        object.__setattr__(self, "linkage", LinkageMethod.parse(self.linkage))
        if int(self.k) < 1:
            raise InvalidK(f"k must be positive, got {self.k}")
        lams = np.atleast_1d(np.asarray(self.lambdas, dtype=float))
        if lams.ndim != 1 or len(lams) not in (1, int(self.k)):
            raise LengthMismatch(f"need 1 or {self.k} lambdas, got {len(lams)}")
        if np.any(~(lams >= 0)) or np.any(np.isinf(lams)):
            raise ValueError("lambdas must be finite and nonnegative")

    def lambda_list(self):
        lams = np.atleast_1d(np.asarray(self.lambdas, dtype=float)).tolist()
        return lams * int(self.k) if len(lams) == 1 else lams


@dataclass
class CglFit:
    partition: Partition
    per_cluster: List[GlassoFit]
    theta: np.ndarray
    lambdas_used: List[float]

    @property
    def converged(self):
        return all(f.converged for f in self.per_cluster)

    @property
    def objective(self):
        return float(sum(f.objective for f in self.per_cluster))

    @property
    def kkt_residual(self):
        return max(f.kkt_residual for f in self.per_cluster)

    @property
    def sweeps(self):
        return max(f.sweeps for f in self.per_cluster)

    def to_dict(self):
        return {
            "theta": self.theta.tolist(),
            "objective": self.objective,
            "kkt_residual": self.kkt_residual,
            "sweeps": self.sweeps,
            "converged": self.converged,
            "partition": [list(c) for c in self.partition],
            "lambdas_used": list(self.lambdas_used),
            "per_cluster_summaries": [
                {"cluster": k, "size": len(c), "lambda": lam, "objective": f.objective,
                 "kkt_residual": f.kkt_residual, "sweeps": f.sweeps,
                 "converged": f.converged}
                for k, (c, lam, f) in enumerate(zip(self.partition, self.lambdas_used,
                                                     self.per_cluster))
            ],
        }


def fit_partition(s, partition, lambdas, glasso_cfg=None):
    """Solve glasso on each cluster's principal submatrix and assemble the result."""
    s = check_symmetric(s)
    if partition.p != s.shape[0]:
        raise DimensionMismatch(f"partition over {partition.p} features, S is {s.shape}")
    lambdas = [float(v) for v in lambdas]
    if len(lambdas) != partition.k:
        raise LengthMismatch(f"{len(lambdas)} lambdas for {partition.k} clusters")
    theta = np.zeros_like(s)
    fits = []
    for k, (cluster, lam) in enumerate(zip(partition, lambdas)):
        ix = np.array(cluster)
        sub = np.ix_(ix, ix)
        try:
            fit = solve(s[sub], lam, glasso_cfg)
        except Exception as exc:
            raise ClusterSolveError(k, exc) from exc
        theta[sub] = fit.theta
        fits.append(fit)
    return CglFit(partition, fits, theta, lambdas)


def run_cgl(s, sim, cfg):
    """Cluster on ``sim`` with ``cfg.linkage``, cut into ``cfg.k`` clusters, fit each."""
    s = check_symmetric(s)
    sim = check_symmetric(sim)
    if s.shape != sim.shape:
        raise DimensionMismatch(f"S is {s.shape} but similarity is {sim.shape}")
    if cfg.k > s.shape[0]:
        raise InvalidK(f"k={cfg.k} exceeds p={s.shape[0]}")
    partition = cut_k(agglomerate(sim, cfg.linkage), cfg.k)
    return fit_partition(s, partition, cfg.lambda_list(), cfg.glasso_cfg)


def weights_from_partition(partition, lambdas):
    """Penalty matrix: ``lambdas[k]`` inside cluster k, ``inf`` across clusters."""
    lambdas = list(lambdas)
    if len(lambdas) != partition.k:
        raise LengthMismatch(f"{len(lambdas)} lambdas for {partition.k} clusters")
    w = np.full((partition.p, partition.p), np.inf)
    for cluster, lam in zip(partition, lambdas):
        ix = np.array(cluster)
        w[np.ix_(ix, ix)] = float(lam)
    np.fill_diagonal(w, 0.0)
    return w
