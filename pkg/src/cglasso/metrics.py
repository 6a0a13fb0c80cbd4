"""Estimation error, support recovery and theory diagnostics."""
from dataclasses import dataclass

import numpy as np

from .covariance import empirical_covariance, similarity_matrix, standardize
from .errors import BlockTooLarge, DimensionMismatch, EmptyEdgeSet, SingularGamma
from .hclust import agglomerate, cut_k
from .partition import components_of_graph
from .simgen import sample_mvn

MAX_INCOHERENCE_BLOCK = 15


@dataclass(frozen=True)
class EdgeConfusion:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def tpr(self):
        denom = self.tp + self.fn
        return self.tp / denom if denom else 0.0

    @property
    def fpr(self):
        denom = self.fp + self.tn
        return self.fp / denom if denom else 0.0

    @property
    def n_estimated(self):
        return self.tp + self.fp


def _same_shape(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 2:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    return a, b


def precision_mse(theta_hat, theta_true):
    """Mean squared error over all ``p^2`` entries."""
    a, b = _same_shape(theta_hat, theta_true)
    return float(np.mean((a - b) ** 2))


def edge_confusion(theta_hat, theta_true, zero_tol=1e-8):
    """Confusion counts over unordered off-diagonal pairs.

    A pair is estimated nonzero when ``|theta_hat| > zero_tol`` and truly
    nonzero when ``theta_true != 0``.
    """
    a, b = _same_shape(theta_hat, theta_true)
    iu = np.triu_indices(a.shape[0], 1)
    est = np.abs(a[iu]) > zero_tol
    true = b[iu] != 0
    return EdgeConfusion(
        tp=int(np.sum(est & true)), fp=int(np.sum(est & ~true)),
        tn=int(np.sum(~est & ~true)), fn=int(np.sum(~est & true)))


def partition_match(a, b):
    if a.p != b.p:
        raise DimensionMismatch(f"partitions over {a.p} and {b.p} features")
    return a == b


def support_components(theta, zero_tol=1e-8):
    """Connected components of the estimated graph ``|theta| > zero_tol``."""
    return components_of_graph(np.abs(np.asarray(theta)) > zero_tol)


def incoherence(sigma_block, edges):
    """Largest ``||Gamma_eF inv(Gamma_FF)||_1`` over pairs ``e`` outside ``F``.

    ``Gamma = Sigma kron Sigma`` and ``F`` is the edge set (both orientations)
    plus the diagonal. Returns 0 when every pair is in ``F``. The
    irrepresentability condition holds when the value is below 1.
    """
    sigma = np.asarray(sigma_block, dtype=float)
    p = sigma.shape[0]
    if p > MAX_INCOHERENCE_BLOCK:
        raise BlockTooLarge(f"block of size {p} exceeds {MAX_INCOHERENCE_BLOCK}")
    in_f = np.eye(p, dtype=bool)
    for i, j in edges:
        in_f[i, j] = in_f[j, i] = True
    flat = in_f.ravel()
    f_idx = np.flatnonzero(flat)
    e_idx = np.flatnonzero(~flat)
    if e_idx.size == 0:
        return 0.0
    gamma = np.kron(sigma, sigma)
    g_ff = gamma[np.ix_(f_idx, f_idx)]
    g_ef = gamma[np.ix_(e_idx, f_idx)]
    try:
        # rows of g_ef @ inv(g_ff), via the symmetric solve
        coef = np.linalg.solve(g_ff, g_ef.T).T
    except np.linalg.LinAlgError as exc:
        raise SingularGamma(str(exc)) from exc
    return float(np.max(np.sum(np.abs(coef), axis=1)))


def theta_min_of(truth):
    if not truth.edge_set:
        raise EmptyEdgeSet("truth has no edges")
    return float(min(abs(truth.theta_true[i, j]) for i, j in truth.edge_set))


def recovers_components(x, partition_true, linkage):
    """True if clustering |S| of standardized ``x`` into K clusters finds the blocks."""
    s = empirical_covariance(standardize(x))
    found = cut_k(agglomerate(similarity_matrix(s), linkage), partition_true.k)
    return found == partition_true


def component_recovery_rate(linkage, truth, n, replicates, seed):
    """Fraction of replicates in which the clustering exactly recovers the true blocks.

    ``truth`` is a fixed :class:`SimulationTruth` or a callable mapping a
    replicate index to one (fresh ground truth per replicate).
    """
    if int(replicates) < 1:
        raise ValueError("replicates must be positive")
    hits = 0
    for r in range(int(replicates)):
        t = truth(r) if callable(truth) else truth
        x = sample_mvn(t, n, _replicate_seed(seed, r))
        hits += recovers_components(x, t.partition_true, linkage)
    return hits / int(replicates)


def _replicate_seed(seed, r):
    # distinct 63-bit seed per replicate; stable across runs
    return int(np.random.SeedSequence([int(seed), int(r)]).generate_state(1, np.uint64)[0] >> 1)
