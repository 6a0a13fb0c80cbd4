"""Ground-truth sparse precision matrices and Gaussian samples drawn from them."""
from dataclasses import dataclass, field
from typing import FrozenSet, Optional, Sequence, Tuple

import numpy as np

from ._rng import GENERATOR_NAME, derive_rng
from .errors import FactorizationFailed
from .partition import Partition, components_of_graph

DIAGONAL_MARGIN = 0.1


@dataclass(frozen=True)
class SimulationTruth:
    theta_true: np.ndarray
    sigma_true: np.ndarray
    partition_true: Partition
    edge_set: FrozenSet[Tuple[int, int]]
    theta_min: float
    sparsity_s: float
    off_block_fraction: float
    seed: int
    block_sizes: Tuple[int, ...] = ()
    # off-diagonal pattern before the diagonal shift; perturbation edits this
    offdiag: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    @property
    def p(self):
        return self.theta_true.shape[0]

    def meta(self):
        return {
            "seed": self.seed,
            "s": self.sparsity_s,
            "block_sizes": list(self.block_sizes),
            "off_block_fraction": self.off_block_fraction,
            "theta_min": self.theta_min,
            "generator_name": GENERATOR_NAME,
        }


def _partition_from_sizes(block_sizes):
    clusters, start = [], 0
    for size in block_sizes:
        clusters.append(tuple(range(start, start + size)))
        start += size
    return Partition(start, tuple(clusters))


def _edge_set(theta):
    i, j = np.nonzero(np.triu(theta != 0, 1))
    return frozenset(zip(i.tolist(), j.tolist()))


def _finish(offdiag, **fields):
    """Shift the diagonal to make ``offdiag`` positive definite and fill derived fields."""
    e_min = np.linalg.eigvalsh(offdiag)[0] if offdiag.size else 0.0
    theta = offdiag.copy()
    np.fill_diagonal(theta, max(-e_min, 0.0) + DIAGONAL_MARGIN)
    edges = _edge_set(theta)
    theta_min = min(abs(theta[e]) for e in edges) if edges else 0.0
    sigma = np.linalg.inv(theta)
    sigma = (sigma + sigma.T) / 2.0
    return SimulationTruth(theta_true=theta, sigma_true=sigma, edge_set=edges,
                           theta_min=float(theta_min), offdiag=offdiag, **fields)


def generate_precision(block_sizes: Sequence[int], s: float, rng_seed: int) -> SimulationTruth:
    """Random block-diagonal sparse precision matrix.

    Within each block an off-diagonal pair is zero with probability ``s``,
    otherwise Unif(0.25, 0.75) with probability 3/4 and Unif(-0.75, -0.25)
    with probability 1/4. The diagonal is then set to
    ``max(-e_min, 0) + 0.1`` where ``e_min`` is the smallest eigenvalue of
    the zero-diagonal matrix.
    """
    block_sizes = tuple(int(b) for b in block_sizes)
    if not block_sizes or min(block_sizes) < 1:
        raise ValueError("block sizes must be positive")
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"sparsity {s} outside [0, 1]")
    partition = _partition_from_sizes(block_sizes)
    p = partition.p
    offdiag = np.zeros((p, p))
    for b, cluster in enumerate(partition):
        rng = derive_rng(rng_seed, "precision", b)
        m = len(cluster)
        iu, ju = np.triu_indices(m, 1)
        u = rng.random(len(iu))
        mag = rng.uniform(0.25, 0.75, size=len(iu))
        vals = np.where(u < (1 - s) * 0.75, mag, np.where(u < 1 - s, -mag, 0.0))
        block = np.zeros((m, m))
        block[iu, ju] = vals
        block = block + block.T
        ix = np.array(cluster)
        offdiag[np.ix_(ix, ix)] = block
    return _finish(offdiag, partition_true=partition, sparsity_s=float(s),
                   off_block_fraction=0.0, seed=int(rng_seed), block_sizes=block_sizes)


def perturb_off_block(truth: SimulationTruth, fraction: float, rng_seed: int) -> SimulationTruth:
    """Fill a fraction of the off-block pairs with Unif(-0.5, 0.5) draws.

    The number of pairs is ``round(fraction * n_pairs)`` (ties to even) over
    unordered off-block pairs; the diagonal shift is recomputed afterwards.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction {fraction} outside [0, 1]")
    offdiag = truth.offdiag.copy()
    labels = truth.partition_true.labels()
    iu, ju = np.triu_indices(truth.p, 1)
    across = labels[iu] != labels[ju]
    iu, ju = iu[across], ju[across]
    count = int(round(fraction * len(iu)))
    rng = derive_rng(rng_seed, "off_block")
    pick = rng.choice(len(iu), size=count, replace=False)
    vals = rng.uniform(-0.5, 0.5, size=count)
    offdiag[iu[pick], ju[pick]] = vals
    offdiag[ju[pick], iu[pick]] = vals
    return _finish(offdiag, partition_true=truth.partition_true, sparsity_s=truth.sparsity_s,
                   off_block_fraction=float(fraction), seed=truth.seed,
                   block_sizes=truth.block_sizes)


def truth_from_precision(theta, partition=None, seed=0):
    """Wrap a given positive definite precision matrix as a :class:`SimulationTruth`."""
    theta = np.array(theta, dtype=float)
    p = theta.shape[0]
    sigma = np.linalg.inv(theta)
    sigma = (sigma + sigma.T) / 2.0
    if partition is None:
        partition = components_of_graph(theta != 0)
    edges = _edge_set(theta)
    offdiag = theta.copy()
    np.fill_diagonal(offdiag, 0.0)
    iu = np.triu_indices(p, 1)
    sparsity = float(np.mean(theta[iu] == 0)) if p > 1 else 1.0
    return SimulationTruth(
        theta_true=theta, sigma_true=sigma, partition_true=partition, edge_set=edges,
        theta_min=float(min(abs(theta[e]) for e in edges)) if edges else 0.0,
        sparsity_s=sparsity, off_block_fraction=0.0, seed=int(seed),
        block_sizes=tuple(partition.sizes()), offdiag=offdiag)


def sample_mvn(truth: SimulationTruth, n: int, rng_seed: int) -> np.ndarray:
    """Draw ``n`` rows from ``N(0, inv(theta_true))`` as ``z @ L.T``.

    Returns the raw ``n x p`` array; wrap it in ``DataMatrix`` (or pass
    it straight to :func:`standardize`) when ``n >= 2``.
    """
    if int(n) < 1:
        raise ValueError("n must be positive")
    try:
        sigma = np.linalg.inv(truth.theta_true)
        chol = np.linalg.cholesky((sigma + sigma.T) / 2.0)
    except np.linalg.LinAlgError as exc:
        raise FactorizationFailed(str(exc)) from exc
    rng = derive_rng(rng_seed, "sample")
    z = rng.standard_normal((int(n), truth.p))
    return z @ chol.T


def equicorrelated_truth(block_sizes, rho, seed=0):
    """Block-diagonal covariance with unit variances and correlation ``rho`` inside blocks.

    Each block's precision is computed in closed form, so entries across
    blocks are exactly zero.
    """
    partition = _partition_from_sizes(tuple(int(b) for b in block_sizes))
    p = partition.p
    theta = np.zeros((p, p))
    for cluster in partition:
        m = len(cluster)
        # inverse of (1 - rho) I + rho 11^T
        off = -rho / ((1 - rho) * (1 + (m - 1) * rho))
        diag = 1.0 / (1 - rho) + off
        block = np.full((m, m), off)
        np.fill_diagonal(block, diag)
        ix = np.array(cluster)
        theta[np.ix_(ix, ix)] = block
    return truth_from_precision(theta, partition, seed)
