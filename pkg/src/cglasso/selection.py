"""Choosing the number of clusters and the penalty levels."""
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from ._rng import derive_rng
from .covariance import check_symmetric
from .errors import DegenerateRepeat, InsufficientN, InvalidAlpha, InvalidK
from .hclust import LinkageMethod, agglomerate, cut_k, lambda_bar
from .tdist import t_isf

MAX_RETRIES = 10


@dataclass(frozen=True)
class SelectKConfig:
    k_candidates: Sequence[int]
    t_repeats: int = 10
    linkage: LinkageMethod = LinkageMethod.AVERAGE
    seed: int = 0

    def __post_init__(self):
        ks = tuple(int(k) for k in self.k_candidates)
        if not ks:
            raise InvalidK("empty candidate list")
        if any(k < 1 for k in ks) or list(ks) != sorted(set(ks)):
            raise InvalidK(f"candidates must be distinct, positive and ascending: {ks}")
        if int(self.t_repeats) < 1:
            raise ValueError("t_repeats must be positive")
        object.__setattr__(self, "k_candidates", ks)
        object.__setattr__(self, "linkage", LinkageMethod.parse(self.linkage))


@dataclass(frozen=True)
class SelectKResult:
    chosen_k: int
    table: Tuple[Tuple[int, float, float], ...]
    missing_fraction_per_repeat: float
    retries: int = 0


@dataclass(frozen=True)
class TheoryParams:
    alpha_incoherence: float = 1.0
    tau: float = 4.0
    c2: float = 1.0
    alpha_banerjee: float = 0.05
    epsilon: float = 1e-3

    def __post_init__(self):
        if not 0 < self.alpha_incoherence <= 1:
            raise InvalidAlpha("incoherence alpha must be in (0, 1]")
        if not self.tau > 3:
            raise ValueError("tau must exceed 3")
        if not self.c2 > 0:
            raise ValueError("c2 must be positive")
        if not 0 < self.alpha_banerjee < 1:
            raise InvalidAlpha("alpha must be in (0, 1)")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")


def _impute(sim, missing):
    """Fill missing entries with the mean of their row and column means.

    Means are over observed off-diagonal entries only.
    """
    observed = ~missing
    np.fill_diagonal(observed, False)
    counts = observed.sum(axis=1)
    if np.any(counts == 0):
        return None
    means = np.where(observed, sim, 0.0).sum(axis=1) / counts
    filled = sim.copy()
    rows, cols = np.nonzero(missing)
    filled[rows, cols] = 0.5 * (means[rows] + means[cols])
    return filled


def block_means(sim, labels):
    """Block-constant reconstruction of ``sim`` from cluster labels.

    Within a cluster every off-diagonal entry becomes the cluster's mean
    off-diagonal similarity; every between-cluster entry becomes the global
    between-cluster mean. The diagonal is left at zero (never scored).
    """
    p = sim.shape[0]
    k = int(labels.max()) + 1
    z = np.zeros((p, k))
    z[np.arange(p), labels] = 1.0
    off = sim.copy()
    np.fill_diagonal(off, 0.0)
    totals = z.T @ off @ z
    sizes = z.sum(axis=0)
    within_pairs = sizes * (sizes - 1)
    within = np.divide(np.diag(totals), within_pairs,
                       out=np.zeros(k), where=within_pairs > 0)
    between_pairs = p * p - np.sum(sizes ** 2)
    between = (totals.sum() - np.trace(totals)) / between_pairs if between_pairs > 0 else 0.0
    same = labels[:, None] == labels[None, :]
    b = np.where(same, within[labels][:, None], between)
    np.fill_diagonal(b, 0.0)
    return b


def select_k(sim, cfg):
    """Pick the number of clusters by imputing held-out similarities.

    Each of ``cfg.t_repeats`` repeats hides ``floor(p(p-1) / (2T))`` random
    pairs, imputes them from row and column means, clusters the imputed
    matrix for every candidate ``k``, and scores the block-mean
    reconstruction on the hidden pairs. The smallest ``k`` with
    ``m_k <= m_next + 1.5 * s_next`` wins; if none qualifies, the largest.
    """
    sim = check_symmetric(sim)
    p = sim.shape[0]
    ks = cfg.k_candidates
    if ks[-1] > p:
        raise InvalidK(f"candidate {ks[-1]} exceeds p={p}")
    if len(ks) == 1:
        return SelectKResult(ks[0], ((ks[0], math.nan, math.nan),), 0.0)
    if p < 3:
        raise InvalidK("select_k needs p >= 3")
    T = int(cfg.t_repeats)
    iu, ju = np.triu_indices(p, 1)
    n_missing = (p * (p - 1) // 2) // T
    if n_missing < 1:
        raise ValueError(f"t_repeats={T} leaves no pairs to hold out at p={p}")

    mse = np.empty((T, len(ks)))
    retries = 0
    for rep in range(T):
        for attempt in range(MAX_RETRIES + 1):
            rng = derive_rng(cfg.seed, "select_k", rep, attempt)
            pick = rng.choice(len(iu), size=n_missing, replace=False)
            missing = np.zeros((p, p), dtype=bool)
            missing[iu[pick], ju[pick]] = True
            missing |= missing.T
            filled = _impute(sim, missing)
            if filled is not None:
                break
            retries += 1
        else:
            raise DegenerateRepeat(
                f"repeat {rep}: a feature lost all observed entries {MAX_RETRIES + 1} times")
        dendrogram = agglomerate(filled, cfg.linkage)
        rows, cols = np.nonzero(missing)
        truth = sim[rows, cols]
        for c, k in enumerate(ks):
            b = block_means(filled, cut_k(dendrogram, k).labels())
            mse[rep, c] = np.mean((truth - b[rows, cols]) ** 2)

    m = mse.mean(axis=0)
    se = mse.std(axis=0, ddof=1) / math.sqrt(T) if T > 1 else np.zeros(len(ks))
    # squared rounding error of the block means; keeps exact ties exact
    slack = (1e-12 * float(np.max(np.abs(sim)))) ** 2
    chosen = ks[-1]
    for c in range(len(ks) - 1):
        if m[c] <= m[c + 1] + 1.5 * se[c + 1] + slack:
            chosen = ks[c]
            break
    table = tuple((k, float(a), float(b)) for k, a, b in zip(ks, m, se))
    return SelectKResult(chosen, table, 2 * n_missing / (p * (p - 1)), retries)


def banerjee_lambda(s, n, alpha=0.05):
    """Penalty bounding the chance of joining two truly separate components.

    ``(max_{i<j} S_ii S_jj) * t / sqrt(n - 2 + t^2)`` with ``t`` the upper
    ``alpha / (2 p^2)`` quantile of Student's t on ``n - 2`` degrees of freedom.
    """
    if not 0 < alpha < 1:
        raise InvalidAlpha(f"alpha={alpha} outside (0, 1)")
    if int(n) < 3:
        raise InsufficientN(f"need n >= 3, got {n}")
    s = np.asarray(s, dtype=float)
    p = s.shape[0]
    d = np.diag(s)
    if p >= 2:
        prod = np.outer(d, d)[np.triu_indices(p, 1)].max()
    else:
        prod = d[0] ** 2
    t = t_isf(alpha / (2.0 * p * p), int(n) - 2)
    return float(prod * t / math.sqrt(n - 2 + t * t))


def corollary_lambdas(s_tilde, partition, epsilon=1e-3) -> List[float]:
    """Per-cluster penalties just below each cluster's final single-linkage merge.

    Singleton clusters get 0 (nothing to penalize).
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    s_tilde = check_symmetric(s_tilde)
    out = []
    for cluster in partition:
        if len(cluster) < 2:
            out.append(0.0)
            continue
        ix = np.array(cluster)
        top = lambda_bar(agglomerate(s_tilde[np.ix_(ix, ix)], LinkageMethod.SINGLE))
        out.append(max(top - epsilon, 0.0))
    return out


def theorem4_lambda(p_k, n, params):
    """``(8 / alpha) * sqrt(c2 * (tau * log p_k + log 4) / n)``."""
    if int(p_k) < 1 or int(n) < 1:
        raise ValueError("p_k and n must be positive")
    return (8.0 / params.alpha_incoherence) * math.sqrt(
        params.c2 * (params.tau * math.log(p_k) + math.log(4.0)) / n)


def shared_corollary_lambda(s_tilde, partition, epsilon=1e-3):
    """One penalty safe for every cluster: ``min_k lambda_bar_k - epsilon``.

    Singleton clusters have no merge and are skipped; 0 if all are singletons.
    """
    lams = [lam for lam, c in zip(corollary_lambdas(s_tilde, partition, epsilon), partition)
            if len(c) > 1]
    return min(lams) if lams else 0.0
