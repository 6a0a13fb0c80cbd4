"""The l1-penalized Gaussian likelihood (graphical lasso) and its weighted form.

We minimize::

    -log det(Theta) + tr(S Theta) + sum_{j != j'} w[j, j'] |Theta[j, j']|

with an unpenalized diagonal. ``w`` is a scalar or a symmetric weight matrix
whose off-diagonal entries may be ``inf`` (entry forced to zero).

The solver is block coordinate descent over columns of Theta. For column
``j`` with the remaining block ``Theta_11`` held fixed, the objective in
``(theta_12, theta_22)`` has a closed-form minimizer in ``theta_22`` and
reduces to a lasso in ``theta_12`` with Gram matrix ``s_22 * inv(Theta_11)``,
which is solved by cyclic coordinate descent from the current column.
Every column update therefore decreases the objective, so sweeps are
monotone. ``W = inv(Theta)`` is updated in closed form after each column
and refreshed by a full inverse at the end of every sweep.

Before iterating, the problem is split into the connected components of
``{(j, j'): |S[j, j']| > w[j, j']}``; the solution is block diagonal over
them, and 1x1 blocks are solved exactly by ``1 / S[j, j]``.
"""
import math
import warnings
from dataclasses import dataclass, field
from typing import List, Optional

import numba
import numpy as np

from .covariance import check_symmetric
from .errors import DimensionMismatch, NonPositiveDiagonal, NotConverged, NotPositiveDefinite
from .partition import Partition, components_of_graph


@dataclass(frozen=True)
class GlassoConfig:
    tol: float = 1e-6
    max_sweeps: int = 500
    inner_tol: float = 1e-8
    inner_max_iter: int = 1000
    screen: bool = True

    def __post_init__(self):
        for name in ("tol", "max_sweeps", "inner_tol", "inner_max_iter"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class GlassoFit:
    theta: np.ndarray
    sigma_hat: np.ndarray
    objective: float
    kkt_residual: float
    sweeps: int
    converged: bool
    objective_history: List[float] = field(default_factory=list)
    blocks: Optional[Partition] = None

    @property
    def p(self):
        return self.theta.shape[0]

    def edges(self, zero_tol=0.0):
        """Unordered pairs ``(i, j)``, ``i < j``, with ``|theta_ij| > zero_tol``."""
        i, j = np.nonzero(np.triu(np.abs(self.theta) > zero_tol, 1))
        return list(zip(i.tolist(), j.tolist()))

    def to_dict(self):
        return {
            "theta": self.theta.tolist(),
            "objective": self.objective,
            "kkt_residual": self.kkt_residual,
            "sweeps": self.sweeps,
            "converged": self.converged,
        }


def penalty_matrix(w, p):
    """Expand a scalar or matrix penalty to a ``p x p`` matrix with zero diagonal."""
    if np.ndim(w) == 0:
        lam = float(w)
        if not lam >= 0 or math.isinf(lam):
            raise ValueError(f"penalty must be finite and nonnegative, got {w}")
        out = np.full((p, p), lam)
    else:
        out = np.array(w, dtype=float)
        if out.shape != (p, p):
            raise DimensionMismatch(f"weights of shape {out.shape} for p={p}")
        if np.any(np.isnan(out)) or np.any(out < 0):
            raise ValueError("penalty weights must be nonnegative")
        if not np.array_equal(out, out.T):
            raise ValueError("penalty weights must be symmetric")
    np.fill_diagonal(out, 0.0)
    return out


def threshold_components(s, lam):
    """Connected components of the graph ``|s_jj'| > lam`` (scalar or matrix)."""
    s = check_symmetric(s)
    lam = np.asarray(lam, dtype=float)
    return components_of_graph(np.abs(s) > lam)


def objective(theta, s, w):
    """Penalized negative log-likelihood; ``inf`` if an infinite weight is violated."""
    theta = np.asarray(theta, dtype=float)
    s = np.asarray(s, dtype=float)
    p = theta.shape[0]
    weights = penalty_matrix(w, p)
    try:
        chol = np.linalg.cholesky(theta)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite("theta is not positive definite") from None
    logdet = 2.0 * np.sum(np.log(np.diag(chol)))
    nonzero = theta != 0
    np.fill_diagonal(nonzero, False)
    if np.any(np.isinf(weights) & nonzero):
        return math.inf
    penalty = np.sum(weights[nonzero] * np.abs(theta[nonzero]))
    return float(-logdet + np.sum(s * theta) + penalty)


def kkt_residual(theta, s, w, sigma=None):
    """Largest violation of the stationarity conditions at ``theta``.

    Uses ``sigma = inv(theta)`` unless given. Off-diagonal conditions are
    ``|s - sigma| <= w`` where theta is zero and ``sigma - s = w * sign(theta)``
    elsewhere; on the diagonal ``sigma = s``.
    """
    theta = np.asarray(theta, dtype=float)
    s = np.asarray(s, dtype=float)
    weights = penalty_matrix(w, theta.shape[0])
    if sigma is None:
        sigma = np.linalg.inv(theta)
    diff = sigma - s
    zero = theta == 0
    with np.errstate(invalid="ignore"):
        viol = np.where(zero, np.maximum(np.abs(diff) - weights, 0.0),
                        np.abs(diff - weights * np.sign(theta)))
    np.fill_diagonal(viol, np.abs(np.diag(diff)))
    return float(np.max(viol)) if viol.size else 0.0


@numba.njit(cache=True, nogil=True)
def _sweep(theta, W, S, weights, inner_tol, inner_max_iter):
    p = S.shape[0]
    m = p - 1
    idx = np.empty(m, dtype=np.int64)
    V = np.empty((m, m))
    beta = np.empty(m)
    r = np.empty(m)
    for j in range(p):
        t = 0
        for i in range(p):
            if i != j:
                idx[t] = i
                t += 1
        s22 = S[j, j]
        w22 = W[j, j]
        # inv(Theta_11) from the current W via the Schur complement
        for a in range(m):
            ia = idx[a]
            for b in range(m):
                ib = idx[b]
                V[a, b] = W[ia, ib] - W[ia, j] * W[ib, j] / w22
        for a in range(m):
            beta[a] = theta[idx[a], j]
        for a in range(m):
            acc = 0.0
            for b in range(m):
                acc += V[a, b] * beta[b]
            r[a] = acc
        for _ in range(inner_max_iter):
            max_change = 0.0
            for a in range(m):
                vaa = V[a, a]
                c = s22 * (r[a] - vaa * beta[a]) + S[idx[a], j]
                lam = weights[idx[a], j]
                mag = abs(c) - lam
                if mag > 0.0:
                    new = -math.copysign(mag, c) / (s22 * vaa)
                else:
                    new = 0.0
                delta = new - beta[a]
                if delta != 0.0:
                    for b in range(m):
                        r[b] += V[b, a] * delta
                    beta[a] = new
                    if abs(delta) > max_change:
                        max_change = abs(delta)
            if max_change < inner_tol:
                break
        quad = 0.0
        for a in range(m):
            quad += beta[a] * r[a]
        for a in range(m):
            theta[idx[a], j] = beta[a]
            theta[j, idx[a]] = beta[a]
        theta[j, j] = 1.0 / s22 + quad
        # W = inv(Theta) after the column update
        for a in range(m):
            ia = idx[a]
            wa = -s22 * r[a]
            W[ia, j] = wa
            W[j, ia] = wa
        for a in range(m):
            ia = idx[a]
            for b in range(m):
                ib = idx[b]
                W[ia, ib] = V[a, b] + W[ia, j] * W[ib, j] / s22
        W[j, j] = s22


def _offdiag_mean_abs(a):
    p = a.shape[0]
    if p < 2:
        return 0.0
    return float((np.sum(np.abs(a)) - np.sum(np.abs(np.diag(a)))) / (p * (p - 1)))


def _solve_block(s, weights, cfg):
    """Solve one connected block; returns (theta, W, history, sweeps, converged)."""
    p = s.shape[0]
    theta = np.diag(1.0 / np.diag(s))
    W = np.diag(np.diag(s)).astype(float)
    history = [objective(theta, s, weights)]
    if p == 1:
        return theta, W, history, 0, True
    scale = _offdiag_mean_abs(s) or 1.0
    kkt_scale = max(1.0, float(np.mean(np.diag(s))))
    s = np.ascontiguousarray(s)
    weights = np.ascontiguousarray(weights)
    converged = False
    sweeps = 0
    # loose inner solves while the outer iterate is far off; each column
    # update still descends, so monotonicity is unaffected
    inner_tol = max(cfg.inner_tol, 1e-3)
    while sweeps < cfg.max_sweeps:
        W_old = W.copy()
        _sweep(theta, W, s, weights, inner_tol, cfg.inner_max_iter)
        sweeps += 1
        try:
            W_new = np.linalg.inv(theta)
        except np.linalg.LinAlgError:
            raise NotPositiveDefinite("iterate lost positive definiteness") from None
        if np.max(np.abs(W_new - W_new.T)) > 1e-8 * max(1.0, np.max(np.abs(W_new))):
            warnings.warn("inverse of theta is noticeably asymmetric", RuntimeWarning)
        W = (W_new + W_new.T) / 2.0
        history.append(objective(theta, s, weights))
        change = float(np.max(np.abs(W - W_old)))
        inner_tol = max(cfg.inner_tol, min(inner_tol, 0.01 * change))
        # the diagonal of W lags the off-diagonal in this scheme, so count it
        # too; slow sweeps can stall with a small change, hence the KKT gate
        if (np.mean(np.abs(W - W_old)) <= cfg.tol * scale
                and inner_tol <= cfg.inner_tol * 10
                and kkt_residual(theta, s, weights, W) <= 0.1 * cfg.tol * kkt_scale):
            converged = True
            break
    return theta, W, history, sweeps, converged


def solve(s, w=0.0, cfg=None):
    """Minimize the weighted graphical lasso objective for covariance ``s``.

    Parameters
    ----------
    s : array, shape (p, p)
        Symmetric matrix with strictly positive diagonal.
    w : float or array, shape (p, p)
        Shared penalty or entrywise weights; ``inf`` entries pin zeros.
    cfg : GlassoConfig, optional

    Returns
    -------
    GlassoFit
        ``converged`` is False (with a :class:`NotConverged` warning) when
        ``cfg.max_sweeps`` was exhausted in some block.
    """
    cfg = cfg or GlassoConfig()
    s = check_symmetric(s)
    p = s.shape[0]
    if np.any(np.diag(s) <= 0):
        raise NonPositiveDiagonal("covariance diagonal must be strictly positive")
    weights = penalty_matrix(w, p)

    if cfg.screen:
        blocks = components_of_graph(np.abs(s) > weights)
    else:
        blocks = components_of_graph(np.isfinite(weights))

    theta = np.zeros((p, p))
    sigma = np.zeros((p, p))
    histories = []
    sweeps = 0
    converged = True
    for block in blocks:
        ix = np.array(block)
        sub = np.ix_(ix, ix)
        t, W, hist, n_sweeps, ok = _solve_block(s[sub], weights[sub], cfg)
        theta[sub] = t
        sigma[sub] = W
        histories.append(hist)
        sweeps = max(sweeps, n_sweeps)
        converged = converged and ok
    if not converged:
        warnings.warn(f"glasso did not converge in {cfg.max_sweeps} sweeps", NotConverged)

    length = max(len(h) for h in histories)
    history = [float(sum(h[min(t, len(h) - 1)] for h in histories)) for t in range(length)]
    return GlassoFit(
        theta=theta,
        sigma_hat=sigma,
        objective=objective(theta, s, weights),
        kkt_residual=kkt_residual(theta, s, weights),
        sweeps=sweeps,
        converged=converged,
        objective_history=history,
        blocks=blocks,
    )


def partial_correlations(theta):
    d = np.sqrt(np.diag(theta))
    out = -theta / np.outer(d, d)
    np.fill_diagonal(out, 1.0)
    return out
