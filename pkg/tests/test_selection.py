import math

import numpy as np
import pytest
from scipy import stats

from cglasso.errors import InsufficientN, InvalidAlpha, InvalidK
from cglasso.partition import Partition
from cglasso.selection import (SelectKConfig, TheoryParams, banerjee_lambda, block_means,
                               corollary_lambdas, select_k, shared_corollary_lambda,
                               theorem4_lambda)
from cglasso.tdist import t_isf


def block_constant(sizes=(10, 10), within=0.7, between=0.05):
    labels = np.repeat(np.arange(len(sizes)), sizes)
    sim = np.where(labels[:, None] == labels[None, :], within, between)
    np.fill_diagonal(sim, 1.0)
    return sim


@pytest.mark.parametrize("df", [1, 2, 3, 7, 30, 198, 1255, 10 ** 5])
@pytest.mark.parametrize("q", [0.4, 0.05, 1e-4, 1e-8, 1.2e-7])
def test_t_quantile_against_scipy(q, df):
    assert t_isf(q, df) == pytest.approx(stats.t.isf(q, df), rel=1e-10)


def test_banerjee_reference_value():
    n, p, alpha = 1257, 452, 0.05
    t = stats.t.isf(alpha / (2 * p * p), n - 2)
    expected = t / math.sqrt(n - 2 + t * t)
    assert banerjee_lambda(np.eye(p), n, alpha) == pytest.approx(expected, rel=1e-10)


def test_banerjee_uses_variance_product():
    s = np.diag([1.0, 2.0, 3.0])
    assert banerjee_lambda(s, 50) == pytest.approx(6.0 * banerjee_lambda(np.eye(3), 50))


def test_banerjee_monotone():
    s = np.eye(10)
    alphas = [0.9, 0.5, 0.05, 1e-3, 1e-6]
    lams = [banerjee_lambda(s, 100, a) for a in alphas]
    assert all(a < b for a, b in zip(lams, lams[1:]))
    ns = [10, 50, 200, 1000, 10 ** 4]
    lams = [banerjee_lambda(s, n) for n in ns]
    assert all(a > b for a, b in zip(lams, lams[1:]))


def test_banerjee_normal_asymptote():
    n, p, alpha = 10 ** 5, 10, 0.05
    z = stats.norm.isf(alpha / (2 * p * p))
    assert banerjee_lambda(np.eye(p), n, alpha) == pytest.approx(z / math.sqrt(n), rel=0.01)


def test_banerjee_errors():
    with pytest.raises(InvalidAlpha):
        banerjee_lambda(np.eye(3), 10, 1.0)
    with pytest.raises(InsufficientN):
        banerjee_lambda(np.eye(3), 2)


def test_corollary_examples(paper_matrix):
    part = Partition(4, ((0, 1, 2), (3,)))
    assert corollary_lambdas(paper_matrix, part, 0.01) == pytest.approx([0.59, 0.0])
    assert corollary_lambdas(paper_matrix, part, 0.7) == [0.0, 0.0]
    assert shared_corollary_lambda(paper_matrix, part, 0.01) == pytest.approx(0.59)
    assert shared_corollary_lambda(paper_matrix, Partition.singletons(4)) == 0.0


def test_theorem4_examples():
    params = TheoryParams()
    assert theorem4_lambda(1, 16, params) == pytest.approx(2 * math.sqrt(math.log(4)))
    assert theorem4_lambda(1, 16, params) == pytest.approx(2.3548, abs=1e-4)
    assert theorem4_lambda(7, 100, params) / theorem4_lambda(7, 200, params) == pytest.approx(
        math.sqrt(2))
    half = TheoryParams(alpha_incoherence=0.5)
    assert theorem4_lambda(7, 100, half) == pytest.approx(2 * theorem4_lambda(7, 100, params))


def test_theory_params_validation():
    for bad in ({"alpha_incoherence": 0}, {"tau": 3}, {"c2": 0}, {"alpha_banerjee": 1},
                {"epsilon": 0}):
        with pytest.raises(ValueError):
            TheoryParams(**bad)


def test_block_means_structure():
    sim = block_constant((3, 2), 0.6, 0.1)
    labels = np.array([0, 0, 0, 1, 1])
    b = block_means(sim, labels)
    off = ~np.eye(5, dtype=bool)
    np.testing.assert_allclose(b[off], sim[off])
    assert np.array_equal(b, b.T)


def test_select_k_block_constant():
    res = select_k(block_constant(), SelectKConfig(range(1, 6), 5, "average", 0))
    assert res.chosen_k == 2
    assert [row[0] for row in res.table] == [1, 2, 3, 4, 5]
    assert all(row[1] >= 0 for row in res.table)
    # |M| = 2 * floor(190 / 5) mirrored entries out of p(p-1)
    assert res.missing_fraction_per_repeat == pytest.approx(2 * 38 / 380)


def test_select_k_flat_similarity():
    sim = np.full((12, 12), 0.3)
    np.fill_diagonal(sim, 1.0)
    assert select_k(sim, SelectKConfig([2, 3, 4], 5, "single", 3)).chosen_k == 2


def test_select_k_single_candidate():
    assert select_k(block_constant(), SelectKConfig([4])).chosen_k == 4


def test_select_k_deterministic():
    sim = block_constant((6, 5, 4), 0.5, 0.2) + 0.01 * np.random.default_rng(1).random((15, 15))
    sim = (sim + sim.T) / 2
    cfg = SelectKConfig(range(1, 6), 7, "complete", 42)
    assert select_k(sim, cfg) == select_k(sim, cfg)


def test_select_k_permutation_majority():
    sim = block_constant()
    rng = np.random.default_rng(3)
    votes = []
    for seed in range(50):
        perm = rng.permutation(20)
        res = select_k(sim[np.ix_(perm, perm)], SelectKConfig(range(1, 6), 5, "average", seed))
        votes.append(res.chosen_k)
    assert max(set(votes), key=votes.count) == 2


def test_select_k_config_errors():
    with pytest.raises(InvalidK):
        SelectKConfig([3, 2])
    with pytest.raises(InvalidK):
        SelectKConfig([])
    with pytest.raises(ValueError):
        SelectKConfig([1, 2], t_repeats=0)
    with pytest.raises(InvalidK):
        select_k(np.eye(3), SelectKConfig([1, 4]))
