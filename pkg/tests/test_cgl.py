import numpy as np
import pytest

from cglasso.cgl import CglConfig, fit_partition, run_cgl, weights_from_partition
from cglasso.covariance import similarity_matrix
from cglasso.errors import ClusterSolveError, InvalidK, LengthMismatch
from cglasso.glasso import solve
from cglasso.hclust import agglomerate, cut_height
from cglasso.partition import Partition

from conftest import random_covariance


def test_weights_examples():
    w = weights_from_partition(Partition.from_labels([0, 0, 1]), [0.3, 0.5])
    assert w[0, 1] == 0.3 and np.isinf(w[0, 2]) and np.isinf(w[1, 2])
    assert np.all(np.diag(w) == 0)
    w = weights_from_partition(Partition.from_labels([0, 0, 0]), [0.2])
    assert np.all(w[~np.eye(3, dtype=bool)] == 0.2)
    w = weights_from_partition(Partition.singletons(3), [1, 1, 1])
    assert np.all(np.isinf(w[~np.eye(3, dtype=bool)]))
    with pytest.raises(LengthMismatch):
        weights_from_partition(Partition.singletons(2), [0.1])


def test_config_validation():
    with pytest.raises(InvalidK):
        CglConfig(k=0)
    with pytest.raises(LengthMismatch):
        CglConfig(k=3, lambdas=[0.1, 0.2])
    assert CglConfig(k=3, lambdas=0.2).lambda_list() == [0.2, 0.2, 0.2]


def test_k1_is_glasso(rng):
    s = random_covariance(rng, 8, 30)
    fit = run_cgl(s, similarity_matrix(s), CglConfig("average", 1, 0.1))
    np.testing.assert_allclose(fit.theta, solve(s, 0.1).theta, atol=1e-12)


def test_kp_is_diagonal(rng):
    s = random_covariance(rng, 6, 30)
    fit = run_cgl(s, similarity_matrix(s), CglConfig("complete", 6, 0.1))
    np.testing.assert_allclose(fit.theta, np.diag(1 / np.diag(s)))


def test_k_larger_than_p(rng):
    s = random_covariance(rng, 3, 30)
    with pytest.raises(InvalidK):
        run_cgl(s, similarity_matrix(s), CglConfig(k=4))


@pytest.mark.parametrize("seed", range(8))
def test_slc_at_height_matches_glasso(seed):
    rng = np.random.default_rng(100 + seed)
    s = random_covariance(rng, 10, 30)
    sim = similarity_matrix(s)
    lam = 0.2 + 0.02 * seed
    k = cut_height(agglomerate(sim, "single"), lam).k
    fit = run_cgl(s, sim, CglConfig("single", k, lam))
    np.testing.assert_allclose(fit.theta, solve(s, lam).theta, atol=1e-6)


@pytest.mark.parametrize("linkage", ["single", "average", "complete"])
def test_equivalent_to_weighted_glasso(rng, linkage):
    s = random_covariance(rng, 9, 30)
    fit = run_cgl(s, similarity_matrix(s), CglConfig(linkage, 3, [0.1, 0.2, 0.15]))
    w = weights_from_partition(fit.partition, fit.lambdas_used)
    np.testing.assert_allclose(fit.theta, solve(s, w).theta, atol=1e-8)
    for cluster in fit.partition:
        for other in fit.partition:
            if cluster != other:
                assert np.all(fit.theta[np.ix_(cluster, other)] == 0)
    for cluster, sub in zip(fit.partition, fit.per_cluster):
        np.testing.assert_array_equal(fit.theta[np.ix_(cluster, cluster)], sub.theta)


def test_block_independence(rng):
    s = random_covariance(rng, 8, 40)
    part = Partition(8, ((0, 2, 4, 6), (1, 3, 5, 7)))
    base = fit_partition(s, part, [0.1, 0.1])
    t = s.copy()
    ix = np.array(part.clusters[1])
    t[np.ix_(ix, ix)] *= 1.1
    t[0, 1] = t[1, 0] = 0.9
    moved = fit_partition(t, part, [0.1, 0.1])
    np.testing.assert_array_equal(base.per_cluster[0].theta, moved.per_cluster[0].theta)


def test_cluster_error_annotated():
    s = np.eye(3)
    s[2, 2] = -1.0
    with pytest.raises(ClusterSolveError) as err:
        fit_partition(s, Partition.from_labels([0, 0, 1]), [0.1, 0.1])
    assert err.value.cluster == 1


def test_to_dict(rng):
    s = random_covariance(rng, 5, 30)
    d = run_cgl(s, similarity_matrix(s), CglConfig("average", 2, 0.1)).to_dict()
    assert {"partition", "lambdas_used", "per_cluster_summaries"} <= set(d)
    assert len(d["per_cluster_summaries"]) == 2
