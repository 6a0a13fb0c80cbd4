"""Sparse Gaussian graphical models via the graphical lasso and the cluster graphical lasso."""
from .cgl import CglConfig, CglFit, fit_partition, run_cgl, weights_from_partition
from .covariance import DataMatrix, empirical_covariance, similarity_matrix, standardize
from .glasso import GlassoConfig, GlassoFit, objective, solve, threshold_components
from .hclust import Dendrogram, LinkageMethod, agglomerate, cut_height, cut_k, lambda_bar
from .partition import Partition
from .selection import (SelectKConfig, SelectKResult, TheoryParams, banerjee_lambda,
                        corollary_lambdas, select_k, theorem4_lambda)

__version__ = "0.1.0"

__all__ = [
    "CglConfig", "CglFit", "DataMatrix", "Dendrogram", "GlassoConfig", "GlassoFit",
    "LinkageMethod", "Partition", "SelectKConfig", "SelectKResult", "TheoryParams",
    "agglomerate", "banerjee_lambda", "corollary_lambdas", "cut_height", "cut_k",
    "empirical_covariance", "fit_partition", "lambda_bar", "objective", "run_cgl",
    "select_k", "similarity_matrix", "solve", "standardize", "theorem4_lambda",
    "threshold_components", "weights_from_partition",
]
