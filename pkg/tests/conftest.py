import numpy as np
import pytest

from cglasso.covariance import empirical_covariance, standardize

# the 4x4 similarity matrix of the worked single-linkage example
PAPER_MATRIX = np.array([
    [1.0, 0.8, 0.6, 0.3],
    [0.8, 1.0, 0.5, 0.2],
    [0.6, 0.5, 1.0, 0.1],
    [0.3, 0.2, 0.1, 1.0],
])

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def paper_matrix():
    return PAPER_MATRIX.copy()


def random_covariance(rng, p, n):
    """Standardized sample covariance of correlated Gaussian data."""
    mix = rng.standard_normal((p, p)) * rng.uniform(0.2, 1.0)
    x = rng.standard_normal((n, p)) @ (np.eye(p) + mix)
    return empirical_covariance(standardize(x))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
