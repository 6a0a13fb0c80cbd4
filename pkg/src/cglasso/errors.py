"""Exception and warning types raised across the package."""


class CglassoError(Exception):
    """Base class for all package errors."""


class NonFinite(CglassoError, ValueError):
    pass


class ConstantColumn(CglassoError, ValueError):
    def __init__(self, column):
        self.column = column
        super().__init__(f"column {column} has zero variance")


class DimensionMismatch(CglassoError, ValueError):
    pass


class NotSymmetric(CglassoError, ValueError):
    pass


class InvalidK(CglassoError, ValueError):
    pass


class SingleLeaf(CglassoError, ValueError):
    pass


class NotPositiveDefinite(CglassoError, ValueError):
    pass


class NonPositiveDiagonal(CglassoError, ValueError):
    pass


class LengthMismatch(CglassoError, ValueError):
    pass


class DegenerateRepeat(CglassoError, RuntimeError):
    pass


class InvalidAlpha(CglassoError, ValueError):
    pass


class InsufficientN(CglassoError, ValueError):
    pass


class FactorizationFailed(CglassoError, RuntimeError):
    pass


class BlockTooLarge(CglassoError, ValueError):
    pass


class SingularGamma(CglassoError, RuntimeError):
    pass


class EmptyEdgeSet(CglassoError, ValueError):
    pass


class ClusterSolveError(CglassoError, RuntimeError):
    """A per-cluster glasso solve failed; ``cluster`` is its index."""

    def __init__(self, cluster, cause):
        self.cluster = cluster
        super().__init__(f"cluster {cluster}: {cause}")


class NotConverged(UserWarning):
    """Emitted when the solver hits ``max_sweeps`` before converging."""
