"""Exception types shared across the package."""


class StairsolveError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(StairsolveError, ValueError):
    """Operands do not agree in block count or block size."""


class BlockStructureError(StairsolveError, ValueError):
    """A block violates a structural requirement (e.g. diagonal symmetry)."""


class SingularBlockError(StairsolveError, ValueError):
    """A block that must be inverted is singular to working precision."""

    def __init__(self, message: str, block_index: int | None = None):
        super().__init__(message)
        self.block_index = block_index


class NotPositiveDefiniteError(StairsolveError, ValueError):
    """A matrix required to be symmetric positive definite is not."""


class NegativeCurvatureError(StairsolveError, RuntimeError):
    """PCG encountered a direction of non-positive curvature."""
