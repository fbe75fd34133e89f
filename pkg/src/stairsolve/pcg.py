"""Preconditioned conjugate gradient over block-tridiagonal matvecs.

Classical PCG: one matrix-vector product and one preconditioner application
per iteration, zero initial guess, no restarts. Dot products reduce in a
fixed sequential order, so iteration counts are reproducible run to run.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .blocktri import BlockTriMatrix, BlockVector
from .errors import DimensionMismatchError, NegativeCurvatureError


class ResidualCriterion(enum.Enum):
    """Exit test: 2-norm of the residual, relative to the right-hand side or absolute."""

    RELATIVE = "relative"
    ABSOLUTE = "absolute"


@dataclass(frozen=True)
class PcgConfig:
    tol: float = 1e-8
    max_iter: int = 1000
    criterion: ResidualCriterion = ResidualCriterion.RELATIVE

    def __post_init__(self):
        if not self.tol > 0.0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass(frozen=True, eq=False)
class PcgReport:
    """Solver telemetry: solution, matvec count, convergence flag and the
    residual norm before each iteration plus after the last one."""

    solution: BlockVector
    iterations: int
    converged: bool
    residual_history: tuple[float, ...]


def pcg_solve(
    S: BlockTriMatrix,
    gamma: BlockVector,
    precond,
    cfg: PcgConfig | None = None,
) -> PcgReport:
    """Solve ``S x = gamma`` for symmetric positive definite ``S``.

    ``precond`` is anything exposing ``apply(BlockVector) -> BlockVector``
    with a symmetric positive definite inverse; the polynomial kind is
    rejected because its inverse is not symmetric. Indefiniteness of ``S``
    surfaces as NegativeCurvatureError when a search direction has
    non-positive curvature.
    """
    cfg = cfg or PcgConfig()
    if gamma.n != S.n or gamma.m != S.m:
        raise DimensionMismatchError(
            f"right-hand side is ({gamma.n}, {gamma.m}), matrix expects ({S.n}, {S.m})"
        )
    kind = getattr(precond, "kind", None)
    if kind is not None and getattr(kind, "is_symmetric", True) is False:
        raise ValueError(
            f"preconditioner kind {kind.label!r} is not symmetric and cannot be used with PCG"
        )

    threshold = cfg.tol * (gamma.norm() if cfg.criterion is ResidualCriterion.RELATIVE else 1.0)

    x = BlockVector.zeros(S.n, S.m)
    r = gamma
    history = [r.norm()]
    if history[0] <= threshold:
        return PcgReport(x, 0, True, tuple(history))

    z = precond.apply(r)
    p = z
    rz = r.dot(z)
    for k in range(1, cfg.max_iter + 1):
        Sp = S.matvec(p)
        curvature = p.dot(Sp)
        if curvature <= 0.0:
            raise NegativeCurvatureError(
                f"non-positive curvature {curvature:.3e} at iteration {k}; "
                "the system matrix is not positive definite"
            )
        alpha = rz / curvature
        x = x + alpha * p
        r = r - alpha * Sp
        history.append(r.norm())
        if history[-1] <= threshold:
            return PcgReport(x, k, True, tuple(history))
        z = precond.apply(r)
        rz_next = r.dot(z)
        p = z + (rz_next / rz) * p
        rz = rz_next
    return PcgReport(x, cfg.max_iter, False, tuple(history))
