"""Stair-splitting preconditioners and PCG for symmetric block-tridiagonal
systems, with a trajectory-optimization front end."""

from .bench import (
    BenchmarkProblem,
    ExperimentRecord,
    continuous_dynamics,
    discretize,
    linearize_problem,
    make_problem,
    run_experiment,
)
from .blocktri import (
    BlockTriMatrix,
    BlockVector,
    dense_reconstruct,
    matvec,
    read_matrix,
    split_even_odd,
    write_matrix,
)
from .errors import (
    BlockStructureError,
    DimensionMismatchError,
    NegativeCurvatureError,
    NotPositiveDefiniteError,
    SingularBlockError,
    StairsolveError,
)
from .pcg import PcgConfig, PcgReport, ResidualCriterion, pcg_solve
from .precond import (
    ADDITIVE_STAIR,
    BLOCK_JACOBI,
    JACOBI,
    SYMMETRIC_STAIR,
    PreconditionerKind,
    PreconditionerOp,
    build_preconditioner,
    polynomial,
)
from .schur import (
    SchurSystem,
    StateControlStep,
    TrajoptLinearization,
    build_schur,
    read_linearization,
    recover_primal,
    write_linearization,
)
from .spectrum import (
    SpectrumReport,
    eig_sym,
    preconditioned_spectrum,
    rank_estimate,
    spectral_radius,
)
from .stair import StairFactor, StairSide, apply_complement, apply_stair_inverse, stair_split

__version__ = "0.1.0"

__all__ = [
    "ADDITIVE_STAIR",
    "BLOCK_JACOBI",
    "BenchmarkProblem",
    "BlockStructureError",
    "BlockTriMatrix",
    "BlockVector",
    "DimensionMismatchError",
    "ExperimentRecord",
    "JACOBI",
    "NegativeCurvatureError",
    "NotPositiveDefiniteError",
    "PcgConfig",
    "PcgReport",
    "PreconditionerKind",
    "PreconditionerOp",
    "ResidualCriterion",
    "SYMMETRIC_STAIR",
    "SchurSystem",
    "SingularBlockError",
    "SpectrumReport",
    "StairFactor",
    "StairSide",
    "StairsolveError",
    "StateControlStep",
    "TrajoptLinearization",
    "apply_complement",
    "apply_stair_inverse",
    "build_preconditioner",
    "build_schur",
    "continuous_dynamics",
    "dense_reconstruct",
    "discretize",
    "eig_sym",
    "linearize_problem",
    "make_problem",
    "matvec",
    "pcg_solve",
    "polynomial",
    "preconditioned_spectrum",
    "rank_estimate",
    "read_linearization",
    "read_matrix",
    "recover_primal",
    "run_experiment",
    "spectral_radius",
    "split_even_odd",
    "stair_split",
    "write_linearization",
    "write_matrix",
]
