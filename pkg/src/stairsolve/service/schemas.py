"""Request and response models for the solver service."""

from __future__ import annotations

from typing import Literal

import numpy as np
from pydantic import BaseModel, Field

from ..blocktri import BlockTriMatrix, BlockVector
from ..schur import TrajoptLinearization, linearization_from_dict


class BlockTriMatrixModel(BaseModel):
    """Symmetric block-tridiagonal matrix: n diagonal blocks (m x m) and
    n-1 super-diagonal blocks."""

    n: int = Field(ge=1)
    m: int = Field(ge=1)
    diag: list[list[list[float]]]
    offdiag: list[list[list[float]]] = []

    def to_core(self) -> BlockTriMatrix:
        diag = np.asarray(self.diag, dtype=float).reshape(self.n, self.m, self.m)
        off = np.asarray(self.offdiag, dtype=float).reshape(max(self.n - 1, 0), self.m, self.m) \
            if self.offdiag else np.zeros((self.n - 1, self.m, self.m))
        return BlockTriMatrix(diag, off)


class BlockVectorModel(BaseModel):
    segments: list[list[float]]

    def to_core(self) -> BlockVector:
        return BlockVector(np.asarray(self.segments, dtype=float))


class SolveRequest(BaseModel):
    matrix: BlockTriMatrixModel
    rhs: BlockVectorModel
    preconditioner: str = "symmetric-stair"
    tol: float = Field(default=1e-8, gt=0)
    max_iter: int = Field(default=1000, ge=1)
    criterion: Literal["relative", "absolute"] = "relative"


class SolveResponse(BaseModel):
    solution: list[list[float]]
    iterations: int
    converged: bool
    residual_history: list[float]


class SpectrumRequest(BaseModel):
    matrix: BlockTriMatrixModel
    preconditioner: str = "symmetric-stair"


class SpectrumResponse(BaseModel):
    eigenvalues: list[float]
    lambda_min: float
    lambda_max: float
    condition_number: float | None
    spectral_radius: float


class ExperimentRecordModel(BaseModel):
    problem: str
    preconditioner: str
    n: int
    m: int
    cond: float | None
    cond_rel_jacobi: float | None
    pcg_iters: int | None
    converged: bool | None
    tol: float
    lambda_min: float | None
    lambda_max: float | None


class BenchRequest(BaseModel):
    problem: Literal["pendulum", "cartpole"]
    N: int = Field(default=16, ge=2)
    h: float = Field(default=0.1, gt=0)
    preconditioners: list[str] = [
        "jacobi", "block-jacobi", "additive-stair", "symmetric-stair",
    ]
    tol: float = Field(default=1e-8, gt=0)
    max_iter: int = Field(default=1000, ge=1)
    state_weight: float = Field(default=1.0, gt=0)
    control_weight: float = Field(default=0.1, gt=0)
    terminal_weight: float = Field(default=10.0, gt=0)
    include_spectrum: bool = False
    spectrum_only: bool = False


class BenchResponse(BaseModel):
    records: list[ExperimentRecordModel]
    spectra: dict[str, list[float]] | None = None


class LinearizationModel(BaseModel):
    """Trajectory QP linearization, matching the JSON fixture format."""

    N: int = Field(ge=1)
    nx: int = Field(ge=1)
    nu: int = Field(ge=0)
    Q: list
    R: list
    q: list
    r: list
    A: list
    B: list
    c: list

    def to_core(self) -> TrajoptLinearization:
        return linearization_from_dict(self.model_dump())


class TrajoptSolveRequest(BaseModel):
    linearization: LinearizationModel
    preconditioner: str = "symmetric-stair"
    tol: float = Field(default=1e-8, gt=0)
    max_iter: int = Field(default=1000, ge=1)


class TrajoptSolveResponse(BaseModel):
    multipliers: list[list[float]]
    state_step: list[list[float]]
    control_step: list[list[float]]
    iterations: int
    converged: bool
