"""Schur-complement reduction of one trajectory-optimization QP linearization.

The QP step solved here is the equality-constrained saddle-point system

    [G  C^T] [dz    ]   [g]
    [C   0 ] [lambda] = [c]

with block-diagonal ``G = blkdiag(Q_0, R_0, ..., R_{N-2}, Q_{N-1})``,
``g = (q_0, r_0, ..., q_{N-1})``, constraint rows ``dx_0 = c_0`` and
``-A_k dx_k - B_k du_k + dx_{k+1} = c_{k+1}``. Eliminating the primal block
gives a block-tridiagonal multiplier system; since that reduced matrix is
negative definite, :func:`build_schur` negates the whole system once so PCG
sees a symmetric positive definite matrix, and :func:`recover_primal`
consumes the solution of the negated system directly.

Only the reduced blocks are ever formed here; the dense C and G appear in
test oracles alone.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from ._linalg import spd_inverse
from .blocktri import BlockTriMatrix, BlockVector
from .errors import DimensionMismatchError


@dataclass(frozen=True, eq=False)
class TrajoptLinearization:
    """One QP linearization of an N-knot trajectory problem.

    Shapes: Q (N, nx, nx), R (N-1, nu, nu), q (N, nx), r (N-1, nu),
    A (N-1, nx, nx), B (N-1, nx, nu); the constraint vector ``c`` has N
    segments of length nx: first the initial-state residual, then one
    dynamics defect per interval. Q and R blocks must be symmetric positive
    definite; that is checked when they are inverted.
    """

    Q: np.ndarray
    R: np.ndarray
    q: np.ndarray
    r: np.ndarray
    A: np.ndarray
    B: np.ndarray
    c: BlockVector

    def __post_init__(self):
        arrays = {
            name: np.array(getattr(self, name), dtype=float)
            for name in ("Q", "R", "q", "r", "A", "B")
        }
        N, nx = arrays["Q"].shape[0], arrays["Q"].shape[1] if arrays["Q"].ndim > 1 else 0
        if arrays["Q"].shape != (N, nx, nx):
            raise DimensionMismatchError(f"Q must be (N, nx, nx), got {arrays['Q'].shape}")
        if N < 1:
            raise DimensionMismatchError("need at least one knot point")
        nu = arrays["R"].shape[2] if N > 1 else 0
        expected = {
            "R": (N - 1, nu, nu),
            "q": (N, nx),
            "r": (N - 1, nu),
            "A": (N - 1, nx, nx),
            "B": (N - 1, nx, nu),
        }
        for name, shape in expected.items():
            if arrays[name].shape != shape:
                raise DimensionMismatchError(
                    f"{name} must have shape {shape}, got {arrays[name].shape}"
                )
        if self.c.n != N or self.c.m != nx:
            raise DimensionMismatchError(
                f"c must have {N} segments of length {nx}, got ({self.c.n}, {self.c.m})"
            )
        for name, arr in arrays.items():
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def N(self) -> int:
        return self.Q.shape[0]

    @property
    def nx(self) -> int:
        return self.Q.shape[1]

    @property
    def nu(self) -> int:
        return self.B.shape[2] if self.N > 1 else 0


@dataclass(frozen=True, eq=False)
class SchurSystem:
    """Negated (positive definite) multiplier system ``S x = gamma``."""

    S: BlockTriMatrix
    gamma: BlockVector


@dataclass(frozen=True, eq=False)
class StateControlStep:
    """Primal update: N state blocks and N-1 control blocks.

    The final knot carries only a state block; ``interleaved()`` flattens to
    (dx_0, du_0, dx_1, du_1, ..., dx_{N-1}).
    """

    states: np.ndarray
    controls: np.ndarray

    def interleaved(self) -> np.ndarray:
        parts = []
        for k in range(self.states.shape[0] - 1):
            parts.append(self.states[k])
            parts.append(self.controls[k])
        parts.append(self.states[-1])
        return np.concatenate(parts)


def _cost_inverses(lin: TrajoptLinearization) -> tuple[np.ndarray, np.ndarray]:
    Qinv = np.stack([spd_inverse(lin.Q[k], f"Q[{k}]") for k in range(lin.N)])
    if lin.N > 1:
        Rinv = np.stack([spd_inverse(lin.R[k], f"R[{k}]") for k in range(lin.N - 1)])
    else:
        Rinv = np.zeros((0, lin.nu, lin.nu))
    return Qinv, Rinv


def build_schur(lin: TrajoptLinearization) -> SchurSystem:
    """Assemble the negated Schur-complement system from the reduced blocks.

    Diagonal blocks are ``Qinv_0`` then
    ``A_k Qinv_k A_k^T + B_k Rinv_k B_k^T + Qinv_{k+1}``; super-diagonal
    blocks are ``-(A_k Qinv_k)^T``. The right-hand side is the negation of
    ``c + (-Qinv_0 q_0, zeta_0, ..., zeta_{N-2})`` with
    ``zeta_k = A_k Qinv_k q_k + B_k Rinv_k r_k - Qinv_{k+1} q_{k+1}``.
    A non-SPD cost block fails with an error naming the knot index.
    """
    N, nx = lin.N, lin.nx
    Qinv, Rinv = _cost_inverses(lin)
    diag = np.zeros((N, nx, nx))
    off = np.zeros((max(N - 1, 0), nx, nx))
    gamma = np.zeros((N, nx))
    diag[0] = Qinv[0]
    gamma[0] = Qinv[0] @ lin.q[0] - lin.c.segments[0]
    for k in range(N - 1):
        AQ = lin.A[k] @ Qinv[k]
        BR = lin.B[k] @ Rinv[k]
        block = AQ @ lin.A[k].T + BR @ lin.B[k].T + Qinv[k + 1]
        diag[k + 1] = 0.5 * (block + block.T)
        off[k] = -AQ.T
        zeta = AQ @ lin.q[k] + BR @ lin.r[k] - Qinv[k + 1] @ lin.q[k + 1]
        gamma[k + 1] = -lin.c.segments[k + 1] - zeta
    return SchurSystem(BlockTriMatrix(diag, off), BlockVector(gamma))


def recover_primal(lin: TrajoptLinearization, lam: BlockVector) -> StateControlStep:
    """Recover the state and control update from the multiplier solution.

    ``lam`` is the solution of the negated system produced by
    :func:`build_schur` (the PCG output); no further sign handling is needed
    on the caller's side. Uses only block-diagonal solves:
    ``dz = Ginv (g - C^T lam)``.
    """
    if lam.n != lin.N or lam.m != lin.nx:
        raise DimensionMismatchError(
            f"multiplier has ({lam.n}, {lam.m}) segments, expected ({lin.N}, {lin.nx})"
        )
    N = lin.N
    Qinv, Rinv = _cost_inverses(lin)
    lam_segs = lam.segments
    states = np.zeros((N, lin.nx))
    controls = np.zeros((max(N - 1, 0), lin.nu))
    for k in range(N):
        rhs = lin.q[k] - lam_segs[k]
        if k < N - 1:
            rhs = rhs + lin.A[k].T @ lam_segs[k + 1]
        states[k] = Qinv[k] @ rhs
    for k in range(N - 1):
        controls[k] = Rinv[k] @ (lin.r[k] + lin.B[k].T @ lam_segs[k + 1])
    return StateControlStep(states, controls)


def linearization_to_dict(lin: TrajoptLinearization) -> dict:
    """Plain-data form of a linearization (the JSON fixture format)."""
    return {
        "N": lin.N,
        "nx": lin.nx,
        "nu": lin.nu,
        "Q": lin.Q.tolist(),
        "R": lin.R.tolist(),
        "q": lin.q.tolist(),
        "r": lin.r.tolist(),
        "A": lin.A.tolist(),
        "B": lin.B.tolist(),
        "c": lin.c.segments.tolist(),
    }


def linearization_from_dict(data: dict) -> TrajoptLinearization:
    N, nx, nu = int(data["N"]), int(data["nx"]), int(data["nu"])
    def arr(key, shape):
        a = np.asarray(data[key], dtype=float)
        if a.size == 0:
            a = np.zeros(shape)
        return a.reshape(shape)
    return TrajoptLinearization(
        Q=arr("Q", (N, nx, nx)),
        R=arr("R", (N - 1, nu, nu)),
        q=arr("q", (N, nx)),
        r=arr("r", (N - 1, nu)),
        A=arr("A", (N - 1, nx, nx)),
        B=arr("B", (N - 1, nx, nu)),
        c=BlockVector(arr("c", (N, nx))),
    )


def write_linearization(path: str | os.PathLike, lin: TrajoptLinearization) -> None:
    with open(path, "w") as fh:
        json.dump(linearization_to_dict(lin), fh, indent=2)


def read_linearization(path: str | os.PathLike) -> TrajoptLinearization:
    with open(path) as fh:
        return linearization_from_dict(json.load(fh))
