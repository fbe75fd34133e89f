"""Left and right stair splittings of a symmetric block-tridiagonal matrix.

A stair keeps every diagonal block and, on alternating block rows, both
neighboring off-diagonal blocks: the left stair carries them on rows with
even 1-based index, the right stair on rows with odd 1-based index. Writing
``S = stair - complement``, the complement holds the remaining off-diagonal
blocks negated. The stair inverse is available in closed form,

    inv(stair) = Dinv (2 D - stair) Dinv,   D = block-diag of S,

so it has the mirrored stair sparsity pattern with blocks ``Dinv_i`` on the
diagonal and ``-Dinv_i O Dinv_j`` products off it. Applying the inverse is
therefore a purely block-local product, which is what makes these splittings
attractive as parallel preconditioners.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ._linalg import invert_block
from .blocktri import BlockTriMatrix, BlockVector
from .errors import DimensionMismatchError


class StairSide(enum.Enum):
    """Direction of the stair: LEFT is type 1, RIGHT is type 2."""

    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True, eq=False)
class StairFactor:
    """One side's stair splitting of a source matrix.

    Holds the source matrix (whose diagonal blocks are the stair's), the
    per-block inverses ``inv_diag``, and the explicit off-diagonal blocks of
    the stair inverse: ``inv_super[i]`` at block (i, i+1), ``inv_sub[i]`` at
    (i+1, i); entries on rows the stair does not carry are zero. The
    complement blocks are derived from the source by parity.
    """

    side: StairSide
    matrix: BlockTriMatrix
    inv_diag: np.ndarray
    inv_sub: np.ndarray
    inv_super: np.ndarray

    @property
    def n(self) -> int:
        return self.matrix.n

    @property
    def m(self) -> int:
        return self.matrix.m

    def carries_row(self, i: int) -> bool:
        """Whether 0-based block row ``i`` holds the stair's off-diagonal blocks."""
        return (i % 2 == 1) if self.side is StairSide.LEFT else (i % 2 == 0)

    def _check_dims(self, x: BlockVector) -> None:
        if x.n != self.n or x.m != self.m:
            raise DimensionMismatchError(
                f"vector is ({x.n}, {x.m}), stair factor expects ({self.n}, {self.m})"
            )

    def apply_inverse(self, x: BlockVector) -> BlockVector:
        """inv(stair) @ x using only block-local products."""
        self._check_dims(x)
        segs = x.segments
        out = np.einsum("nij,nj->ni", self.inv_diag, segs)
        if self.n > 1:
            out[:-1] += np.einsum("nij,nj->ni", self.inv_super, segs[1:])
            out[1:] += np.einsum("nij,nj->ni", self.inv_sub, segs[:-1])
        return BlockVector(out)

    def apply_complement(self, x: BlockVector) -> BlockVector:
        """complement @ x; output rows carried by the stair are identically zero."""
        self._check_dims(x)
        segs = x.segments
        out = np.zeros_like(segs)
        n = self.n
        if n > 1:
            off = self.matrix.offdiag
            out[:-1] -= np.einsum("nij,nj->ni", off, segs[1:])
            out[1:] -= np.einsum("nji,nj->ni", off, segs[:-1])
        carried = [i for i in range(n) if self.carries_row(i)]
        out[carried] = 0.0
        return BlockVector(out)

    def psi_dense(self) -> np.ndarray:
        """Dense reconstruction of the stair matrix."""
        n, m = self.n, self.m
        out = np.zeros((n * m, n * m))
        for i in range(n):
            out[i * m : (i + 1) * m, i * m : (i + 1) * m] = self.matrix.diag[i]
            if self.carries_row(i):
                if i >= 1:
                    out[i * m : (i + 1) * m, (i - 1) * m : i * m] = self.matrix.offdiag[i - 1].T
                if i <= n - 2:
                    out[i * m : (i + 1) * m, (i + 1) * m : (i + 2) * m] = self.matrix.offdiag[i]
        return out

    def psi_inv_dense(self) -> np.ndarray:
        """Dense reconstruction of the closed-form stair inverse."""
        n, m = self.n, self.m
        out = np.zeros((n * m, n * m))
        for i in range(n):
            out[i * m : (i + 1) * m, i * m : (i + 1) * m] = self.inv_diag[i]
        for i in range(n - 1):
            out[i * m : (i + 1) * m, (i + 1) * m : (i + 2) * m] = self.inv_super[i]
            out[(i + 1) * m : (i + 2) * m, i * m : (i + 1) * m] = self.inv_sub[i]
        return out

    def complement_dense(self) -> np.ndarray:
        """Dense reconstruction of the complement (stair minus source)."""
        return self.psi_dense() - self.matrix.to_dense()


def stair_split(S: BlockTriMatrix, side: StairSide) -> StairFactor:
    """Build the stair splitting of ``S`` for the given side.

    Every diagonal block must be invertible; a singular block raises
    SingularBlockError naming its index.
    """
    n = S.n
    inv_diag = np.stack([invert_block(S.diag[i], i) for i in range(n)])
    m = S.m
    inv_sub = np.zeros((max(n - 1, 0), m, m))
    inv_super = np.zeros((max(n - 1, 0), m, m))
    left = side is StairSide.LEFT
    for i in range(n):
        if ((i % 2 == 1) if left else (i % 2 == 0)):
            if i >= 1:
                inv_sub[i - 1] = -inv_diag[i] @ S.offdiag[i - 1].T @ inv_diag[i - 1]
            if i <= n - 2:
                inv_super[i] = -inv_diag[i] @ S.offdiag[i] @ inv_diag[i + 1]
    inv_diag.setflags(write=False)
    inv_sub.setflags(write=False)
    inv_super.setflags(write=False)
    return StairFactor(side, S, inv_diag, inv_sub, inv_super)


def apply_stair_inverse(factor: StairFactor, x: BlockVector) -> BlockVector:
    return factor.apply_inverse(x)


def apply_complement(factor: StairFactor, x: BlockVector) -> BlockVector:
    return factor.apply_complement(x)
