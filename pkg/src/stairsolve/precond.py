"""Preconditioners for symmetric block-tridiagonal systems.

Five kinds share one application interface:

* ``jacobi``          - scalar diagonal of S
* ``block-jacobi``    - block diagonal of S
* ``additive-stair``  - half the sum of the two stair inverses
* ``symmetric-stair`` - both stair inverses minus the block-diagonal inverse
* ``poly:<k>``        - truncated splitting series
                        (I + T + ... + T^k) inv(stair), T = inv(stair) complement

The first four have explicitly materialized block-sparse inverses, so one
application costs the same as a block-tridiagonal matvec. For the two stair
combinations the inverse is itself block-tridiagonal: both have block
diagonal ``Dinv_i`` and super-diagonal blocks ``-c * Dinv_i O_i Dinv_{i+1}``
with ``c = 1/2`` for the additive kind and ``c = 1`` for the symmetric kind
(equivalently: the symmetric kind mirrors one stair inverse's off-diagonal
blocks across the diagonal).

The polynomial kind is applied by repeated block-sparse products and is
never materialized densely; it is not symmetric in general, so PCG refuses
it and it exists for spectral experiments only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import PIVOT_RTOL, invert_block
from .blocktri import BlockTriMatrix, BlockVector
from .errors import DimensionMismatchError, SingularBlockError
from .stair import StairFactor, StairSide, stair_split

_NAMES = ("jacobi", "block-jacobi", "additive-stair", "symmetric-stair", "poly")


@dataclass(frozen=True)
class PreconditionerKind:
    """One of the five preconditioner kinds; ``degree`` applies to ``poly`` only."""

    name: str
    degree: int | None = None

    def __post_init__(self):
        if self.name not in _NAMES:
            raise ValueError(f"unknown preconditioner kind {self.name!r}; choose from {_NAMES}")
        if self.name == "poly":
            if self.degree is None or self.degree < 1:
                raise ValueError("polynomial preconditioner needs degree >= 1")
        elif self.degree is not None:
            raise ValueError(f"kind {self.name!r} does not take a degree")

    @property
    def is_polynomial(self) -> bool:
        return self.name == "poly"

    @property
    def is_symmetric(self) -> bool:
        """Whether the preconditioner inverse is symmetric (admissible for PCG)."""
        return not self.is_polynomial

    @property
    def label(self) -> str:
        return f"poly:{self.degree}" if self.is_polynomial else self.name

    @classmethod
    def parse(cls, text: str) -> "PreconditionerKind":
        """Parse a CLI-style kind name such as ``symmetric-stair`` or ``poly:3``."""
        text = text.strip()
        if text.startswith("poly:"):
            try:
                return cls("poly", int(text.split(":", 1)[1]))
            except ValueError as exc:
                raise ValueError(f"bad polynomial degree in {text!r}") from exc
        return cls(text)


JACOBI = PreconditionerKind("jacobi")
BLOCK_JACOBI = PreconditionerKind("block-jacobi")
ADDITIVE_STAIR = PreconditionerKind("additive-stair")
SYMMETRIC_STAIR = PreconditionerKind("symmetric-stair")


def polynomial(degree: int) -> PreconditionerKind:
    return PreconditionerKind("poly", degree)


@dataclass(frozen=True, eq=False)
class PreconditionerOp:
    """A built preconditioner: kind plus precomputed application data."""

    kind: PreconditionerKind
    n: int
    m: int
    _inv_scale: np.ndarray | None = None          # jacobi: (n, m) reciprocal diagonal
    _inv_blocks: np.ndarray | None = None         # block-jacobi: (n, m, m) block inverses
    _inv_tri: BlockTriMatrix | None = None        # stair combinations: block-tridiagonal inverse
    _factor: StairFactor | None = None            # polynomial: left stair splitting

    def _check_dims(self, r: BlockVector) -> None:
        if r.n != self.n or r.m != self.m:
            raise DimensionMismatchError(
                f"vector is ({r.n}, {r.m}), preconditioner expects ({self.n}, {self.m})"
            )

    def apply(self, r: BlockVector) -> BlockVector:
        """Return ``inv(Phi) @ r``."""
        self._check_dims(r)
        if self._inv_scale is not None:
            return BlockVector(r.segments * self._inv_scale)
        if self._inv_blocks is not None:
            return BlockVector(np.einsum("nij,nj->ni", self._inv_blocks, r.segments))
        if self._inv_tri is not None:
            return self._inv_tri.matvec(r)
        # Truncated series evaluated Horner-style: out = z + T(out), T = inv(stair) complement.
        factor = self._factor
        z = factor.apply_inverse(r)
        out = z
        for _ in range(self.kind.degree):
            out = z + factor.apply_inverse(factor.apply_complement(out))
        return out

    def dense_inverse(self) -> np.ndarray:
        """Dense reconstruction of ``inv(Phi)`` for the materialized kinds."""
        if self._inv_scale is not None:
            return np.diag(self._inv_scale.reshape(-1))
        if self._inv_blocks is not None:
            out = np.zeros((self.n * self.m, self.n * self.m))
            m = self.m
            for i in range(self.n):
                out[i * m : (i + 1) * m, i * m : (i + 1) * m] = self._inv_blocks[i]
            return out
        if self._inv_tri is not None:
            return self._inv_tri.to_dense()
        raise ValueError(
            "polynomial preconditioner inverse is applied operator-style and "
            "is never materialized densely"
        )


def build_preconditioner(S: BlockTriMatrix, kind: PreconditionerKind) -> PreconditionerOp:
    """Construct a preconditioner of the given kind for ``S``.

    Singular scalar or block diagonals raise SingularBlockError naming the
    offending location.
    """
    if kind.name == "jacobi":
        d = np.einsum("nii->ni", S.diag).copy()
        scale = float(np.max(np.abs(d)))
        bad = np.argwhere(np.abs(d) <= PIVOT_RTOL * scale)
        if scale == 0.0 or bad.size:
            i, j = (int(bad[0][0]), int(bad[0][1])) if bad.size else (0, 0)
            raise SingularBlockError(
                f"jacobi preconditioner: zero diagonal entry at block {i}, entry {j}",
                block_index=i,
            )
        return PreconditionerOp(kind, S.n, S.m, _inv_scale=1.0 / d)

    if kind.name == "block-jacobi":
        inv = np.stack([invert_block(S.diag[i], i) for i in range(S.n)])
        return PreconditionerOp(kind, S.n, S.m, _inv_blocks=inv)

    if kind.name in ("additive-stair", "symmetric-stair"):
        inv_diag = np.stack([invert_block(S.diag[i], i) for i in range(S.n)])
        strength = 1.0 if kind.name == "symmetric-stair" else 0.5
        if S.n > 1:
            off = -strength * np.einsum(
                "nij,njk,nkl->nil", inv_diag[:-1], S.offdiag, inv_diag[1:]
            )
        else:
            off = np.zeros((0, S.m, S.m))
        return PreconditionerOp(kind, S.n, S.m, _inv_tri=BlockTriMatrix(inv_diag, off))

    return PreconditionerOp(kind, S.n, S.m, _factor=stair_split(S, StairSide.LEFT))


def apply(precond: PreconditionerOp, r: BlockVector) -> BlockVector:
    return precond.apply(r)
