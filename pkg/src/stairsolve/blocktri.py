"""Symmetric block-tridiagonal matrices and block-partitioned vectors.

A matrix here is ``n`` symmetric diagonal blocks ``D_i`` of size ``m x m``
plus ``n - 1`` unrestricted super-diagonal blocks ``O_i``; block
``(i+1, i)`` is implicitly ``O_i`` transposed, so the represented dense
matrix is always symmetric. Both containers are frozen after construction
and every operation is pure, which makes them safe to share across
concurrent solves.

Block indices in code are 0-based.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import BlockStructureError, DimensionMismatchError

# Allowed relative asymmetry of a diagonal block before construction fails.
DIAG_SYMMETRY_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class BlockVector:
    """Vector of ``n`` stacked segments of length ``m``, stored as an (n, m) array."""

    segments: np.ndarray

    def __post_init__(self):
        seg = np.array(self.segments, dtype=float)
        if seg.ndim != 2:
            raise DimensionMismatchError(
                f"segments must be a 2-D (n, m) array, got ndim={seg.ndim}"
            )
        seg.setflags(write=False)
        object.__setattr__(self, "segments", seg)

    @property
    def n(self) -> int:
        return self.segments.shape[0]

    @property
    def m(self) -> int:
        return self.segments.shape[1]

    @classmethod
    def from_array(cls, flat: np.ndarray, n: int, m: int) -> "BlockVector":
        flat = np.asarray(flat, dtype=float)
        if flat.size != n * m:
            raise DimensionMismatchError(f"expected {n * m} entries, got {flat.size}")
        return cls(flat.reshape(n, m))

    @classmethod
    def zeros(cls, n: int, m: int) -> "BlockVector":
        return cls(np.zeros((n, m)))

    def as_array(self) -> np.ndarray:
        """Flat read-only view of length n*m."""
        return self.segments.reshape(-1)

    def even_part(self) -> "BlockVector":
        """Copy with segments at odd 1-based index zeroed (keeps segments 2, 4, ...)."""
        out = np.zeros_like(self.segments)
        out[1::2] = self.segments[1::2]
        return BlockVector(out)

    def odd_part(self) -> "BlockVector":
        """Copy with segments at even 1-based index zeroed (keeps segments 1, 3, ...)."""
        out = np.zeros_like(self.segments)
        out[0::2] = self.segments[0::2]
        return BlockVector(out)

    def dot(self, other: "BlockVector") -> float:
        self._check_same_shape(other)
        return float(np.dot(self.as_array(), other.as_array()))

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))

    def _check_same_shape(self, other: "BlockVector") -> None:
        if self.segments.shape != other.segments.shape:
            raise DimensionMismatchError(
                f"block vectors disagree: {self.segments.shape} vs {other.segments.shape}"
            )

    def __add__(self, other: "BlockVector") -> "BlockVector":
        self._check_same_shape(other)
        return BlockVector(self.segments + other.segments)

    def __sub__(self, other: "BlockVector") -> "BlockVector":
        self._check_same_shape(other)
        return BlockVector(self.segments - other.segments)

    def __mul__(self, scalar: float) -> "BlockVector":
        return BlockVector(self.segments * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "BlockVector":
        return BlockVector(-self.segments)


def split_even_odd(v: BlockVector) -> tuple[BlockVector, BlockVector]:
    """Split ``v`` into (even part, odd part); the two always sum back to ``v``."""
    return v.even_part(), v.odd_part()


@dataclass(frozen=True, eq=False)
class BlockTriMatrix:
    """Symmetric block-tridiagonal matrix.

    ``diag`` is an (n, m, m) stack of symmetric blocks, ``offdiag`` an
    (n-1, m, m) stack; ``offdiag[i]`` sits at block position (i, i+1) and
    its transpose at (i+1, i). Diagonal blocks are symmetrized on input
    and rejected if their asymmetry exceeds DIAG_SYMMETRY_RTOL relatively.
    """

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        diag = np.array(self.diag, dtype=float)
        offdiag = np.array(self.offdiag, dtype=float)
        if diag.ndim != 3 or diag.shape[1] != diag.shape[2]:
            raise DimensionMismatchError(
                f"diag must be an (n, m, m) stack, got shape {diag.shape}"
            )
        n, m = diag.shape[0], diag.shape[1]
        if n < 1 or m < 1:
            raise DimensionMismatchError("need at least one block of size >= 1")
        if offdiag.size == 0:
            offdiag = np.zeros((n - 1, m, m))
        if offdiag.shape != (n - 1, m, m):
            raise DimensionMismatchError(
                f"offdiag must have shape {(n - 1, m, m)}, got {offdiag.shape}"
            )
        for i in range(n):
            dev = np.linalg.norm(diag[i] - diag[i].T, np.inf)
            base = np.linalg.norm(diag[i], np.inf)
            if dev > DIAG_SYMMETRY_RTOL * base:
                raise BlockStructureError(
                    f"diagonal block {i} is asymmetric: |D - D^T| = {dev:.3e} "
                    f"exceeds {DIAG_SYMMETRY_RTOL:.0e} * |D| = {DIAG_SYMMETRY_RTOL * base:.3e}"
                )
        diag = 0.5 * (diag + np.transpose(diag, (0, 2, 1)))
        diag.setflags(write=False)
        offdiag.setflags(write=False)
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", offdiag)

    @property
    def n(self) -> int:
        return self.diag.shape[0]

    @property
    def m(self) -> int:
        return self.diag.shape[1]

    @property
    def dim(self) -> int:
        return self.n * self.m

    @classmethod
    def identity(cls, n: int, m: int) -> "BlockTriMatrix":
        return cls(np.broadcast_to(np.eye(m), (n, m, m)).copy(), np.zeros((n - 1, m, m)))

    @classmethod
    def from_dense(cls, dense: np.ndarray, n: int, m: int) -> "BlockTriMatrix":
        """Extract the block-tridiagonal part of an (n*m, n*m) dense matrix."""
        dense = np.asarray(dense, dtype=float)
        if dense.shape != (n * m, n * m):
            raise DimensionMismatchError(
                f"dense matrix must be {(n * m, n * m)}, got {dense.shape}"
            )
        diag = np.stack([dense[i * m : (i + 1) * m, i * m : (i + 1) * m] for i in range(n)])
        off = (
            np.stack([dense[i * m : (i + 1) * m, (i + 1) * m : (i + 2) * m] for i in range(n - 1)])
            if n > 1
            else np.zeros((0, m, m))
        )
        return cls(diag, off)

    def matvec(self, x: BlockVector) -> BlockVector:
        """Product with a block vector.

        Each output segment depends only on its own and the two neighboring
        input segments, so the result is independent of any parallel
        split across block rows.
        """
        if x.n != self.n or x.m != self.m:
            raise DimensionMismatchError(
                f"vector is ({x.n}, {x.m}), matrix expects ({self.n}, {self.m})"
            )
        segs = x.segments
        out = np.einsum("nij,nj->ni", self.diag, segs)
        if self.n > 1:
            out[:-1] += np.einsum("nij,nj->ni", self.offdiag, segs[1:])
            out[1:] += np.einsum("nji,nj->ni", self.offdiag, segs[:-1])
        return BlockVector(out)

    def to_dense(self) -> np.ndarray:
        """Dense (n*m, n*m) reconstruction; exactly symmetric by layout."""
        n, m = self.n, self.m
        out = np.zeros((n * m, n * m))
        for i in range(n):
            out[i * m : (i + 1) * m, i * m : (i + 1) * m] = self.diag[i]
        for i in range(n - 1):
            out[i * m : (i + 1) * m, (i + 1) * m : (i + 2) * m] = self.offdiag[i]
            out[(i + 1) * m : (i + 2) * m, i * m : (i + 1) * m] = self.offdiag[i].T
        return out


def matvec(S: BlockTriMatrix, x: BlockVector) -> BlockVector:
    return S.matvec(x)


def dense_reconstruct(S: BlockTriMatrix) -> np.ndarray:
    return S.to_dense()


def write_matrix(path: str | os.PathLike, S: BlockTriMatrix) -> None:
    """Write a matrix as text: header ``n m``, then the n diagonal blocks and
    n-1 super-diagonal blocks row-major with 17 significant digits."""
    lines = [f"{S.n} {S.m}"]
    for block in list(S.diag) + list(S.offdiag):
        for row in block:
            lines.append(" ".join(f"{v:.17g}" for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_matrix(path: str | os.PathLike) -> BlockTriMatrix:
    """Read a matrix written by :func:`write_matrix` (whitespace tolerant)."""
    with open(path) as fh:
        tokens = fh.read().split()
    if len(tokens) < 2:
        raise ValueError(f"{path}: missing 'n m' header")
    n, m = int(tokens[0]), int(tokens[1])
    values = np.array([float(t) for t in tokens[2:]])
    expected = n * m * m + max(n - 1, 0) * m * m
    if values.size != expected:
        raise ValueError(
            f"{path}: expected {expected} values for n={n}, m={m}, found {values.size}"
        )
    diag = values[: n * m * m].reshape(n, m, m)
    offdiag = values[n * m * m :].reshape(max(n - 1, 0), m, m)
    return BlockTriMatrix(diag, offdiag)
