"""Dense spectral analysis used as the verification oracle.

Problem sizes here are desk-scale (a few hundred rows at most), so dense
symmetric eigendecomposition, SVD-based rank counting and, for nonsymmetric
operators, plain power iteration cover everything the property suites need.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .blocktri import BlockTriMatrix
from .errors import NotPositiveDefiniteError

SYMMETRY_RTOL = 1e-10
POWER_TOL = 1e-8
POWER_MAX_STEPS = 10_000


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    """Eigenvalues sorted ascending plus derived summary figures.

    ``condition_number`` is lambda_max / lambda_min when the whole spectrum
    is positive and None otherwise.
    """

    eigenvalues: tuple[float, ...]
    lambda_min: float
    lambda_max: float
    condition_number: float | None
    spectral_radius: float

    @classmethod
    def from_eigenvalues(cls, values: np.ndarray) -> "SpectrumReport":
        w = np.sort(np.asarray(values, dtype=float))
        lo, hi = float(w[0]), float(w[-1])
        cond = hi / lo if lo > 0.0 else None
        return cls(tuple(w), lo, hi, cond, float(np.max(np.abs(w))))


def _check_symmetric(mat: np.ndarray, what: str) -> np.ndarray:
    a = np.asarray(mat, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{what} must be square, got shape {a.shape}")
    scale = np.linalg.norm(a, np.inf)
    dev = np.linalg.norm(a - a.T, np.inf)
    if dev > SYMMETRY_RTOL * max(scale, 1e-300):
        raise ValueError(
            f"{what} is not symmetric: |M - M^T| = {dev:.3e} exceeds "
            f"{SYMMETRY_RTOL:.0e} * |M| = {SYMMETRY_RTOL * scale:.3e}"
        )
    return 0.5 * (a + a.T)


def eig_sym(mat: np.ndarray) -> SpectrumReport:
    """All eigenvalues of a symmetric matrix; asymmetric input is rejected."""
    a = _check_symmetric(mat, "matrix")
    return SpectrumReport.from_eigenvalues(np.linalg.eigvalsh(a))


def preconditioned_spectrum(S: BlockTriMatrix, precond) -> SpectrumReport:
    """Spectrum of ``inv(Phi) S`` for a symmetric positive definite ``inv(Phi)``.

    Factors ``inv(Phi) = L L^T`` and diagonalizes the similar symmetric
    matrix ``L^T S L``; fails with NotPositiveDefiniteError when the
    preconditioner inverse is not positive definite (an inadmissible
    preconditioner for CG).
    """
    phi_inv = _check_symmetric(precond.dense_inverse(), "preconditioner inverse")
    try:
        L = np.linalg.cholesky(phi_inv)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError(
            "preconditioner inverse is not positive definite"
        ) from None
    sym = L.T @ S.to_dense() @ L
    return eig_sym(0.5 * (sym + sym.T))


def rank_estimate(mat: np.ndarray, rel_tol: float) -> int:
    """Count singular values above ``rel_tol`` times the largest one."""
    if not 0.0 < rel_tol < 1.0:
        raise ValueError(f"rel_tol must be in (0, 1), got {rel_tol}")
    a = np.asarray(mat, dtype=float)
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


def power_iteration_radius(
    apply_fn: Callable[[np.ndarray], np.ndarray],
    size: int,
    tol: float = POWER_TOL,
    max_steps: int = POWER_MAX_STEPS,
) -> float:
    """Spectral radius estimate of a linear operator given only its action."""
    rng = np.random.default_rng(0x5EED)
    v = rng.standard_normal(size)
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(max_steps):
        w = apply_fn(v)
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            return 0.0
        if abs(norm - estimate) <= tol * max(1.0, norm):
            return norm
        estimate = norm
        v = w / norm
    return estimate


def spectral_radius(mat: np.ndarray, tol: float = POWER_TOL, max_steps: int = POWER_MAX_STEPS) -> float:
    """max |eigenvalue|; symmetric matrices use the dense eigensolver,
    anything else falls back to power iteration."""
    a = np.asarray(mat, dtype=float)
    scale = np.linalg.norm(a, np.inf)
    if scale == 0.0:
        return 0.0
    if np.linalg.norm(a - a.T, np.inf) <= SYMMETRY_RTOL * scale:
        return float(np.max(np.abs(np.linalg.eigvalsh(0.5 * (a + a.T)))))
    return power_iteration_radius(lambda v: a @ v, a.shape[0], tol, max_steps)


def spectrum_csv_rows(problem: str, preconditioner: str, eigenvalues) -> list[str]:
    """CSV rows ``problem,preconditioner,index,eigenvalue`` for spectrum export."""
    return [
        f"{problem},{preconditioner},{i},{float(v)!r}"
        for i, v in enumerate(eigenvalues)
    ]
