"""Small dense kernels used by the block-level code.

Blocks are tiny (a robot state dimension on the side), so plain
partial-pivot elimination in Python is fast enough and gives explicit
control over the singularity threshold.
"""

from __future__ import annotations

import numpy as np

from .errors import NotPositiveDefiniteError, SingularBlockError

# A pivot below this fraction of the largest entry declares the block singular.
PIVOT_RTOL = 1e-12


def invert_block(block: np.ndarray, index: int, what: str = "diagonal block") -> np.ndarray:
    """Invert one dense block via pivoted LU.

    Raises SingularBlockError naming ``index`` when a pivot falls below
    PIVOT_RTOL times the largest absolute entry. Symmetric inputs get a
    symmetrized inverse so downstream symmetry checks are exact.
    """
    a = np.asarray(block, dtype=float)
    m = a.shape[0]
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if scale == 0.0:
        raise SingularBlockError(f"{what} {index} is identically zero", block_index=index)

    lu = a.copy()
    piv = np.arange(m)
    for k in range(m):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[p, k]) <= PIVOT_RTOL * scale:
            raise SingularBlockError(
                f"{what} {index} is singular to working precision "
                f"(pivot {abs(lu[p, k]):.3e} <= {PIVOT_RTOL:.0e} * {scale:.3e})",
                block_index=index,
            )
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            piv[[k, p]] = piv[[p, k]]
        lu[k + 1 :, k] /= lu[k, k]
        lu[k + 1 :, k + 1 :] -= np.outer(lu[k + 1 :, k], lu[k, k + 1 :])

    # Solve LU X = P I column-block-wise.
    x = np.eye(m)[piv]
    for k in range(m):
        x[k] -= lu[k, :k] @ x[:k]
    for k in range(m - 1, -1, -1):
        x[k] = (x[k] - lu[k, k + 1 :] @ x[k + 1 :]) / lu[k, k]

    if np.allclose(a, a.T, rtol=0.0, atol=PIVOT_RTOL * scale):
        x = 0.5 * (x + x.T)
    return x


def spd_inverse(mat: np.ndarray, label: str) -> np.ndarray:
    """Inverse of a symmetric positive definite matrix, SPD-checked by Cholesky."""
    a = np.asarray(mat, dtype=float)
    try:
        np.linalg.cholesky(0.5 * (a + a.T))
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError(f"{label} is not symmetric positive definite") from None
    inv = np.linalg.solve(a, np.eye(a.shape[0]))
    return 0.5 * (inv + inv.T)
