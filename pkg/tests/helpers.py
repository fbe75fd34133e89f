"""Shared generators and independent dense oracles for the test suite.

Everything here builds dense matrices straight from the block data with its
own layout logic and plain numpy factorizations, so the closed-form block
paths in the package are always checked against a second route.
"""

from __future__ import annotations

import numpy as np

from stairsolve import BlockTriMatrix, BlockVector, TrajoptLinearization


def random_invertible(rng: np.random.Generator, m: int) -> np.ndarray:
    """Random matrix with singular values in [0.5, 1.5]."""
    u, _, vt = np.linalg.svd(rng.standard_normal((m, m)))
    return u @ np.diag(rng.uniform(0.5, 1.5, m)) @ vt


def random_spd_blocktri(
    rng: np.random.Generator,
    n: int,
    m: int,
    margin: float = 0.1,
    invertible_off: bool = False,
) -> BlockTriMatrix:
    """Random SPD block-tridiagonal matrix.

    The diagonal is shifted so the smallest eigenvalue is ``margin`` times
    the spectral spread, keeping instances comfortably positive definite.
    """
    diag = rng.standard_normal((n, m, m))
    diag = 0.5 * (diag + np.transpose(diag, (0, 2, 1)))
    if invertible_off:
        off = np.stack([random_invertible(rng, m) for _ in range(n - 1)]) \
            if n > 1 else np.zeros((0, m, m))
    else:
        off = rng.standard_normal((n - 1, m, m)) if n > 1 else np.zeros((0, m, m))
    dense = BlockTriMatrix(diag, off).to_dense()
    w = np.linalg.eigvalsh(dense)
    spread = max(w[-1] - w[0], 1.0)
    shift = margin * spread - w[0]
    diag = diag + shift * np.eye(m)
    return BlockTriMatrix(diag, off)


def random_blockvector(rng: np.random.Generator, n: int, m: int) -> BlockVector:
    return BlockVector(rng.standard_normal((n, m)))


def dense_stair(S: BlockTriMatrix, side: str) -> np.ndarray:
    """Dense stair matrix built directly from the blocks ('left' or 'right')."""
    n, m = S.n, S.m
    out = np.zeros((n * m, n * m))
    for i in range(n):
        out[i * m : (i + 1) * m, i * m : (i + 1) * m] = S.diag[i]
        carried = (i % 2 == 1) if side == "left" else (i % 2 == 0)
        if carried:
            if i >= 1:
                out[i * m : (i + 1) * m, (i - 1) * m : i * m] = S.offdiag[i - 1].T
            if i <= n - 2:
                out[i * m : (i + 1) * m, (i + 1) * m : (i + 2) * m] = S.offdiag[i]
    return out


def dense_stair_complement(S: BlockTriMatrix, side: str) -> np.ndarray:
    return dense_stair(S, side) - S.to_dense()


def random_linearization(
    rng: np.random.Generator, N: int, nx: int, nu: int
) -> TrajoptLinearization:
    """Random trajectory QP linearization with SPD cost blocks and
    integrator-like transition matrices."""
    def spd(dim):
        a = rng.standard_normal((dim, dim))
        return a @ a.T + dim * np.eye(dim)

    Q = np.stack([spd(nx) for _ in range(N)])
    R = np.stack([spd(nu) for _ in range(N - 1)]) if N > 1 else np.zeros((0, nu, nu))
    q = rng.standard_normal((N, nx))
    r = rng.standard_normal((N - 1, nu)) if N > 1 else np.zeros((0, nu))
    A = np.stack([np.eye(nx) + 0.15 * rng.standard_normal((nx, nx)) for _ in range(N - 1)]) \
        if N > 1 else np.zeros((0, nx, nx))
    B = 0.2 * rng.standard_normal((N - 1, nx, nu)) if N > 1 else np.zeros((0, nx, nu))
    c = BlockVector(rng.standard_normal((N, nx)))
    return TrajoptLinearization(Q=Q, R=R, q=q, r=r, A=A, B=B, c=c)


def assemble_kkt(lin: TrajoptLinearization):
    """Dense saddle-point pieces (G, C, g, c) assembled from scratch.

    Variable order (x_0, u_0, x_1, u_1, ..., x_{N-1}); constraint rows are
    the identity on x_0 followed by (-A_k, -B_k, +I) per interval.
    """
    N, nx, nu = lin.N, lin.nx, lin.nu
    nz = N * nx + (N - 1) * nu

    def xoff(k):
        return k * (nx + nu)

    def uoff(k):
        return k * (nx + nu) + nx

    G = np.zeros((nz, nz))
    g = np.zeros(nz)
    for k in range(N):
        G[xoff(k) : xoff(k) + nx, xoff(k) : xoff(k) + nx] = lin.Q[k]
        g[xoff(k) : xoff(k) + nx] = lin.q[k]
    for k in range(N - 1):
        G[uoff(k) : uoff(k) + nu, uoff(k) : uoff(k) + nu] = lin.R[k]
        g[uoff(k) : uoff(k) + nu] = lin.r[k]

    C = np.zeros((N * nx, nz))
    C[0:nx, 0:nx] = np.eye(nx)
    for k in range(N - 1):
        row = (k + 1) * nx
        C[row : row + nx, xoff(k) : xoff(k) + nx] = -lin.A[k]
        C[row : row + nx, uoff(k) : uoff(k) + nu] = -lin.B[k]
        C[row : row + nx, xoff(k + 1) : xoff(k + 1) + nx] = np.eye(nx)
    return G, C, g, lin.c.as_array().copy()


def oracle_negated_schur(lin: TrajoptLinearization):
    """Dense Schur reduction (negated to positive definite) via explicit C, G."""
    G, C, g, c = assemble_kkt(lin)
    Ginv = np.linalg.inv(G)
    S_spd = C @ Ginv @ C.T
    gamma = C @ Ginv @ g - c
    return S_spd, gamma


def spectral_pairs(mu: np.ndarray, n: int, m: int, rtol: float = 1e-7):
    """Collapse the doubled spectrum of the symmetric-stair preconditioned
    matrix into splitting eigenvalues.

    For odd block counts the top ``m`` eigenvalues sit at one and are
    returned separately. Returns (lam, ones) with lam the collapsed values
    ``1 - mu`` of the underlying splitting.
    """
    mu = np.sort(np.asarray(mu, dtype=float))
    # pairing tolerance is relative to the spectrum diameter, floored at the
    # spectrum scale so that fully clustered spectra still pair up
    tol = rtol * max(mu[-1] - mu[0], np.abs(mu).max(), 1e-30)
    ones = np.array([])
    if n % 2 == 1:
        ones = mu[-m:]
        assert np.all(np.abs(ones - 1.0) <= tol), (
            f"expected {m} unit eigenvalues for odd n, got {ones}"
        )
        mu = mu[: len(mu) - m]
    pairs = mu.reshape(-1, 2)
    gaps = np.abs(pairs[:, 0] - pairs[:, 1])
    assert np.all(gaps <= tol), (
        f"spectrum does not pair up: max gap {gaps.max():.3e} vs tol {tol:.3e}"
    )
    lam = 1.0 - pairs.mean(axis=1)
    return np.maximum(lam, 0.0), ones


def additive_map_from_pairs(lam: np.ndarray, ones_count: int) -> np.ndarray:
    """Predicted additive-stair spectrum from collapsed splitting eigenvalues:
    each lam yields 1 - (lam +- sqrt(lam)) / 2, plus unit eigenvalues."""
    root = np.sqrt(lam)
    mapped = np.concatenate([
        1.0 - 0.5 * (lam + root),
        1.0 - 0.5 * (lam - root),
        np.ones(ones_count),
    ])
    return np.sort(mapped)
