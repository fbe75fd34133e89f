import numpy as np
import pytest

from stairsolve import (
    ADDITIVE_STAIR,
    BLOCK_JACOBI,
    JACOBI,
    SYMMETRIC_STAIR,
    BlockTriMatrix,
    BlockVector,
    DimensionMismatchError,
    PreconditionerKind,
    SingularBlockError,
    StairSide,
    build_preconditioner,
    polynomial,
    preconditioned_spectrum,
    stair_split,
)
from helpers import (
    additive_map_from_pairs,
    dense_stair,
    random_blockvector,
    random_spd_blocktri,
    spectral_pairs,
)

ALL_MATERIALIZED = [JACOBI, BLOCK_JACOBI, ADDITIVE_STAIR, SYMMETRIC_STAIR]


def two_by_one():
    return BlockTriMatrix(np.array([[[2.0]], [[2.0]]]), np.array([[[1.0]]]))


class TestKind:
    def test_parse_names(self):
        assert PreconditionerKind.parse("jacobi") == JACOBI
        assert PreconditionerKind.parse("block-jacobi") == BLOCK_JACOBI
        assert PreconditionerKind.parse("additive-stair") == ADDITIVE_STAIR
        assert PreconditionerKind.parse("symmetric-stair") == SYMMETRIC_STAIR
        assert PreconditionerKind.parse("poly:3") == polynomial(3)

    def test_parse_rejects_unknown(self):
        with pytest.raises(ValueError):
            PreconditionerKind.parse("ilu")
        with pytest.raises(ValueError):
            PreconditionerKind.parse("poly:zero")

    def test_degree_validation(self):
        with pytest.raises(ValueError):
            PreconditionerKind("poly")
        with pytest.raises(ValueError):
            PreconditionerKind("poly", 0)
        with pytest.raises(ValueError):
            PreconditionerKind("jacobi", 2)

    def test_labels_and_symmetry_flags(self):
        assert polynomial(4).label == "poly:4"
        assert SYMMETRIC_STAIR.label == "symmetric-stair"
        assert not polynomial(2).is_symmetric
        assert all(kind.is_symmetric for kind in ALL_MATERIALIZED)


class TestBuild:
    @pytest.mark.parametrize("kind", ALL_MATERIALIZED)
    def test_identity_source_gives_identity_inverse(self, kind):
        S = BlockTriMatrix.identity(4, 2)
        op = build_preconditioner(S, kind)
        np.testing.assert_allclose(op.dense_inverse(), np.eye(8), atol=1e-14)

    def test_symmetric_stair_two_by_one_hand_case(self):
        op = build_preconditioner(two_by_one(), SYMMETRIC_STAIR)
        np.testing.assert_allclose(
            op.dense_inverse(), [[0.5, -0.25], [-0.25, 0.5]], atol=1e-15
        )

    def test_additive_stair_two_by_one_hand_case(self):
        op = build_preconditioner(two_by_one(), ADDITIVE_STAIR)
        np.testing.assert_allclose(
            op.dense_inverse(), [[0.5, -0.125], [-0.125, 0.5]], atol=1e-15
        )

    def test_jacobi_uses_scalar_diagonal(self):
        rng = np.random.default_rng(0)
        S = random_spd_blocktri(rng, 4, 3)
        op = build_preconditioner(S, JACOBI)
        np.testing.assert_allclose(
            op.dense_inverse(), np.diag(1.0 / np.diag(S.to_dense())), rtol=1e-15
        )

    def test_block_jacobi_uses_block_diagonal(self):
        rng = np.random.default_rng(1)
        S = random_spd_blocktri(rng, 4, 3)
        op = build_preconditioner(S, BLOCK_JACOBI)
        expected = np.zeros((12, 12))
        for i in range(4):
            expected[3 * i : 3 * i + 3, 3 * i : 3 * i + 3] = np.linalg.inv(S.diag[i])
        np.testing.assert_allclose(op.dense_inverse(), expected, rtol=1e-10, atol=1e-13)

    @pytest.mark.parametrize("n,m", [(2, 1), (5, 2), (6, 3), (9, 2)])
    def test_symmetric_stair_equals_sum_minus_block_diag(self, n, m):
        rng = np.random.default_rng(10 * n + m)
        S = random_spd_blocktri(rng, n, m)
        op = build_preconditioner(S, SYMMETRIC_STAIR)
        left_inv = np.linalg.inv(dense_stair(S, "left"))
        right_inv = np.linalg.inv(dense_stair(S, "right"))
        dinv = np.zeros((n * m, n * m))
        for i in range(n):
            dinv[i * m : (i + 1) * m, i * m : (i + 1) * m] = np.linalg.inv(S.diag[i])
        expected = left_inv + right_inv - dinv
        scale = np.abs(expected).max()
        np.testing.assert_allclose(op.dense_inverse(), expected, rtol=0, atol=1e-12 * scale)

    @pytest.mark.parametrize("n,m", [(2, 1), (5, 2), (6, 3), (9, 2)])
    def test_additive_stair_equals_average_of_inverses(self, n, m):
        rng = np.random.default_rng(11 * n + m)
        S = random_spd_blocktri(rng, n, m)
        op = build_preconditioner(S, ADDITIVE_STAIR)
        expected = 0.5 * (
            np.linalg.inv(dense_stair(S, "left")) + np.linalg.inv(dense_stair(S, "right"))
        )
        scale = np.abs(expected).max()
        np.testing.assert_allclose(op.dense_inverse(), expected, rtol=0, atol=1e-12 * scale)

    @pytest.mark.parametrize("kind", ALL_MATERIALIZED)
    def test_dense_inverse_is_symmetric(self, kind):
        rng = np.random.default_rng(2)
        S = random_spd_blocktri(rng, 7, 2)
        inverse = build_preconditioner(S, kind).dense_inverse()
        scale = np.abs(inverse).max()
        np.testing.assert_allclose(inverse, inverse.T, rtol=0, atol=1e-12 * scale)

    def test_symmetric_stair_mirrors_offdiagonal_blocks(self):
        rng = np.random.default_rng(3)
        S = random_spd_blocktri(rng, 6, 2)
        inverse = build_preconditioner(S, SYMMETRIC_STAIR).dense_inverse()
        m = 2
        for i in range(5):
            upper = inverse[i * m : (i + 1) * m, (i + 1) * m : (i + 2) * m]
            lower = inverse[(i + 1) * m : (i + 2) * m, i * m : (i + 1) * m]
            np.testing.assert_array_equal(upper, lower.T)

    def test_jacobi_zero_diagonal_entry_rejected(self):
        diag = np.stack([np.diag([1.0, 0.0]), np.eye(2)])
        S = BlockTriMatrix(diag, np.zeros((1, 2, 2)))
        with pytest.raises(SingularBlockError, match="block 0, entry 1"):
            build_preconditioner(S, JACOBI)

    @pytest.mark.parametrize("kind", [BLOCK_JACOBI, ADDITIVE_STAIR, SYMMETRIC_STAIR])
    def test_singular_diagonal_block_rejected(self, kind):
        diag = np.stack([np.eye(2), np.ones((2, 2)), np.eye(2)])  # middle block singular
        S = BlockTriMatrix(diag, np.zeros((2, 2, 2)))
        with pytest.raises(SingularBlockError) as err:
            build_preconditioner(S, kind)
        assert err.value.block_index == 1


class TestApply:
    def test_jacobi_diagonal_scaling(self):
        S = BlockTriMatrix(np.array([[[2.0]], [[4.0]]]), np.zeros((1, 1, 1)))
        op = build_preconditioner(S, JACOBI)
        out = op.apply(BlockVector(np.array([[2.0], [4.0]])))
        np.testing.assert_allclose(out.as_array(), [1.0, 1.0])

    def test_symmetric_stair_hand_case(self):
        op = build_preconditioner(two_by_one(), SYMMETRIC_STAIR)
        out = op.apply(BlockVector(np.array([[1.0], [0.0]])))
        np.testing.assert_allclose(out.as_array(), [0.5, -0.25], atol=1e-15)

    @pytest.mark.parametrize("kind", ALL_MATERIALIZED)
    def test_apply_matches_dense_inverse(self, kind):
        rng = np.random.default_rng(4)
        S = random_spd_blocktri(rng, 6, 3)
        op = build_preconditioner(S, kind)
        r = random_blockvector(rng, 6, 3)
        expected = op.dense_inverse() @ r.as_array()
        np.testing.assert_allclose(op.apply(r).as_array(), expected,
                                   rtol=1e-12, atol=1e-13 * np.abs(expected).max())

    def test_apply_dimension_mismatch(self):
        op = build_preconditioner(two_by_one(), JACOBI)
        with pytest.raises(DimensionMismatchError):
            op.apply(BlockVector(np.zeros((3, 1))))


class TestPolynomial:
    def test_zero_offdiagonal_any_degree_is_block_jacobi(self):
        rng = np.random.default_rng(5)
        S = random_spd_blocktri(rng, 5, 2)
        S = BlockTriMatrix(S.diag, np.zeros((4, 2, 2)))
        r = random_blockvector(rng, 5, 2)
        bj = build_preconditioner(S, BLOCK_JACOBI).apply(r)
        for degree in (1, 2, 5):
            out = build_preconditioner(S, polynomial(degree)).apply(r)
            np.testing.assert_allclose(out.as_array(), bj.as_array(), rtol=1e-12, atol=1e-14)

    @pytest.mark.parametrize("degree", [1, 2, 3, 4])
    def test_matches_truncated_series_oracle(self, degree):
        rng = np.random.default_rng(6 + degree)
        n, m = 6, 2
        S = random_spd_blocktri(rng, n, m)
        psi = dense_stair(S, "left")
        T = np.linalg.solve(psi, psi - S.to_dense())
        series = np.eye(n * m)
        power = np.eye(n * m)
        for _ in range(degree):
            power = power @ T
            series = series + power
        dense_op = series @ np.linalg.inv(psi)
        op = build_preconditioner(S, polynomial(degree))
        r = random_blockvector(rng, n, m)
        expected = dense_op @ r.as_array()
        np.testing.assert_allclose(op.apply(r).as_array(), expected,
                                   rtol=1e-9, atol=1e-11 * np.abs(expected).max())

    @pytest.mark.parametrize("degree", [1, 3])
    def test_preconditioned_matrix_is_identity_minus_series_tail(self, degree):
        # (I + T + ... + T^k) inv(psi) S telescopes to I - T^(k+1)
        rng = np.random.default_rng(7 + degree)
        n, m = 5, 2
        S = random_spd_blocktri(rng, n, m)
        psi = dense_stair(S, "left")
        T = np.linalg.solve(psi, psi - S.to_dense())
        op = build_preconditioner(S, polynomial(degree))
        applied = np.column_stack([
            op.apply(S.matvec(BlockVector(col.reshape(n, m)))).as_array()
            for col in np.eye(n * m)
        ])
        expected = np.eye(n * m) - np.linalg.matrix_power(T, degree + 1)
        np.testing.assert_allclose(applied, expected, rtol=0, atol=1e-11)

    def test_dense_inverse_not_available(self):
        op = build_preconditioner(two_by_one(), polynomial(2))
        with pytest.raises(ValueError, match="never materialized"):
            op.dense_inverse()


class TestSpectralTheory:
    @pytest.mark.parametrize("kind", [ADDITIVE_STAIR, SYMMETRIC_STAIR])
    def test_inverse_is_positive_definite_for_spd_source(self, kind):
        rng = np.random.default_rng(8)
        for n, m in [(3, 2), (6, 2), (9, 1)]:
            S = random_spd_blocktri(rng, n, m)
            w = np.linalg.eigvalsh(build_preconditioner(S, kind).dense_inverse())
            assert w[0] > 0

    @pytest.mark.parametrize("n,m", [(2, 1), (4, 2), (5, 2), (7, 3), (10, 2), (11, 1)])
    def test_spectrum_ranges(self, n, m):
        rng = np.random.default_rng(9 * n + m)
        S = random_spd_blocktri(rng, n, m)
        sym = preconditioned_spectrum(S, build_preconditioner(S, SYMMETRIC_STAIR))
        assert sym.lambda_min > 1e-10
        assert sym.lambda_max <= 1.0 + 1e-9
        add = preconditioned_spectrum(S, build_preconditioner(S, ADDITIVE_STAIR))
        assert add.lambda_min > 1e-10
        assert add.lambda_max <= 9.0 / 8.0 + 1e-9

    @pytest.mark.parametrize("n,m", [(4, 2), (5, 2), (6, 1), (7, 2), (9, 3)])
    def test_spectral_map_between_stair_kinds(self, n, m):
        rng = np.random.default_rng(13 * n + m)
        S = random_spd_blocktri(rng, n, m)
        mu = preconditioned_spectrum(S, build_preconditioner(S, SYMMETRIC_STAIR)).eigenvalues
        nu = np.array(preconditioned_spectrum(S, build_preconditioner(S, ADDITIVE_STAIR)).eigenvalues)
        lam, ones = spectral_pairs(np.array(mu), n, m)
        predicted = additive_map_from_pairs(lam, len(ones))
        assert np.abs(predicted - np.sort(nu)).max() <= 1e-7 * max(1.0, np.abs(nu).max())

    @pytest.mark.parametrize("n,m", [(4, 2), (6, 3), (5, 2), (9, 1)])
    def test_even_multiplicity_structure(self, n, m):
        rng = np.random.default_rng(17 * n + m)
        S = random_spd_blocktri(rng, n, m)
        mu = np.array(preconditioned_spectrum(
            S, build_preconditioner(S, SYMMETRIC_STAIR)).eigenvalues)
        # spectral_pairs asserts pairing after stripping unit values for odd n
        spectral_pairs(mu, n, m)

    @pytest.mark.parametrize("n,m", [(3, 2), (6, 2), (8, 1), (11, 2)])
    def test_convergent_splitting(self, n, m):
        rng = np.random.default_rng(21 * n + m)
        S = random_spd_blocktri(rng, n, m)
        mu = np.array(preconditioned_spectrum(
            S, build_preconditioner(S, SYMMETRIC_STAIR)).eigenvalues)
        assert np.abs(1.0 - mu).max() < 1.0

    def test_left_splitting_is_convergent_for_spd_source(self):
        # spectral radius of inv(stair) complement stays below one, so the
        # truncated polynomial series is a valid approximation
        rng = np.random.default_rng(22)
        S = random_spd_blocktri(rng, 6, 2)
        f = stair_split(S, StairSide.LEFT)
        T = f.psi_inv_dense() @ f.complement_dense()
        assert np.abs(np.linalg.eigvals(T)).max() < 1.0
