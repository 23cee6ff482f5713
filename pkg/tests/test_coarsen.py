import numpy as np
import pytest

from specoarse.aggregation import Partition, random_partition
from specoarse.coarsen import build_interpolation, galerkin_product, two_sided_product
from specoarse.errors import DimensionMismatch, NotSquare, RequiresNormalized
from specoarse.matrix_core import from_dense, gen_dense_random, gen_random_symmetric


def test_literal_interpolation_matches_unit_pattern():
    P = build_interpolation(Partition([0, 1, 0, 1], 2), normalized=False)
    np.testing.assert_array_equal(P.to_dense().T, [[1, 0, 1, 0], [0, 1, 0, 1]])


def test_normalized_interpolation_is_orthonormal():
    P = build_interpolation(Partition([0, 1, 0, 1], 2))
    np.testing.assert_allclose(P.to_dense().T, np.array([[1, 0, 1, 0], [0, 1, 0, 1]]) / np.sqrt(2))
    for seed in range(5):
        Pd = build_interpolation(random_partition(50, 7, seed)).to_dense()
        assert np.max(np.abs(Pd.T @ Pd - np.eye(7))) <= 1e-14
        assert np.all(np.count_nonzero(Pd, axis=1) == 1)


def test_singletons_give_identity():
    P = build_interpolation(Partition(np.arange(5), 5))
    np.testing.assert_array_equal(P.to_dense(), np.eye(5))


def test_apply_and_restrict():
    p = random_partition(12, 4, seed=3)
    P = build_interpolation(p)
    Pd = P.to_dense()
    xc = np.arange(4.0)
    x = np.linspace(-1, 1, 12)
    np.testing.assert_allclose(P.apply(xc), Pd @ xc)
    np.testing.assert_allclose(P.restrict(x), Pd.T @ x)


def test_galerkin_tridiagonal(lap4):
    p = Partition([0, 0, 1, 1], 2)
    Ac = galerkin_product(lap4, build_interpolation(p, normalized=False))
    np.testing.assert_array_equal(Ac, [[2, -1], [-1, 2]])
    Ac = galerkin_product(lap4, build_interpolation(p))
    np.testing.assert_allclose(Ac, [[1, -0.5], [-0.5, 1]], atol=1e-15)
    np.testing.assert_allclose(np.linalg.eigvalsh(Ac), [0.5, 1.5], atol=1e-12)


def test_galerkin_identity():
    A = from_dense(np.eye(9), symmetric=True)
    P = build_interpolation(random_partition(9, 4, 1))
    np.testing.assert_allclose(galerkin_product(A, P), np.eye(4), atol=1e-15)


@pytest.mark.parametrize("n", [5, 30, 100])
@pytest.mark.parametrize("normalized", [True, False])
def test_galerkin_matches_dense_triple_product(n, normalized):
    rng = np.random.default_rng(n)
    M = rng.standard_normal((n, n)) * (rng.random((n, n)) < 0.3)
    A = from_dense(M)
    P = build_interpolation(random_partition(n, max(1, n // 4), seed=n), normalized)
    Pd = P.to_dense()
    np.testing.assert_allclose(galerkin_product(A, P), Pd.T @ M @ Pd,
                               rtol=0, atol=1e-12 * A.frobenius())


def test_galerkin_preserves_symmetry():
    A = gen_random_symmetric(60, 5)
    Ac = galerkin_product(A, build_interpolation(random_partition(60, 13, 2)))
    assert np.max(np.abs(Ac - Ac.T)) <= 1e-14 * np.linalg.norm(Ac)


def test_galerkin_errors(lap4):
    with pytest.raises(NotSquare):
        galerkin_product(from_dense(np.ones((2, 3))), build_interpolation(Partition([0, 1], 2)))
    with pytest.raises(DimensionMismatch):
        galerkin_product(lap4, build_interpolation(Partition([0, 1, 1], 2)))


def test_two_sided_identity_operators():
    M = gen_dense_random(4, 2, ncols=3)
    A = from_dense(M)
    U = build_interpolation(Partition(np.arange(4), 4))
    V = build_interpolation(Partition(np.arange(3), 3))
    np.testing.assert_array_equal(two_sided_product(A, U, V), M)


def test_two_sided_identity_matrix():
    A = from_dense(np.eye(4))
    U = build_interpolation(Partition([0, 0, 1, 1], 2))
    np.testing.assert_allclose(two_sided_product(A, U, U), np.eye(2), atol=1e-15)


def test_two_sided_matches_dense():
    M = gen_dense_random(6, 7, ncols=4)
    A = from_dense(M)
    U = build_interpolation(random_partition(6, 3, 1))
    V = build_interpolation(random_partition(4, 2, 2))
    np.testing.assert_allclose(two_sided_product(A, U, V),
                               U.to_dense().T @ M @ V.to_dense(), rtol=0, atol=1e-13)


def test_two_sided_errors():
    A = from_dense(gen_dense_random(6, 7, ncols=4))
    U = build_interpolation(random_partition(6, 3, 1))
    V = build_interpolation(random_partition(4, 2, 2))
    with pytest.raises(DimensionMismatch):
        two_sided_product(A, V, U)
    Ul = build_interpolation(random_partition(6, 3, 1), normalized=False)
    with pytest.raises(RequiresNormalized):
        two_sided_product(A, Ul, V)
    B = two_sided_product(A, Ul, V, require_normalized=False)
    np.testing.assert_allclose(B, Ul.to_dense().T @ A.to_dense() @ V.to_dense(), atol=1e-13)
