import numpy as np
import pytest

from specoarse.dense_eig import Spectrum, dense_singular_values, eig_extremes, sym_eigenvalues
from specoarse.errors import NoConvergence, NotSquare, NotSymmetric

from conftest import toeplitz_eigs


def _rand_sym(n, seed):
    R = np.random.default_rng(seed).standard_normal((n, n))
    return (R + R.T) / 2


def test_examples():
    np.testing.assert_array_equal(sym_eigenvalues(np.diag([3.0, 1.0, 2.0])).values, [1, 2, 3])
    np.testing.assert_allclose(sym_eigenvalues(np.array([[1, -0.5], [-0.5, 1]])).values,
                               [0.5, 1.5], atol=1e-15)
    T = 2 * np.eye(4) - np.eye(4, k=1) - np.eye(4, k=-1)
    np.testing.assert_allclose(sym_eigenvalues(T).values, toeplitz_eigs(4), atol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 7, 40, 125])
def test_matches_lapack(n):
    M = _rand_sym(n, n)
    got = sym_eigenvalues(M).values
    np.testing.assert_allclose(got, np.linalg.eigvalsh(M), rtol=0,
                               atol=1e-12 * np.linalg.norm(M, 2))


@pytest.mark.parametrize("n", [10, 60, 200])
def test_reconstruction_and_orthonormality(n):
    M = _rand_sym(n, 100 + n)
    spec, Q = sym_eigenvalues(M, want_vectors=True)
    err = np.linalg.norm(Q @ np.diag(spec.values) @ Q.T - M)
    assert err <= 1e-10 * np.linalg.norm(M)
    assert np.max(np.abs(Q.T @ Q - np.eye(n))) <= 1e-12


def test_trace_and_scaling():
    M = _rand_sym(30, 1)
    v = sym_eigenvalues(M).values
    assert abs(v.sum() - np.trace(M)) <= 1e-10 * np.linalg.norm(M)
    for c in (1e-3, 7.5, 1e4):
        np.testing.assert_allclose(sym_eigenvalues(c * M).values, c * v,
                                   rtol=1e-12, atol=1e-12 * c * np.abs(v).max())


def test_repeated_eigenvalues_kept_separate():
    v = sym_eigenvalues(np.eye(4)).values
    np.testing.assert_array_equal(v, np.ones(4))


def test_errors():
    with pytest.raises(NotSquare):
        sym_eigenvalues(np.ones((2, 3)))
    with pytest.raises(NotSymmetric):
        sym_eigenvalues(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(NoConvergence):
        sym_eigenvalues(_rand_sym(30, 2), max_sweeps=1)


def test_tiny_asymmetry_is_symmetrized():
    M = _rand_sym(5, 3)
    M[0, 1] += 1e-14
    np.testing.assert_allclose(sym_eigenvalues(M).values, np.linalg.eigvalsh((M + M.T) / 2),
                               atol=1e-13)


def test_singular_examples():
    np.testing.assert_allclose(dense_singular_values(np.eye(3)).values, [1, 1, 1], atol=1e-15)
    np.testing.assert_allclose(dense_singular_values(np.diag([3.0, -4.0])).values, [4, 3],
                               atol=1e-14)
    np.testing.assert_allclose(dense_singular_values(np.array([[3.0, 4.0]])).values, [5],
                               atol=1e-14)


@pytest.mark.parametrize("shape", [(8, 5), (5, 8), (20, 20), (1, 1)])
def test_singular_values_match_lapack_and_transpose(shape):
    M = np.random.default_rng(sum(shape)).random(shape)
    s = dense_singular_values(M)
    assert s.kind == "singular" and np.all(s.values >= 0)
    ref = np.linalg.svd(M, compute_uv=False)
    np.testing.assert_allclose(s.values, ref, rtol=0, atol=1e-11 * ref[0])
    np.testing.assert_allclose(dense_singular_values(M.T).values, s.values, rtol=0,
                               atol=1e-11 * ref[0])


def test_extremes():
    assert eig_extremes(np.diag([-1.0, 5.0])) == (-1.0, 5.0)
    lo, hi = eig_extremes(np.array([[1, -0.5], [-0.5, 1]]))
    assert lo == pytest.approx(0.5, abs=1e-15) and hi == pytest.approx(1.5, abs=1e-15)
    assert eig_extremes(np.array([[2.5]])) == (2.5, 2.5)


def test_spectrum_ordering_enforced():
    with pytest.raises(ValueError):
        Spectrum(np.array([2.0, 1.0]), "eigen")
    with pytest.raises(ValueError):
        Spectrum(np.array([1.0, 2.0]), "singular")
    s = Spectrum(np.array([2.0, 1.0]), "singular")
    assert len(s) == 2 and s[0] == 2.0 and list(s) == [2.0, 1.0]
