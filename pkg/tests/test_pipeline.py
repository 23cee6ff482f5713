import numpy as np
import pytest

from specoarse.aggregation import Partition
from specoarse.errors import EmptyEstimate, InvalidAggregateCount, NotSymmetric
from specoarse.matrix_core import from_dense, gen_dense_random, gen_laplacian, gen_random_symmetric
from specoarse.pipeline import (
    SampleConfig,
    coarse_size,
    estimate_eigenvalues,
    estimate_singular_values,
    extreme_eigenvalues,
    extreme_singular_values,
    sample_extremes,
    select_shifts,
)

from conftest import toeplitz_eigs


def _member(values, oracle, tol):
    return all(np.min(np.abs(oracle - v)) <= tol for v in values)


def test_tridiagonal_fixed_partition(lap4):
    cfg = SampleConfig(J=1, k=2, n_aggregates=2)
    est = estimate_eigenvalues(lap4, cfg, partitions=[Partition([0, 0, 1, 1], 2)])
    np.testing.assert_allclose(est.samples[0].shifts, [0.5, 1.5], atol=1e-12)
    np.testing.assert_allclose(est.values, toeplitz_eigs(4)[:2], atol=1e-10)
    assert est.rejected == 0


def test_singleton_partition_recovers_full_spectrum():
    A = gen_random_symmetric(12, 3)
    cfg = SampleConfig(J=1, k=12, n_aggregates=12)
    est = estimate_eigenvalues(A, cfg, partitions=[Partition(np.arange(12), 12)])
    np.testing.assert_allclose(est.values, np.linalg.eigvalsh(A.to_dense()), atol=1e-10)


def test_randsym_soundness_and_size():
    A = gen_random_symmetric(50, 0)
    lam = np.linalg.eigvalsh(A.to_dense())
    k = 6
    est = estimate_eigenvalues(A, SampleConfig(J=4, k=k, n_aggregates=10, seed=13))
    assert len(est) <= 4 * k
    assert _member(est.values, lam, 1e-8)
    assert np.all(np.diff(est.values) > 0)
    assert all(len(p) >= 1 for p in est.provenance)


def test_dedup_keeps_all_provenance():
    A = gen_laplacian([6])
    est = estimate_eigenvalues(A, SampleConfig(J=6, k=1, n_aggregates=2, seed=1))
    # the smallest shift of every sample refines to the same eigenvalue
    assert len(est) == 1
    assert sorted(p.sample for p in est.provenance[0]) == list(range(6))
    best = est.best(0)
    assert best.residual == min(p.residual for p in est.provenance[0])


@pytest.mark.parametrize("partitioner", ["strong", "bfs", "random"])
def test_worker_count_does_not_change_results(partitioner):
    A = gen_laplacian([7, 7], "skyscraper", seed=3, block=2)
    cfg1 = SampleConfig(J=6, k=3, n_aggregates=8, partitioner=partitioner, seed=21, workers=1)
    cfg4 = SampleConfig(J=6, k=3, n_aggregates=8, partitioner=partitioner, seed=21, workers=4)
    a, b = estimate_eigenvalues(A, cfg1), estimate_eigenvalues(A, cfg4)
    np.testing.assert_array_equal(a.values, b.values)
    assert a.provenance == b.provenance


def test_targets():
    v = np.array([0.1, 0.5, 0.9, 1.3])
    np.testing.assert_array_equal(select_shifts(v, 2, "smallest"), [0.1, 0.5])
    np.testing.assert_array_equal(select_shifts(v, 2, "largest"), [0.9, 1.3])
    np.testing.assert_array_equal(select_shifts(v, 2, 1.0), [0.9, 1.3])
    A = gen_laplacian([20])
    est = estimate_eigenvalues(A, SampleConfig(J=2, k=2, n_aggregates=5, target="largest"))
    for smp in est.samples:
        np.testing.assert_array_equal(smp.shifts, np.sort(smp.coarse)[-2:])


def test_config_validation():
    with pytest.raises(ValueError):
        SampleConfig(J=0)
    with pytest.raises(InvalidAggregateCount):
        SampleConfig(k=5, n_aggregates=3)
    with pytest.raises(ValueError):
        SampleConfig(partitioner="metis")
    with pytest.raises(NotSymmetric):
        estimate_eigenvalues(from_dense(gen_dense_random(4, 0)), SampleConfig())
    with pytest.raises(InvalidAggregateCount):
        estimate_eigenvalues(gen_laplacian([4]), SampleConfig(k=1, n_aggregates=9))


def test_empty_estimate():
    A = gen_random_symmetric(30, 1)
    with pytest.raises(EmptyEstimate):
        estimate_eigenvalues(A, SampleConfig(J=1, k=2, n_aggregates=4, tol=1e-30, max_iters=3))


def test_coarse_size():
    assert coarse_size(50) == 5
    assert coarse_size(50, 2.3) == 22
    assert coarse_size(3) == 1


def test_svd_identity():
    A = from_dense(np.eye(4))
    est = estimate_singular_values(A, SampleConfig(J=3, k=2, n_aggregates=2))
    np.testing.assert_allclose(est.values, [1.0], atol=1e-10)
    for s in est.samples:
        assert np.all(s.coarse <= 1 + 1e-12)


def test_svd_rand50_soundness():
    M = gen_dense_random(50, 0)
    s = np.linalg.svd(M, compute_uv=False)
    est = estimate_singular_values(from_dense(M), SampleConfig(J=5, k=22, n_aggregates=22))
    assert np.all(np.diff(est.values) < 0)
    assert _member(est.values, s, 1e-8 * s[0])


def test_svd_scalar():
    est = estimate_singular_values(from_dense(np.array([[-2.5]])), SampleConfig())
    np.testing.assert_allclose(est.values, [2.5])


def test_svd_rectangular_sizes():
    A = from_dense(gen_dense_random(8, 1, ncols=5))
    est = estimate_singular_values(A, SampleConfig(J=2, k=3, n_aggregates=4))
    for smp in est.samples:
        prow, pcol = smp.partition
        assert (prow.n_aggregates, pcol.n_aggregates) == (4, 4)
    est = estimate_singular_values(A, SampleConfig(J=1, k=1))
    prow, pcol = est.samples[0].partition
    assert (prow.n_aggregates, pcol.n_aggregates) == (1, 1)


def test_svd_rejects_graph_partitioners():
    with pytest.raises(ValueError):
        estimate_singular_values(from_dense(np.eye(3)), SampleConfig(partitioner="bfs"))


def test_extremes_inner_and_monotone():
    A = gen_laplacian([8, 8])
    lam = np.linalg.eigvalsh(A.to_dense())
    prev = None
    for J in (1, 2, 4, 8, 16):
        lo, hi = extreme_eigenvalues(A, J, n_aggregates=7, seed=5)
        assert lam[0] - 1e-9 <= lo and hi <= lam[-1] + 1e-9
        if prev:
            assert lo <= prev[0] and hi >= prev[1]
        prev = (lo, hi)


def test_extremes_singletons_exact():
    A = gen_random_symmetric(15, 6)
    lam = np.linalg.eigvalsh(A.to_dense())
    lo, hi = extreme_eigenvalues(A, 1, n_aggregates=15)
    assert abs(lo - lam[0]) <= 1e-12 and abs(hi - lam[-1]) <= 1e-12
    M = gen_dense_random(6, 2, ncols=4)
    s = np.linalg.svd(M, compute_uv=False)
    smin, smax = extreme_singular_values(from_dense(M), 1, n_aggregates=6)
    assert abs(smax - s[0]) <= 1e-12 and abs(smin - s[-1]) <= 1e-12


def test_extremes_refine():
    A = gen_laplacian([10])
    lam = np.linalg.eigvalsh(A.to_dense())
    lo, hi = extreme_eigenvalues(A, 3, n_aggregates=3, refine=True)
    assert min(abs(lam - lo)) <= 1e-9 and min(abs(lam - hi)) <= 1e-9


def test_sample_extremes_shape_and_prefix():
    A = gen_laplacian([5, 5])
    a = sample_extremes(A, 3, 5, seed=2)
    b = sample_extremes(A, 6, 5, seed=2)
    assert a.shape == (3, 2)
    np.testing.assert_array_equal(a, b[:3])
