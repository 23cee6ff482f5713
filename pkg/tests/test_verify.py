import numpy as np
import pytest

from specoarse.aggregation import Partition, random_partition
from specoarse.coarsen import build_interpolation, galerkin_product
from specoarse.dense_eig import sym_eigenvalues
from specoarse.errors import RequiresNormalized
from specoarse.matrix_core import from_dense, gen_dense_random
from specoarse.verify import trace_bounds, verify_interlacing, verify_svd_interlacing


def test_random_symmetric_interlacing(randsym30):
    for seed in range(10):
        P = build_interpolation(random_partition(30, 7, seed))
        rep = verify_interlacing(randsym30, P)
        assert rep.ok and rep.lower_slack.size == 7


def test_identity_interpolation_zero_slack(randsym30):
    P = build_interpolation(Partition(np.arange(30), 30))
    rep = verify_interlacing(randsym30, P)
    np.testing.assert_allclose(rep.lower_slack, 0, atol=1e-12)
    np.testing.assert_allclose(rep.upper_slack, 0, atol=1e-12)


def test_violation_is_detected(randsym30):
    P = build_interpolation(random_partition(30, 7, 0))
    Ac = galerkin_product(randsym30, P)
    bad = Ac + 100.0 * np.eye(7)
    rep = verify_interlacing(randsym30, P, coarse=bad)
    assert not rep.ok and rep.violations > 0


def test_literal_operator_rejected(randsym30):
    with pytest.raises(RequiresNormalized):
        verify_interlacing(randsym30, build_interpolation(random_partition(30, 7, 0), False))


def test_svd_vacuous_lower_bounds():
    A = from_dense(gen_dense_random(10, 4, ncols=6))
    U = build_interpolation(random_partition(10, 4, 1))
    V = build_interpolation(random_partition(6, 3, 2))
    rep = verify_svd_interlacing(A, U, V)
    # r = 6 + 3 = 9 >= min(m, n) = 6: every lower bound is vacuous
    assert rep.vacuous == 3 and np.all(np.isnan(rep.lower_slack))
    assert rep.ok and np.all(rep.upper_slack >= -rep.tol)


def test_svd_partial_lower_bounds():
    A = from_dense(gen_dense_random(12, 0, ncols=12))
    U = build_interpolation(random_partition(12, 10, 1))
    V = build_interpolation(random_partition(12, 11, 2))
    rep = verify_svd_interlacing(A, U, V)
    # r = 3: indices 0..8 checkable, 9 vacuous
    assert rep.vacuous == 1 and rep.ok


def test_trace_bounds():
    spec = sym_eigenvalues(np.diag([1.0, 2.0, 3.0, 4.0]))
    assert trace_bounds(spec, 2) == (3.0, 7.0)


def test_precomputed_coarse_spectrum_accepted(randsym30):
    P = build_interpolation(random_partition(30, 7, 3))
    mu = sym_eigenvalues(galerkin_product(randsym30, P))
    a = verify_interlacing(randsym30, P)
    b = verify_interlacing(randsym30, P, coarse=mu)
    np.testing.assert_array_equal(a.lower_slack, b.lower_slack)
