"""LU factorizations of shifted matrices ``A - sigma*I`` with partial pivoting.

``BandedLU`` keeps only the band (plus the ``kl`` extra superdiagonals that
row interchanges can fill in); ``DenseLU`` is the fallback for wide bands.
Both record the smallest pivot magnitude seen, before any flooring, so the
caller can tell a numerically singular shift.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

from .matrix_core import SparseMatrix

__all__ = ["BandedLU", "DenseLU", "factorize_shifted"]


class BandedLU:
    """Banded Gaussian elimination with row interchanges.

    Row ``i`` of the work array holds columns ``i - kl .. i + kl + ku`` of the
    matrix, so ``W[i, j - i + kl] = a_ij``.
    """

    def __init__(self, A: SparseMatrix, shift=0.0, pivot_floor=0.0):
        n = A.nrows
        kl, ku = A.bandwidth()
        width = 2 * kl + ku + 1
        W = np.zeros((n, width))
        rows = A.row_indices()
        W[rows, A.col_idx - rows + kl] = A.values
        W[np.arange(n), kl] -= shift

        L = np.zeros((n, kl))
        perm = np.arange(n)
        span = kl + ku + 1  # columns k .. k+kl+ku touched at step k
        min_pivot = np.inf
        for k in range(n):
            m = min(kl, n - 1 - k)
            if m > 0:
                d = np.arange(m + 1)
                col = W[k + d, kl - d]
                piv = int(np.argmax(np.abs(col)))
                if piv:
                    a = W[k, kl:kl + span].copy()
                    W[k, kl:kl + span] = W[k + piv, kl - piv:kl - piv + span]
                    W[k + piv, kl - piv:kl - piv + span] = a
                    perm[k] = k + piv
            p = W[k, kl]
            min_pivot = min(min_pivot, abs(p))
            if abs(p) < pivot_floor:
                p = pivot_floor if p >= 0 else -pivot_floor
                W[k, kl] = p
            if m > 0 and p != 0.0:
                d = np.arange(1, m + 1)
                mult = W[k + d, kl - d] / p
                L[k, :m] = mult
                cols = (kl - d)[:, None] + np.arange(span)[None, :]
                W[(k + d)[:, None], cols] -= mult[:, None] * W[k, kl:kl + span][None, :]
                W[k + d, kl - d] = 0.0

        self.n, self.kl, self.ku = n, kl, ku
        self.min_pivot = float(min_pivot) if n else np.inf
        self._L, self._perm = L, perm
        # U in LAPACK upper-band layout for the triangular solve
        u = kl + ku
        ab = np.zeros((u + 1, n))
        for off in range(min(u, n - 1) + 1):
            ab[u - off, off:] = W[: n - off, kl + off]
        self._ub = u
        self._ab = ab

    def solve(self, b):
        x = np.array(b, dtype=np.float64, copy=True)
        n, kl, L, perm = self.n, self.kl, self._L, self._perm
        for k in range(n):
            pk = perm[k]
            if pk != k:
                x[k], x[pk] = x[pk], x[k]
            m = min(kl, n - 1 - k)
            if m:
                x[k + 1:k + 1 + m] -= L[k, :m] * x[k]
        return _solve_upper_banded(self._ab, self._ub, x)


def _solve_upper_banded(ab, u, x):
    n = x.size
    if u == 0:
        return x / ab[0]
    # back substitution, one diagonal window at a time
    for k in range(n - 1, -1, -1):
        hi = min(n, k + u + 1)
        s = x[k]
        if hi > k + 1:
            j = np.arange(k + 1, hi)
            s -= np.dot(ab[u - (j - k), j], x[k + 1:hi])
        x[k] = s / ab[u, k]
    return x


class DenseLU:
    """Right-looking dense LU with partial pivoting, ``P(A - shift*I) = LU``."""

    def __init__(self, A, shift=0.0, pivot_floor=0.0):
        M = A.to_dense() if isinstance(A, SparseMatrix) else np.array(A, dtype=np.float64)
        n = M.shape[0]
        M[np.diag_indices(n)] -= shift
        perm = np.arange(n)
        min_pivot = np.inf
        for k in range(n):
            piv = k + int(np.argmax(np.abs(M[k:, k])))
            if piv != k:
                M[[k, piv]] = M[[piv, k]]
                perm[[k, piv]] = perm[[piv, k]]
            p = M[k, k]
            min_pivot = min(min_pivot, abs(p))
            if abs(p) < pivot_floor:
                p = pivot_floor if p >= 0 else -pivot_floor
                M[k, k] = p
            if k + 1 < n and p != 0.0:
                M[k + 1:, k] /= p
                M[k + 1:, k + 1:] -= np.outer(M[k + 1:, k], M[k, k + 1:])
        self.n = n
        self.min_pivot = float(min_pivot) if n else np.inf
        self._lu = M
        self._perm = perm

    def solve(self, b):
        y = solve_triangular(self._lu, np.asarray(b, dtype=np.float64)[self._perm],
                             lower=True, unit_diagonal=True, check_finite=False)
        return solve_triangular(self._lu, y, lower=False, check_finite=False)


def factorize_shifted(A: SparseMatrix, shift, pivot_floor=0.0):
    """Factor ``A - shift*I``: banded when the bandwidth is at most ``n/4``, else dense."""
    kl, ku = A.bandwidth()
    if max(kl, ku) > A.nrows / 4:
        return DenseLU(A, shift, pivot_floor)
    return BandedLU(A, shift, pivot_floor)
