"""Dense symmetric eigenvalues and singular values by cyclic Jacobi rotations.

The sweep uses the round-robin ("chess tournament") ordering: each round
pairs every index with exactly one partner, so the ``n/2`` rotations of a
round touch disjoint row/column pairs and can be applied together as array
operations. Every off-diagonal pair is annihilated once per sweep, exactly
as in the row-cyclic ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NoConvergence, NotSquare, NotSymmetric

__all__ = [
    "Spectrum",
    "sym_eigenvalues",
    "dense_singular_values",
    "eig_extremes",
    "OFF_TOL",
    "MAX_SWEEPS",
]

OFF_TOL = 1e-13
MAX_SWEEPS = 30


@dataclass(frozen=True)
class Spectrum:
    """Sorted eigenvalues (ascending) or singular values (descending)."""

    values: np.ndarray
    kind: str = "eigen"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", v)
        if self.kind not in ("eigen", "singular"):
            raise ValueError(f"unknown spectrum kind {self.kind!r}")
        d = np.diff(v)
        if self.kind == "eigen" and np.any(d < 0):
            raise ValueError("eigenvalues must be ascending")
        if self.kind == "singular" and (np.any(d > 0) or np.any(v < 0)):
            raise ValueError("singular values must be nonnegative and descending")

    def __len__(self):
        return self.values.size

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]


@lru_cache(maxsize=64)
def _pair_layout(m):
    """Round-robin schedule for even ``m`` in "pair layout".

    Returns ``(L0, pi)``: in layout ``L`` the pairs of the current round are
    columns ``(2i, 2i+1)``; ``L[pi]`` is the layout of the next round. After
    ``m - 1`` rounds every index pair has met exactly once.
    """
    def layout(players):
        out = []
        for i in range(m // 2):
            out += [players[i], players[m - 1 - i]]
        return out

    players = list(range(m))
    L0 = layout(players)
    L1 = layout([players[0], players[-1]] + players[1:-1])
    pos = {v: k for k, v in enumerate(L0)}
    return np.array(L0, dtype=np.intp), np.array([pos[v] for v in L1], dtype=np.intp)


def _rotate_pairs(A, c, s, rows=False):
    """In place: columns (2i, 2i+1) of ``A`` times [[c_i, s_i], [-s_i, c_i]].

    With ``rows=True``, ``A`` is a transposed view and the same update is done
    on the rows of the underlying C-ordered array, which is cache friendly.
    """
    if rows:
        A = A.T
        c = c[:, None]
        s = s[:, None]
        a0 = A[0::2, :]
        a1 = A[1::2, :]
    else:
        a0 = A[:, 0::2]
        a1 = A[:, 1::2]
    keep = a0.copy()
    a0 *= c
    a0 -= s * a1
    a1 *= c
    keep *= s
    a1 += keep


def _off_norm(A):
    off = A[~np.eye(A.shape[0], dtype=bool)]
    return np.sqrt(np.dot(off, off))


def _jacobi(A, want_vectors, tol_abs, max_sweeps):
    """Cyclic Jacobi with parallel (round-robin) ordering.

    Each round rotates ``m/2`` disjoint pairs at once. Odd ``n`` is padded
    with a decoupled zero row and column that every rotation leaves alone.
    Returns ``(eigenvalues, vectors or None)`` in no particular order.
    """
    n = A.shape[0]
    m = n + (n % 2)
    if m != n:
        A = np.pad(A, ((0, 1), (0, 1)))
    L0, pi = _pair_layout(m)
    A = A[np.ix_(L0, L0)]
    order = L0.copy()
    V = np.eye(m)[:, L0] if want_vectors else None
    ev = np.arange(0, m, 2)
    od = ev + 1
    for sweep in range(max_sweeps + 1):
        if _off_norm(A) <= tol_abs:
            keep = order < n
            w = np.diag(A)[keep]
            return w, (V[:n][:, keep] if want_vectors else None)
        if sweep == max_sweeps:
            break
        for _ in range(m - 1):
            d = np.diagonal(A)
            app = d[0::2].copy()
            aqq = d[1::2].copy()
            apq = A[ev, od]
            diff = aqq - app
            den = np.abs(diff) + np.hypot(diff, 2.0 * apq)
            sgn = np.where(diff >= 0.0, 1.0, -1.0)
            with np.errstate(invalid="ignore", divide="ignore"):
                t = np.where(den > 0.0, sgn * 2.0 * apq / den, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c

            _rotate_pairs(A, c, s)
            _rotate_pairs(A.T, c, s, rows=True)
            A[ev, ev] = app - t * apq
            A[od, od] = aqq + t * apq
            A[ev, od] = 0.0
            A[od, ev] = 0.0
            if want_vectors:
                _rotate_pairs(V, c, s)
                V = V[:, pi]
            A = A[np.ix_(pi, pi)]
            order = order[pi]
    raise NoConvergence(
        f"Jacobi did not reach off-diagonal norm {tol_abs:.3e} in {max_sweeps} sweeps "
        f"(now {_off_norm(A):.3e})")


def sym_eigenvalues(M, want_vectors=False, tol=OFF_TOL, max_sweeps=MAX_SWEEPS):
    """Eigenvalues of a dense symmetric matrix.

    Parameters
    ----------
    M : (n, n) array_like
        Symmetric to within ``1e-12 * ‖M‖_F``; the symmetric part is used.
    want_vectors : bool
        Also return the orthonormal eigenvector matrix (columns).
    tol : float
        Stop once the off-diagonal Frobenius norm is below ``tol * ‖M‖_F``.
    max_sweeps : int
        ``NoConvergence`` is raised when this many sweeps do not suffice.

    Returns
    -------
    Spectrum, or (Spectrum, ndarray) when ``want_vectors``.
    """
    M = np.array(M, dtype=np.float64, copy=True, ndmin=2)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {M.shape}")
    n = M.shape[0]
    fro = np.linalg.norm(M)
    if np.max(np.abs(M - M.T), initial=0.0) > 1e-12 * fro:
        raise NotSymmetric("matrix is not symmetric to 1e-12 relative")
    A = 0.5 * (M + M.T)
    if n > 1:
        w, V = _jacobi(A, want_vectors, tol * fro, max_sweeps)
    else:
        w, V = np.diag(A).copy(), np.eye(n)
    order = np.argsort(w, kind="stable")
    spec = Spectrum(w[order], "eigen")
    if want_vectors:
        return spec, V[:, order]
    return spec


def dense_singular_values(M):
    """Singular values via the augmented matrix ``[[0, M], [Mᵀ, 0]]``.

    Its spectrum is ``±σ_i`` plus ``|m - n|`` zeros, so the top ``min(m, n)``
    eigenvalues are the singular values.
    """
    M = np.array(M, dtype=np.float64, ndmin=2)
    if M.ndim != 2:
        raise ValueError("expected a 2-D array")
    m, n = M.shape
    H = np.zeros((m + n, m + n))
    H[:m, m:] = M
    H[m:, :m] = M.T
    w = sym_eigenvalues(H).values[::-1][: min(m, n)]
    return Spectrum(np.maximum(w, 0.0), "singular")


def eig_extremes(M):
    """``(smallest, largest)`` eigenvalue of a dense symmetric matrix."""
    w = sym_eigenvalues(M).values
    return float(w[0]), float(w[-1])
