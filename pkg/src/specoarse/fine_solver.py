"""Shift-invert refinement on the fine grid.

Given a shift taken from a coarse spectrum, inverse iteration with a single
factorization of ``A - mu*I`` converges to the eigenvalue of ``A`` nearest
``mu``. Once the Rayleigh quotient settles, one re-shift at the Rayleigh
quotient polishes the pair to working accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NoConvergence, NotSquare, NotSymmetric
from .lu import factorize_shifted
from .matrix_core import SparseMatrix, augmented, matvec

__all__ = ["ShiftResult", "eigen_near_shift", "singular_value_near_shift",
           "DEFAULT_TOL", "DEFAULT_MAX_ITERS"]

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITERS = 1000
STALL_ITERS = 50

_SQRT_ULP = math.sqrt(np.finfo(np.float64).eps)
_SINGULAR_PIVOT = 1e-14


@dataclass
class ShiftResult:
    """Outcome of one shifted refinement.

    ``residual`` is ``‖Ax - value·x‖₂ / ‖A‖₁`` for the unit iterate ``x``.
    """

    value: float
    shift: float
    residual: float
    iterations: int
    converged: bool
    vector: Optional[np.ndarray] = None
    note: str = ""


def eigen_near_shift(A: SparseMatrix, mu, tol=DEFAULT_TOL, max_iters=DEFAULT_MAX_ITERS,
                     seed=0, polish=True, keep_vector=True, raise_on_failure=False):
    """Eigenvalue of symmetric ``A`` nearest the shift ``mu``.

    Parameters
    ----------
    A : SparseMatrix
        Square, flagged symmetric.
    mu : float
        Target shift, typically a coarse-grid eigenvalue.
    tol : float
        Converged once the scaled residual is at most ``tol``.
    max_iters : int
        Cap on the number of inverse-iteration solves.
    seed : int or SeedSequence
        Seeds the random unit start vector.
    polish : bool
        Re-shift once at the Rayleigh quotient once it has settled, or after
        ``STALL_ITERS`` solves when the shift sits nearly midway between two
        eigenvalues and plain inverse iteration crawls.
    raise_on_failure : bool
        Raise ``NoConvergence`` (carrying the result) instead of returning
        a result with ``converged=False``.

    Returns
    -------
    ShiftResult
    """
    if not A.is_square:
        raise NotSquare(f"expected a square matrix, got {A.nrows}x{A.ncols}")
    if not A.symmetric:
        raise NotSymmetric("shift-invert refinement needs a matrix flagged symmetric")
    if not tol > 0:
        raise ValueError("tol must be positive")
    mu = float(mu)
    n = A.nrows
    norm = A.norm1()
    if norm == 0.0:
        x = np.zeros(n)
        x[0] = 1.0
        return ShiftResult(0.0, mu, 0.0, 0, True, x if keep_vector else None)

    floor = _SINGULAR_PIVOT * norm
    note = ""
    fac = factorize_shifted(A, mu, pivot_floor=floor)
    if fac.min_pivot < floor:
        # the shift is (numerically) an eigenvalue already; nudge it off
        nudged = mu * (1.0 + _SQRT_ULP) + _SQRT_ULP
        fac = factorize_shifted(A, nudged, pivot_floor=floor)
        note = "shift perturbed (singular factorization)"

    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)
    Ax = matvec(A, x)
    rho = float(x @ Ax)
    best = (np.inf, rho, x)
    reshifted = not polish
    it = 0
    converged = False
    while it < max_iters:
        y = fac.solve(x)
        it += 1
        ny = np.linalg.norm(y)
        if not np.isfinite(ny) or ny == 0.0:
            break
        x = y / ny
        Ax = matvec(A, x)
        rho_new = float(x @ Ax)
        res = float(np.linalg.norm(Ax - rho_new * x)) / norm
        if res < best[0]:
            best = (res, rho_new, x)
        if res <= tol:
            converged = True
            break
        if not reshifted and (abs(rho_new - rho) <= tol * norm or it >= STALL_ITERS):
            fac = factorize_shifted(A, rho_new, pivot_floor=floor)
            reshifted = True
        rho = rho_new

    res, value, x = best
    result = ShiftResult(value, mu, res, it, converged, x if keep_vector else None, note)
    if not converged and raise_on_failure:
        raise NoConvergence(
            f"no convergence near shift {mu!r} after {it} iterations (residual {res:.3e})",
            result)
    return result


def singular_value_near_shift(A: SparseMatrix, sigma_shift, tol=DEFAULT_TOL,
                              max_iters=DEFAULT_MAX_ITERS, seed=0, keep_vector=False,
                              raise_on_failure=False):
    """Singular value of ``A`` nearest ``sigma_shift``.

    Runs ``eigen_near_shift`` on ``[[0, A], [Aᵀ, 0]]`` at ``+sigma_shift``.
    For nonsquare ``A`` that operator has ``|m - n|`` extra zero eigenvalues
    whose eigenvectors vanish on the shorter block; landing on one of them
    is reported as not converged rather than as a singular value 0.
    """
    if sigma_shift < 0:
        raise ValueError("sigma_shift must be nonnegative")
    m, n = A.shape
    H = augmented(A)
    r = eigen_near_shift(H, sigma_shift, tol=tol, max_iters=max_iters, seed=seed,
                         keep_vector=True, raise_on_failure=False)
    r.value = abs(r.value)
    if m != n and r.vector is not None and r.value <= tol * max(H.norm1(), 1.0):
        short = r.vector[m:] if m > n else r.vector[:m]
        if np.linalg.norm(short) < 0.5:
            r.converged = False
            r.note = "landed on a zero eigenvalue of the augmented operator's extra null space"
    if not keep_vector:
        r.vector = None
    if not r.converged and raise_on_failure:
        raise NoConvergence(f"no singular value converged near shift {sigma_shift!r}", r)
    return r
