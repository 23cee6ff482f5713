"""Interlacing checks of coarse spectra against dense fine-grid spectra."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coarsen import InterpolationOperator, galerkin_product, two_sided_product
from .dense_eig import Spectrum, dense_singular_values, sym_eigenvalues
from .errors import RequiresNormalized
from .matrix_core import SparseMatrix

__all__ = [
    "InterlaceReport",
    "verify_interlacing",
    "verify_svd_interlacing",
    "trace_bounds",
    "INTERLACE_RTOL",
]

INTERLACE_RTOL = 1e-9


@dataclass
class InterlaceReport:
    """Per-index slack of the interlacing inequalities.

    For eigenvalues, ``lower_slack[i] = mu_i - lambda_i`` and
    ``upper_slack[i] = lambda_{n-k+i} - mu_i``. For singular values,
    ``upper_slack[i] = sigma_i(A) - sigma_i(B)`` and
    ``lower_slack[i] = sigma_i(B) - sigma_{i+r}(A)``, NaN where ``i + r``
    runs past ``min(m, n)`` (no bound to check). A slack below ``-tol`` is
    a violation.
    """

    kind: str
    fine: Spectrum
    coarse: Spectrum
    lower_slack: np.ndarray
    upper_slack: np.ndarray
    tol: float

    @property
    def vacuous(self):
        return int(np.count_nonzero(np.isnan(self.lower_slack)))

    @property
    def violations(self):
        lo = self.lower_slack[~np.isnan(self.lower_slack)]
        return int(np.count_nonzero(lo < -self.tol) + np.count_nonzero(self.upper_slack < -self.tol))

    @property
    def ok(self):
        return self.violations == 0

    @property
    def min_slack(self):
        lo = self.lower_slack[~np.isnan(self.lower_slack)]
        return float(np.min(np.concatenate((lo, self.upper_slack)), initial=np.inf))


def _coarse_spectrum(coarse, build, solve):
    if isinstance(coarse, Spectrum):
        return coarse
    return solve(coarse if coarse is not None else build())


def verify_interlacing(A: SparseMatrix, P: InterpolationOperator, fine=None, coarse=None):
    """Check ``lambda_i <= mu_i <= lambda_{n-k+i}`` for ``mu = eig(PᵀAP)``.

    ``fine`` (the spectrum of ``A``) and ``coarse`` (the dense coarse
    matrix, or its spectrum) may be passed in to avoid recomputation.
    """
    if not P.normalized:
        raise RequiresNormalized("interlacing only holds for PᵀP = I")
    lam = fine if fine is not None else sym_eigenvalues(A.to_dense())
    mu = _coarse_spectrum(coarse, lambda: galerkin_product(A, P), sym_eigenvalues)
    n, k = len(lam), len(mu)
    lv, mv = lam.values, mu.values
    lower = mv - lv[:k]
    upper = lv[n - k:] - mv
    norm2 = max(abs(lv[0]), abs(lv[-1]))
    return InterlaceReport("eigen", lam, mu, lower, upper, INTERLACE_RTOL * norm2)


def verify_svd_interlacing(A: SparseMatrix, U: InterpolationOperator, V: InterpolationOperator,
                           fine=None, coarse=None):
    """Check ``sigma_i(A) >= sigma_i(B) >= sigma_{i+r}(A)`` for ``B = UᵀAV``.

    ``r = (m - p) + (n - q)``; lower bounds with ``i + r > min(m, n)`` are
    reported as NaN slack.
    """
    if not (U.normalized and V.normalized):
        raise RequiresNormalized("singular value interlacing needs UᵀU = I and VᵀV = I")
    m, n = A.shape
    p, q = U.shape[1], V.shape[1]
    sa = fine if fine is not None else dense_singular_values(A.to_dense())
    sb = _coarse_spectrum(coarse, lambda: two_sided_product(A, U, V), dense_singular_values)
    r = (m - p) + (n - q)
    kb = len(sb)
    upper = sa.values[:kb] - sb.values
    lower = np.full(kb, np.nan)
    for i in range(kb):
        j = i + r
        if j < len(sa):
            lower[i] = sb.values[i] - sa.values[j]
    return InterlaceReport("singular", sa, sb, lower, upper, INTERLACE_RTOL * sa.values[0])


def trace_bounds(fine: Spectrum, k):
    """``(sum of k smallest, sum of k largest)`` eigenvalues: the range of ``tr(PᵀAP)``."""
    v = fine.values
    return float(np.sum(v[:k])), float(np.sum(v[len(v) - k:]))
