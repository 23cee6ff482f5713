"""Piecewise-constant interpolation and the coarse operators PᵀAP and UᵀAV."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .aggregation import Partition
from .errors import DimensionMismatch, NotSquare, RequiresNormalized
from .matrix_core import SparseMatrix

__all__ = [
    "InterpolationOperator",
    "build_interpolation",
    "galerkin_product",
    "two_sided_product",
]


@dataclass(frozen=True)
class InterpolationOperator:
    """``P[i, part[i]] = column_scale[part[i]]``, zero elsewhere.

    With ``normalized`` set the scales are ``1/sqrt(|G_j|)`` and the columns
    are orthonormal; otherwise every nonzero is 1.
    """

    part: Partition
    column_scale: np.ndarray
    normalized: bool

    @property
    def shape(self):
        return (self.part.n_nodes, self.part.n_aggregates)

    def row_scale(self):
        """The single nonzero of each row."""
        return self.column_scale[self.part.part]

    def to_dense(self):
        n, nc = self.shape
        P = np.zeros((n, nc))
        P[np.arange(n), self.part.part] = self.row_scale()
        return P

    def apply(self, xc):
        """``P @ xc`` for a coarse vector."""
        return self.row_scale() * np.asarray(xc)[self.part.part]

    def restrict(self, x):
        """``Pᵀ @ x`` for a fine vector."""
        return np.bincount(self.part.part, weights=self.row_scale() * np.asarray(x),
                           minlength=self.part.n_aggregates)


def build_interpolation(p: Partition, normalized=True) -> InterpolationOperator:
    if normalized:
        scale = 1.0 / np.sqrt(p.sizes().astype(np.float64))
    else:
        scale = np.ones(p.n_aggregates)
    scale.setflags(write=False)
    return InterpolationOperator(p, scale, bool(normalized))


def _scatter(A, rpart, rscale, nr, cpart, cscale, nc):
    rows = A.row_indices()
    r = rpart[rows]
    c = cpart[A.col_idx]
    w = A.values * rscale[r] * cscale[c]
    return np.bincount(r * nc + c, weights=w, minlength=nr * nc).reshape(nr, nc)


def galerkin_product(A: SparseMatrix, P: InterpolationOperator):
    """Dense ``PᵀAP`` by one pass over the nonzeros of ``A``.

    Entry ``(I, J)`` accumulates ``a_kl`` over ``k in G_I``, ``l in G_J``,
    times the two column scales.
    """
    if not A.is_square:
        raise NotSquare(f"Galerkin product needs a square matrix, got {A.nrows}x{A.ncols}")
    if P.shape[0] != A.nrows:
        raise DimensionMismatch(f"P has {P.shape[0]} rows, A has {A.nrows}")
    nc = P.part.n_aggregates
    Ac = _scatter(A, P.part.part, P.column_scale, nc, P.part.part, P.column_scale, nc)
    if A.symmetric:
        # summation order differs between (I,J) and (J,I); restore exact symmetry
        Ac = 0.5 * (Ac + Ac.T)
    return Ac


def two_sided_product(A: SparseMatrix, U: InterpolationOperator, V: InterpolationOperator,
                      require_normalized=True):
    """Dense ``UᵀAV`` (``p x q``) for column-orthonormal aggregate operators.

    ``require_normalized=False`` admits unit-entry operators (the literal
    aggregation formula), for which no interlacing guarantee holds.
    """
    m, n = A.shape
    if U.shape[0] != m or V.shape[0] != n:
        raise DimensionMismatch(
            f"U has {U.shape[0]} rows and V has {V.shape[0]}; A is {m}x{n}")
    if require_normalized and not (U.normalized and V.normalized):
        raise RequiresNormalized("two-sided coarsening requires UᵀU = I and VᵀV = I")
    return _scatter(A, U.part.part, U.column_scale, U.part.n_aggregates,
                    V.part.part, V.column_scale, V.part.n_aggregates)
