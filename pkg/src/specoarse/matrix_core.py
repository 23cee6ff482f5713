"""Sparse CSR storage, Matrix Market I/O, test-matrix generators and
Gershgorin discs.

Dense matrices are plain C-contiguous ``float64`` ndarrays throughout the
package; only the fine grid uses the CSR type below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    InvalidMatrix,
    NotSquare,
    NotSymmetric,
    ParseError,
    UnsupportedFormat,
)

__all__ = [
    "SparseMatrix",
    "GershgorinDisc",
    "from_triplets",
    "from_coo",
    "from_dense",
    "load_matrix_market",
    "write_matrix_market",
    "matvec",
    "trace",
    "gershgorin_discs",
    "gershgorin_excludes_zero",
    "gen_laplacian",
    "gen_dense_random",
    "gen_random_symmetric",
    "augmented",
]


def _frozen(a, dtype):
    a = np.ascontiguousarray(a, dtype=dtype)
    a.setflags(write=False)
    return a


class SparseMatrix:
    """Immutable compressed-row real matrix.

    Parameters
    ----------
    nrows, ncols : int
        Shape.
    row_ptr : array of int, length ``nrows + 1``
    col_idx : array of int, length nnz; strictly increasing within a row
    values : array of float, length nnz
    symmetric : bool
        When true, exact symmetry is verified and ``NotSymmetric`` raised
        if it does not hold.
    """

    __slots__ = ("nrows", "ncols", "row_ptr", "col_idx", "values", "symmetric", "_rows")

    def __init__(self, nrows, ncols, row_ptr, col_idx, values, symmetric=False, check=True):
        self.nrows = int(nrows)
        self.ncols = int(ncols)
        self.row_ptr = _frozen(row_ptr, np.int64)
        self.col_idx = _frozen(col_idx, np.int64)
        self.values = _frozen(values, np.float64)
        self._rows = None
        self.symmetric = False
        if check:
            self.validate()
        if symmetric:
            if not self.is_symmetric():
                raise NotSymmetric("matrix flagged symmetric but A[i,j] != A[j,i] for some entry")
            self.symmetric = True

    # -- structure -------------------------------------------------------

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    @property
    def nnz(self):
        return int(self.row_ptr[-1])

    @property
    def is_square(self):
        return self.nrows == self.ncols

    def row_indices(self):
        """Row index of every stored entry (cached)."""
        if self._rows is None:
            r = np.repeat(np.arange(self.nrows, dtype=np.int64), np.diff(self.row_ptr))
            r.setflags(write=False)
            self._rows = r
        return self._rows

    def validate(self):
        """Check the CSR invariants, raising ``InvalidMatrix`` on the first failure."""
        rp, ci = self.row_ptr, self.col_idx
        if self.nrows < 0 or self.ncols < 0:
            raise InvalidMatrix("negative dimension")
        if rp.shape != (self.nrows + 1,):
            raise InvalidMatrix(f"row_ptr has length {rp.size}, expected {self.nrows + 1}")
        if rp[0] != 0:
            raise InvalidMatrix("row_ptr[0] must be 0")
        if np.any(np.diff(rp) < 0):
            raise InvalidMatrix("row_ptr is not nondecreasing")
        nnz = int(rp[-1])
        if ci.size != nnz or self.values.size != nnz:
            raise InvalidMatrix("col_idx/values length does not match row_ptr[nrows]")
        if nnz:
            if ci.min() < 0 or ci.max() >= self.ncols:
                raise InvalidMatrix("column index out of range")
            # strictly increasing inside each row: a non-increase is only
            # allowed where a new row starts
            step = np.diff(ci) <= 0
            starts = np.zeros(nnz - 1, dtype=bool)
            inner = rp[1:-1]
            inner = inner[(inner > 0) & (inner < nnz)]
            starts[inner - 1] = True
            if np.any(step & ~starts):
                raise InvalidMatrix("column indices not strictly increasing within a row")
        return True

    def transpose(self):
        rows = self.row_indices()
        order = np.lexsort((rows, self.col_idx))
        counts = np.bincount(self.col_idx, minlength=self.ncols)
        row_ptr = np.concatenate(([0], np.cumsum(counts)))
        return SparseMatrix(self.ncols, self.nrows, row_ptr, rows[order],
                            self.values[order], check=False)

    @property
    def T(self):
        return self.transpose()

    def is_symmetric(self):
        """Exact structural and numerical symmetry."""
        if not self.is_square:
            return False
        t = self.transpose()
        return (np.array_equal(t.row_ptr, self.row_ptr)
                and np.array_equal(t.col_idx, self.col_idx)
                and np.array_equal(t.values, self.values))

    def diagonal(self):
        rows = self.row_indices()
        d = np.zeros(min(self.nrows, self.ncols))
        on = rows == self.col_idx
        d[rows[on]] = self.values[on]
        return d

    def bandwidth(self):
        """Return ``(lower, upper)``: max of ``i - j`` and ``j - i`` over stored entries."""
        if self.nnz == 0:
            return 0, 0
        off = self.row_indices() - self.col_idx
        return max(int(off.max()), 0), max(int(-off.min()), 0)

    # -- norms -----------------------------------------------------------

    def norm1(self):
        """Max absolute column sum."""
        if self.nnz == 0:
            return 0.0
        return float(np.bincount(self.col_idx, weights=np.abs(self.values),
                                 minlength=self.ncols).max())

    def norm_inf(self):
        if self.nnz == 0:
            return 0.0
        return float(np.bincount(self.row_indices(), weights=np.abs(self.values),
                                 minlength=self.nrows).max())

    def frobenius(self):
        return float(np.sqrt(np.dot(self.values, self.values)))

    # -- conversions -----------------------------------------------------

    def to_dense(self):
        out = np.zeros((self.nrows, self.ncols))
        out[self.row_indices(), self.col_idx] = self.values
        return out

    def with_symmetric_flag(self):
        return SparseMatrix(self.nrows, self.ncols, self.row_ptr, self.col_idx,
                            self.values, symmetric=True, check=False)

    def __matmul__(self, x):
        return matvec(self, x)

    def __repr__(self):
        sym = ", symmetric" if self.symmetric else ""
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz}{sym})"


@dataclass(frozen=True)
class GershgorinDisc:
    center: float
    radius: float

    def __post_init__(self):
        if not self.radius >= 0.0:
            raise ValueError("Gershgorin radius must be nonnegative")

    def contains(self, z):
        return abs(z - self.center) <= self.radius


# ---------------------------------------------------------------------------
# construction


def from_coo(nrows, ncols, rows, cols, vals, symmetric=False):
    """Build CSR from coordinate arrays; duplicate ``(row, col)`` pairs are summed."""
    nrows, ncols = int(nrows), int(ncols)
    rows = np.asarray(rows, dtype=np.int64).ravel()
    cols = np.asarray(cols, dtype=np.int64).ravel()
    vals = np.asarray(vals, dtype=np.float64).ravel()
    if not (rows.size == cols.size == vals.size):
        raise DimensionMismatch("rows, cols and vals must have equal length")
    if rows.size:
        bad = (rows < 0) | (rows >= nrows) | (cols < 0) | (cols >= ncols)
        if np.any(bad):
            k = int(np.flatnonzero(bad)[0])
            raise IndexOutOfRange(
                f"entry ({rows[k]}, {cols[k]}) outside a {nrows}x{ncols} matrix")
    key = rows * max(ncols, 1) + cols
    uniq, inverse = np.unique(key, return_inverse=True)
    summed = np.zeros(uniq.size)
    # sequential accumulation in input order keeps the sum reproducible
    np.add.at(summed, inverse, vals)
    r = uniq // max(ncols, 1)
    c = uniq % max(ncols, 1)
    row_ptr = np.concatenate(([0], np.cumsum(np.bincount(r, minlength=nrows))))
    return SparseMatrix(nrows, ncols, row_ptr, c, summed, symmetric=symmetric)


def from_triplets(nrows, ncols, entries: Iterable[tuple[int, int, float]], symmetric=False):
    entries = list(entries)
    if entries:
        rows, cols, vals = zip(*entries)
    else:
        rows, cols, vals = (), (), ()
    return from_coo(nrows, ncols, rows, cols, vals, symmetric=symmetric)


def from_dense(M, symmetric=False, drop_zeros=True):
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise DimensionMismatch("expected a 2-D array")
    mask = M != 0.0 if drop_zeros else np.ones(M.shape, dtype=bool)
    r, c = np.nonzero(mask)
    return from_coo(M.shape[0], M.shape[1], r, c, M[r, c], symmetric=symmetric)


# ---------------------------------------------------------------------------
# Matrix Market


def load_matrix_market(path):
    """Read a real coordinate Matrix Market file.

    Symmetric files are expanded to full storage and indices converted to
    0-based. The returned matrix carries the symmetric flag iff the header
    says ``symmetric``.
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError(f"{path}: empty file")
    header = lines[0].split()
    if len(header) != 5 or header[0].lower() != "%%matrixmarket":
        raise ParseError(f"{path}: bad header line {lines[0]!r}")
    obj, fmt, field, sym = (h.lower() for h in header[1:])
    if obj != "matrix":
        raise UnsupportedFormat(f"{path}: object {obj!r} not supported")
    if fmt != "coordinate":
        raise UnsupportedFormat(f"{path}: only coordinate format is supported, got {fmt!r}")
    if field not in ("real", "integer"):
        raise UnsupportedFormat(f"{path}: field {field!r} not supported")
    if sym not in ("general", "symmetric"):
        raise UnsupportedFormat(f"{path}: symmetry {sym!r} not supported")

    body = [ln for ln in lines[1:] if ln.strip() and not ln.lstrip().startswith("%")]
    if not body:
        raise ParseError(f"{path}: missing size line")
    try:
        m, n, nnz = (int(t) for t in body[0].split())
    except ValueError:
        raise ParseError(f"{path}: bad size line {body[0]!r}") from None
    entries = body[1:]
    if len(entries) != nnz:
        raise ParseError(f"{path}: header declares {nnz} entries, found {len(entries)}")
    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz)
    for k, ln in enumerate(entries):
        parts = ln.split()
        if len(parts) != 3:
            raise ParseError(f"{path}: malformed entry {ln!r}")
        try:
            rows[k] = int(parts[0]) - 1
            cols[k] = int(parts[1]) - 1
            vals[k] = float(parts[2])
        except ValueError:
            raise ParseError(f"{path}: malformed entry {ln!r}") from None
    if nnz and (rows.min() < 0 or cols.min() < 0 or rows.max() >= m or cols.max() >= n):
        raise ParseError(f"{path}: entry index outside declared {m}x{n} shape")
    if sym == "symmetric":
        if m != n:
            raise ParseError(f"{path}: symmetric file with nonsquare shape")
        if np.any(cols > rows):
            raise ParseError(f"{path}: symmetric file stores an upper-triangle entry")
        off = rows != cols
        rows, cols, vals = (np.concatenate((rows, cols[off])),
                            np.concatenate((cols, rows[off])),
                            np.concatenate((vals, vals[off])))
    return from_coo(m, n, rows, cols, vals, symmetric=(sym == "symmetric"))


def write_matrix_market(path, A: SparseMatrix, symmetric=None):
    """Write ``A`` in coordinate real format (lower triangle only when symmetric)."""
    if symmetric is None:
        symmetric = A.symmetric
    rows, cols, vals = A.row_indices(), A.col_idx, A.values
    if symmetric:
        keep = cols <= rows
        rows, cols, vals = rows[keep], cols[keep], vals[keep]
    kind = "symmetric" if symmetric else "general"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"%%MatrixMarket matrix coordinate real {kind}\n")
        fh.write(f"{A.nrows} {A.ncols} {rows.size}\n")
        for i, j, v in zip(rows, cols, vals):
            fh.write(f"{i + 1} {j + 1} {float(v)!r}\n")


# ---------------------------------------------------------------------------
# kernels


def matvec(A: SparseMatrix, x):
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (A.ncols,):
        raise DimensionMismatch(f"x has shape {x.shape}, expected ({A.ncols},)")
    return np.bincount(A.row_indices(), weights=A.values * x[A.col_idx], minlength=A.nrows)


def trace(A: SparseMatrix):
    if not A.is_square:
        raise NotSquare(f"trace needs a square matrix, got {A.nrows}x{A.ncols}")
    return float(A.diagonal().sum())


def gershgorin_discs(A: SparseMatrix) -> list[GershgorinDisc]:
    if not A.is_square:
        raise NotSquare(f"Gershgorin discs need a square matrix, got {A.nrows}x{A.ncols}")
    rows = A.row_indices()
    off = rows != A.col_idx
    radii = np.bincount(rows[off], weights=np.abs(A.values[off]), minlength=A.nrows)
    centers = A.diagonal()
    return [GershgorinDisc(float(c), float(r)) for c, r in zip(centers, radii)]


def gershgorin_excludes_zero(discs: Sequence[GershgorinDisc]):
    """True when no disc contains the origin, which proves nonsingularity."""
    return all(abs(d.center) > d.radius for d in discs)


# ---------------------------------------------------------------------------
# generators


def _grid_index(dims):
    return np.arange(int(np.prod(dims)), dtype=np.int64).reshape(dims)


def skyscraper_field(dims, seed, block=None):
    """Cell coefficients ``10**d`` with ``d`` uniform on {0,1,2,3}, constant on cubic blocks.

    ``block`` is the block edge length in cells; by default about a fifth of
    the longest grid side.
    """
    dims = tuple(int(d) for d in dims)
    if block is None:
        block = max(1, round(max(dims) / 5))
    nblocks = tuple(-(-d // block) for d in dims)
    rng = np.random.default_rng(seed)
    exps = rng.integers(0, 4, size=nblocks)
    idx = np.ix_(*[np.arange(d) // block for d in dims])
    return 10.0 ** exps[idx]


def gen_laplacian(dims, coefficient_field="uniform", seed=0, block=None, shift=0.0):
    """Finite-difference Laplacian with homogeneous Dirichlet boundary.

    Parameters
    ----------
    dims : int or sequence of 1-3 ints
        Grid points per direction. One entry gives the 3-point stencil,
        two the 5-point and three the 7-point stencil.
    coefficient_field : {"uniform", "skyscraper"}
        Skyscraper mode assigns jumping coefficients per cubic block (see
        ``skyscraper_field``); couplings between cells use the harmonic mean.
    shift : float
        Added to the diagonal. Any ``shift > 0`` makes the matrix a strictly
        diagonally dominant M-matrix.
    """
    if np.isscalar(dims):
        dims = (dims,)
    dims = tuple(int(d) for d in dims)
    if not 1 <= len(dims) <= 3:
        raise ValueError("dims must have 1 to 3 entries")
    if any(d < 1 for d in dims):
        raise ValueError("every grid size must be >= 1")

    if coefficient_field == "uniform":
        k = np.ones(dims)
    elif coefficient_field in ("skyscraper", "sky"):
        k = skyscraper_field(dims, seed, block)
    else:
        raise ValueError(f"unknown coefficient field {coefficient_field!r}")

    idx = _grid_index(dims)
    n = idx.size
    diag = np.full(n, float(shift))
    rows, cols, vals = [], [], []
    for ax in range(len(dims)):
        lo = [slice(None)] * len(dims)
        hi = [slice(None)] * len(dims)
        lo[ax] = slice(0, -1)
        hi[ax] = slice(1, None)
        ka, kb = k[tuple(lo)], k[tuple(hi)]
        face = 2.0 * ka * kb / (ka + kb)
        ia, ib = idx[tuple(lo)].ravel(), idx[tuple(hi)].ravel()
        f = face.ravel()
        rows += [ia, ib]
        cols += [ib, ia]
        vals += [-f, -f]
        np.add.at(diag, ia, f)
        np.add.at(diag, ib, f)
        # the two Dirichlet boundary faces along this axis
        first = [slice(None)] * len(dims)
        last = [slice(None)] * len(dims)
        first[ax] = 0
        last[ax] = -1
        np.add.at(diag, idx[tuple(first)].ravel(), k[tuple(first)].ravel())
        np.add.at(diag, idx[tuple(last)].ravel(), k[tuple(last)].ravel())
    rows.append(np.arange(n))
    cols.append(np.arange(n))
    vals.append(diag)
    return from_coo(n, n, np.concatenate(rows), np.concatenate(cols),
                    np.concatenate(vals), symmetric=True)


def gen_dense_random(n, seed, ncols=None):
    """I.i.d. uniform [0, 1) entries, ``n x n`` (or ``n x ncols``)."""
    n = int(n)
    m = n if ncols is None else int(ncols)
    if n < 1 or m < 1:
        raise ValueError("matrix dimensions must be >= 1")
    return np.random.default_rng(seed).random((n, m))


def gen_random_symmetric(n, seed):
    """``(R + Rᵀ) / 2`` for a uniform random ``R``, as a symmetric SparseMatrix."""
    R = gen_dense_random(n, seed)
    S = 0.5 * (R + R.T)
    return from_dense(S, symmetric=True)


def augmented(A: SparseMatrix):
    """The symmetric ``(m+n) x (m+n)`` matrix ``[[0, A], [Aᵀ, 0]]``."""
    m, n = A.shape
    r, c, v = A.row_indices(), A.col_idx, A.values
    return from_coo(m + n, m + n, np.concatenate((r, c + m)), np.concatenate((c + m, r)),
                    np.concatenate((v, v)), symmetric=True)


def _as_sparse(A):
    """Accept a SparseMatrix or a dense array."""
    if isinstance(A, SparseMatrix):
        return A
    M = np.asarray(A, dtype=np.float64)
    sym = M.ndim == 2 and M.shape[0] == M.shape[1] and np.array_equal(M, M.T)
    return from_dense(M, symmetric=sym)


def spectral_norm_bound(A: SparseMatrix):
    """``sqrt(‖A‖₁‖A‖∞)``, an upper bound for ``‖A‖₂``."""
    return math.sqrt(A.norm1() * A.norm_inf())
