"""Spectrum estimation of sparse matrices from randomized aggregation coarse grids."""

__version__ = "0.1.0"

from .aggregation import (
    Partition,
    bfs_graph_partition,
    random_partition,
    strong_coupling_aggregation,
)
from .coarsen import InterpolationOperator, build_interpolation, galerkin_product, two_sided_product
from .dense_eig import Spectrum, dense_singular_values, sym_eigenvalues
from .errors import (
    DimensionMismatch,
    EmptyEstimate,
    IndexOutOfRange,
    InvalidAggregateCount,
    InvalidMatrix,
    NoConvergence,
    NotSquare,
    NotSymmetric,
    ParseError,
    RequiresNormalized,
    SpecoarseError,
    UnsupportedFormat,
)
from .fine_solver import ShiftResult, eigen_near_shift, singular_value_near_shift
from .matrix_core import (
    GershgorinDisc,
    SparseMatrix,
    from_dense,
    gen_dense_random,
    gen_laplacian,
    gen_random_symmetric,
    gershgorin_discs,
    load_matrix_market,
    write_matrix_market,
)
from .pipeline import (
    SampleConfig,
    SpectrumEstimate,
    estimate_eigenvalues,
    estimate_singular_values,
    extreme_eigenvalues,
    extreme_singular_values,
)
from .verify import trace_bounds, verify_interlacing, verify_svd_interlacing

__all__ = [
    "__version__",
    "Partition", "bfs_graph_partition", "random_partition", "strong_coupling_aggregation",
    "InterpolationOperator", "build_interpolation", "galerkin_product", "two_sided_product",
    "Spectrum", "dense_singular_values", "sym_eigenvalues",
    "DimensionMismatch", "EmptyEstimate", "IndexOutOfRange", "InvalidAggregateCount",
    "InvalidMatrix", "NoConvergence", "NotSquare", "NotSymmetric", "ParseError",
    "RequiresNormalized", "SpecoarseError", "UnsupportedFormat",
    "ShiftResult", "eigen_near_shift", "singular_value_near_shift",
    "GershgorinDisc", "SparseMatrix", "from_dense", "gen_dense_random", "gen_laplacian",
    "gen_random_symmetric", "gershgorin_discs", "load_matrix_market", "write_matrix_market",
    "SampleConfig", "SpectrumEstimate", "estimate_eigenvalues", "estimate_singular_values",
    "extreme_eigenvalues", "extreme_singular_values",
    "trace_bounds", "verify_interlacing", "verify_svd_interlacing",
]
