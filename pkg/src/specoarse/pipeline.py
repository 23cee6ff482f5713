"""Randomized multi-coarse-grid spectrum estimation.

Each sample draws its own aggregation, forms the coarse matrix, takes ``k``
of its eigenvalues (singular values) as shifts and refines every shift on
the fine grid. Samples share nothing but the read-only fine matrix, so they
run as independent tasks; the refined values are gathered, sorted and
deduplicated at the end.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .aggregation import (
    Partition,
    bfs_graph_partition,
    random_partition,
    strong_coupling_aggregation,
)
from .coarsen import build_interpolation, galerkin_product, two_sided_product
from .dense_eig import dense_singular_values, eig_extremes, sym_eigenvalues
from .errors import EmptyEstimate, InvalidAggregateCount, NotSymmetric
from .fine_solver import (
    DEFAULT_MAX_ITERS,
    DEFAULT_TOL,
    eigen_near_shift,
    singular_value_near_shift,
)
from .matrix_core import SparseMatrix
from .verify import verify_interlacing, verify_svd_interlacing

__all__ = [
    "SampleConfig",
    "Provenance",
    "SampleOutcome",
    "SpectrumEstimate",
    "coarse_size",
    "make_partition",
    "select_shifts",
    "estimate_eigenvalues",
    "estimate_singular_values",
    "sample_extremes",
    "extreme_eigenvalues",
    "extreme_singular_values",
    "verify_interlacing",
    "verify_svd_interlacing",
    "COARSENING_RATIO",
    "WIDE_RATIO",
]

COARSENING_RATIO = 10.0
WIDE_RATIO = 2.3  # N = 50 -> N_c = 22
PARTITIONERS = ("strong", "bfs", "random")


def coarse_size(n, ratio=COARSENING_RATIO):
    return max(1, min(n, math.ceil(n / ratio)))


@dataclass
class SampleConfig:
    """Controls for a multi-sample run.

    ``target`` picks which coarse values become shifts: ``"smallest"``,
    ``"largest"``, or a number (the ``k`` nearest to it). ``None`` means
    smallest for eigenvalues and largest for singular values.
    """

    J: int = 1
    k: int = 1
    n_aggregates: Optional[int] = None
    partitioner: str = "random"
    beta: float = 0.25
    normalized: bool = True
    seed: int = 0
    tol: float = DEFAULT_TOL
    max_iters: int = DEFAULT_MAX_ITERS
    target: Union[str, float, None] = None
    workers: int = 1
    dedup_rtol: float = 1e-8

    def __post_init__(self):
        if self.J < 1:
            raise ValueError(f"sample count J must be >= 1, got {self.J}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.n_aggregates is not None and self.n_aggregates < self.k:
            raise InvalidAggregateCount(
                f"k={self.k} exceeds the coarse size {self.n_aggregates}")
        if self.partitioner not in PARTITIONERS:
            raise ValueError(f"unknown partitioner {self.partitioner!r}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must lie in [0, 1]")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def as_dict(self):
        """Config echo; excludes ``workers`` since results do not depend on it."""
        d = {k: getattr(self, k) for k in self.__dataclass_fields__ if k != "workers"}
        return d


@dataclass(frozen=True)
class Provenance:
    sample: int
    shift: float
    value: float
    residual: float
    iterations: int


@dataclass
class SampleOutcome:
    index: int
    n_aggregates: int
    coarse: np.ndarray
    shifts: np.ndarray
    results: list
    partition: object = None


@dataclass
class SpectrumEstimate:
    """Deduplicated refined values with the refinements that produced them.

    ``values`` is ascending for eigenvalues and descending for singular
    values; ``provenance[i]`` lists every converged refinement merged into
    ``values[i]``.
    """

    kind: str
    values: np.ndarray
    provenance: list
    rejected: int
    samples: list = field(default_factory=list)

    def __len__(self):
        return self.values.size

    def best(self, i):
        """The provenance record with the smallest residual for value ``i``."""
        return min(self.provenance[i], key=lambda r: r.residual)


def _sample_seed(seed, *path):
    return np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *path])


def _int_seed(ss):
    return int(ss.generate_state(1, np.uint64)[0])


def make_partition(A: SparseMatrix, partitioner, n_aggregates, seed, beta=0.25) -> Partition:
    if partitioner == "strong":
        return strong_coupling_aggregation(A, beta)
    if partitioner == "bfs":
        return bfs_graph_partition(A, n_aggregates, seed)
    if partitioner == "random":
        return random_partition(A.nrows, n_aggregates, seed)
    raise ValueError(f"unknown partitioner {partitioner!r}")


def select_shifts(values, k, target):
    """Pick ``k`` entries of a coarse spectrum; result keeps the input order."""
    values = np.asarray(values)
    k = min(k, values.size)
    if target == "smallest":
        idx = np.argsort(values, kind="stable")[:k]
    elif target == "largest":
        idx = np.argsort(-values, kind="stable")[:k]
    else:
        idx = np.argsort(np.abs(values - float(target)), kind="stable")[:k]
    return values[np.sort(idx)]


def _run(tasks, workers):
    if workers <= 1:
        return [t() for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(t) for t in tasks]
        return [f.result() for f in futures]


def _gather(kind, outcomes, norm1, rtol):
    records = []
    rejected = 0
    for out in outcomes:
        for r in out.results:
            if r.converged:
                records.append(Provenance(out.index, float(r.shift), float(r.value),
                                          float(r.residual), int(r.iterations)))
            else:
                rejected += 1
    if not records:
        raise EmptyEstimate(f"none of {rejected} refinements converged")
    records.sort(key=lambda p: (p.value, p.sample, p.shift))
    floor = 1e-12 * norm1
    clusters = [[records[0]]]
    for rec in records[1:]:
        prev = clusters[-1][-1].value
        if rec.value - prev <= max(rtol * max(abs(rec.value), abs(prev)), floor):
            clusters[-1].append(rec)
        else:
            clusters.append([rec])
    values = np.array([min(c, key=lambda p: p.residual).value for c in clusters])
    if kind == "singular":
        values = values[::-1]
        clusters = clusters[::-1]
    prov = [sorted(c, key=lambda p: (p.sample, p.shift)) for c in clusters]
    return SpectrumEstimate(kind, values, prov, rejected, list(outcomes))


def _eig_sample(A, cfg, i, nc, partition=None):
    ss = _sample_seed(cfg.seed, i)
    part_seed, refine_ss = ss.spawn(2)
    part = partition if partition is not None else make_partition(
        A, cfg.partitioner, nc, _int_seed(part_seed), cfg.beta)
    P = build_interpolation(part, cfg.normalized)
    mu = sym_eigenvalues(galerkin_product(A, P)).values
    target = "smallest" if cfg.target is None else cfg.target
    shifts = select_shifts(mu, cfg.k, target)
    seeds = refine_ss.spawn(shifts.size)
    results = [eigen_near_shift(A, s, cfg.tol, cfg.max_iters, seed=sd, keep_vector=False)
               for s, sd in zip(shifts, seeds)]
    return SampleOutcome(i, part.n_aggregates, mu, shifts, results, part)


def estimate_eigenvalues(A: SparseMatrix, cfg: SampleConfig,
                         partitions: Optional[Sequence[Partition]] = None) -> SpectrumEstimate:
    """Eigenvalue estimates of symmetric ``A`` from ``cfg.J`` coarse grids.

    ``partitions``, when given, fixes the aggregation of each sample
    (its length then overrides ``cfg.J``).
    """
    if not A.symmetric:
        raise NotSymmetric("eigenvalue estimation needs a matrix flagged symmetric")
    nc = cfg.n_aggregates or coarse_size(A.nrows)
    if cfg.partitioner != "strong" and not cfg.k <= nc <= A.nrows:
        raise InvalidAggregateCount(f"need k <= N_c <= N, got k={cfg.k}, N_c={nc}, N={A.nrows}")
    J = len(partitions) if partitions is not None else cfg.J
    tasks = [
        (lambda i=i: _eig_sample(A, cfg, i, nc, None if partitions is None else partitions[i]))
        for i in range(J)
    ]
    outcomes = _run(tasks, cfg.workers)
    return _gather("eigen", outcomes, A.norm1(), cfg.dedup_rtol)


def _svd_sample(A, cfg, i, p, q, partitions=None):
    ss = _sample_seed(cfg.seed, i)
    row_ss, col_ss, refine_ss = ss.spawn(3)
    if partitions is not None:
        prow, pcol = partitions
    else:
        prow = random_partition(A.nrows, p, _int_seed(row_ss))
        pcol = random_partition(A.ncols, q, _int_seed(col_ss))
    U = build_interpolation(prow, cfg.normalized)
    V = build_interpolation(pcol, cfg.normalized)
    B = two_sided_product(A, U, V, require_normalized=False)
    sig = dense_singular_values(B).values
    target = "largest" if cfg.target is None else cfg.target
    shifts = select_shifts(sig, cfg.k, target)
    seeds = refine_ss.spawn(shifts.size)
    results = [singular_value_near_shift(A, s, cfg.tol, cfg.max_iters, seed=sd)
               for s, sd in zip(shifts, seeds)]
    return SampleOutcome(i, min(prow.n_aggregates, pcol.n_aggregates), sig, shifts, results,
                         (prow, pcol))


def _svd_sizes(A, cfg):
    if cfg.n_aggregates is None:
        return coarse_size(A.nrows), coarse_size(A.ncols)
    return min(cfg.n_aggregates, A.nrows), min(cfg.n_aggregates, A.ncols)


def estimate_singular_values(A: SparseMatrix, cfg: SampleConfig,
                             partitions=None) -> SpectrumEstimate:
    """Singular value estimates of any ``m x n`` matrix from two-sided coarsening.

    Rows and columns get independent random clusterings of sizes ``p`` and
    ``q`` (``cfg.n_aggregates`` clamped to each dimension, default a tenth).
    ``partitions`` optionally fixes ``(row_partition, col_partition)`` per
    sample.
    """
    if cfg.partitioner != "random":
        raise ValueError("singular value estimation uses random clustering only")
    p, q = _svd_sizes(A, cfg)
    J = len(partitions) if partitions is not None else cfg.J
    tasks = [
        (lambda i=i: _svd_sample(A, cfg, i, p, q, None if partitions is None else partitions[i]))
        for i in range(J)
    ]
    outcomes = _run(tasks, cfg.workers)
    return _gather("singular", outcomes, A.norm1(), cfg.dedup_rtol)


# ---------------------------------------------------------------------------
# extremes


def sample_extremes(A: SparseMatrix, J, n_aggregates=None, partitioner="random", seed=0,
                    beta=0.25, kind="eigen", workers=1):
    """Per-sample ``(min, max)`` coarse eigenvalue (or singular value), shape ``(J, 2)``.

    Sample ``i`` depends only on ``(seed, i)``, so runs with a larger ``J``
    extend the sample set of smaller ones.
    """
    if J < 1:
        raise ValueError(f"sample count J must be >= 1, got {J}")
    if kind == "eigen":
        if not A.symmetric:
            raise NotSymmetric("extreme eigenvalues need a matrix flagged symmetric")
        nc = n_aggregates or coarse_size(A.nrows)

        def task(i):
            ss = _sample_seed(seed, i)
            part = make_partition(A, partitioner, nc, _int_seed(ss.spawn(1)[0]), beta)
            return eig_extremes(galerkin_product(A, build_interpolation(part, True)))
    elif kind == "singular":
        cfg = SampleConfig(n_aggregates=n_aggregates, k=1)
        p, q = _svd_sizes(A, cfg)

        def task(i):
            row_ss, col_ss, _ = _sample_seed(seed, i).spawn(3)
            U = build_interpolation(random_partition(A.nrows, p, _int_seed(row_ss)))
            V = build_interpolation(random_partition(A.ncols, q, _int_seed(col_ss)))
            s = dense_singular_values(two_sided_product(A, U, V)).values
            return s[-1], s[0]
    else:
        raise ValueError(f"unknown kind {kind!r}")
    out = _run([lambda i=i: task(i) for i in range(J)], workers)
    return np.array(out, dtype=np.float64).reshape(J, 2)


def extreme_eigenvalues(A: SparseMatrix, J, n_aggregates=None, partitioner="random", seed=0,
                        beta=0.25, refine=False, tol=DEFAULT_TOL, max_iters=DEFAULT_MAX_ITERS,
                        workers=1):
    """``(Lambda_min, Lambda_max)``: min of coarse minima and max of coarse maxima.

    With normalized aggregation both are inner bounds,
    ``lambda_min <= Lambda_min`` and ``Lambda_max <= lambda_max``. ``refine``
    replaces each by the fine eigenvalue nearest to it.
    """
    ext = sample_extremes(A, J, n_aggregates, partitioner, seed, beta, "eigen", workers)
    lo, hi = float(ext[:, 0].min()), float(ext[:, 1].max())
    if refine:
        lo = eigen_near_shift(A, lo, tol, max_iters, seed=_sample_seed(seed, J, 0)).value
        hi = eigen_near_shift(A, hi, tol, max_iters, seed=_sample_seed(seed, J, 1)).value
    return lo, hi


def extreme_singular_values(A: SparseMatrix, J, n_aggregates=None, seed=0, workers=1):
    """``(Sigma_min, Sigma_max)`` over ``J`` two-sided random coarsenings."""
    ext = sample_extremes(A, J, n_aggregates, "random", seed, kind="singular", workers=workers)
    return float(ext[:, 0].min()), float(ext[:, 1].max())
