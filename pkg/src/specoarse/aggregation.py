"""Node-to-aggregate maps ("part arrays") and the partitioners that make them."""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidAggregateCount, NotSquare, NotSymmetric, ParseError
from .matrix_core import SparseMatrix

__all__ = [
    "Partition",
    "strong_coupling_aggregation",
    "strong_couplings",
    "bfs_graph_partition",
    "random_partition",
    "inverse_part",
    "repair_empty_aggregates",
    "read_partition",
    "write_partition",
]


@dataclass(frozen=True)
class Partition:
    """``part[i] = j`` puts fine node ``i`` in aggregate ``j`` (both 0-based).

    Every id in ``[0, n_aggregates)`` must be used at least once, so the
    aggregates are nonempty, disjoint, and cover all nodes.
    """

    part: np.ndarray
    n_aggregates: int

    def __post_init__(self):
        part = np.array(self.part, dtype=np.int64).ravel()
        part.setflags(write=False)
        object.__setattr__(self, "part", part)
        object.__setattr__(self, "n_aggregates", int(self.n_aggregates))
        nc = self.n_aggregates
        if part.size == 0:
            raise InvalidAggregateCount("partition of an empty node set")
        if nc < 1 or nc > part.size:
            raise InvalidAggregateCount(f"{nc} aggregates for {part.size} nodes")
        if part.min() < 0 or part.max() >= nc:
            raise InvalidAggregateCount(f"aggregate ids must lie in [0, {nc})")
        if np.any(np.bincount(part, minlength=nc) == 0):
            raise InvalidAggregateCount("partition has an empty aggregate")

    @property
    def n_nodes(self):
        return self.part.size

    def sizes(self):
        return np.bincount(self.part, minlength=self.n_aggregates)

    def __len__(self):
        return self.part.size


def inverse_part(p: Partition) -> list[np.ndarray]:
    """Aggregates ``G_j = {i : part[i] = j}``, each sorted ascending."""
    order = np.argsort(p.part, kind="stable")
    bounds = np.cumsum(p.sizes())[:-1]
    return np.split(order, bounds)


def repair_empty_aggregates(part, n_aggregates):
    """Fill empty aggregates by moving one node out of the currently largest one.

    The moved node is the largest index of that aggregate. Returns a new
    Partition.
    """
    part = np.array(part, dtype=np.int64)
    if not 1 <= n_aggregates <= part.size:
        raise InvalidAggregateCount(f"{n_aggregates} aggregates for {part.size} nodes")
    sizes = np.bincount(part, minlength=n_aggregates)
    for j in np.flatnonzero(sizes == 0):
        big = int(np.argmax(sizes))
        node = int(np.flatnonzero(part == big)[-1])
        part[node] = j
        sizes[big] -= 1
        sizes[j] += 1
    return Partition(part, n_aggregates)


# ---------------------------------------------------------------------------
# strong-coupling aggregation


def strong_couplings(A: SparseMatrix, beta):
    """``S_i = {j != i : a_ij < -beta * max_{k != i} |a_ik|}`` for each row.

    Returns a list of sorted index arrays.
    """
    rows = A.row_indices()
    off = rows != A.col_idx
    rmax = np.zeros(A.nrows)
    np.maximum.at(rmax, rows[off], np.abs(A.values[off]))
    strong = off & (A.values < -beta * rmax[rows])
    out = []
    for i in range(A.nrows):
        lo, hi = A.row_ptr[i], A.row_ptr[i + 1]
        out.append(A.col_idx[lo:hi][strong[lo:hi]])
    return out


def _strong_coupling(A, beta):
    n = A.nrows
    S = strong_couplings(A, beta)
    # who has j among its strong couplings: needed to update counts when j is marked
    influences = [[] for _ in range(n)]
    for i, s in enumerate(S):
        for j in s:
            influences[j].append(i)
    count = np.array([len(s) for s in S], dtype=np.int64)
    marked = np.zeros(n, dtype=bool)
    heap = [(int(count[i]), i) for i in range(n)]
    heapq.heapify(heap)

    def stale(entry):
        m, i = entry
        return marked[i] or m != count[i]

    part = np.full(n, -1, dtype=np.int64)
    n_agg = 0
    tie = False
    while heap:
        entry = heapq.heappop(heap)
        if stale(entry):
            continue
        while heap and stale(heap[0]):
            heapq.heappop(heap)
        if heap and heap[0][0] == entry[0]:
            tie = True
        i = entry[1]
        members = [i] + [j for j in S[i] if not marked[j]]
        for j in members:
            marked[j] = True
            part[j] = n_agg
        for j in members:
            for k in influences[j]:
                if not marked[k]:
                    count[k] -= 1
                    heapq.heappush(heap, (int(count[k]), k))
        n_agg += 1
    return Partition(part, n_agg), tie


def strong_coupling_aggregation(A: SparseMatrix, beta=0.25) -> Partition:
    """Greedy aggregation over strong negative couplings.

    The unmarked node with the fewest unmarked strong couplings is picked
    next (smallest index on ties); it forms an aggregate with its unmarked
    strongly coupled neighbours. Nodes without strong couplings end up as
    singletons.
    """
    if not A.is_square:
        raise NotSquare(f"aggregation needs a square matrix, got {A.nrows}x{A.ncols}")
    if not A.symmetric:
        raise NotSymmetric("strong-coupling aggregation needs a matrix flagged symmetric")
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    return _strong_coupling(A, beta)[0]


# ---------------------------------------------------------------------------
# BFS region growing


def _adjacency(A: SparseMatrix):
    rows = A.row_indices()
    cols = A.col_idx
    off = rows != cols
    r = np.concatenate((rows[off], cols[off]))
    c = np.concatenate((cols[off], rows[off]))
    key = np.unique(r * A.nrows + c)
    r, c = key // A.nrows, key % A.nrows
    ptr = np.concatenate(([0], np.cumsum(np.bincount(r, minlength=A.nrows))))
    return ptr, c


def bfs_graph_partition(A: SparseMatrix, n_aggregates, seed=0) -> Partition:
    """Grow ``n_aggregates`` regions by round-robin BFS on the graph of ``A + Aᵀ``.

    Roots are distinct seeded random nodes; region ``j`` grows from the
    ``j``-th smallest root. Regions take turns in index order, each turn
    claiming one unclaimed node: the next in its own BFS queue, where
    neighbours are queued in ascending order. Nodes unreachable from any
    root go to the smallest region, one connected component at a time.
    """
    if not A.is_square:
        raise NotSquare(f"graph partitioning needs a square matrix, got {A.nrows}x{A.ncols}")
    n = A.nrows
    n_aggregates = int(n_aggregates)
    if not 1 <= n_aggregates <= n:
        raise InvalidAggregateCount(f"{n_aggregates} aggregates for {n} nodes")
    rng = np.random.default_rng(seed)
    roots = np.sort(rng.choice(n, size=n_aggregates, replace=False))
    ptr, adj = _adjacency(A)

    part = np.full(n, -1, dtype=np.int64)
    part[roots] = np.arange(n_aggregates)
    sizes = np.ones(n_aggregates, dtype=np.int64)
    queues = [deque(int(v) for v in adj[ptr[r]:ptr[r + 1]]) for r in roots]
    active = list(range(n_aggregates))
    while active:
        still = []
        for j in active:
            q = queues[j]
            while q and part[q[0]] >= 0:
                q.popleft()
            if not q:
                continue
            u = q.popleft()
            part[u] = j
            sizes[j] += 1
            q.extend(int(v) for v in adj[ptr[u]:ptr[u + 1]] if part[v] < 0)
            still.append(j)
        active = still

    # disconnected leftovers: flood each component into the smallest region
    for start in np.flatnonzero(part < 0):
        if part[start] >= 0:
            continue
        j = int(np.argmin(sizes))
        part[start] = j
        queue = deque([int(start)])
        while queue:
            u = queue.popleft()
            sizes[j] += 1
            for v in adj[ptr[u]:ptr[u + 1]]:
                if part[v] < 0:
                    part[v] = j
                    queue.append(int(v))
    return repair_empty_aggregates(part, n_aggregates)


# ---------------------------------------------------------------------------
# random clustering


def random_partition(N, n_aggregates, seed=0) -> Partition:
    """Balanced random clustering: a seeded permutation cut into equal-as-possible chunks."""
    N, n_aggregates = int(N), int(n_aggregates)
    if not 1 <= n_aggregates <= N:
        raise InvalidAggregateCount(f"{n_aggregates} aggregates for {N} nodes")
    perm = np.random.default_rng(seed).permutation(N)
    part = np.empty(N, dtype=np.int64)
    for j, chunk in enumerate(np.array_split(perm, n_aggregates)):
        part[chunk] = j
    return Partition(part, n_aggregates)


# ---------------------------------------------------------------------------
# text interchange


def write_partition(path, p: Partition):
    with open(path, "w", encoding="utf-8") as fh:
        for i, j in enumerate(p.part):
            fh.write(f"{i} {j}\n")


def read_partition(path) -> Partition:
    """Read ``node_index aggregate_id`` lines; the aggregate count is ``max id + 1``."""
    pairs = []
    for ln in Path(path).read_text(encoding="utf-8").splitlines():
        if not ln.strip() or ln.lstrip().startswith("#"):
            continue
        try:
            i, j = (int(t) for t in ln.split())
        except ValueError:
            raise ParseError(f"{path}: malformed partition line {ln!r}") from None
        pairs.append((i, j))
    if not pairs:
        raise ParseError(f"{path}: empty partition file")
    idx = np.array([i for i, _ in pairs])
    if not np.array_equal(np.sort(idx), np.arange(idx.size)):
        raise ParseError(f"{path}: node indices must be exactly 0..N-1")
    part = np.empty(idx.size, dtype=np.int64)
    part[idx] = [j for _, j in pairs]
    return Partition(part, int(part.max()) + 1)
