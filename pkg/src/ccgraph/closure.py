"""Commutation graph, commutative closures and closedness tests.

The graph joins cd and dc for every ordered pair (c, d) with cd != dc. Its
connected components are the commutative closures of single elements.
"""

from __future__ import annotations

import logging
import weakref
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ccgraph.rings import BLOCK_PAIRS, RingHandle, _row_chunks, pair_blocks

log = logging.getLogger(__name__)

# factor indexes are kept only when the flat product table fits this many entries
FACTOR_INDEX_LIMIT = 70_000_000


@dataclass(frozen=True, eq=False)
class CommutationGraph:
    """Undirected simple graph on element ids in CSR form."""

    spec: str
    size: int
    indptr: np.ndarray
    indices: np.ndarray
    components: np.ndarray

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    def neighbors(self, a: int) -> np.ndarray:
        return self.indices[self.indptr[a]:self.indptr[a + 1]]

    def adjacent(self, a: int, b: int) -> bool:
        nb = self.neighbors(a)
        i = np.searchsorted(nb, b)
        return bool(i < len(nb) and nb[i] == b)

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge endpoints (u, v), u < v, in ascending (u, v) order."""
        src = np.repeat(np.arange(self.size, dtype=np.int64), np.diff(self.indptr))
        keep = src < self.indices
        return src[keep], self.indices[keep]

    def component_of(self, a: int) -> np.ndarray:
        return np.nonzero(self.components == self.components[a])[0]

    def component_members(self) -> list[np.ndarray]:
        """Vertex arrays per component, ordered by component label."""
        order = np.argsort(self.components, kind="stable")
        bounds = np.cumsum(np.bincount(self.components))[:-1]
        return np.split(order, bounds)

    def same_adjacency(self, other: "CommutationGraph") -> bool:
        return (
            self.spec == other.spec
            and self.size == other.size
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    @classmethod
    def from_edges(cls, spec: str, size: int, u: np.ndarray, v: np.ndarray) -> "CommutationGraph":
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        if len(u) and (np.any(u == v) or u.min() < 0 or max(u.max(), v.max()) >= size):
            raise ValueError("edges must join distinct in-range vertices")
        keys = np.unique(np.concatenate([u * size + v, v * size + u]))
        src, dst = np.divmod(keys, size)
        indptr = np.zeros(size + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=size), out=indptr[1:])
        adj = csr_matrix((np.ones(len(dst), dtype=np.int8), dst, indptr), shape=(size, size))
        _, labels = connected_components(adj, directed=False)
        # relabel components by their smallest vertex
        _, first = np.unique(labels, return_index=True)
        rank = np.empty(len(first), dtype=np.int64)
        rank[np.argsort(first)] = np.arange(len(first))
        return cls(spec, size, indptr, dst.astype(np.int64), rank[labels])


def _block_edge_keys(ring: RingHandle, rows: np.ndarray) -> np.ndarray:
    allv = ring.elements()
    table = ring.table
    if table is not None:
        P = table[rows].astype(np.int64)
        Q = table[:, rows].T.astype(np.int64)
    else:
        P = ring.mul_many(rows[:, None], allv[None, :])
        Q = ring.mul_many(allv[None, :], rows[:, None])
    # (c, d) and (d, c) give the same edge, so d > c suffices
    mask = (P != Q) & (allv[None, :] > rows[:, None])
    lo = np.minimum(P[mask], Q[mask])
    hi = np.maximum(P[mask], Q[mask])
    return np.unique(lo * ring.size + hi)


# pending per-block keys are folded into the running edge set past this many entries
MERGE_PENDING = 1 << 24


def build_commutation_graph(ring: RingHandle, threads: int = 1) -> CommutationGraph:
    """Sweep all pairs (c, d) and join cd -- dc.

    Blocks of rows are processed by up to ``threads`` workers; per-block edge
    sets are merged by sorting, so the result does not depend on scheduling.
    """
    if ring.is_commutative_type:
        empty = np.zeros(0, dtype=np.int64)
        return CommutationGraph.from_edges(ring.spec, ring.size, empty, empty)
    ring.table  # materialize before fanning out
    blocks = list(_row_chunks(ring.size, BLOCK_PAIRS))
    keys = np.zeros(0, dtype=np.int64)
    pending: list[np.ndarray] = []

    def fold():
        nonlocal keys
        keys = np.unique(np.concatenate([keys, *pending]))
        pending.clear()

    def consume(part):
        pending.append(part)
        if sum(len(p) for p in pending) > MERGE_PENDING:
            fold()

    if threads > 1:
        wave = 4 * threads
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for i in range(0, len(blocks), wave):
                for part in pool.map(lambda r: _block_edge_keys(ring, r), blocks[i:i + wave]):
                    consume(part)
    else:
        for rows in blocks:
            consume(_block_edge_keys(ring, rows))
    fold()
    u, v = np.divmod(keys, ring.size)
    del keys
    log.debug("%s: %d edges from %d blocks", ring.spec, len(u), len(blocks))
    return CommutationGraph.from_edges(ring.spec, ring.size, u, v)


_graphs: "weakref.WeakKeyDictionary[RingHandle, CommutationGraph]" = weakref.WeakKeyDictionary()


def commutation_graph(ring: RingHandle, threads: int = 1) -> CommutationGraph:
    """Memoized build_commutation_graph."""
    g = _graphs.get(ring)
    if g is None:
        g = _graphs[ring] = build_commutation_graph(ring, threads)
    return g


class FactorIndex:
    """All factorizations c*d = a, grouped by a, from the flat product table."""

    def __init__(self, ring: RingHandle):
        flat = ring.table.ravel()
        self.size = ring.size
        self.order = np.argsort(flat, kind="stable")
        self.starts = np.zeros(ring.size + 1, dtype=np.int64)
        np.cumsum(np.bincount(flat, minlength=ring.size), out=self.starts[1:])

    def factor_pairs(self, a: int) -> tuple[np.ndarray, np.ndarray]:
        idx = self.order[self.starts[a]:self.starts[a + 1]]
        return np.divmod(idx, self.size)


_factor_indexes: "weakref.WeakKeyDictionary[RingHandle, FactorIndex]" = weakref.WeakKeyDictionary()


def factor_pairs(ring: RingHandle, a: int) -> tuple[np.ndarray, np.ndarray]:
    """Arrays (c, d) of every ordered factorization c*d = a."""
    a = ring.check(a)
    if ring.table is not None and ring.size**2 <= FACTOR_INDEX_LIMIT:
        fi = _factor_indexes.get(ring)
        if fi is None:
            fi = _factor_indexes[ring] = FactorIndex(ring)
        return fi.factor_pairs(a)
    cs, ds = [], []
    for rows, P, _ in pair_blocks(ring):
        r, d = np.nonzero(P == a)
        cs.append(rows[r])
        ds.append(d)
    return np.concatenate(cs), np.concatenate(ds)


def neighbors_one(ring: RingHandle, a: int) -> frozenset[int]:
    """{a}_1 = {dc : cd = a}, computed directly from factorizations (contains a)."""
    c, d = factor_pairs(ring, a)
    return frozenset(int(x) for x in np.unique(ring.mul_many(d, c)))


def one_step(ring: RingHandle, S: Iterable[int]) -> frozenset[int]:
    """S united with {dc : cd in S}."""
    out = set(S)
    for a in list(out):
        out |= neighbors_one(ring, a)
    return frozenset(out)


@dataclass(frozen=True)
class ClosureResult:
    seed: frozenset[int]
    level: dict[int, int] = field(hash=False)

    @property
    def members(self) -> frozenset[int]:
        return frozenset(self.level)

    @property
    def depth(self) -> int:
        return max(self.level.values())

    def within(self, i: int) -> frozenset[int]:
        """S_i: members reached in at most i steps."""
        return frozenset(a for a, l in self.level.items() if l <= i)


def bfs_levels(graph: CommutationGraph, sources: Iterable[int]) -> dict[int, int]:
    level = {int(s): 0 for s in sources}
    frontier = list(level)
    depth = 0
    while frontier:
        depth += 1
        nxt = []
        for a in frontier:
            for b in graph.neighbors(a).tolist():
                if b not in level:
                    level[b] = depth
                    nxt.append(b)
        frontier = nxt
    return level


def closure(ring: RingHandle, seed: Iterable[int], graph: CommutationGraph | None = None) -> ClosureResult:
    """Commutative closure of ``seed`` with the S_i level of every member."""
    seed = frozenset(ring.check(s) for s in seed)
    if not seed:
        raise ValueError("closure of the empty set is not defined")
    graph = graph if graph is not None else commutation_graph(ring)
    return ClosureResult(seed, bfs_levels(graph, sorted(seed)))


def stabilization_depth(ring: RingHandle, a: int, graph: CommutationGraph | None = None) -> int:
    """Smallest n with {a}_n equal to the closure of {a}."""
    return closure(ring, [a], graph).depth


@dataclass(frozen=True)
class Counterexample:
    c: int
    d: int


def is_commutatively_closed(ring: RingHandle, S: Iterable[int]) -> Counterexample | None:
    """None if S is commutatively closed, else the first (c, d) with cd in S, dc not in S."""
    mask = np.zeros(ring.size, dtype=bool)
    mask[[ring.check(s) for s in S]] = True
    for rows, P, Q in pair_blocks(ring):
        bad = mask[P] & ~mask[Q]
        if bad.any():
            i, d = np.argwhere(bad)[0]
            return Counterexample(int(rows[i]), int(d))
    return None
