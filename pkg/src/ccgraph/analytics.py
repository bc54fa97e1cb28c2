"""Distances, eccentricities, diameters and girths on a CommutationGraph.

Unreachable distances and acyclic girths are reported as ``None``.
"""

from __future__ import annotations

from collections import deque

import numpy as np
from scipy.sparse import csr_matrix

from ccgraph.closure import CommutationGraph, bfs_levels


def distance(graph: CommutationGraph, a: int, b: int) -> int | None:
    if a == b:
        return 0
    if graph.components[a] != graph.components[b]:
        return None
    seen = {a}
    frontier = [a]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for x in frontier:
            for y in graph.neighbors(x).tolist():
                if y == b:
                    return d
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    raise AssertionError("component labels disagree with adjacency")


def eccentricity(graph: CommutationGraph, a: int) -> int:
    return max(bfs_levels(graph, [a]).values())


def component_distances(graph: CommutationGraph, vertices: np.ndarray) -> np.ndarray:
    """All-pairs distance matrix of one component, rows/cols ordered as ``vertices``.

    Runs BFS from every vertex at once: the frontier is a boolean matrix
    advanced by one sparse product per level.
    """
    vertices = np.asarray(vertices, dtype=np.int64)
    s = len(vertices)
    local = np.full(graph.size, -1, dtype=np.int64)
    local[vertices] = np.arange(s)
    starts, ends = graph.indptr[vertices], graph.indptr[vertices + 1]
    rows = np.repeat(np.arange(s), ends - starts)
    cols = local[np.concatenate([graph.indices[x:y] for x, y in zip(starts, ends)])] if s else rows
    if np.any(cols < 0):
        raise ValueError("vertex set is not closed under adjacency")
    adj = csr_matrix((np.ones(len(rows), dtype=np.int32), (rows, cols)), shape=(s, s))

    dist = np.full((s, s), -1, dtype=np.int64)
    np.fill_diagonal(dist, 0)
    frontier = np.eye(s, dtype=np.int32)
    d = 0
    while True:
        d += 1
        reach = np.asarray((adj @ frontier.T).T) > 0
        new = reach & (dist < 0)
        if not new.any():
            break
        dist[new] = d
        frontier = new.astype(np.int32)
    return dist


def class_diameter(graph: CommutationGraph, a: int) -> int:
    comp = graph.component_of(a)
    if len(comp) == 1:
        return 0
    return int(component_distances(graph, comp).max())


def component_diameters(graph: CommutationGraph) -> list[int]:
    """Diameter of every component, indexed by component label."""
    return [
        0 if len(c) == 1 else int(component_distances(graph, c).max())
        for c in graph.component_members()
    ]


def ring_diameter(graph: CommutationGraph) -> int:
    return max(component_diameters(graph), default=0)


def _component_girth(graph: CommutationGraph, vertices: np.ndarray) -> int | None:
    s = len(vertices)
    edges = int(sum(len(graph.neighbors(v)) for v in vertices)) // 2
    if edges < s:  # connected with at most s-1 edges: a tree
        return None
    best = None
    for root in vertices.tolist():
        dist = {root: 0}
        parent = {root: -1}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            if best is not None and 2 * dist[u] + 1 >= best:
                break
            for w in graph.neighbors(u).tolist():
                if w not in dist:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif w != parent[u]:
                    cycle = dist[u] + dist[w] + 1
                    if best is None or cycle < best:
                        best = cycle
        if best == 3:
            break
    return best


def class_girth(graph: CommutationGraph, a: int) -> int | None:
    """Length of the shortest cycle in the component of ``a`` (None if acyclic)."""
    return _component_girth(graph, graph.component_of(a))


def ring_girth(graph: CommutationGraph) -> int | None:
    best = None
    for comp in graph.component_members():
        if len(comp) < 3:
            continue
        g = _component_girth(graph, comp)
        if g is not None and (best is None or g < best):
            best = g
            if best == 3:
                break
    return best
