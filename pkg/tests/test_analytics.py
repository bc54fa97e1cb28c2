import numpy as np
import pytest
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from ccgraph import analytics
from ccgraph.closure import CommutationGraph, commutation_graph
from ccgraph.rings import build_ring

from conftest import encode_prime

ORACLE_RINGS = ["M(2,GF(2))", "M(2,GF(3))", "Z(4)xM(2,GF(2))", "M(3,GF(2))"]


def _scipy_distances(g):
    adj = csr_matrix((np.ones(len(g.indices)), g.indices, g.indptr), shape=(g.size, g.size))
    return shortest_path(adj, unweighted=True, directed=False)


def _oracle_girth(g, vertices):
    """Shortest cycle through each edge: remove it, BFS between its ends, add one."""
    vs = set(vertices.tolist())
    u, v = g.edges()
    best = None
    for a, b in zip(u.tolist(), v.tolist()):
        if a not in vs:
            continue
        keep = ~(((u == a) & (v == b)))
        h = CommutationGraph.from_edges(g.spec, g.size, u[keep], v[keep])
        d = analytics.distance(h, a, b)
        if d is not None and (best is None or d + 1 < best):
            best = d + 1
    return best


@pytest.fixture(scope="module", params=ORACLE_RINGS)
def graph(request):
    return commutation_graph(build_ring(request.param))


def test_distances_match_scipy(graph):
    D = _scipy_distances(graph)
    rng = np.random.default_rng(3)
    for members in graph.component_members():
        got = analytics.component_distances(graph, members)
        assert np.array_equal(got, D[np.ix_(members, members)].astype(np.int64))
    for a, b in rng.integers(0, graph.size, (300, 2)).tolist():
        d = analytics.distance(graph, a, b)
        assert (d is None) == np.isinf(D[a, b])
        if d is not None:
            assert d == D[a, b]


def test_diameters_and_eccentricity_match_scipy(graph):
    D = _scipy_distances(graph)
    finite = np.where(np.isinf(D), -1, D)
    assert analytics.ring_diameter(graph) == int(finite.max())
    for members in graph.component_members()[:20]:
        a = int(members[0])
        assert analytics.eccentricity(graph, a) == int(finite[a].max())
        assert analytics.class_diameter(graph, a) == max(analytics.eccentricity(graph, int(m)) for m in members)


def test_girth_matches_oracle():
    for spec in ["M(2,GF(2))", "Z(4)xM(2,GF(2))"]:
        g = commutation_graph(build_ring(spec))
        for members in g.component_members():
            assert analytics._component_girth(g, members) == _oracle_girth(g, members)


def test_girth_on_tree_and_cycle():
    path = CommutationGraph.from_edges("t", 5, np.array([0, 1, 2, 3]), np.array([1, 2, 3, 4]))
    assert analytics.class_girth(path, 0) is None
    cyc = CommutationGraph.from_edges("t", 5, np.array([0, 1, 2, 3, 0]), np.array([1, 2, 3, 4, 4]))
    assert analytics.class_girth(cyc, 0) == 5
    sq = CommutationGraph.from_edges("t", 6, np.array([0, 1, 2, 0, 4]), np.array([1, 2, 3, 3, 5]))
    assert analytics.class_girth(sq, 0) == 4
    assert analytics.class_girth(sq, 4) is None
    assert analytics.ring_girth(sq) == 4


def test_examples(z12, m22, m32):
    g12, g22, g32 = commutation_graph(z12), commutation_graph(m22), commutation_graph(m32)
    J3 = encode_prime([[0, 1, 0], [0, 0, 1], [0, 0, 0]], 2)
    assert analytics.distance(g22, 5, 5) == 0
    assert analytics.distance(g32, J3, 0) == 2
    assert analytics.distance(g22, m22.one, 0) is None
    assert all(analytics.class_diameter(g12, a) == 0 for a in range(12))
    assert analytics.class_diameter(g32, 0) == 2
    assert analytics.class_diameter(g22, m22.one) == 0
    assert analytics.ring_diameter(g32) == 2
    assert analytics.ring_diameter(g12) == 0
    assert analytics.class_girth(g22, 0) == 3
    assert all(analytics.class_girth(g12, a) is None for a in range(12))
    assert analytics.ring_girth(g12) is None
    assert analytics.ring_girth(g32) == 3
    assert analytics.eccentricity(g22, m22.one) == 0
    assert analytics.eccentricity(g32, 0) == 2


def test_product_diameter():
    g = commutation_graph(build_ring("M(2,GF(2))xM(3,GF(2))"))
    assert analytics.ring_diameter(g) == 2


def test_triangle_inequality_and_symmetry(m22):
    g = commutation_graph(m22)
    for members in g.component_members():
        D = analytics.component_distances(g, members)
        assert np.array_equal(D, D.T)
        k = len(members)
        for j in range(k):
            assert np.all(D <= D[:, [j]] + D[[j], :])
