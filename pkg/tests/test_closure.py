import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccgraph.closure import (
    CommutationGraph,
    Counterexample,
    build_commutation_graph,
    closure,
    commutation_graph,
    is_commutatively_closed,
    neighbors_one,
    one_step,
    stabilization_depth,
)
from ccgraph.rings import build_ring, nilpotents, units

from conftest import brute_edges, brute_nilpotents, encode_prime

E11 = encode_prime([[1, 0], [0, 0]], 2)
E12 = encode_prime([[0, 1], [0, 0]], 2)


def _edge_set(g):
    u, v = g.edges()
    return set(zip(u.tolist(), v.tolist()))


@pytest.mark.parametrize("n,p", [(2, 2), (2, 3)])
def test_graph_matches_pair_loop(n, p):
    g = build_commutation_graph(build_ring(f"M({n},GF({p}))"))
    assert _edge_set(g) == brute_edges(n, p)


def test_graph_shape(m22):
    g = commutation_graph(m22)
    assert g.edge_count == len(_edge_set(g))
    for a in range(g.size):
        nb = g.neighbors(a)
        assert a not in nb
        assert np.all(np.diff(nb) > 0)
        for b in nb.tolist():
            assert a in g.neighbors(b)
            assert g.adjacent(a, b)


def test_commutative_ring_has_no_edges(z12):
    g = build_commutation_graph(z12)
    assert g.edge_count == 0
    assert len(g.component_members()) == 12


def test_m22_examples(m22):
    g = commutation_graph(m22)
    assert g.adjacent(E12, 0)
    zero_class = g.component_of(0)
    assert np.array_equal(zero_class, g.component_members()[g.components[0]])
    assert len(zero_class) == 4
    assert set(zero_class.tolist()) == brute_nilpotents(2, 2)


@pytest.mark.parametrize("spec", ["M(2,GF(2))", "M(2,GF(3))", "Z(4)xM(2,GF(2))"])
def test_threads_give_identical_graphs(spec):
    ring = build_ring(spec)
    g1, g3 = build_commutation_graph(ring, 1), build_commutation_graph(ring, 3)
    assert np.array_equal(g1.indptr, g3.indptr) and np.array_equal(g1.indices, g3.indices)
    assert np.array_equal(g1.components, g3.components)


def test_from_edges_round_trip(m22):
    g = commutation_graph(m22)
    u, v = g.edges()
    h = CommutationGraph.from_edges(g.spec, g.size, v, u)
    assert g.same_adjacency(h)


# ---------------------------------------------------------------- neighbors_one

def test_neighbors_one_examples(z12, m22):
    for a in range(12):
        assert neighbors_one(z12, a) == {a}
    assert 0 in neighbors_one(m22, E12)
    assert neighbors_one(m22, m22.one) == {m22.one}
    assert neighbors_one(build_ring("M(2,GF(3))"), build_ring("M(2,GF(3))").one) == {build_ring("M(2,GF(3))").one}


def test_neighbors_one_brute_force(m22):
    for a in range(m22.size):
        expect = {m22.mul(d, c) for c, d in itertools.product(range(16), repeat=2) if m22.mul(c, d) == a}
        assert neighbors_one(m22, a) == expect


@pytest.mark.parametrize("spec", ["M(2,GF(2))", "M(3,GF(2))", "Z(4)xM(2,GF(2))"])
def test_neighbors_one_agrees_with_graph(spec):
    ring = build_ring(spec)
    g = commutation_graph(ring)
    for a in range(0, ring.size, max(1, ring.size // 128)):
        assert neighbors_one(ring, a) == {a} | set(g.neighbors(a).tolist())


# ---------------------------------------------------------------- closure

def test_closure_of_zero_is_nilpotent_set(m32):
    res = closure(m32, [0])
    assert res.members == brute_nilpotents(3, 2)
    assert len(res.members) == 64
    assert res.depth == 2


def test_closure_of_identity(m22, m23):
    for ring in (m22, m23):
        assert closure(ring, [ring.one]).members == {ring.one}


def test_closure_levels_are_bfs_and_ascending(m32):
    res = closure(m32, [0])
    assert res.level[0] == 0
    prev = frozenset()
    for i in range(res.depth + 1):
        cur = res.within(i)
        assert prev <= cur
        prev = cur
    assert prev == res.members


def test_levels_match_one_step_iteration(m32):
    res = closure(m32, [0])
    S = frozenset([0])
    for i in range(res.depth + 2):
        assert S == res.within(i)
        S = one_step(m32, S) | S


def test_product_closure_factors():
    ring = build_ring("Z(4)xM(2,GF(2))")
    A, B = ring.left, ring.right
    for x in range(ring.size):
        a, b = ring.split(x)
        want = {ring.join(p, q) for p in closure(A, [a]).members for q in closure(B, [b]).members}
        assert closure(ring, [x]).members == want


def test_empty_seed_rejected(m22):
    with pytest.raises(ValueError):
        closure(m22, [])


@settings(max_examples=60, deadline=None)
@given(st.sets(st.integers(0, 15), min_size=1, max_size=5), st.sets(st.integers(0, 15), max_size=5))
def test_closure_laws_m22(S, extra):
    ring = build_ring("M(2,GF(2))")
    cS = closure(ring, S).members
    assert closure(ring, cS).members == cS
    assert cS <= closure(ring, S | extra).members
    assert cS == frozenset().union(*(closure(ring, [s]).members for s in S))
    assert is_commutatively_closed(ring, cS) is None


# ---------------------------------------------------------------- closedness checker

def test_closed_examples(m22, m23):
    assert is_commutatively_closed(m23, nilpotents(m23)) is None
    shifted = {m22.sub(u, m22.one) for u in units(m22)}
    assert is_commutatively_closed(m22, shifted) is None


def test_counterexample(m22):
    ce = is_commutatively_closed(m22, {E12})
    assert isinstance(ce, Counterexample)
    assert m22.mul(ce.c, ce.d) == E12
    assert m22.mul(ce.d, ce.c) != E12
    assert (ce.c, ce.d) == (E11, E12)  # first in (c, d) order


def test_closedness_brute_force(m22):
    rng = np.random.default_rng(7)
    for _ in range(200):
        S = set(rng.choice(16, size=rng.integers(1, 8), replace=False).tolist())
        brute = all(m22.mul(d, c) in S for c in range(16) for d in range(16) if m22.mul(c, d) in S)
        assert (is_commutatively_closed(m22, S) is None) == brute


# ---------------------------------------------------------------- stabilization depth

def test_stabilization_depth(z12, m32):
    assert all(stabilization_depth(z12, a) == 0 for a in range(12))
    J3 = encode_prime([[0, 1, 0], [0, 0, 1], [0, 0, 0]], 2)
    assert stabilization_depth(m32, J3) == 2
