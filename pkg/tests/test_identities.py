import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccgraph.analytics import distance
from ccgraph.closure import CommutationGraph, commutation_graph
from ccgraph.identities import (
    NcPoly,
    association_along_path,
    block_identity,
    block_mul,
    closure_identity_violations,
    diag2,
    find_relation_witnesses,
    ncpoly_mul,
    verify_closure_identities,
    verify_free_algebra_chain,
    verify_stable_association,
)
from ccgraph.rings import build_ring

from conftest import encode_prime

x, y = NcPoly.var("x"), NcPoly.var("y")


# ---------------------------------------------------------------- stable association

def test_zero_pair(m22):
    assert verify_stable_association(m22, 0, 0)


@pytest.mark.parametrize("spec,pairs", [("Z(6)", 36), ("M(2,GF(2))", 256), ("Z(4)xGF(2)", 64)])
def test_stable_association_all_pairs(spec, pairs):
    ring = build_ring(spec)
    checked = 0
    for a, b in itertools.product(range(ring.size), repeat=2):
        assert verify_stable_association(ring, a, b)
        checked += 1
    assert checked == pairs


def test_block_algebra(m22):
    I = block_identity(m22)
    A = ((3, 5), (7, 11))
    assert block_mul(m22, I, A) == A == block_mul(m22, A, I)
    assert diag2(m22, m22.one) == I


# ---------------------------------------------------------------- closure identities

@pytest.mark.parametrize("spec", ["Z(12)", "M(2,GF(2))", "M(2,GF(3))", "Z(4)xM(2,GF(2))"])
def test_closure_identities(spec):
    ring = build_ring(spec)
    assert closure_identity_violations(ring) == []
    assert verify_closure_identities(ring)


def test_closure_identity_detector_fires(m22):
    """A graph with no edges must make the noncommutative identities fail."""
    empty = CommutationGraph.from_edges(m22.spec, m22.size, np.array([], dtype=np.int64), np.array([], dtype=np.int64))
    assert closure_identity_violations(m22, empty)


# ---------------------------------------------------------------- relation witnesses and path association

def _check_witness(ring, a, b, n, w):
    xx, yy = w
    m = ring.mul
    assert m(a, xx) == m(xx, b) and m(yy, a) == m(b, yy)
    assert m(xx, yy) == ring.power(a, n) and m(yy, xx) == ring.power(b, n)


def test_relation_witness_examples(m22):
    for a in range(m22.size):
        w = find_relation_witnesses(m22, a, a, 1)
        assert w is not None
        _check_witness(m22, a, a, 1, w)
    E12 = encode_prime([[0, 1], [0, 0]], 2)
    w = find_relation_witnesses(m22, E12, 0, 1)
    assert w is not None
    _check_witness(m22, E12, 0, 1, w)


def test_no_witness_across_classes(m22):
    assert find_relation_witnesses(m22, m22.one, 0, 1) is None


def test_association_along_paths(m22):
    g = commutation_graph(m22)
    one, sub = m22.one, m22.sub
    for a, b in itertools.product(range(16), repeat=2):
        if distance(g, a, b) is None:
            continue
        # BFS path a -> b
        prev, frontier = {a: None}, [a]
        while b not in prev:
            nxt = []
            for u in frontier:
                for v in g.neighbors(u).tolist():
                    if v not in prev:
                        prev[v] = u
                        nxt.append(v)
            frontier = nxt
        path, cur = [], b
        while cur is not None:
            path.append(cur)
            cur = prev[cur]
        path.reverse()
        P, Q = association_along_path(m22, path)
        lhs = block_mul(m22, block_mul(m22, P, diag2(m22, sub(one, a))), Q)
        assert lhs == diag2(m22, sub(one, b))


# ---------------------------------------------------------------- free algebra

def test_ncpoly_examples():
    assert ncpoly_mul(x, y) == NcPoly({"xy": 1})
    assert (1 + y * x) * x == NcPoly({"x": 1, "yxx": 1})
    assert (x + y) * (x - y) == NcPoly({"xx": 1, "xy": -1, "yx": 1, "yy": -1})
    assert (x + y) * (x - y) != x * x - y * y
    assert repr(x - 2 * y * x + 3) == "3 + x - 2yx"
    assert NcPoly({"x": 0}).terms == {}
    assert (x * x * y).degree == 3


def test_ncpoly_rejects_long_name():
    with pytest.raises(ValueError):
        NcPoly.var("xy")


_words = st.text(alphabet="xy", max_size=3)
_polys = st.dictionaries(_words, st.integers(-3, 3), max_size=4).map(NcPoly)


@settings(max_examples=150, deadline=None)
@given(_polys, _polys, _polys)
def test_ncpoly_ring_laws(p, q, r):
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert (p + q) * r == p * r + q * r
    assert p + q == q + p
    assert p - p == 0
    assert all(c != 0 for c in (p * q).terms.values())


@pytest.mark.parametrize("l", range(1, 11))
def test_free_algebra_chain(l):
    steps = verify_free_algebra_chain(l)
    assert len(steps) == l
    assert steps[0].left == x + y * x**l
    assert steps[-1].right == x + x**l * y
    for s, t in zip(steps, steps[1:]):
        assert s.right == t.left
    for s in steps:
        assert s.left == s.factor * x and s.right == x * s.factor


def test_chain_l1_and_l3():
    (step,) = verify_free_algebra_chain(1)
    assert step.left == x + y * x and step.right == x + x * y
    assert verify_free_algebra_chain(3)[-1].right == x + x**3 * y


def test_chain_rejects_zero():
    with pytest.raises(ValueError):
        verify_free_algebra_chain(0)
