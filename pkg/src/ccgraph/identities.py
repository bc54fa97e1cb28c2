"""Explicit algebraic identities behind closure constructions.

* 2x2 matrices over a ring that carry diag(1+xy, 1) to diag(1+yx, 1);
* the one-step identities a ~1 a(1+b) (b in l(a)), a(1+ba) ~1 a(1+ab),
  xb = 0 => xy ~1 (y+b)x;
* a word-based free algebra over Z, used to check the factorization chain
  from x + y x^l to x + x^l y.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ccgraph.closure import CommutationGraph, commutation_graph, factor_pairs
from ccgraph.rings import RingHandle

Block2 = tuple[tuple[int, int], tuple[int, int]]

# quantified domains up to this many tuples are checked exhaustively
EXHAUSTIVE_LIMIT = 10**6


def block_mul(ring: RingHandle, A: Block2, B: Block2) -> Block2:
    (a, b), (c, d) = A
    (e, f), (g, h) = B
    m, s = ring.mul, ring.add
    return (
        (s(m(a, e), m(b, g)), s(m(a, f), m(b, h))),
        (s(m(c, e), m(d, g)), s(m(c, f), m(d, h))),
    )


def block_identity(ring: RingHandle) -> Block2:
    return ((ring.one, 0), (0, ring.one))


def diag2(ring: RingHandle, a: int) -> Block2:
    return ((a, 0), (0, ring.one))


def association_matrices(ring: RingHandle, x: int, y: int) -> tuple[Block2, Block2]:
    """P, Q with P diag(1+xy, 1) Q = diag(1+yx, 1), each built as a product of invertible factors."""
    neg, one = ring.neg, ring.one
    P = block_mul(ring, ((neg(y), neg(one)), (one, 0)), ((one, x), (0, one)))
    Q = block_mul(ring, ((one, 0), (neg(y), one)), ((x, one), (neg(one), 0)))
    return P, Q


def _factor_inverses(ring: RingHandle, x: int, y: int) -> list[tuple[Block2, Block2]]:
    neg, one = ring.neg, ring.one
    return [
        (((neg(y), neg(one)), (one, 0)), ((0, one), (neg(one), neg(y)))),
        (((one, x), (0, one)), ((one, neg(x)), (0, one))),
        (((one, 0), (neg(y), one)), ((one, 0), (y, one))),
        (((x, one), (neg(one), 0)), ((0, neg(one)), (one, x))),
    ]


def verify_stable_association(ring: RingHandle, x: int, y: int) -> bool:
    I = block_identity(ring)
    for F, G in _factor_inverses(ring, x, y):
        if block_mul(ring, F, G) != I or block_mul(ring, G, F) != I:
            return False
    P, Q = association_matrices(ring, x, y)
    xy, yx = ring.mul(x, y), ring.mul(y, x)
    lhs = block_mul(ring, block_mul(ring, P, diag2(ring, ring.add(ring.one, xy))), Q)
    return lhs == diag2(ring, ring.add(ring.one, yx))


def _domain(size: int, arity: int, samples: int, rng: np.random.Generator) -> tuple[np.ndarray, ...]:
    """Columns of every tuple in R^arity, or of ``samples`` seeded random tuples."""
    if size**arity <= EXHAUSTIVE_LIMIT:
        grids = np.meshgrid(*(np.arange(size, dtype=np.int64),) * arity, indexing="ij")
        return tuple(g.ravel() for g in grids)
    return tuple(rng.integers(0, size, samples, dtype=np.int64) for _ in range(arity))


def _related(graph: CommutationGraph, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise a ~1 b (equal or adjacent)."""
    u, v = graph.edges()
    keys = u * graph.size + v
    probe = np.minimum(a, b) * graph.size + np.maximum(a, b)
    return (a == b) | np.isin(probe, keys)


def closure_identity_violations(
    ring: RingHandle, graph: CommutationGraph | None = None, samples: int = 10**4, seed: int = 0
) -> list[tuple[str, tuple[int, ...]]]:
    """Every failure of the one-step closure identities (empty list if none)."""
    graph = graph if graph is not None else commutation_graph(ring)
    rng = np.random.default_rng(seed)
    m, s = ring.mul_many, ring.add_many
    one = ring.one
    bad = []

    def record(name, mask, *cols):
        for i in np.nonzero(mask)[0]:
            bad.append((name, tuple(int(c[i]) for c in cols)))

    a, b = _domain(ring.size, 2, samples, rng)
    record("left-annihilator", (m(b, a) == 0) & ~_related(graph, a, m(a, s(one, b))), a, b)
    record("right-annihilator", (m(a, b) == 0) & ~_related(graph, a, m(s(one, b), a)), a, b)
    record("a(1+ba)~a(1+ab)", ~_related(graph, m(a, s(one, m(b, a))), m(a, s(one, m(a, b)))), a, b)

    x, y, b = _domain(ring.size, 3, samples, rng)
    xy = m(x, y)
    record("xb=0", (m(x, b) == 0) & ~_related(graph, xy, m(s(y, b), x)), x, y, b)
    # same triple read as (x, y, c): cy = 0 => xy ~1 y(x+c)
    record("cy=0", (m(b, y) == 0) & ~_related(graph, xy, m(y, s(x, b))), x, y, b)
    return bad


def verify_closure_identities(ring: RingHandle, graph: CommutationGraph | None = None, seed: int = 0) -> bool:
    return not closure_identity_violations(ring, graph, seed=seed)


def find_relation_witnesses(ring: RingHandle, a: int, b: int, n: int) -> tuple[int, int] | None:
    """Exhaustive search for x, y with ax = xb, ya = by, a^n = xy, b^n = yx."""
    allv = ring.elements()
    xs = allv[ring.mul_many(a, allv) == ring.mul_many(allv, b)]
    ys = allv[ring.mul_many(allv, a) == ring.mul_many(b, allv)]
    an, bn = ring.power(a, n), ring.power(b, n)
    XY = ring.mul_many(xs[:, None], ys[None, :])
    YX = ring.mul_many(ys[None, :], xs[:, None])
    hits = np.argwhere((XY == an) & (YX == bn))
    if len(hits) == 0:
        return None
    i, j = hits[0]
    return int(xs[i]), int(ys[j])


def association_along_path(ring: RingHandle, path: list[int]) -> tuple[Block2, Block2] | None:
    """Compose per-edge association matrices along a graph path.

    For each step u -> v pick c, d with cd = u, dc = v; with x = -c, y = d the
    pair (P, Q) carries diag(1-u, 1) to diag(1-v, 1). Returns the composite
    (P, Q) with P diag(1-path[0], 1) Q = diag(1-path[-1], 1), or None if some
    step has no factorization witness.
    """
    P_tot = Q_tot = block_identity(ring)
    for u, v in zip(path, path[1:]):
        cs, ds = factor_pairs(ring, u)
        hit = np.nonzero(ring.mul_many(ds, cs) == v)[0]
        if len(hit) == 0:
            return None
        c, d = int(cs[hit[0]]), int(ds[hit[0]])
        P, Q = association_matrices(ring, ring.neg(c), d)
        P_tot = block_mul(ring, P, P_tot)
        Q_tot = block_mul(ring, Q_tot, Q)
    return P_tot, Q_tot


class NcPoly:
    """Polynomial in noncommuting letters with integer coefficients.

    Terms map words (strings of single-letter variables; "" is 1) to nonzero ints.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[str, int] | None = None):
        self.terms = {w: c for w, c in (terms or {}).items() if c}

    @classmethod
    def var(cls, name: str) -> "NcPoly":
        if len(name) != 1:
            raise ValueError("variables are single letters")
        return cls({name: 1})

    @classmethod
    def const(cls, c: int) -> "NcPoly":
        return cls({"": c})

    @staticmethod
    def _coerce(other) -> "NcPoly":
        return other if isinstance(other, NcPoly) else NcPoly.const(other)

    def __add__(self, other) -> "NcPoly":
        other = self._coerce(other)
        out = defaultdict(int, self.terms)
        for w, c in other.terms.items():
            out[w] += c
        return NcPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "NcPoly":
        return NcPoly({w: -c for w, c in self.terms.items()})

    def __sub__(self, other) -> "NcPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "NcPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "NcPoly":
        other = self._coerce(other)
        out: dict[str, int] = defaultdict(int)
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                out[w1 + w2] += c1 * c2
        return NcPoly(out)

    def __rmul__(self, other) -> "NcPoly":
        return self._coerce(other) * self

    def __pow__(self, e: int) -> "NcPoly":
        out = NcPoly.const(1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = NcPoly.const(other)
        return isinstance(other, NcPoly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    @property
    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=-1)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for w in sorted(self.terms, key=lambda w: (len(w), w)):
            c = self.terms[w]
            if not w:
                head = str(abs(c))
            else:
                head = w if abs(c) == 1 else f"{abs(c)}{w}"
            parts.append(("- " if c < 0 else "+ ") + head)
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


def ncpoly_mul(p: NcPoly, q: NcPoly) -> NcPoly:
    return p * q


@dataclass(frozen=True)
class ChainStep:
    left: NcPoly
    right: NcPoly
    factor: NcPoly  # left = factor * x, right = x * factor


def verify_free_algebra_chain(l: int) -> list[ChainStep]:
    """The l one-step moves from x + y x^l to x + x^l y in Z<x, y>.

    Step i: x + x^(i-1) y x^(l-i+1) = (1 + x^(i-1) y x^(l-i)) x
            ~1 x (1 + x^(i-1) y x^(l-i)) = x + x^i y x^(l-i).
    Raises AssertionError if any expansion disagrees.
    """
    if l < 1:
        raise ValueError(f"chain length must be >= 1, got {l}")
    x, y = NcPoly.var("x"), NcPoly.var("y")
    steps = []
    current = x + y * x**l
    for i in range(1, l + 1):
        f = 1 + x ** (i - 1) * y * x ** (l - i)
        left = f * x
        right = x * f
        expected_left = x + x ** (i - 1) * y * x ** (l - i + 1)
        expected_right = x + x**i * y * x ** (l - i)
        if left != current or left != expected_left or right != expected_right:
            raise AssertionError(f"chain step {i} of {l} does not expand as claimed")
        steps.append(ChainStep(left, right, f))
        current = right
    if current != x + x**l * y:
        raise AssertionError("chain does not end at x + x^l y")
    return steps
