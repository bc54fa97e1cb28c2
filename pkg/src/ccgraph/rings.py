"""Finite rings with a canonical integer encoding of their elements.

Encodings:

* ``Z(n)``: residue k has id k.
* ``GF(p^k)``: polynomial c_0 + c_1 t + ... has id sum(c_i p^i).
* ``M(n,F)``: row-major entries e_0..e_{n^2-1} (e_0 is entry (0,0)) have id
  sum(e_j |F|^j).
* ``A x B``: the pair (a, b) has id a + |A| b.

Every handle exposes scalar ``add``/``neg``/``mul`` on ints and numpy-vectorized
``add_many``/``neg_many``/``mul_many`` that broadcast like ufuncs.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from ccgraph.descriptor import (
    GaloisField,
    MatrixRing,
    ModularInt,
    Product,
    RingDescriptor,
    parse_ring_spec,
)

SIZE_GUARD = 2**20
# mul tables are materialized up to this many elements (8192**2 uint16 = 128 MiB)
TABLE_LIMIT = 8192
# target number of pair products per sweep block
BLOCK_PAIRS = 1 << 21


class SizeGuardError(ValueError):
    pass


def _poly_mulmod(a: list[int], b: list[int], modulus: Sequence[int], p: int) -> list[int]:
    k = len(modulus) - 1
    prod = [0] * (2 * k - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    for deg in range(len(prod) - 1, k - 1, -1):
        c = prod[deg]
        if c:
            for i in range(k + 1):
                prod[deg - k + i] = (prod[deg - k + i] - c * modulus[i]) % p
    return prod[:k]


def _poly_rem_is_zero(f: Sequence[int], g: Sequence[int], p: int) -> bool:
    """True iff monic g divides f over GF(p)."""
    r = list(f)
    dg = len(g) - 1
    for deg in range(len(r) - 1, dg - 1, -1):
        c = r[deg]
        if c:
            for i in range(dg + 1):
                r[deg - dg + i] = (r[deg - dg + i] - c * g[i]) % p
    return not any(r[:dg])


def smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree k over GF(p).

    Polynomials are coefficient tuples (c_0, ..., c_k) with c_k = 1 and are
    compared from the constant term upward.
    """
    if k == 1:
        return (0, 1)
    for low in itertools.product(range(p), repeat=k):
        f = low + (1,)
        if low[0] == 0:
            continue
        reducible = False
        for d in range(1, k // 2 + 1):
            for g_low in itertools.product(range(p), repeat=d):
                if _poly_rem_is_zero(f, g_low + (1,), p):
                    reducible = True
                    break
            if reducible:
                break
        if not reducible:
            return f
    raise AssertionError(f"no irreducible polynomial of degree {k} over GF({p})")


class FiniteField:
    """GF(p^k) arithmetic on integer ids, via log/antilog tables when k > 1."""

    def __init__(self, p: int, k: int = 1):
        self.p, self.k, self.q = p, k, p**k
        self.modulus = smallest_irreducible(p, k)
        self.powers = np.array([p**i for i in range(k)], dtype=np.int64)
        if k > 1:
            self._build_log_tables()

    def digits(self, a: int) -> list[int]:
        return [(a // self.p**i) % self.p for i in range(self.k)]

    def from_digits(self, ds: Sequence[int]) -> int:
        return sum(int(d) * self.p**i for i, d in enumerate(ds))

    def _slow_mul(self, a: int, b: int) -> int:
        return self.from_digits(_poly_mulmod(self.digits(a), self.digits(b), self.modulus, self.p))

    def _build_log_tables(self):
        q = self.q
        for g in range(2, q):
            exp = np.zeros(2 * (q - 1), dtype=np.int64)
            x = 1
            for e in range(q - 1):
                exp[e] = x
                x = self._slow_mul(x, g)
                if x == 1 and e < q - 2:
                    break
            else:
                exp[q - 1:] = exp[: q - 1]
                log = np.zeros(q, dtype=np.int64)
                log[exp[: q - 1]] = np.arange(q - 1)
                self.generator, self._exp, self._log = g, exp, log
                return
        raise AssertionError("multiplicative group is not cyclic?")

    # scalar ops
    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        return self.from_digits([(x + y) % self.p for x, y in zip(self.digits(a), self.digits(b))])

    def neg(self, a: int) -> int:
        if self.k == 1:
            return (-a) % self.p
        return self.from_digits([(-x) % self.p for x in self.digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a * b) % self.p
        if a == 0 or b == 0:
            return 0
        return int(self._exp[self._log[a] + self._log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in a field")
        if self.k == 1:
            return pow(a, self.p - 2, self.p)
        return int(self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)])

    # vectorized ops
    def add_v(self, a, b):
        if self.k == 1:
            return (a + b) % self.p
        if self.p == 2:
            return np.bitwise_xor(a, b)
        out = 0
        for pw in self.powers:
            out = out + ((a // pw + b // pw) % self.p) * pw
        return out

    def neg_v(self, a):
        if self.k == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        out = 0
        for pw in self.powers:
            out = out + ((-(a // pw)) % self.p) * pw
        return out

    def mul_v(self, a, b):
        if self.k == 1:
            return (a * b) % self.p
        a = np.asarray(a)
        b = np.asarray(b)
        out = self._exp[self._log[a] + self._log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def render(self, a: int) -> str:
        if self.k == 1:
            return str(a)
        terms = []
        for i, c in reversed(list(enumerate(self.digits(a)))):
            if not c:
                continue
            mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
            coef = str(c) if (c != 1 or i == 0) else ""
            terms.append(coef + mono)
        return "+".join(terms) if terms else "0"


@functools.lru_cache(maxsize=None)
def finite_field(p: int, k: int = 1) -> FiniteField:
    return FiniteField(p, k)


@dataclass(frozen=True)
class MatrixRep:
    """Square matrix over a field, entries stored row-major as field ids."""

    size: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != self.size * self.size:
            raise ValueError(f"{len(self.entries)} entries for a {self.size}x{self.size} matrix")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "MatrixRep":
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("matrix rows must form a square")
        return cls(n, tuple(int(x) for r in rows for x in r))

    def rows(self) -> list[list[int]]:
        n = self.size
        return [list(self.entries[i * n:(i + 1) * n]) for i in range(n)]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.size + j]


class RingHandle:
    """Base class for realized finite rings. Immutable after construction."""

    descriptor: RingDescriptor
    size: int
    zero = 0
    one: int

    @property
    def spec(self) -> str:
        return self.descriptor.render()

    @property
    def is_commutative_type(self) -> bool:
        return False

    def elements(self) -> np.ndarray:
        return np.arange(self.size, dtype=np.int64)

    def check(self, a: int) -> int:
        a = int(a)
        if not 0 <= a < self.size:
            raise IndexError(f"element id {a} out of range for {self.spec} (size {self.size})")
        return a

    # vectorized primitives, overridden by subclasses
    def _add_many(self, a, b):
        raise NotImplementedError

    def _neg_many(self, a):
        raise NotImplementedError

    def _mul_many(self, a, b):
        raise NotImplementedError

    def add_many(self, a, b):
        return self._add_many(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))

    def neg_many(self, a):
        return self._neg_many(np.asarray(a, dtype=np.int64))

    def mul_many(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        table = self.__dict__.get("table")
        if table is not None:
            return table[a, b].astype(np.int64)
        return self._mul_many(a, b)

    def add(self, a: int, b: int) -> int:
        return int(self.add_many(self.check(a), self.check(b)))

    def neg(self, a: int) -> int:
        return int(self.neg_many(self.check(a)))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_many(self.check(a), self.check(b)))

    def power(self, a: int, e: int) -> int:
        result, base = self.one, self.check(a)
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    @functools.cached_property
    def table(self) -> np.ndarray | None:
        """Full multiplication table (uint16/int32) when size <= TABLE_LIMIT."""
        if self.size > TABLE_LIMIT:
            return None
        dtype = np.uint16 if self.size <= 1 << 16 else np.int32
        out = np.empty((self.size, self.size), dtype=dtype)
        allv = self.elements()
        for rows in _row_chunks(self.size):
            out[rows] = self._mul_many(rows[:, None], allv[None, :])
        return out

    def render(self, a: int) -> str:
        raise NotImplementedError

    def to_literal(self, a: int):
        """JSON-compatible structured value of an element."""
        raise NotImplementedError

    def from_literal(self, value) -> int:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.spec} size={self.size}>"


def _row_chunks(size: int, pairs: int = BLOCK_PAIRS) -> Iterator[np.ndarray]:
    step = max(1, pairs // size)
    for start in range(0, size, step):
        yield np.arange(start, min(size, start + step), dtype=np.int64)


class ModularRing(RingHandle):
    def __init__(self, desc: ModularInt):
        self.descriptor = desc
        self.size = desc.n
        self.one = 1 % desc.n

    @property
    def is_commutative_type(self) -> bool:
        return True

    def _add_many(self, a, b):
        return (a + b) % self.size

    def _neg_many(self, a):
        return (-a) % self.size

    def _mul_many(self, a, b):
        return (a * b) % self.size

    def render(self, a: int) -> str:
        return str(int(a))

    def to_literal(self, a: int):
        return int(a)

    def from_literal(self, value) -> int:
        if not isinstance(value, int):
            raise ValueError(f"Z(n) literal must be an integer, got {value!r}")
        return value % self.size


class FieldRing(RingHandle):
    def __init__(self, desc: GaloisField):
        self.descriptor = desc
        self.field = finite_field(desc.p, desc.k)
        self.size = desc.q
        self.one = 1

    @property
    def is_commutative_type(self) -> bool:
        return True

    def _add_many(self, a, b):
        return self.field.add_v(a, b)

    def _neg_many(self, a):
        return self.field.neg_v(a)

    def _mul_many(self, a, b):
        return self.field.mul_v(a, b)

    def render(self, a: int) -> str:
        return self.field.render(int(a))

    def to_literal(self, a: int):
        return int(a)

    def from_literal(self, value) -> int:
        if not isinstance(value, int) or not 0 <= value < self.size:
            raise ValueError(f"GF literal must be an element id in [0, {self.size}), got {value!r}")
        return value


class MatrixRingHandle(RingHandle):
    def __init__(self, desc: MatrixRing):
        self.descriptor = desc
        self.n = desc.n
        self.field = finite_field(desc.base.p, desc.base.k)
        self.q = self.field.q
        self.size = desc.size
        self.radix = np.array([self.q**j for j in range(self.n * self.n)], dtype=np.int64)
        self.one = int(sum(self.radix[i * self.n + i] for i in range(self.n)))

    @functools.cached_property
    def entry_table(self) -> np.ndarray:
        ids = self.elements()
        return ((ids[:, None] // self.radix[None, :]) % self.q).astype(np.int64)

    def _entries(self, a):
        if self.size <= SIZE_GUARD:
            return self.entry_table[a]
        return (a[..., None] // self.radix) % self.q

    def _encode(self, entries) -> np.ndarray:
        return (entries * self.radix).sum(axis=-1)

    def _add_many(self, a, b):
        return self._encode(self.field.add_v(self._entries(a), self._entries(b)))

    def _neg_many(self, a):
        return self._encode(self.field.neg_v(self._entries(a)))

    def _mul_many(self, a, b):
        n, f = self.n, self.field
        A = self._entries(a)
        B = self._entries(b)
        out = 0
        for i in range(n):
            for j in range(n):
                acc = None
                for k in range(n):
                    if f.k == 1:
                        term = A[..., i * n + k] * B[..., k * n + j]
                        acc = term if acc is None else acc + term
                    else:
                        term = f.mul_v(A[..., i * n + k], B[..., k * n + j])
                        acc = term if acc is None else f.add_v(acc, term)
                if f.k == 1:
                    acc = acc % f.p
                out = out + acc * self.radix[i * n + j]
        return np.asarray(out, dtype=np.int64)

    def render(self, a: int) -> str:
        m = decode_matrix(self, a)
        return "[" + ",".join(
            "[" + ",".join(self.field.render(x) for x in row) + "]" for row in m.rows()
        ) + "]"

    def to_literal(self, a: int):
        return decode_matrix(self, a).rows()

    def from_literal(self, value) -> int:
        return encode_matrix(self, MatrixRep.from_rows(value))


class ProductRing(RingHandle):
    def __init__(self, desc: Product, left: RingHandle, right: RingHandle):
        self.descriptor = desc
        self.left, self.right = left, right
        self.size = left.size * right.size
        self.one = left.one + left.size * right.one

    @property
    def is_commutative_type(self) -> bool:
        return self.left.is_commutative_type and self.right.is_commutative_type

    def split(self, a):
        return a % self.left.size, a // self.left.size

    def join(self, a, b):
        return a + self.left.size * b

    def _add_many(self, a, b):
        (al, ar), (bl, br) = self.split(a), self.split(b)
        return self.join(self.left.add_many(al, bl), self.right.add_many(ar, br))

    def _neg_many(self, a):
        al, ar = self.split(a)
        return self.join(self.left.neg_many(al), self.right.neg_many(ar))

    def _mul_many(self, a, b):
        (al, ar), (bl, br) = self.split(a), self.split(b)
        return self.join(self.left.mul_many(al, bl), self.right.mul_many(ar, br))

    def render(self, a: int) -> str:
        al, ar = self.split(int(a))
        return f"({self.left.render(al)}, {self.right.render(ar)})"

    def to_literal(self, a: int):
        al, ar = self.split(int(a))
        return [self.left.to_literal(al), self.right.to_literal(ar)]

    def from_literal(self, value) -> int:
        if not isinstance(value, (list, tuple)) or len(value) != 2:
            raise ValueError("product literal must be a 2-element list [left, right]")
        return self.join(self.left.from_literal(value[0]), self.right.from_literal(value[1]))


def build_ring(desc: RingDescriptor | str, allow_large: bool = False) -> RingHandle:
    """Realize a descriptor (or spec string) as a ring handle.

    Raises SizeGuardError when |R| > SIZE_GUARD unless ``allow_large``.
    """
    if isinstance(desc, str):
        desc = parse_ring_spec(desc)
    if desc.size > SIZE_GUARD and not allow_large:
        raise SizeGuardError(
            f"{desc.render()} has {desc.size} elements (> {SIZE_GUARD}); pass allow_large to override"
        )
    return _build(desc)


@functools.lru_cache(maxsize=32)
def _build(desc: RingDescriptor) -> RingHandle:
    if isinstance(desc, ModularInt):
        return ModularRing(desc)
    if isinstance(desc, GaloisField):
        return FieldRing(desc)
    if isinstance(desc, MatrixRing):
        return MatrixRingHandle(desc)
    if isinstance(desc, Product):
        return ProductRing(desc, _build(desc.left), _build(desc.right))
    raise TypeError(f"not a ring descriptor: {desc!r}")


def encode_matrix(ring: MatrixRingHandle, m: MatrixRep) -> int:
    if not isinstance(ring, MatrixRingHandle):
        raise TypeError(f"{ring.spec} is not a matrix ring")
    if m.size != ring.n:
        raise ValueError(f"expected {ring.n}x{ring.n} matrix, got {m.size}x{m.size}")
    if any(not 0 <= e < ring.q for e in m.entries):
        raise ValueError(f"matrix entries must lie in [0, {ring.q})")
    return sum(int(e) * int(r) for e, r in zip(m.entries, ring.radix))


def decode_matrix(ring: MatrixRingHandle, a: int) -> MatrixRep:
    if not isinstance(ring, MatrixRingHandle):
        raise TypeError(f"{ring.spec} is not a matrix ring")
    a = ring.check(a)
    return MatrixRep(ring.n, tuple((a // ring.q**j) % ring.q for j in range(ring.n * ring.n)))


def pair_blocks(ring: RingHandle, pairs: int = BLOCK_PAIRS) -> Iterator[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Sweep R x R in row blocks.

    Yields ``(rows, P, Q)`` with ``P[i, d] = rows[i] * d`` and
    ``Q[i, d] = d * rows[i]`` for every d in R.
    """
    table = ring.table
    allv = ring.elements()
    for rows in _row_chunks(ring.size, pairs):
        if table is not None:
            P = table[rows].astype(np.int64)
            Q = table[:, rows].T.astype(np.int64)
        else:
            P = ring.mul_many(rows[:, None], allv[None, :])
            Q = ring.mul_many(allv[None, :], rows[:, None])
        yield rows, P, Q


def units(ring: RingHandle) -> frozenset[int]:
    """Elements with a right inverse; in a finite ring these are exactly the units."""
    found = []
    for rows, P, _ in pair_blocks(ring):
        found.append(rows[(P == ring.one).any(axis=1)])
    return frozenset(int(x) for x in np.concatenate(found))


def unit_inverses(ring: RingHandle) -> dict[int, int]:
    """Map unit -> inverse."""
    inv = {}
    for rows, P, _ in pair_blocks(ring):
        r, c = np.nonzero(P == ring.one)
        for i, d in zip(rows[r], c):
            inv[int(i)] = int(d)
    return inv


def _zero_divisor_mask(ring: RingHandle, side: str) -> np.ndarray:
    mask = np.zeros(ring.size, dtype=bool)
    for rows, P, Q in pair_blocks(ring):
        M = P if side == "left" else Q
        # killed by some nonzero element (column 0 is the zero element)
        mask[rows] = (M[:, 1:] == ring.zero).any(axis=1)
    return mask


@functools.lru_cache(maxsize=16)
def _zd_cached(ring: RingHandle, side: str) -> frozenset[int]:
    return frozenset(int(x) for x in np.nonzero(_zero_divisor_mask(ring, side))[0])


def left_zero_divisors(ring: RingHandle) -> frozenset[int]:
    """Z_l(R) = {a : r(a) != 0}."""
    return _zd_cached(ring, "left")


def right_zero_divisors(ring: RingHandle) -> frozenset[int]:
    """Z_r(R) = {a : l(a) != 0}."""
    return _zd_cached(ring, "right")


def is_left_zero_divisor(ring: RingHandle, a: int) -> bool:
    a = ring.check(a)
    return bool((ring.mul_many(a, ring.elements()[1:]) == ring.zero).any())


def is_right_zero_divisor(ring: RingHandle, a: int) -> bool:
    a = ring.check(a)
    return bool((ring.mul_many(ring.elements()[1:], a) == ring.zero).any())


def nilpotents(ring: RingHandle) -> frozenset[int]:
    """N(R), found by repeated squaring of every element."""
    x = ring.elements()
    for _ in range(max(1, int(np.ceil(np.log2(ring.size))) + 1)):
        x = ring.mul_many(x, x)
    return frozenset(int(a) for a in np.nonzero(x == ring.zero)[0])
