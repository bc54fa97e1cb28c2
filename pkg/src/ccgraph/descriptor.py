"""Ring descriptors and the textual ring-spec grammar.

Grammar (whitespace ignored)::

    ring    := factor ('x' factor)*          left-associative product
    factor  := 'Z(' int ')'
             | 'GF(' int ')' | 'GF(' int '^' int ')'
             | 'M(' int ',' field ')'
             | '(' ring ')'
    field   := 'GF(' ... ')'

``GF(q)`` accepts any prime power q; the canonical rendering is ``GF(p)`` or
``GF(p^k)``.  Right-nested products render with parentheses so that
``parse_ring_spec(render(d)) == d`` holds for every descriptor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


class RingSpecError(ValueError):
    """Syntax error in a ring spec; ``position`` is a 0-based offset into the text."""

    def __init__(self, message: str, text: str = "", position: int | None = None):
        self.text = text
        self.position = position
        if position is not None:
            message = f"{message} at position {position} in {text!r}"
        super().__init__(message)


class RingSemanticError(RingSpecError):
    """Well-formed spec that does not denote a supported ring (e.g. GF(6))."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_power(q: int) -> tuple[int, int] | None:
    """Return (p, k) with q == p**k, or None if q is not a prime power."""
    if q < 2:
        return None
    p = next(f for f in range(2, q + 1) if q % f == 0)
    if not is_prime(p):
        return None
    k = 0
    while q % p == 0:
        q //= p
        k += 1
    return (p, k) if q == 1 else None


@dataclass(frozen=True)
class ModularInt:
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise RingSemanticError(f"Z(n) needs n >= 2, got {self.n}")

    @property
    def size(self) -> int:
        return self.n

    def render(self) -> str:
        return f"Z({self.n})"


@dataclass(frozen=True)
class GaloisField:
    p: int
    k: int = 1

    def __post_init__(self):
        if not is_prime(self.p):
            raise RingSemanticError(f"GF characteristic {self.p} is not prime")
        if self.k < 1:
            raise RingSemanticError(f"GF degree must be >= 1, got {self.k}")

    @property
    def q(self) -> int:
        return self.p**self.k

    @property
    def size(self) -> int:
        return self.q

    def render(self) -> str:
        return f"GF({self.p})" if self.k == 1 else f"GF({self.p}^{self.k})"


@dataclass(frozen=True)
class MatrixRing:
    n: int
    base: GaloisField

    def __post_init__(self):
        if self.n < 1:
            raise RingSemanticError(f"matrix size must be >= 1, got {self.n}")
        if not isinstance(self.base, GaloisField):
            raise RingSemanticError("M(n, F) requires a field F = GF(q)")

    @property
    def size(self) -> int:
        return self.base.q ** (self.n * self.n)

    def render(self) -> str:
        return f"M({self.n},{self.base.render()})"


@dataclass(frozen=True)
class Product:
    left: "RingDescriptor"
    right: "RingDescriptor"

    @property
    def size(self) -> int:
        return self.left.size * self.right.size

    def factors(self) -> list["RingDescriptor"]:
        out = []
        for part in (self.left, self.right):
            out.extend(part.factors() if isinstance(part, Product) else [part])
        return out

    def render(self) -> str:
        right = self.right.render()
        if isinstance(self.right, Product):
            right = f"({right})"
        return f"{self.left.render()}x{right}"


RingDescriptor = Union[ModularInt, GaloisField, MatrixRing, Product]


def render(desc: RingDescriptor) -> str:
    return desc.render()


class _Parser:
    def __init__(self, text: str):
        self.text = text
        # (char, original offset) with whitespace dropped
        self.toks = [(c, i) for i, c in enumerate(text) if not c.isspace()]
        self.pos = 0

    def error(self, msg: str, cls=RingSpecError):
        offset = self.toks[self.pos][1] if self.pos < len(self.toks) else len(self.text)
        raise cls(msg, self.text, offset)

    def peek(self) -> str:
        return self.toks[self.pos][0] if self.pos < len(self.toks) else ""

    def expect(self, s: str):
        for ch in s:
            if self.peek() != ch:
                self.error(f"expected {s!r}")
            self.pos += 1

    def integer(self) -> int:
        start = self.pos
        while self.peek().isdigit():
            self.pos += 1
        if start == self.pos:
            self.error("expected integer")
        return int("".join(c for c, _ in self.toks[start:self.pos]))

    def ring(self) -> RingDescriptor:
        desc = self.factor()
        while self.peek() == "x":
            self.pos += 1
            desc = Product(desc, self.factor())
        return desc

    def factor(self) -> RingDescriptor:
        start = self.pos
        c = self.peek()
        try:
            if c == "Z":
                self.expect("Z(")
                n = self.integer()
                self.expect(")")
                return ModularInt(n)
            if c == "G":
                return self.field()
            if c == "M":
                self.expect("M(")
                n = self.integer()
                self.expect(",")
                if self.peek() != "G":
                    self.error("matrix base must be a field GF(q)", RingSemanticError)
                base = self.field()
                self.expect(")")
                return MatrixRing(n, base)
            if c == "(":
                self.pos += 1
                desc = self.ring()
                self.expect(")")
                return desc
        except RingSemanticError as exc:
            if exc.position is None:
                self.pos = start
                self.error(str(exc), RingSemanticError)
            raise
        self.error("expected Z(, GF(, M( or (")

    def field(self) -> GaloisField:
        start = self.pos
        self.expect("GF(")
        q = self.integer()
        k = None
        if self.peek() == "^":
            self.pos += 1
            k = self.integer()
        self.expect(")")
        if k is None:
            pk = prime_power(q)
            if pk is None:
                self.pos = start
                self.error(f"{q} is not a prime power", RingSemanticError)
            return GaloisField(*pk)
        if not is_prime(q):
            self.pos = start
            self.error(f"{q} is not prime in GF({q}^{k})", RingSemanticError)
        return GaloisField(q, k)


def parse_ring_spec(text: str) -> RingDescriptor:
    """Parse a ring spec such as ``"M(2,GF(4)) x Z(6)"``."""
    parser = _Parser(text)
    if not parser.toks:
        raise RingSpecError("empty ring spec", text, 0)
    desc = parser.ring()
    if parser.pos != len(parser.toks):
        parser.error("unexpected trailing input")
    return desc
