"""Exact linear algebra over GF(q) for small square matrices.

Matrices are MatrixRep values whose entries are field ids of a FiniteField.
All routines use only field operations, so they are valid in every
characteristic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from ccgraph.rings import FiniteField, MatrixRep

Rows = list[list[int]]


class NotNilpotentError(ValueError):
    pass


def identity(n: int) -> MatrixRep:
    return MatrixRep(n, tuple(int(i == j) for i in range(n) for j in range(n)))


def zeros(n: int) -> MatrixRep:
    return MatrixRep(n, (0,) * (n * n))


def _mul_rows(F: FiniteField, A: Rows, B: Rows) -> Rows:
    inner = len(B)
    cols = len(B[0]) if B else 0
    out = []
    for row in A:
        out_row = []
        for j in range(cols):
            acc = 0
            for k in range(inner):
                if row[k] and B[k][j]:
                    acc = F.add(acc, F.mul(row[k], B[k][j]))
            out_row.append(acc)
        out.append(out_row)
    return out


def mat_mul(F: FiniteField, A: MatrixRep, B: MatrixRep) -> MatrixRep:
    return MatrixRep.from_rows(_mul_rows(F, A.rows(), B.rows()))


def mat_add(F: FiniteField, A: MatrixRep, B: MatrixRep) -> MatrixRep:
    return MatrixRep(A.size, tuple(F.add(x, y) for x, y in zip(A.entries, B.entries)))


def mat_pow(F: FiniteField, A: MatrixRep, e: int) -> MatrixRep:
    result, base = identity(A.size), A
    while e:
        if e & 1:
            result = mat_mul(F, result, base)
        base = mat_mul(F, base, base)
        e >>= 1
    return result


def trace(F: FiniteField, A: MatrixRep) -> int:
    acc = 0
    for i in range(A.size):
        acc = F.add(acc, A[i, i])
    return acc


def block_diag(*blocks: MatrixRep) -> MatrixRep:
    n = sum(b.size for b in blocks)
    rows = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i, r in enumerate(b.rows()):
            rows[off + i][off:off + b.size] = r
        off += b.size
    return MatrixRep.from_rows(rows)


def jordan_block(l: int, F: FiniteField | None = None) -> MatrixRep:
    """l x l nilpotent Jordan block: ones on the superdiagonal. J_1 is the 1x1 zero."""
    if l < 1:
        raise ValueError(f"Jordan block size must be >= 1, got {l}")
    return MatrixRep(l, tuple(int(j == i + 1) for i in range(l) for j in range(l)))


def rref(F: FiniteField, rows: Rows) -> tuple[Rows, list[int]]:
    """Reduced row echelon form and pivot columns."""
    M = [list(r) for r in rows]
    if not M:
        return M, []
    ncols = len(M[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = F.inv(M[r][c])
        M[r] = [F.mul(inv, x) for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M, pivots


def rank(F: FiniteField, A: MatrixRep | Rows) -> int:
    rows = A.rows() if isinstance(A, MatrixRep) else A
    return len(rref(F, rows)[1])


def kernel_basis(F: FiniteField, A: MatrixRep) -> list[list[int]]:
    """Basis (as column vectors) of {v : Av = 0}."""
    R, pivots = rref(F, A.rows())
    n = A.size
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for row, p in zip(R, pivots):
            v[p] = F.neg(row[f])
        basis.append(v)
    return basis


def image_basis(F: FiniteField, A: MatrixRep) -> list[list[int]]:
    """Basis of the column space of A, chosen among A's own columns."""
    _, pivots = rref(F, A.rows())
    cols = list(zip(*A.rows()))
    return [list(cols[p]) for p in pivots]


def from_columns(cols: Sequence[Sequence[int]]) -> MatrixRep:
    return MatrixRep.from_rows([list(r) for r in zip(*cols)])


def inverse(F: FiniteField, A: MatrixRep) -> MatrixRep:
    n = A.size
    aug = [row + [int(i == j) for j in range(n)] for i, row in enumerate(A.rows())]
    R, pivots = rref(F, aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return MatrixRep.from_rows([r[n:] for r in R])


def is_invertible(F: FiniteField, A: MatrixRep) -> bool:
    return rank(F, A) == A.size


def nilpotency_index(F: FiniteField, A: MatrixRep) -> int | None:
    """Least k >= 1 with A^k = 0 (the zero matrix has index 1), or None."""
    P = A
    for k in range(1, A.size + 1):
        if not any(P.entries):
            return k
        P = mat_mul(F, P, A)
    return None


def rank_sequence(F: FiniteField, A: MatrixRep) -> list[int]:
    """[rank(A^0), rank(A^1), ..., rank(A^n)]."""
    seq = [A.size]
    P = identity(A.size)
    for _ in range(A.size):
        P = mat_mul(F, P, A)
        seq.append(rank(F, P))
    return seq


@dataclass(frozen=True)
class JordanPartition:
    blocks: tuple[int, ...]

    @property
    def size(self) -> int:
        return sum(self.blocks)

    @property
    def index(self) -> int:
        return self.blocks[0] if self.blocks else 0


def jordan_partition(F: FiniteField, A: MatrixRep) -> JordanPartition:
    """Block sizes of the Jordan form of a nilpotent A, from ranks of its powers.

    #blocks of size >= k is r_{k-1} - r_k.
    """
    r = rank_sequence(F, A)
    if r[-1] != 0:
        raise NotNilpotentError("jordan_partition needs a nilpotent matrix")
    at_least = [r[k - 1] - r[k] for k in range(1, len(r))]
    blocks = []
    for k in range(len(at_least), 0, -1):
        exactly = at_least[k - 1] - (at_least[k] if k < len(at_least) else 0)
        blocks.extend([k] * exactly)
    return JordanPartition(tuple(blocks))


def jordan_form(p: JordanPartition) -> MatrixRep:
    return block_diag(*(jordan_block(b) for b in p.blocks))


@dataclass(frozen=True)
class CharPoly:
    """Monic characteristic polynomial; ``coefficients[i]`` multiplies t^i."""

    coefficients: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def render(self, F: FiniteField) -> str:
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coefficients[i]
            if not c:
                continue
            mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
            coef = F.render(c)
            if mono and c == 1:
                coef = ""
            elif mono and "+" in coef:
                coef = f"({coef})"
            terms.append(coef + mono)
        return " + ".join(terms) if terms else "0"


def char_poly(F: FiniteField, A: MatrixRep) -> CharPoly:
    """det(tI - A) by the division-free Berkowitz recursion."""
    rows = A.rows()
    n = A.size
    # vec holds coefficients of the char poly of the trailing principal
    # submatrix, highest degree first
    vec = [1]
    for k in range(n - 1, -1, -1):
        a = rows[k][k]
        R = rows[k][k + 1:]
        C = [rows[i][k] for i in range(k + 1, n)]
        sub = [r[k + 1:] for r in rows[k + 1:]]
        m = n - k
        # first column of the Toeplitz matrix: 1, -a, -R C, -R sub C, ...
        col = [1, F.neg(a)]
        v = C
        for _ in range(m - 1):
            acc = 0
            for x, y in zip(R, v):
                acc = F.add(acc, F.mul(x, y))
            col.append(F.neg(acc))
            v = [sum_f(F, (F.mul(s, y) for s, y in zip(srow, v))) for srow in sub]
        col = col[: m + 1]
        new = []
        for i in range(m + 1):
            acc = 0
            for j in range(len(vec)):
                if i - j >= 0 and i - j < len(col):
                    acc = F.add(acc, F.mul(col[i - j], vec[j]))
            new.append(acc)
        vec = new
    return CharPoly(tuple(reversed(vec)))


def sum_f(F: FiniteField, xs) -> int:
    acc = 0
    for x in xs:
        acc = F.add(acc, x)
    return acc


@dataclass(frozen=True)
class FittingDecomposition:
    """P^-1 A P = diag(U, N) with U invertible (size r) and N nilpotent (size n - r).

    ``invertible_part`` / ``nilpotent_part`` are None when that block is empty.
    """

    basis_change: MatrixRep
    invertible_part: MatrixRep | None
    nilpotent_part: MatrixRep | None

    @property
    def invertible_size(self) -> int:
        return self.invertible_part.size if self.invertible_part is not None else 0


def _sub_block(M: MatrixRep, start: int, stop: int) -> MatrixRep | None:
    if stop <= start:
        return None
    return MatrixRep.from_rows([r[start:stop] for r in M.rows()[start:stop]])


def fitting_decomposition(F: FiniteField, A: MatrixRep) -> FittingDecomposition:
    n = A.size
    An = mat_pow(F, A, n)
    img = image_basis(F, An)
    ker = kernel_basis(F, An)
    P = from_columns(img + ker)
    B = mat_mul(F, mat_mul(F, inverse(F, P), A), P)
    r = len(img)
    return FittingDecomposition(P, _sub_block(B, 0, r), _sub_block(B, r, n))


def triangularize_nilpotent(F: FiniteField, A: MatrixRep) -> tuple[MatrixRep, MatrixRep]:
    """(P, U) with P^-1 A P = U strictly upper triangular, for nilpotent A.

    Uses the flag ker A subset ker A^2 subset ... : listing bases of successive
    kernels first makes A map each basis vector into the span of earlier ones.
    """
    n = A.size
    if nilpotency_index(F, A) is None:
        raise NotNilpotentError("only nilpotent matrices are similar to strictly upper triangular ones")
    basis: list[list[int]] = []
    P = identity(n)
    for k in range(1, n + 1):
        P = mat_mul(F, P, A) if k > 1 else A
        for v in kernel_basis(F, P):
            if rank(F, basis + [v]) > len(basis):
                basis.append(v)
        if len(basis) == n:
            break
    Pm = from_columns(basis)
    U = mat_mul(F, mat_mul(F, inverse(F, Pm), A), Pm)
    return Pm, U


def is_strictly_upper(A: MatrixRep) -> bool:
    return all(A[i, j] == 0 for i in range(A.size) for j in range(i + 1))


def general_linear_group(F: FiniteField, n: int, limit: int = 10**6):
    """All invertible n x n matrices, by brute force (refuses above ``limit`` candidates)."""
    if F.q ** (n * n) > limit:
        raise ValueError(f"GL({n},{F.q}) brute force exceeds {limit} candidates")
    for entries in itertools.product(range(F.q), repeat=n * n):
        M = MatrixRep(n, entries)
        if is_invertible(F, M):
            yield M


def are_similar(F: FiniteField, A: MatrixRep, B: MatrixRep) -> bool:
    """Similarity test: Jordan partitions for nilpotents, else brute force over GL."""
    if A.size != B.size:
        return False
    if nilpotency_index(F, A) is not None or nilpotency_index(F, B) is not None:
        if nilpotency_index(F, A) is None or nilpotency_index(F, B) is None:
            return False
        return jordan_partition(F, A) == jordan_partition(F, B)
    for P in general_linear_group(F, A.size):
        if mat_mul(F, P, A) == mat_mul(F, B, P):
            return True
    return False
