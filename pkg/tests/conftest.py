"""Independent oracles shared by the tests.

Nothing here reuses the library's arithmetic: matrices are multiplied as
plain nested lists mod p, and graphs are rebuilt from scalar pair loops.
"""

import itertools

import pytest

from ccgraph.rings import build_ring


def decode_prime(n, p, a):
    """Row-major digits base p, entry (0,0) least significant."""
    digits = []
    for _ in range(n * n):
        digits.append(a % p)
        a //= p
    return [digits[i * n:(i + 1) * n] for i in range(n)]


def encode_prime(rows, p):
    n = len(rows)
    return sum(rows[i][j] * p ** (i * n + j) for i in range(n) for j in range(n))


def matmul_prime(A, B, p):
    n = len(A)
    return [[sum(A[i][k] * B[k][j] for k in range(n)) % p for j in range(n)] for i in range(n)]


def matpow_prime(A, e, p):
    n = len(A)
    R = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(e):
        R = matmul_prime(R, A, p)
    return R


def brute_nilpotents(n, p):
    zero = [[0] * n for _ in range(n)]
    return {a for a in range(p ** (n * n)) if matpow_prime(decode_prime(n, p, a), n, p) == zero}


def brute_units(ring):
    out = set()
    for a in range(ring.size):
        if any(ring.mul(a, b) == ring.one for b in range(ring.size)):
            out.add(a)
    return out


def brute_edges(n, p):
    """{min, max} pairs with cd != dc, from nested-list products."""
    N = p ** (n * n)
    mats = [decode_prime(n, p, a) for a in range(N)]
    edges = set()
    for c, d in itertools.product(range(N), repeat=2):
        cd = encode_prime(matmul_prime(mats[c], mats[d], p), p)
        dc = encode_prime(matmul_prime(mats[d], mats[c], p), p)
        if cd != dc:
            edges.add((min(cd, dc), max(cd, dc)))
    return edges


def glnq_order(n, q):
    out = 1
    for i in range(n):
        out *= q**n - q**i
    return out


@pytest.fixture(scope="session")
def m22():
    return build_ring("M(2,GF(2))")


@pytest.fixture(scope="session")
def m32():
    return build_ring("M(3,GF(2))")


@pytest.fixture(scope="session")
def m23():
    return build_ring("M(2,GF(3))")


@pytest.fixture(scope="session")
def z12():
    return build_ring("Z(12)")


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
