"""Invariant sweeps over small rings (the ``properties`` suite).

Each sweep cross-checks the graph route against a direct route (factor
enumeration, linear algebra) and is exhaustive while the quantified domain
has at most 10^6 tuples, seeded-sampled otherwise.
"""

from __future__ import annotations

import math

import numpy as np

from ccgraph import analytics, linalg
from ccgraph.closure import (
    CommutationGraph,
    bfs_levels,
    closure,
    commutation_graph,
    factor_pairs,
    is_commutatively_closed,
)
from ccgraph.descriptor import GaloisField, MatrixRing, parse_ring_spec
from ccgraph.rings import MatrixRingHandle, RingHandle, build_ring, decode_matrix, encode_matrix, finite_field, unit_inverses
from ccgraph.verify import (
    SAMPLES,
    CheckResult,
    _rng,
    _timed,
    _witness,
    check_level_nilpotency,
    check_stabilization_bounds,
    nilpotent_oracle,
)

LIMIT = 10**6


def direct_neighbor_sets(ring: RingHandle) -> list[frozenset[int]]:
    """{a}_1 for every a, from factorizations rather than from the graph."""
    out = []
    for a in range(ring.size):
        c, d = factor_pairs(ring, a)
        out.append(frozenset(np.unique(ring.mul_many(d, c)).tolist()))
    return out


def _distance_lookup(g: CommutationGraph):
    """Closure d(a, b) backed by per-component distance matrices (None across components)."""
    local = np.zeros(g.size, dtype=np.int64)
    mats = {}
    for label, comp in enumerate(g.component_members()):
        local[comp] = np.arange(len(comp))
        mats[label] = analytics.component_distances(g, comp) if len(comp) > 1 else np.zeros((1, 1), np.int64)

    def d(a: int, b: int) -> int | None:
        ca, cb = g.components[a], g.components[b]
        if ca != cb:
            return None
        return int(mats[ca][local[a], local[b]])

    return d, mats


def _pairs_in_components(g: CommutationGraph, rng, limit: int = LIMIT, samples: int = SAMPLES):
    comps = [c for c in g.component_members() if len(c) > 1]
    total = sum(len(c) ** 2 for c in comps)
    if total <= limit:
        for c in comps:
            for a in c.tolist():
                for b in c.tolist():
                    yield a, b
        return
    sizes = np.array([len(c) ** 2 for c in comps], dtype=float)
    picks = rng.choice(len(comps), size=samples, p=sizes / sizes.sum())
    for k in picks.tolist():
        c = comps[k]
        a, b = rng.choice(c, 2)
        yield int(a), int(b)


def check_sim1_symmetry(spec: str, threads: int = 1) -> CheckResult:
    def body():
        ring = build_ring(spec)
        g = commutation_graph(ring, threads)
        N1 = direct_neighbor_sets(ring)
        bad = []
        for a in range(ring.size):
            if a not in N1[a] or N1[a] != frozenset(g.neighbors(a).tolist()) | {a}:
                bad.append(a)
                continue
            if any(a not in N1[b] for b in N1[a]):
                bad.append(a)
        return (not bad, "reflexive, symmetric, equal to graph adjacency", f"{len(bad)} violations",
                _witness(ring, bad))

    return _timed("sim1_symmetry", spec, body)


def check_closure_component(spec: str, threads: int = 1) -> CheckResult:
    """Closure by iterating the one-step operator equals the graph component; levels agree."""

    def body():
        ring = build_ring(spec)
        g = commutation_graph(ring, threads)
        N1 = direct_neighbor_sets(ring)
        bad = []
        for a in range(ring.size):
            res = closure(ring, [a], g)
            S = frozenset([a])
            i = 0
            while True:
                if S != res.within(i):
                    bad.append(a)
                    break
                nxt = S.union(*(N1[x] for x in S))
                if nxt == S:
                    break
                S, i = nxt, i + 1
            if S != frozenset(g.component_of(a).tolist()):
                bad.append(a)
        return (not bad, "one-step iteration = BFS levels = component", f"{len(bad)} violations",
                _witness(ring, sorted(set(bad))))

    return _timed("closure_component", spec, body)


def check_closure_laws(spec: str, seed: int, threads: int = 1) -> CheckResult:
    """Idempotence, monotonicity, union law, and closedness of closures on random seed sets."""

    def body():
        ring = build_ring(spec)
        g = commutation_graph(ring, threads)
        rng = _rng(seed, "closure_laws", spec)
        bad = []
        trials = 20
        for t in range(trials):
            k = int(rng.integers(1, min(6, ring.size) + 1))
            S = set(rng.choice(ring.size, k, replace=False).tolist())
            T = S | set(rng.choice(ring.size, 2).tolist())
            cS = closure(ring, S, g).members
            if closure(ring, cS, g).members != cS:
                bad.append(("idempotent", sorted(S)))
            if not cS <= closure(ring, T, g).members:
                bad.append(("monotone", sorted(S)))
            if cS != frozenset().union(*(closure(ring, [s], g).members for s in S)):
                bad.append(("union", sorted(S)))
            if is_commutatively_closed(ring, cS) is not None:
                bad.append(("closed", sorted(S)))
        return (not bad, {"trials": trials, "violations": 0}, {"trials": trials, "violations": len(bad)},
                {"violations": bad[:4]})

    return _timed("closure_laws", spec, body)


def check_distance_metric(spec: str, threads: int = 1) -> CheckResult:
    def body():
        ring = build_ring(spec)
        g = commutation_graph(ring, threads)
        bad = []
        for comp in g.component_members():
            if len(comp) == 1:
                continue
            D = analytics.component_distances(g, comp)
            ok = (D >= 0).all() and np.array_equal(D, D.T) and (np.diag(D) == 0).all()
            ok = ok and ((D > 0) | np.eye(len(comp), dtype=bool)).all()
            for j in range(len(comp)):
                if not ok:
                    break
                ok = bool((D <= D[:, j, None] + D[None, j, :]).all())
            if not ok:
                bad.append(int(comp[0]))
        return (not bad, "metric on every component", f"{len(bad)} bad components", _witness(ring, bad))

    return _timed("distance_metric", spec, body)


def check_power_law(spec: str, seed: int, threads: int = 1) -> CheckResult:
    """a ~m b implies a^l ~ b^l within ceil(m/l) steps, for l = 1..m+1."""

    def body():
        ring = build_ring(spec)
        g = commutation_graph(ring, threads)
        d, _ = _distance_lookup(g)
        rng = _rng(seed, "power_law", spec)
        bad = []
        checked = 0
        for a, b in _pairs_in_components(g, rng):
            m = d(a, b)
            if m == 0:
                continue
            pa, pb = a, b
            for l in range(1, m + 2):
                if l > 1:
                    pa, pb = ring.mul(pa, a), ring.mul(pb, b)
                dl = d(pa, pb)
                checked += 1
                if dl is None or dl > math.ceil(m / l):
                    bad.append((a, b, l))
        return (not bad, {"violations": 0}, {"checked": checked, "violations": len(bad)},
                _witness(ring, [x for t in bad[:3] for x in t[:2]], triples=bad[:3]))

    return _timed("power_law", spec, body)


def check_conjugation_invariance(spec: str, seed: int, threads: int = 1) -> CheckResult:
    """{a}_n = {u a u^-1}_n for every n >= 1."""

    def body():
        ring = build_ring(spec)
        g = commutation_graph(ring, threads)
        inv = unit_inverses(ring)
        units = sorted(inv)
        pairs = [(a, u) for a in range(ring.size) for u in units]
        if len(pairs) > 20 * SAMPLES:
            rng = _rng(seed, "conjugation_invariance", spec)
            pairs = [pairs[i] for i in sorted(rng.choice(len(pairs), SAMPLES, replace=False).tolist())]
        levels = {}
        bad = []
        for a, u in pairs:
            b = ring.mul(ring.mul(u, a), inv[u])
            for x in (a, b):
                if x not in levels:
                    levels[x] = bfs_levels(g, [x])
            la, lb = levels[a], levels[b]
            depth = max(max(la.values()), max(lb.values()))
            for n in range(1, depth + 1):
                if {k for k, v in la.items() if v <= n} != {k for k, v in lb.items() if v <= n}:
                    bad.append((a, u))
                    break
        return (not bad, {"violations": 0}, {"pairs": len(pairs), "violations": len(bad)},
                _witness(ring, [x for p in bad[:4] for x in p]))

    return _timed("conjugation_invariance", spec, body)


# ---------------------------------------------------------------- matrix-ring sweeps


def _matrix_ring(spec: str) -> MatrixRingHandle | None:
    ring = build_ring(spec)
    return ring if isinstance(ring, MatrixRingHandle) else None


def _skip(check_id: str, spec: str) -> CheckResult:
    return CheckResult(check_id, spec, "skipped", actual="not a matrix ring")


def check_charpoly_constancy(spec: str, threads: int = 1) -> CheckResult:
    """Characteristic polynomial and trace are constant on each class."""
    ring = _matrix_ring(spec)
    if ring is None:
        return _skip("charpoly_constancy", spec)

    def body():
        g = commutation_graph(ring, threads)
        F = ring.field
        bad = []
        for comp in g.component_members():
            mats = [decode_matrix(ring, a) for a in comp.tolist()]
            polys = {linalg.char_poly(F, M) for M in mats}
            traces = {linalg.trace(F, M) for M in mats}
            if len(polys) != 1 or len(traces) != 1:
                bad.append(int(comp[0]))
        return (not bad, "one char poly and one trace per class", f"{len(bad)} bad classes", _witness(ring, bad))

    return _timed("charpoly_constancy", spec, body)


def check_jordan_consistency(spec: str) -> CheckResult:
    ring = _matrix_ring(spec)
    if ring is None:
        return _skip("jordan_consistency", spec)

    def body():
        F = ring.field
        bad = []
        for a in sorted(nilpotent_oracle(ring)):
            A = decode_matrix(ring, a)
            p = linalg.jordan_partition(F, A)
            J = linalg.jordan_form(p)
            ok = (
                p.size == ring.n
                and list(p.blocks) == sorted(p.blocks, reverse=True)
                and p.index == linalg.nilpotency_index(F, A)
                and linalg.rank_sequence(F, J) == linalg.rank_sequence(F, A)
            )
            if not ok:
                bad.append(a)
        return (not bad, "partition sums to n, largest block = index, rank sequences agree",
                f"{len(bad)} violations", _witness(ring, bad))

    return _timed("jordan_consistency", spec, body)


def check_fitting_rigidity(spec: str, threads: int = 1) -> CheckResult:
    """Fitting decompositions are valid and the invertible block size is constant on each class."""
    ring = _matrix_ring(spec)
    if ring is None:
        return _skip("fitting_rigidity", spec)

    def body():
        g = commutation_graph(ring, threads)
        F = ring.field
        bad = []
        for comp in g.component_members():
            sizes = set()
            for a in comp.tolist():
                A = decode_matrix(ring, a)
                fd = linalg.fitting_decomposition(F, A)
                blocks = [b for b in (fd.invertible_part, fd.nilpotent_part) if b is not None]
                P = fd.basis_change
                ok = (
                    linalg.mat_mul(F, linalg.mat_mul(F, linalg.inverse(F, P), A), P) == linalg.block_diag(*blocks)
                    and (fd.invertible_part is None or linalg.is_invertible(F, fd.invertible_part))
                    and (fd.nilpotent_part is None or linalg.nilpotency_index(F, fd.nilpotent_part) is not None)
                )
                if not ok:
                    bad.append(a)
                sizes.add(fd.invertible_size)
            if len(sizes) != 1:
                bad.append(int(comp[0]))
        return (not bad, "valid decomposition, one invertible-block size per class", f"{len(bad)} violations",
                _witness(ring, bad))

    return _timed("fitting_rigidity", spec, body)


def check_nilpotent_distance_bound(spec: str, seed: int, threads: int = 1) -> CheckResult:
    """d(A, B) <= max(index A, index B) - 1 for nilpotent A, B."""
    ring = _matrix_ring(spec)
    if ring is None:
        return _skip("nilpotent_distance_bound", spec)

    def body():
        g = commutation_graph(ring, threads)
        F = ring.field
        comp = g.component_of(0)
        D = analytics.component_distances(g, comp)
        nu = np.array([linalg.nilpotency_index(F, decode_matrix(ring, a)) for a in comp.tolist()])
        bound = np.maximum(nu[:, None], nu[None, :]) - 1
        viol = np.argwhere(D > bound)
        return (len(viol) == 0, {"violations": 0}, {"pairs": int(D.size), "violations": len(viol)},
                _witness(ring, [int(comp[i]) for p in viol[:4] for i in p]))

    return _timed("nilpotent_distance_bound", spec, body)


def check_upper_triangular(spec: str, threads: int = 1) -> CheckResult:
    """Strictly upper triangular matrices sit within n-1 steps of 0 and span distance <= 2(n-1)."""
    ring = _matrix_ring(spec)
    if ring is None:
        return _skip("upper_triangular", spec)

    def body():
        g = commutation_graph(ring, threads)
        n = ring.n
        upper = [a for a in range(ring.size) if linalg.is_strictly_upper(decode_matrix(ring, a))]
        level = bfs_levels(g, [0])
        far = [a for a in upper if level.get(a, n) > n - 1]
        d, _ = _distance_lookup(g)
        spread = max((d(a, b) for a in upper for b in upper), default=0)
        ok = not far and spread <= 2 * (n - 1)
        return (ok, {"max_level": n - 1, "max_distance_at_most": 2 * (n - 1)},
                {"count": len(upper), "max_level": max(level[a] for a in upper), "max_distance": spread},
                _witness(ring, far))

    return _timed("upper_triangular", spec, body)


def check_triangularization(spec: str, threads: int = 1) -> CheckResult:
    """Every nilpotent A has P with P^-1 A P strictly upper triangular, in the class of 0."""
    ring = _matrix_ring(spec)
    if ring is None:
        return _skip("triangularization", spec)

    def body():
        g = commutation_graph(ring, threads)
        F = ring.field
        bad = []
        for a in sorted(nilpotent_oracle(ring)):
            A = decode_matrix(ring, a)
            P, U = linalg.triangularize_nilpotent(F, A)
            u = encode_matrix(ring, U)
            if not linalg.is_strictly_upper(U) or linalg.mat_mul(F, P, U) != linalg.mat_mul(F, A, P) \
                    or g.components[u] != g.components[a]:
                bad.append(a)
        return (not bad, "similar to a strictly upper triangular matrix in the same class",
                f"{len(bad)} violations", _witness(ring, bad))

    return _timed("triangularization", spec, body)


def check_jordan_adjacency(max_l: int = 4, fields: tuple[int, ...] = (2, 3)) -> CheckResult:
    """J_l ~1 diag(J_{l-1}, J_1): with c = sum_{i<l} e_ii and d = J_l, cd = J_l and dc = diag(J_{l-1}, 0)."""

    def body():
        results = {}
        bad = []
        for q in fields:
            F = finite_field(q)
            for l in range(2, max_l + 1):
                J = linalg.jordan_block(l)
                c = linalg.block_diag(linalg.identity(l - 1), linalg.zeros(1))
                target = linalg.block_diag(linalg.jordan_block(l - 1), linalg.jordan_block(1))
                ok = linalg.mat_mul(F, c, J) == J and linalg.mat_mul(F, J, c) == target
                ring_desc = MatrixRing(l, GaloisField(q))
                if ok and ring_desc.size <= 512:
                    ring = build_ring(ring_desc)
                    g = commutation_graph(ring)
                    ok = g.adjacent(encode_matrix(ring, J), encode_matrix(ring, target))
                results[f"l={l},q={q}"] = ok
                if not ok:
                    bad.append(f"l={l},q={q}")
        return (not bad, {k: True for k in results}, results, {"failing": bad})

    return _timed("jordan_adjacency", "M(l,GF(q))", body)


def run_all(spec: str, seed: int, threads: int = 1) -> list[CheckResult]:
    spec = parse_ring_spec(spec).render()
    out = [
        check_sim1_symmetry(spec, threads),
        check_closure_component(spec, threads),
        check_closure_laws(spec, seed, threads),
        check_distance_metric(spec, threads),
        check_power_law(spec, seed, threads),
        check_conjugation_invariance(spec, seed, threads),
        check_level_nilpotency(spec, threads),
        check_stabilization_bounds(spec, threads),
    ]
    if _matrix_ring(spec) is not None:
        out += [
            check_charpoly_constancy(spec, threads),
            check_jordan_consistency(spec),
            check_fitting_rigidity(spec, threads),
            check_nilpotent_distance_bound(spec, seed, threads),
            check_upper_triangular(spec, threads),
            check_triangularization(spec, threads),
        ]
    return out
