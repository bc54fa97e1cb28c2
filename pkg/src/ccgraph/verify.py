"""Named checks of structural results on concrete finite rings, and suites of them.

Each check returns a CheckResult; ``run_suite`` collects them into a Report
whose JSON form is byte-stable for a given (suite, rings, seed).
"""

from __future__ import annotations

import json
import logging
import time
import zlib
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from ccgraph import analytics, linalg
from ccgraph.closure import (
    CommutationGraph,
    bfs_levels,
    closure,
    commutation_graph,
    is_commutatively_closed,
)
from ccgraph.descriptor import GaloisField, MatrixRing, Product, parse_ring_spec
from ccgraph.identities import (
    EXHAUSTIVE_LIMIT,
    association_along_path,
    block_mul,
    closure_identity_violations,
    diag2,
    find_relation_witnesses,
    verify_free_algebra_chain,
    verify_stable_association,
)
from ccgraph.rings import (
    MatrixRingHandle,
    RingHandle,
    build_ring,
    decode_matrix,
    left_zero_divisors,
    nilpotents,
    pair_blocks,
    right_zero_divisors,
    unit_inverses,
    units,
)

log = logging.getLogger(__name__)

DEFAULT_RINGS = [
    "Z(12)",
    "GF(4)",
    "M(2,GF(2))",
    "M(2,GF(3))",
    "M(3,GF(2))",
    "Z(4)xM(2,GF(2))",
    "M(2,GF(2))xM(3,GF(2))",
]
DEFAULT_SEED = 20240917
SAMPLES = 1000


class UnknownSuiteError(KeyError):
    pass


@dataclass
class CheckResult:
    check_id: str
    ring: str
    status: str  # "pass" | "fail" | "skipped"
    expected: Any = None
    actual: Any = None
    elapsed: float = 0.0
    witness: dict | None = None

    def __post_init__(self):
        if self.status == "fail" and self.witness is None:
            self.witness = {"note": "no witness recorded"}

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self, timings: bool = False) -> dict:
        d = {
            "check_id": self.check_id,
            "ring": self.ring,
            "status": self.status,
            "expected": self.expected,
            "actual": self.actual,
            "witness": self.witness,
        }
        if timings:
            d["elapsed"] = round(self.elapsed, 6)
        return d


@dataclass
class Report:
    suite: str
    seed: int
    rings: list[str]
    results: list[CheckResult] = field(default_factory=list)

    @property
    def summary(self) -> dict[str, int]:
        counts = {"pass": 0, "fail": 0, "skipped": 0}
        for r in self.results:
            counts[r.status] += 1
        counts["total"] = len(self.results)
        return counts

    @property
    def ok(self) -> bool:
        return self.summary["fail"] == 0

    def to_dict(self, timings: bool = False) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "rings": self.rings,
            "results": [r.to_dict(timings) for r in self.results],
            "summary": self.summary,
        }

    def to_json(self, timings: bool = False) -> str:
        return json.dumps(self.to_dict(timings), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------- helpers


def _witness(ring: RingHandle, ids, **extra) -> dict:
    ids = [int(i) for i in ids][:8]
    return {"elements": ids, "decoded": [ring.render(i) for i in ids], **extra}


def _rng(seed: int, *key: str) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32("|".join(key).encode())])


def _matrix_spec(n: int, q: int) -> str:
    return MatrixRing(n, _field_desc(q)).render()


def _field_desc(q: int) -> GaloisField:
    desc = parse_ring_spec(f"GF({q})")
    assert isinstance(desc, GaloisField)
    return desc


def _graph(ring: RingHandle, threads: int = 1) -> CommutationGraph:
    return commutation_graph(ring, threads)


def _timed(check_id: str, spec: str, body: Callable[[], CheckResult | tuple]) -> CheckResult:
    t0 = time.perf_counter()
    try:
        out = body()
    except Exception as exc:  # a crashing check is a failed check, never an aborted suite
        log.exception("check %s on %s raised", check_id, spec)
        out = CheckResult(check_id, spec, "fail", witness={"error": f"{type(exc).__name__}: {exc}"})
    if isinstance(out, tuple):
        ok, expected, actual, witness = out
        out = CheckResult(check_id, spec, "pass" if ok else "fail", expected, actual, witness=None if ok else witness)
    out.elapsed = time.perf_counter() - t0
    return out


def nilpotent_oracle(ring: MatrixRingHandle) -> set[int]:
    """{A : A^n = 0}, by decoding every matrix and powering it with plain field arithmetic."""
    F, n = ring.field, ring.n
    return {a for a in range(ring.size) if not any(linalg.mat_pow(F, decode_matrix(ring, a), n).entries)}


# ---------------------------------------------------------------- matrix-ring checks


def check_nilpotent_class(n: int, q: int, threads: int = 1) -> CheckResult:
    spec = _matrix_spec(n, q)

    def body():
        ring = build_ring(spec)
        members = closure(ring, [0], _graph(ring, threads)).members
        oracle = nilpotent_oracle(ring)
        diff = sorted(members ^ oracle)
        return (members == oracle, len(oracle), len(members), _witness(ring, diff))

    return _timed("nilpotent_class", spec, body)


def check_distance_law(n: int, q: int, threads: int = 1) -> CheckResult:
    spec = _matrix_spec(n, q)

    def body():
        ring = build_ring(spec)
        g = _graph(ring, threads)
        dist0 = bfs_levels(g, [0])
        bad = []
        for a in sorted(nilpotent_oracle(ring)):
            nu = linalg.nilpotency_index(ring.field, decode_matrix(ring, a))
            if dist0.get(a) != nu - 1:
                bad.append(a)
        return (not bad, "d(A,0) = index(A) - 1", f"{len(bad)} violations", _witness(ring, bad))

    return _timed("distance_law", spec, body)


def check_matrix_diameter(n: int, q: int, threads: int = 1) -> CheckResult:
    spec = _matrix_spec(n, q)

    def body():
        ring = build_ring(spec)
        g = _graph(ring, threads)
        actual = {"ring_diameter": analytics.ring_diameter(g), "class_diameter_0": analytics.class_diameter(g, 0)}
        expected = {"ring_diameter": n - 1, "class_diameter_0": n - 1}
        return (actual == expected, expected, actual, _witness(ring, [0]))

    return _timed("matrix_diameter", spec, body)


def check_unit_classes(n: int, q: int, threads: int = 1) -> CheckResult:
    spec = _matrix_spec(n, q)

    def body():
        ring = build_ring(spec)
        g = _graph(ring, threads)
        inv = unit_inverses(ring)
        us = np.array(sorted(inv), dtype=np.int64)
        uinv = np.array([inv[int(u)] for u in us], dtype=np.int64)
        bad = []
        worst = 0
        for a in us.tolist():
            conj = set(ring.mul_many(ring.mul_many(us, a), uinv).tolist())
            comp = set(g.component_of(a).tolist())
            diam = analytics.class_diameter(g, a)
            worst = max(worst, diam)
            if conj != comp or diam > 1:
                bad.append(a)
        return (not bad, {"violations": 0, "max_diameter_at_most": 1},
                {"violations": len(bad), "max_diameter": worst}, _witness(ring, bad))

    return _timed("unit_classes", spec, body)


def check_girth(n: int, q: int, threads: int = 1) -> CheckResult:
    spec = _matrix_spec(n, q)

    def body():
        if n < 2:
            return CheckResult("girth", spec, "skipped", expected=3, actual="n < 2: commutative ring")
        ring = build_ring(spec)
        g = _graph(ring, threads)
        actual = {"class_girth_0": analytics.class_girth(g, 0), "ring_girth": analytics.ring_girth(g)}
        expected = {"class_girth_0": 3, "ring_girth": 3}
        return (actual == expected, expected, actual, _witness(ring, [0]))

    return _timed("girth", spec, body)


# ---------------------------------------------------------------- general checks


def closed_families(ring: RingHandle) -> dict[str, frozenset[int]]:
    one = ring.one

    def shift(S, c):
        return frozenset(int(x) for x in ring.add_many(np.array(sorted(S), dtype=np.int64), c))

    zr = right_zero_divisors(ring)
    allv = ring.elements()
    # E = {u : l(u - 1) != 0} straight from the definition
    e_mask = np.zeros(ring.size, dtype=bool)
    um1 = ring.add_many(allv, ring.neg(one))
    for rows, _, Q in pair_blocks(ring):
        # Q[i, m] = m * rows[i]; need m (u - 1) = 0 for some m != 0, i.e. rows = u - 1
        e_mask[rows] = (Q[:, 1:] == 0).any(axis=1)
    E = frozenset(int(u) for u in allv[e_mask[um1]])
    return {
        "N(R)": nilpotents(ring),
        "U(R)-1": shift(units(ring), ring.neg(one)),
        "Z_l(R)+1": shift(left_zero_divisors(ring), one),
        "Z_r(R)+1": shift(zr, one),
        "{u : l(u-1) != 0}": E,
    }


def check_closed_families(spec: str) -> CheckResult:
    def body():
        ring = build_ring(spec)
        fams = closed_families(ring)
        actual, bad = {}, {}
        for name, S in fams.items():
            cex = is_commutatively_closed(ring, S)
            actual[name] = "closed" if cex is None else "not closed"
            if cex is not None:
                bad[name] = _witness(ring, [cex.c, cex.d])
        return (not bad, {k: "closed" for k in fams}, actual, {"counterexamples": bad})

    return _timed("closed_families", parse_ring_spec(spec).render(), body)


def check_product_laws(spec_a: str, spec_b: str, seed: int = DEFAULT_SEED, threads: int = 1) -> CheckResult:
    A, B = build_ring(spec_a), build_ring(spec_b)
    spec = Product(A.descriptor, B.descriptor).render()

    def body():
        P = build_ring(spec)
        ga, gb, gp = _graph(A, threads), _graph(B, threads), _graph(P, threads)
        da, db, dp = analytics.ring_diameter(ga), analytics.ring_diameter(gb), analytics.ring_diameter(gp)
        # exhaustive: the product's component partition is the product of the factors' partitions
        allv = P.elements()
        al, ar = P.split(allv)
        pair_label = ga.components[al] * (int(gb.components.max()) + 1) + gb.components[ar]
        _, inv_pair = np.unique(pair_label, return_inverse=True)
        _, inv_prod = np.unique(gp.components, return_inverse=True)
        first = np.unique(inv_pair, return_index=True)[1]
        partition_ok = len(first) == len(np.unique(inv_prod)) and np.array_equal(
            inv_prod, inv_prod[first][inv_pair]
        )
        # explicit set comparison on sampled elements
        rng = _rng(seed, "product_laws", spec)
        sample = rng.choice(P.size, size=min(SAMPLES, P.size), replace=False)
        bad = []
        for x in sorted(sample.tolist()):
            a, b = P.split(x)
            ca = ga.component_of(a)
            cb = gb.component_of(b)
            expected_set = set((ca[:, None] + A.size * cb[None, :]).ravel().tolist())
            if set(gp.component_of(x).tolist()) != expected_set:
                bad.append(x)
        ok = dp == max(da, db) and partition_ok and not bad
        return (ok, {"diameter": max(da, db), "closures_factor": True},
                {"diameter": dp, "closures_factor": partition_ok and not bad,
                 "sampled": len(sample), "factor_diameters": [da, db]},
                _witness(P, bad))

    return _timed("product_laws", spec, body)


def _semisimple_factors(desc) -> list[int] | None:
    """Matrix sizes n_i of a product of matrix rings/fields, or None."""
    parts = desc.factors() if isinstance(desc, Product) else [desc]
    sizes = []
    for p in parts:
        if isinstance(p, MatrixRing):
            sizes.append(p.n)
        elif isinstance(p, GaloisField):
            sizes.append(1)
        else:
            return None
    return sizes


def check_semisimple_diameter(spec: str, threads: int = 1) -> CheckResult:
    desc = parse_ring_spec(spec)

    def body():
        sizes = _semisimple_factors(desc)
        if sizes is None:
            return CheckResult("semisimple_diameter", desc.render(), "skipped",
                               actual="not a product of matrix rings over fields")
        ring = build_ring(desc)
        d = analytics.ring_diameter(_graph(ring, threads))
        return (d == max(sizes) - 1, max(sizes) - 1, d, _witness(ring, []))

    return _timed("semisimple_diameter", desc.render(), body)


def check_semisimple_girth(spec: str, threads: int = 1) -> CheckResult:
    desc = parse_ring_spec(spec)

    def body():
        sizes = _semisimple_factors(desc)
        if sizes is None or max(sizes) < 2:
            return CheckResult("semisimple_girth", desc.render(), "skipped",
                               actual="needs a factor M(n,F) with n >= 2")
        ring = build_ring(desc)
        gr = analytics.ring_girth(_graph(ring, threads))
        return (gr == 3, 3, gr, _witness(ring, []))

    return _timed("semisimple_girth", desc.render(), body)


def check_dedekind_finite(spec: str) -> CheckResult:
    def body():
        ring = build_ring(spec)
        bad = []
        for rows, P, Q in pair_blocks(ring):
            hit = (P == ring.one) & (Q != ring.one)
            if hit.any():
                i, d = np.argwhere(hit)[0]
                bad = [int(rows[i]), int(d)]
                break
        return (not bad, "ab = 1 implies ba = 1", "holds" if not bad else "violated", _witness(ring, bad))

    return _timed("dedekind_finite", parse_ring_spec(spec).render(), body)


def check_commutative_diameter(spec: str, threads: int = 1) -> CheckResult:
    def body():
        ring = build_ring(spec)
        commutative = True
        for rows, P, Q in pair_blocks(ring):
            if (P != Q).any():
                commutative = False
                break
        d = analytics.ring_diameter(_graph(ring, threads))
        return ((d == 0) == commutative, {"commutative": commutative, "diameter_is_zero": commutative},
                {"commutative": commutative, "diameter_is_zero": d == 0}, _witness(ring, []))

    return _timed("commutative_diameter", parse_ring_spec(spec).render(), body)


def check_level_nilpotency(spec: str, threads: int = 1) -> CheckResult:
    def body():
        ring = build_ring(spec)
        levels = bfs_levels(_graph(ring, threads), [0])
        bad = [a for a, i in sorted(levels.items()) if ring.power(a, i + 1) != 0]
        return (not bad, "a in {0}_i implies a^(i+1) = 0", f"{len(bad)} violations", _witness(ring, bad))

    return _timed("level_nilpotency", parse_ring_spec(spec).render(), body)


def check_stabilization_bounds(spec: str, threads: int = 1) -> CheckResult:
    def body():
        ring = build_ring(spec)
        g = _graph(ring, threads)
        bad = []
        for comp in g.component_members():
            if len(comp) == 1:
                continue
            D = analytics.component_distances(g, comp)
            ecc = D.max(axis=1)
            diam = D.max()
            viol = comp[(ecc > diam) | (diam > 2 * ecc)]
            bad.extend(viol.tolist())
        return (not bad, "depth <= class diameter <= 2 depth", f"{len(bad)} violations", _witness(ring, bad))

    return _timed("stabilization_bounds", parse_ring_spec(spec).render(), body)


# ---------------------------------------------------------------- identity checks


def check_stable_association(spec: str, seed: int = DEFAULT_SEED) -> CheckResult:
    def body():
        ring = build_ring(spec)
        if ring.size**2 <= EXHAUSTIVE_LIMIT:
            pairs = [(x, y) for x in range(ring.size) for y in range(ring.size)]
        else:
            rng = _rng(seed, "stable_association", spec)
            pairs = [tuple(p) for p in rng.integers(0, ring.size, (SAMPLES, 2)).tolist()]
        bad = [p for p in pairs if not verify_stable_association(ring, *p)]
        return (not bad, {"pairs": len(pairs), "failures": 0}, {"pairs": len(pairs), "failures": len(bad)},
                _witness(ring, [i for p in bad[:4] for i in p]))

    return _timed("stable_association", parse_ring_spec(spec).render(), body)


def check_closure_identities(spec: str, seed: int = DEFAULT_SEED, threads: int = 1) -> CheckResult:
    def body():
        ring = build_ring(spec)
        bad = closure_identity_violations(ring, _graph(ring, threads), seed=seed)
        return (not bad, 0, len(bad), {"violations": [[n, list(t)] for n, t in bad[:8]]})

    return _timed("closure_identities", parse_ring_spec(spec).render(), body)


def check_free_algebra_chain(max_l: int = 10) -> CheckResult:
    def body():
        lengths = {}
        for l in range(1, max_l + 1):
            lengths[l] = len(verify_free_algebra_chain(l))
        expected = {l: l for l in range(1, max_l + 1)}
        return (lengths == expected, expected, lengths, {"lengths": lengths})

    return _timed("free_algebra_chain", "Z<x,y>", body)


def _same_component_pairs(g: CommutationGraph, limit: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    pairs = [(a, b) for comp in g.component_members() if len(comp) > 1
             for a in comp.tolist() for b in comp.tolist() if a != b]
    if len(pairs) > limit:
        idx = np.sort(rng.choice(len(pairs), size=limit, replace=False))
        pairs = [pairs[i] for i in idx]
    return pairs


def check_relation_witnesses(spec: str, seed: int = DEFAULT_SEED, threads: int = 1) -> CheckResult:
    def body():
        ring = build_ring(spec)
        g = _graph(ring, threads)
        pairs = _same_component_pairs(g, SAMPLES, _rng(seed, "relation_witnesses", spec))
        bad = []
        for a, b in pairs:
            n = analytics.distance(g, a, b)
            if find_relation_witnesses(ring, a, b, n) is None:
                bad.append((a, b))
        return (not bad, {"pairs": len(pairs), "missing": 0}, {"pairs": len(pairs), "missing": len(bad)},
                _witness(ring, [i for p in bad[:4] for i in p]))

    return _timed("relation_witnesses", parse_ring_spec(spec).render(), body)


def _bfs_path(g: CommutationGraph, a: int, b: int) -> list[int]:
    parent = {a: None}
    frontier = [a]
    while b not in parent:
        nxt = []
        for u in frontier:
            for w in g.neighbors(u).tolist():
                if w not in parent:
                    parent[w] = u
                    nxt.append(w)
        frontier = nxt
    path = [b]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return path[::-1]


def check_association_bridge(spec: str, seed: int = DEFAULT_SEED, threads: int = 1) -> CheckResult:
    def body():
        ring = build_ring(spec)
        g = _graph(ring, threads)
        pairs = _same_component_pairs(g, SAMPLES, _rng(seed, "association_bridge", spec))
        one = ring.one
        bad = []
        for a, b in pairs:
            comp = association_along_path(ring, _bfs_path(g, a, b))
            if comp is None:
                bad.append((a, b))
                continue
            P, Q = comp
            lhs = block_mul(ring, block_mul(ring, P, diag2(ring, ring.sub(one, a))), Q)
            if lhs != diag2(ring, ring.sub(one, b)):
                bad.append((a, b))
        return (not bad, {"pairs": len(pairs), "failures": 0}, {"pairs": len(pairs), "failures": len(bad)},
                _witness(ring, [i for p in bad[:4] for i in p]))

    return _timed("association_bridge", parse_ring_spec(spec).render(), body)


# ---------------------------------------------------------------- suites


def _paper_core(spec: str, seed: int, threads: int) -> list[CheckResult]:
    desc = parse_ring_spec(spec)
    out = [
        check_closed_families(spec),
        check_dedekind_finite(spec),
        check_commutative_diameter(spec, threads),
        check_level_nilpotency(spec, threads),
        check_stabilization_bounds(spec, threads),
    ]
    if isinstance(desc, MatrixRing):
        n, q = desc.n, desc.base.q
        out += [
            check_nilpotent_class(n, q, threads),
            check_distance_law(n, q, threads),
            check_matrix_diameter(n, q, threads),
            check_unit_classes(n, q, threads),
            check_girth(n, q, threads),
        ]
    if isinstance(desc, Product):
        out.append(check_product_laws(desc.left.render(), desc.right.render(), seed, threads))
    if _semisimple_factors(desc) is not None:
        out.append(check_semisimple_diameter(spec, threads))
        if isinstance(desc, Product):
            out.append(check_semisimple_girth(spec, threads))
    return out


def _identities(spec: str, seed: int, threads: int) -> list[CheckResult]:
    ring = build_ring(spec)
    out = [check_stable_association(spec, seed), check_closure_identities(spec, seed, threads)]
    if ring.size <= 512:
        out += [check_relation_witnesses(spec, seed, threads), check_association_bridge(spec, seed, threads)]
    return out


def _properties(spec: str, seed: int, threads: int) -> list[CheckResult]:
    from ccgraph import properties

    return properties.run_all(spec, seed, threads)


def _jordan_adjacency() -> CheckResult:
    from ccgraph import properties

    return properties.check_jordan_adjacency()


IDENTITY_RINGS = ["Z(6)", "Z(12)", "M(2,GF(2))", "M(2,GF(3))"]
PROPERTY_RINGS = ["Z(12)", "GF(4)", "M(2,GF(2))", "M(2,GF(3))", "M(3,GF(2))", "GF(2)xM(2,GF(2))"]

SUITES: dict[str, tuple[Callable[[str, int, int], list[CheckResult]], list[str], list[Callable[[], CheckResult]]]] = {
    # name: (per-ring runner, default rings, ring-independent checks)
    "paper-core": (_paper_core, DEFAULT_RINGS, []),
    "identities": (_identities, IDENTITY_RINGS, [check_free_algebra_chain]),
    "properties": (_properties, PROPERTY_RINGS, [_jordan_adjacency]),
}


def run_suite(suite_name: str, rings: list[str] | None = None, seed: int = DEFAULT_SEED, threads: int = 1) -> Report:
    """Run every applicable check of a suite; failures never abort the run."""
    if suite_name == "all":
        parts = [run_suite(name, rings, seed, threads) for name in SUITES]
        report = Report("all", seed, sorted({r for p in parts for r in p.rings}))
        report.results = sorted((r for p in parts for r in p.results), key=lambda r: (r.check_id, r.ring))
        return report
    if suite_name not in SUITES:
        raise UnknownSuiteError(f"unknown suite {suite_name!r}; choose from {sorted(SUITES) + ['all']}")
    runner, default_rings, global_checks = SUITES[suite_name]
    specs = [parse_ring_spec(s).render() for s in (rings or default_rings)]
    results = []
    for spec in specs:
        log.info("suite %s: %s", suite_name, spec)
        results.extend(runner(spec, seed, threads))
    results.extend(check() for check in global_checks)
    report = Report(suite_name, seed, specs)
    report.results = sorted(results, key=lambda r: (r.check_id, r.ring))
    return report
