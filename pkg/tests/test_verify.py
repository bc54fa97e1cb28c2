import json

import numpy as np
import pytest

from ccgraph import properties, verify
from ccgraph.closure import CommutationGraph
from ccgraph.verify import CheckResult, Report, UnknownSuiteError, run_suite


@pytest.mark.parametrize("n,q,size", [(2, 2, 4), (3, 2, 64), (2, 3, 9)])
def test_nilpotent_class(n, q, size):
    r = verify.check_nilpotent_class(n, q)
    assert r.passed and r.actual == size == r.expected


@pytest.mark.parametrize("n,q", [(2, 2), (3, 2), (2, 3)])
def test_distance_law(n, q):
    assert verify.check_distance_law(n, q).passed


@pytest.mark.parametrize("n,q,d", [(2, 2, 1), (3, 2, 2), (2, 3, 1)])
def test_matrix_diameter(n, q, d):
    r = verify.check_matrix_diameter(n, q)
    assert r.passed and r.actual["ring_diameter"] == d


@pytest.mark.parametrize("n,q", [(2, 2), (2, 3), (3, 2)])
def test_unit_classes(n, q):
    assert verify.check_unit_classes(n, q).passed


@pytest.mark.parametrize("n,q", [(2, 2), (3, 2), (2, 3)])
def test_girth(n, q):
    r = verify.check_girth(n, q)
    assert r.passed and r.actual["ring_girth"] == 3


@pytest.mark.parametrize("spec", ["M(2,GF(2))", "Z(12)", "M(2,GF(3))"])
def test_closed_families(spec):
    r = verify.check_closed_families(spec)
    assert r.passed
    assert set(r.actual.values()) == {"closed"}


@pytest.mark.parametrize("a,b", [("Z(4)", "M(2,GF(2))"), ("Z(6)", "Z(10)")])
def test_product_laws(a, b):
    assert verify.check_product_laws(a, b).passed


@pytest.mark.parametrize("spec,d", [("M(2,GF(2))xM(2,GF(3))", 1), ("GF(4)xM(2,GF(2))", 1)])
def test_semisimple_diameter(spec, d):
    r = verify.check_semisimple_diameter(spec)
    assert r.passed and r.actual == d


def test_semisimple_skips_non_semisimple():
    assert verify.check_semisimple_diameter("Z(4)xM(2,GF(2))").status == "skipped"


@pytest.mark.parametrize("spec", ["Z(12)", "M(2,GF(2))", "GF(4)", "Z(4)xM(2,GF(2))"])
def test_general_checks(spec):
    for check in (verify.check_dedekind_finite, verify.check_commutative_diameter,
                  verify.check_level_nilpotency, verify.check_stabilization_bounds):
        r = check(spec)
        assert r.status in ("pass", "skipped"), (check.__name__, r)


def test_identity_checks():
    for spec in ("Z(6)", "M(2,GF(2))"):
        assert verify.check_stable_association(spec).passed
        assert verify.check_closure_identities(spec).passed
        assert verify.check_relation_witnesses(spec).passed
        assert verify.check_association_bridge(spec).passed
    r = verify.check_free_algebra_chain()
    assert r.passed


def test_failing_check_has_witness():
    r = CheckResult("x", "Z(2)", "fail")
    assert r.witness is not None


def test_crashing_body_becomes_fail():
    def boom():
        raise RuntimeError("nope")

    r = verify._timed("boom", "Z(2)", boom)
    assert r.status == "fail" and "RuntimeError" in r.witness["error"]


def test_report_summary_tally():
    rep = Report("s", 1, ["Z(2)"], [CheckResult("a", "Z(2)", "pass"), CheckResult("b", "Z(2)", "fail"),
                                     CheckResult("c", "Z(2)", "skipped")])
    assert rep.summary == {"pass": 1, "fail": 1, "skipped": 1, "total": 3}
    assert not rep.ok
    doc = json.loads(rep.to_json())
    assert doc["seed"] == 1 and "elapsed" not in doc["results"][0]
    assert "elapsed" in json.loads(rep.to_json(timings=True))["results"][0]


def test_identities_suite_small():
    rep = run_suite("identities", ["Z(6)", "M(2,GF(2))"])
    assert rep.ok, [r for r in rep.results if not r.passed]
    assert rep.rings == ["Z(6)", "M(2,GF(2))"]
    assert rep.summary["total"] == len(rep.results)


def test_suite_is_deterministic():
    a = run_suite("identities", ["Z(12)", "M(2,GF(2))"], seed=5).to_json()
    b = run_suite("identities", ["Z(12)", "M(2,GF(2))"], seed=5, threads=3).to_json()
    assert a == b


def test_properties_suite():
    rep = run_suite("properties")
    assert rep.ok, [r for r in rep.results if not r.passed]


@pytest.mark.parametrize("name", ["foo", "nope", ""])
def test_unknown_suite(name):
    with pytest.raises(UnknownSuiteError):
        run_suite(name)


def _edgeless(ring, threads=1):
    z = np.array([], dtype=np.int64)
    return CommutationGraph.from_edges(ring.spec, ring.size, z, z)


def test_checks_catch_a_broken_graph(monkeypatch):
    """Dropping every edge must make graph-dependent checks fail, not pass vacuously."""
    monkeypatch.setattr(verify, "_graph", _edgeless)
    monkeypatch.setattr(properties, "commutation_graph", _edgeless)
    assert not verify.check_matrix_diameter(2, 2).passed
    assert not verify.check_nilpotent_class(2, 2).passed
    assert not properties.check_closure_component("M(2,GF(2))").passed
