import random
from fractions import Fraction as F

import pytest

from conftest import relabel
from fibercalc.catalog import (
    example_family,
    kodaira,
    standard_entries,
    theorem14_family,
    twentytwo,
    type_entry,
    witness_grid,
)
from fibercalc.classify import (
    UNCLASSIFIED,
    c1_upper_bound,
    canonical_form,
    classify_fiber,
    inequality_report,
    match_catalog,
)
from fibercalc.dualizer import dual_fiber
from fibercalc.fiber_model import build_fiber, minimize, parse_fiber
from fibercalc.invariants import compute_invariants

CORPUS = standard_entries()


@pytest.mark.parametrize("g, cap", [(2, F(16, 5)), (3, 7), (4, F(54, 5)), (5, F(29, 2)),
                                    (6, F(130, 7)), (9, F(61, 2))])
def test_c1_upper_bound(g, cap):
    assert c1_upper_bound(g) == cap


def test_c1_upper_bound_needs_genus_two():
    with pytest.raises(ValueError):
        c1_upper_bound(1)


# -- inequality report -----------------------------------------------------

def test_report_entry1_meets_cap():
    rep = inequality_report(type_entry(1).graph)
    assert rep.ok
    c = rep.get("c1sq <= cap(g)")
    assert c.left == c.right == F(130, 7) and c.note


def test_report_case2_cusp_equality():
    rep = inequality_report(theorem14_family(2, 1, 1).graph)
    assert rep.ok
    for name in ("c2 >= 11/6", "chi >= 1/6"):
        c = rep.get(name)
        assert c.left == c.right and "cusp" in c.note
    assert rep.get("c2 >= 11/6").left == F(11, 6)


def test_report_semistable_skips_lower_bounds():
    f = build_fiber("t", [("a", 1, -1, 1), ("b", 1, -1, 1)], [("a", "b")])
    rep = inequality_report(f)
    assert rep.ok
    assert any("non-semistable" in s for s in rep.skipped)
    assert all(rep.get(n).left == 0 for n in ("c1sq >= 0", "c2 >= 0", "chi >= 0"))


def test_report_genus_one_subset():
    rep = inequality_report(kodaira("II").graph)
    assert rep.ok and len(rep.checks) == 4 and rep.skipped


def test_report_records_are_exact_comparisons():
    ops = {"<=": F.__le__, ">=": F.__ge__, "==": F.__eq__}
    for e in CORPUS:
        for c in inequality_report(e.graph).checks:
            if c.relation in ops:
                assert c.passed == ops[c.relation](c.left, c.right)


def test_every_corpus_fiber_passes():
    for e in CORPUS:
        rep = inequality_report(e.graph)
        assert rep.ok, (e.key, rep.failures)


def test_miyaoka_yau_note_on_multiple_nodal_curve():
    f = parse_fiber("component c mult=3 self=0 genus=2\nnode c c")
    c = inequality_report(f).get("Miyaoka-Yau c1sq <= 2 c2")
    assert c.left == c.right and c.note


# -- canonical form --------------------------------------------------------

@pytest.mark.parametrize("entry", CORPUS, ids=lambda e: e.key)
def test_canonical_form_relabel_invariant(entry):
    rng = random.Random(entry.key)
    base = canonical_form(entry.graph)
    for _ in range(100):
        assert canonical_form(relabel(entry.graph, rng)) == base


def test_twentytwo_forms_distinct():
    forms = {canonical_form(e.graph) for e in twentytwo()}
    assert len(forms) == 22


def test_type9_differs_from_type8():
    assert canonical_form(type_entry(9).graph) != canonical_form(type_entry(8).graph)


def test_canonical_form_sees_decorations():
    a = build_fiber("a", [("x", 1, -1, 1), ("y", 1, -1, 1)], [("x", "y")])
    b = build_fiber("b", [("x", 1, -2, 1), ("y", 1, -2, 1)], [("x", "y", 2)])
    assert canonical_form(a) != canonical_form(b)


def test_e8_reconstruction():
    m, _ = minimize(dual_fiber(kodaira("II").graph, 5))
    mults = [2, 4, 6, 5, 4, 3, 2, 1, 3]
    ids = [f"c{i}" for i in range(9)]
    edges = [(ids[i], ids[i + 1]) for i in range(7)] + [("c2", "c8")]
    e8 = build_fiber("E8~", [(i, m_, -2) for i, m_ in zip(ids, mults)], edges)
    assert canonical_form(m) == canonical_form(e8)


# -- classification --------------------------------------------------------

def test_classify_entry21():
    c = classify_fiber(type_entry(21).graph)
    assert (c.label, c.family) == ("thm1.3/21", "thm1.3")


def test_classify_smooth_multiple_fiber():
    c = classify_fiber(parse_fiber("component c mult=3 self=0 genus=2"))
    assert c.label == "thm1.4/case1"


def test_classify_boundary_not_above_bound():
    b = compute_invariants(example_family(3).graph)
    assert b.c1sq_min == 4 * 3 - F(11, 2)
    c = classify_fiber(example_family(3).graph)
    assert not c.label.startswith("thm1.3")


@pytest.mark.parametrize("entry", twentytwo(), ids=lambda e: e.key)
def test_self_identification(entry):
    assert classify_fiber(entry.graph).label == entry.key


def test_self_identification_after_relabel():
    rng = random.Random(3)
    for e in twentytwo():
        assert classify_fiber(relabel(e.graph, rng)).label == e.key


@pytest.mark.parametrize("entry", witness_grid(), ids=lambda e: e.key)
def test_witnesses_classified_by_case(entry):
    case = entry.key.split("/")[1]
    c = classify_fiber(entry.graph)
    assert c.label == f"thm1.4/{case}"
    assert c.label != UNCLASSIFIED


def test_kodaira_lookup():
    for kind in ("II", "III*", "I0*"):
        assert classify_fiber(kodaira(kind).graph).label == f"kodaira/{kind}"
    assert classify_fiber(kodaira("I4").graph).family == "kodaira"


def test_match_catalog_scaling():
    f = type_entry(9).graph.scaled(2)
    assert match_catalog(f) == "2xthm1.3/9"
    assert match_catalog(example_family(2).graph) is None
