from math import gcd

import pytest

from fibercalc.catalog import example_family
from fibercalc.classify import canonical_form, inequality_report
from fibercalc.fiber_model import fiber_genus, is_minimal_nc, validate
from fibercalc.search import (
    Predicate,
    PredicateError,
    SearchBounds,
    enumerate_fibers,
    restricted_catalog,
    thread_count,
    verify_theorem13,
)


@pytest.fixture(scope="module")
def small_hits():
    return enumerate_fibers(SearchBounds((1, 3), 7, 8), threads=1)


def test_bounds_validation():
    assert SearchBounds(2, 5, 6).genus == (2, 2)
    with pytest.raises(ValueError):
        SearchBounds(2, 0, 6)
    with pytest.raises(ValueError):
        SearchBounds(2, 5, 0)
    with pytest.raises(PredicateError):
        SearchBounds(2, 5, 6, "c1sq_min >")


def test_two_vertex_space_is_empty():
    # (1)-(2) and friends never solve to integral self-intersections
    assert enumerate_fibers(SearchBounds(2, 2, 4), threads=1) == []


def test_example_family_graph_is_not_a_tree():
    # the g = 2 member has a cycle A-B1-D-B2, so a tree search cannot see it
    hits = enumerate_fibers(SearchBounds(2, 5, 6), threads=1)
    f = example_family(2).graph
    assert f.total_nodes == len(f)
    assert canonical_form(f) not in {h.canonical for h in hits}


def test_hits_are_sorted_and_unique(small_hits):
    labels = [h.canonical for h in small_hits]
    assert labels == sorted(labels)
    assert len(set(labels)) == len(labels)
    assert [h.graph.name for h in small_hits] == [f"search/{i}" for i in range(1, len(small_hits) + 1)]


def test_hits_are_admissible(small_hits):
    assert small_hits
    for h in small_hits:
        f = h.graph
        assert validate(f).ok
        assert is_minimal_nc(f)
        assert 1 <= fiber_genus(f) <= 3
        assert all(c.genus == 0 and c.self_int < 0 for c in f.components)
        assert f.total_nodes == len(f) - 1 and not any(f.loops(i) for i in f.ids)
        assert max(f.mults) <= 8 and len(f) <= 7
        assert gcd(*f.mults) == h.scale
        assert canonical_form(f) == h.canonical
        assert inequality_report(f).ok, (h.canonical, inequality_report(f).failures)


def test_gap_on_search_output(small_hits):
    for h in small_hits:
        gap = 2 * h.bundle.c2_min - h.bundle.c1sq_min
        assert gap == 0 or gap >= 3


def test_scalings_noted(small_hits):
    scaled = [h for h in small_hits if h.scale > 1]
    assert scaled
    assert all("scaling" in h.note for h in scaled)
    assert all(h.note == "" for h in small_hits if h.scale == 1)


@pytest.mark.parametrize("g", [1, 2])
def test_pruned_equals_unpruned(g):
    b = SearchBounds(g, 4, 4)
    a = [h.canonical for h in enumerate_fibers(b, threads=1, pruned=True)]
    u = [h.canonical for h in enumerate_fibers(b, threads=1, pruned=False)]
    assert a == u


def test_pruned_equals_unpruned_genus_range():
    b = SearchBounds((1, 6), 4, 4)
    assert ({h.canonical for h in enumerate_fibers(b, threads=1)}
            == {h.canonical for h in enumerate_fibers(b, threads=1, pruned=False)})


def test_deterministic_across_threads():
    b = SearchBounds((1, 3), 6, 6)
    one = enumerate_fibers(b, threads=1)
    many = enumerate_fibers(b, threads=4)
    assert [(h.canonical, h.graph.name) for h in one] == [(h.canonical, h.graph.name) for h in many]


def test_thread_env(monkeypatch):
    monkeypatch.setenv("FIBERCALC_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("FIBERCALC_THREADS", "0")
    assert thread_count() >= 1
    assert thread_count(2) == 2


def test_predicate_filters():
    b = SearchBounds((1, 3), 5, 6, "g == 1")
    hits = enumerate_fibers(b, threads=1)
    assert hits and all(h.bundle.g == 1 for h in hits)
    none = enumerate_fibers(SearchBounds((1, 3), 5, 6, "c1sq_min < 0"), threads=1)
    assert none == []


@pytest.mark.parametrize("text", [
    "import os", "g.__class__", "f(g)", "g > 1.5", "bogus > 1", "g > True", "g ** 2 > 1",
])
def test_predicate_errors(text):
    with pytest.raises(PredicateError):
        Predicate(text)


def test_predicate_is_exact():
    p = Predicate("c1sq_min > 4*g - 11/2 and not V > 20")
    assert p.text.startswith("c1sq_min")
    hits = enumerate_fibers(SearchBounds(2, 4, 4, "chi == 1/6 or chi > 1/6"), threads=1)
    assert hits == enumerate_fibers(SearchBounds(2, 4, 4, "chi >= 1/6"), threads=1)


def test_theorem13_small_bounds_empty():
    rep = verify_theorem13(SearchBounds(2, 5, 6), threads=1)
    assert rep.found == {} and rep.expected == {} and rep.empty_diff


def test_theorem13_high_genus_empty():
    rep = verify_theorem13(SearchBounds((7, 9), 8, 10))
    assert rep.found == {} and rep.empty_diff


def test_theorem13_genus2():
    rep = verify_theorem13(SearchBounds(2, 9, 8))
    assert rep.empty_diff, (rep.missing, rep.unexpected)
    assert "tree" in rep.note
    keys = sorted(rep.expected.values())
    # the tree-shaped genus-2 types inside these bounds
    assert {k.split("/")[1] for k in keys} == {"10", "11"}
    assert set(rep.expected) == set(rep.found)


def test_restricted_catalog_respects_bounds():
    from fibercalc.catalog import lookup

    got = restricted_catalog(SearchBounds((2, 6), 9, 8))
    assert got
    for form, key in got.items():
        f = lookup(key).graph
        assert len(f) <= 9 and max(f.mults) <= 8
        assert canonical_form(f) == form
