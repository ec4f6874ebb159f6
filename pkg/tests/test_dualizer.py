from fractions import Fraction as F
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fibercalc.catalog import example_family, kodaira, standard_entries, type_entry
from fibercalc.classify import canonical_form
from fibercalc.dualizer import (
    default_n,
    dual_fiber,
    dual_size,
    dual_summary,
    duality_check,
    multiplicity_lcm,
    node_chain,
)
from fibercalc.fiber_model import FiberError, fiber_genus, is_minimal_nc, minimize, validate
from fibercalc.invariants import chi_via_pairs, compute_invariants, reduced_pa

CORPUS = standard_entries()
SMALL = [e for e in CORPUS if multiplicity_lcm(e.graph) <= 60]


def test_multiplicity_lcm_examples(kodaira_ii):
    assert multiplicity_lcm(kodaira_ii) == 6
    assert multiplicity_lcm(example_family(4).graph) == 36
    assert multiplicity_lcm(kodaira("I5").graph) == 1


@pytest.mark.parametrize("abn, es, gammas", [
    ((1, 6, 5), (2, 2, 2, 2), (1, 2, 3, 4, 5, 6)),
    ((2, 6, 5), (3, 2), (2, 2, 4, 6)),
    ((1, 1, 3), (2, 2), (1, 1, 1, 1)),
])
def test_node_chain_examples(abn, es, gammas):
    c = node_chain(*abn)
    assert c.es == es and c.gammas == gammas


def test_node_chain_errors():
    with pytest.raises(ValueError):
        node_chain(2, 3, 4)
    with pytest.raises(ValueError):
        node_chain(0, 3, 4)


@settings(max_examples=300)
@given(st.integers(1, 40), st.integers(1, 40), st.integers(2, 400), st.booleans())
def test_node_chain_properties(a, b, n, admissible):
    if admissible:
        n = (n // 2 + 1) * (a * b // gcd(a, b)) - 1
        if n < 2:
            return
    if gcd(a, n) != 1 or gcd(b, n) != 1:
        return
    c = node_chain(a, b, n)
    g = c.gammas
    assert g[0] == a and g[-1] == b
    assert (b + c.chain.q * a) % n == 0
    for i, e in enumerate(c.es, 1):
        assert g[i] * e == g[i - 1] + g[i + 1]
        assert (g[i - 1] + g[i + 1]) % g[i] == 0
    if (n + 1) % (a * b // gcd(a, b)) == 0:
        assert (g[1] + g[-1]) % g[0] == 0
        assert (g[-2] + g[0]) % g[-1] == 0
    # reading the chain from the other end
    r = node_chain(b, a, n)
    assert r.es == tuple(reversed(c.es))
    assert r.gammas == tuple(reversed(c.gammas))


def test_default_n():
    assert default_n(kodaira("II").graph) == 5
    assert default_n(kodaira("I3").graph) == 1
    assert default_n(kodaira("2I1").graph) == 1


def test_dual_of_ii_is_ii_star(kodaira_ii):
    d = dual_fiber(kodaira_ii, 5)
    assert validate(d).ok
    assert not is_minimal_nc(d)
    m, k = minimize(d)
    # the curves E2 and E3 each lose a (-1) neighbour, then E1 follows
    assert k == 3
    assert canonical_form(m) == canonical_form(kodaira("II*").graph)
    assert all(c.self_int == -2 for c in m.components)
    assert compute_invariants(d).chi == F(5, 6)


def test_dual_keeps_strict_transforms(kodaira_ii):
    d = dual_fiber(kodaira_ii, 11)
    for c in kodaira_ii.components:
        dc = d.comp(c.id)
        assert (dc.mult, dc.genus) == (c.mult, c.genus)
    assert fiber_genus(d) == fiber_genus(kodaira_ii)


def test_dual_rejects_bad_n(kodaira_ii):
    with pytest.raises(FiberError, match="congruent"):
        dual_fiber(kodaira_ii, 6)
    with pytest.raises(FiberError):
        dual_summary(kodaira_ii, 7)


def test_dual_of_reduced_fiber_is_identity_by_default():
    f = kodaira("I3").graph
    assert dual_fiber(f) is f
    d = dual_fiber(f, 3, force=True)
    assert set(d.mults) == {1}
    assert len(d) == 3 + 3 * 2
    assert compute_invariants(d).chi == 0 == duality_check(f, 3).chi_dual


@pytest.mark.parametrize("kind, n", [("3I4", 5), ("2I1", 3), ("4I2", 7)])
def test_dual_of_multiple_cycle(kind, n):
    f = kodaira(kind).graph
    m = f.mults[0]
    d = dual_fiber(f, n)
    assert set(d.mults) == {m}
    assert duality_check(f, n).ok


def test_duality_examples(kodaira_ii):
    r = duality_check(kodaira_ii, 5)
    assert (r.chi_F, r.chi_dual, r.N_bar) == (F(1, 6), F(5, 6), 1) and r.ok
    r = duality_check(type_entry(9).graph)
    assert (r.chi_F, r.chi_dual, r.N_bar) == (F(3, 2), F(1, 2), 2) and r.ok
    r = duality_check(kodaira("I4").graph)
    assert (r.chi_F, r.chi_dual, r.N_bar) == (0, 0, 0) and r.ok


def _admissible(f, limit=3):
    mf = multiplicity_lcm(f)
    return [n for n in range(mf - 1, limit * mf + 1, mf) if n >= 2]


@pytest.mark.parametrize("entry", SMALL, ids=lambda e: e.key)
def test_duality_all_admissible_n(entry):
    f = entry.graph
    chis = set()
    for n in _admissible(f):
        r = duality_check(f, n, method="graph")
        assert r.ok, (entry.key, n, r)
        chis.add(r.chi_dual)
    assert len(chis) <= 1


def _nontrivial_n(f):
    mf = multiplicity_lcm(f)
    return mf - 1 if mf >= 3 else 2 * mf + 1 if mf == 1 else 3


@pytest.mark.parametrize("entry", [e for e in CORPUS if dual_size(e.graph, _nontrivial_n(e.graph)) <= 6000],
                         ids=lambda e: e.key)
def test_chain_summary_matches_graph(entry):
    f = entry.graph
    n = _nontrivial_n(f)
    s = dual_summary(f, n)
    d = dual_fiber(f, n, force=True)
    assert s.size == len(d)
    assert s.g == fiber_genus(d)
    assert s.pa_red == reduced_pa(d)
    assert s.chi_pairs == chi_via_pairs(d) == compute_invariants(d).chi


def test_double_dual():
    for e in SMALL:
        f = e.graph
        if multiplicity_lcm(f) <= 2:
            continue
        d = dual_fiber(f)
        if multiplicity_lcm(d) > 60:
            continue
        dd = dual_fiber(d)
        assert compute_invariants(dd).chi == compute_invariants(f).chi, e.key
