from fractions import Fraction as F
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fibercalc.arith import (
    branch_beta,
    chi_pair,
    continuant,
    dedekind_sum,
    dedekind_sum_direct,
    hj_expand,
)


# -- chi_pair ---------------------------------------------------------------

def test_chi_pair_values():
    assert chi_pair(5, 5) == 0
    assert chi_pair(1, 6) == F(5, 18)
    assert chi_pair(2, 6) == F(1, 18)
    assert chi_pair(3, 6) == 0


def test_chi_pair_rejects_zero():
    with pytest.raises(ValueError):
        chi_pair(0, 3)
    with pytest.raises(ValueError):
        chi_pair(3, -1)


def test_chi_pair_additivity():
    # chi(p, q) = chi(p, p + q) + chi(p + q, q)
    for p in range(1, 101):
        for q in range(1, 101):
            assert chi_pair(p, q) == chi_pair(p, p + q) + chi_pair(p + q, q)


@given(st.integers(1, 500), st.integers(1, 500), st.integers(1, 20))
def test_chi_pair_symmetric_and_scale_invariant(p, q, k):
    assert chi_pair(p, q) == chi_pair(q, p)
    assert chi_pair(k * p, k * q) == chi_pair(p, q)


# -- Dedekind sums ----------------------------------------------------------

def test_dedekind_small_values():
    assert dedekind_sum(1, 1) == 0
    assert dedekind_sum_direct(1, 1) == 0
    assert dedekind_sum(1, 3) == F(1, 18)
    assert dedekind_sum_direct(1, 3) == F(1, 18)
    assert dedekind_sum(1, 3) + dedekind_sum(3, 1) == chi_pair(1, 3)


def test_dedekind_rejects_bad_q():
    with pytest.raises(ValueError):
        dedekind_sum(1, 0)
    with pytest.raises(ValueError):
        dedekind_sum_direct(1, 0)


def test_reciprocity_small_exhaustive():
    for p in range(1, 60):
        for q in range(1, 60):
            if gcd(p, q) == 1:
                assert dedekind_sum(p, q) + dedekind_sum(q, p) == chi_pair(p, q)


@given(st.integers(-10_000, 10_000), st.integers(1, 3000))
def test_fast_matches_direct(p, q):
    assert dedekind_sum(p, q) == dedekind_sum_direct(p, q)


def test_direct_fraction_fallback(monkeypatch):
    import fibercalc.arith as arith

    vec = [arith.dedekind_sum_direct(p, q) for p, q in [(5, 97), (-7, 120), (3, 1000)]]
    monkeypatch.setattr(arith, "_INT64_SAFE_Q", 1)
    slow = [arith.dedekind_sum_direct(p, q) for p, q in [(5, 97), (-7, 120), (3, 1000)]]
    assert vec == slow


@given(st.integers(-10_000, 10_000), st.integers(1, 10**6), st.integers(-50, 50))
def test_dedekind_symmetries(p, q, k):
    assert dedekind_sum(-p, q) == -dedekind_sum(p, q)
    assert dedekind_sum(p + k * q, q) == dedekind_sum(p, q)


@given(st.integers(1, 10**5), st.integers(1, 2000), st.integers(1, 30))
def test_dedekind_reduces_common_factor(p, q, d):
    assert dedekind_sum(d * p, d * q) == dedekind_sum(p, q)


def test_dedekind_complementary_arguments():
    # s(p, q) + s(p', q) = 0 when q | p + p'
    for q in range(1, 80):
        for p in range(0, q):
            assert dedekind_sum(p, q) + dedekind_sum(q - p, q) == 0
            assert dedekind_sum(p, q) + dedekind_sum(2 * q - p, q) == 0


# -- Hirzebruch-Jung --------------------------------------------------------

def test_hj_examples():
    assert hj_expand(2, 1).es == (2,)
    c = hj_expand(5, 4)
    assert c.es == (2, 2, 2, 2) and c.mus == (1, 2, 3, 4, 5)
    c = hj_expand(5, 2)
    assert c.es == (3, 2) and c.mus == (1, 3, 5)
    assert continuant(c.es) == 5 and continuant(c.es[1:]) == 2
    c = hj_expand(10, 7)
    assert c.es == (2, 2, 4) and c.mus == (1, 2, 3, 10)


def test_hj_rejects_bad_input():
    with pytest.raises(ValueError):
        hj_expand(6, 4)
    with pytest.raises(ValueError):
        hj_expand(5, 5)
    with pytest.raises(ValueError):
        hj_expand(5, 0)


def test_hj_chain_invariants():
    for n in range(2, 120):
        for q in range(1, n):
            if gcd(n, q) != 1:
                continue
            c = hj_expand(n, q)
            assert all(e >= 2 for e in c.es)
            assert continuant(c.es) == n
            assert continuant(c.es[1:]) == q
            assert c.mus[0] == 1 and c.mus[-1] == n
            mus = (0,) + c.mus
            for k, e in enumerate(c.es, 1):
                assert mus[k + 1] == e * mus[k] - mus[k - 1]
            assert all(gcd(a, b) == 1 for a, b in zip(c.mus, c.mus[1:]))
            assert (q * c.q_prime) % n == 1 % n


def test_branch_beta_examples():
    assert branch_beta(hj_expand(2, 1)) == F(1, 2)
    assert branch_beta(hj_expand(10, 7)) == F(7, 10)
    assert F(1, 2) + F(1, 6) + F(1, 30) == F(7, 10)


def test_branch_beta_closed_form_family():
    # chains of r-1 (-2)-curves followed by one (-e)-curve
    for r in range(1, 12):
        for e in range(2, 12):
            n, q = r * (e - 1) + 1, (r - 1) * (e - 1) + 1
            if q >= n:
                continue
            assert branch_beta(hj_expand(n, q)) == 1 - F(e - 1, n)


@settings(max_examples=200)
@given(st.integers(2, 5000), st.data())
def test_branch_beta_is_q_over_n(n, data):
    q = data.draw(st.integers(1, n - 1).filter(lambda x: gcd(x, n) == 1))
    assert branch_beta(hj_expand(n, q)) == F(q, n)
