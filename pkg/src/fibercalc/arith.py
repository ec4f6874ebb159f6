"""Number-theoretic kernel: pair-chi, Dedekind sums, Hirzebruch-Jung fractions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np


def chi_pair(p: int, q: int) -> Fraction:
    """chi(p, q) = (q/p + p/q + gcd(p,q)^2/(pq))/12 - 1/4."""
    if p <= 0 or q <= 0:
        raise ValueError(f"chi_pair needs positive arguments, got ({p}, {q})")
    d = gcd(p, q)
    return (Fraction(q, p) + Fraction(p, q) + Fraction(d * d, p * q)) / 12 - Fraction(1, 4)


def _saw(x: Fraction) -> Fraction:
    # ((x)): x - floor(x) - 1/2, and 0 at integers
    if x.denominator == 1:
        return Fraction(0)
    return x - (x.numerator // x.denominator) - Fraction(1, 2)


_INT64_SAFE_Q = 2_000_000


def dedekind_sum_direct(p: int, q: int) -> Fraction:
    """O(q) summation of ((pi/q))((i/q)); the reference implementation."""
    if q <= 0:
        raise ValueError("dedekind_sum needs q >= 1")
    d = gcd(p, q)
    p, q = (p // d) % (q // d), q // d
    if q == 1:
        return Fraction(0)
    if q > _INT64_SAFE_Q:
        return sum((_saw(Fraction(p * i, q)) * _saw(Fraction(i, q)) for i in range(1, q)), Fraction(0))
    # ((i/q)) = (2i - q)/2q and ((pi/q)) = (2r - q)/2q with r = pi mod q, never 0 here;
    # the integer sum is bounded by q^3, exact in int64 below the cutoff
    i = np.arange(1, q, dtype=np.int64)
    r = (p * i) % q
    total = int(np.dot(2 * i - q, 2 * r - q))
    return Fraction(total, 4 * q * q)


def dedekind_sum(p: int, q: int) -> Fraction:
    """Dedekind sum s(p, q) via reciprocity; logarithmic in q."""
    if q <= 0:
        raise ValueError("dedekind_sum needs q >= 1")
    d = gcd(p, q)
    p, q = p // d, q // d
    sign = 1
    acc = Fraction(0)
    # s(p,q) = chi(p,q) - s(q,p), with p reduced mod q at each step
    while q > 1:
        p %= q
        if p == 0:
            break
        if 2 * p > q:
            p = q - p
            sign = -sign
        acc += sign * chi_pair(p, q)
        p, q = q, p
        sign = -sign
    return acc


@dataclass(frozen=True)
class HJChain:
    n: int
    q: int
    es: tuple[int, ...]
    mus: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.es)

    @property
    def q_prime(self) -> int:
        return self.mus[-2]


def continuant(es) -> int:
    """Determinant of the tridiagonal matrix with diagonal es and -1 off it."""
    prev, cur = 0, 1
    for e in es:
        prev, cur = cur, e * cur - prev
    return cur


def hj_expand(n: int, q: int) -> HJChain:
    """Minus continued fraction n/q = e1 - 1/(e2 - ...) with every e >= 2."""
    if not 1 <= q < n:
        raise ValueError(f"hj_expand needs 1 <= q < n, got n={n}, q={q}")
    if gcd(n, q) != 1:
        raise ValueError(f"hj_expand needs gcd(n, q) = 1, got n={n}, q={q}")
    es = []
    a, b = n, q
    while b:
        e = -(-a // b)
        es.append(e)
        a, b = b, e * b - a
    mus = [1]
    prev = 0
    for e in es:
        prev, nxt = mus[-1], e * mus[-1] - prev
        mus.append(nxt)
    assert mus[-1] == n
    return HJChain(n, q, tuple(es), tuple(mus))


def branch_beta(chain: HJChain) -> Fraction:
    """q/n for an H-J branch, cross-checked against sum 1/(mu_i mu_{i+1})."""
    closed = Fraction(chain.q, chain.n)
    m = chain.mus
    telescoped = sum((Fraction(1, m[i] * m[i + 1]) for i in range(len(m) - 1)), Fraction(0))
    if closed != telescoped:
        raise ArithmeticError(f"branch beta mismatch for {chain}: {closed} != {telescoped}")
    return closed
