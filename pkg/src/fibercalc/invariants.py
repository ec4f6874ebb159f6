"""Local invariants and Chern numbers of a fiber from its NC dual graph."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

from fibercalc.arith import HJChain, branch_beta, chi_pair, continuant, hj_expand
from fibercalc.fiber_model import (
    FiberError,
    FiberGraph,
    blow_down,
    minimize,
    validate,
)


class InconsistencyError(RuntimeError):
    """Internal cross-check failed: a bug, not bad input."""


@dataclass(frozen=True)
class InvariantBundle:
    g: int
    pa_red: int
    N_bar: int
    N_min: int
    mu: int
    alpha: Fraction
    beta: Fraction
    beta_minus: Fraction
    beta_plus: Fraction
    fred_sq: int
    c1sq_bar: Fraction
    c2_bar: Fraction
    chi: Fraction
    c1sq_min: Fraction
    c2_min: Fraction
    blowups: int
    contractions: int
    record: Optional[tuple[int, ...]] = None

    @property
    def N(self) -> int:
        return self.N_min

    def as_dict(self) -> dict:
        return asdict(self)


# Field order for printing; matches the dataclass declaration.
BUNDLE_FIELDS = [
    "g", "pa_red", "N_bar", "N_min", "mu", "alpha", "beta", "beta_minus", "beta_plus",
    "fred_sq", "c1sq_bar", "c2_bar", "chi", "c1sq_min", "c2_min", "blowups", "contractions",
]


def _checked(f: FiberGraph) -> int:
    rep = validate(f)
    if not rep.ok:
        raise FiberError("; ".join(rep.problems))
    return rep.genus


def reduced_pa(f: FiberGraph) -> int:
    """Arithmetic genus of the reduced NC curve: sum of genera plus b_1."""
    return sum(c.genus for c in f.components) + f.total_nodes - len(f) + 1


def node_beta(f: FiberGraph) -> Fraction:
    total = Fraction(0)
    for e in f.nodes:
        a, b = f.comp(e.a).mult, f.comp(e.b).mult
        total += e.count * Fraction(gcd(a, b) ** 2, a * b)
    return total


def reduced_self_intersection(f: FiberGraph) -> int:
    return sum(c.self_int for c in f.components) + 2 * sum(
        e.count for e in f.nodes if not e.is_loop
    )


def _is_link(f: FiberGraph, cid: str) -> bool:
    c = f.comp(cid)
    if c.genus or f.loops(cid):
        return False
    nb = f.neighbours(cid)
    return len(nb) == 2 and all(k == 1 for k in nb.values())


def _branch_walks(f: FiberGraph) -> list[list[str]]:
    walks = []
    for c in f.components:
        if c.genus or f.loops(c.id) or f.degree(c.id) != 1:
            continue
        path = [c.id]
        prev, cur = c.id, next(iter(f.neighbours(c.id)))
        while _is_link(f, cur):
            path.append(cur)
            prev, cur = cur, next(x for x in f.neighbours(cur) if x != prev)
        nxt = f.comp(cur)
        if not nxt.genus and not f.loops(cur) and f.degree(cur) == 1:
            raise InconsistencyError(f"{f.name}: the whole graph is a chain")
        walks.append(path + [cur])
    return walks


def hj_branches(f: FiberGraph) -> list[HJChain]:
    """H-J branches of a minimal NC graph, one per rational leaf."""
    out = []
    for walk in _branch_walks(f):
        chain, bullet = walk[:-1], walk[-1]
        es = [-f.comp(x).self_int for x in chain]
        if any(e < 2 for e in es):
            raise InconsistencyError(f"{f.name}: branch {chain} has a (-1)-curve")
        n, q = continuant(es), continuant(es[1:])
        hj = hj_expand(n, q)
        if hj.es != tuple(es):
            raise InconsistencyError(f"{f.name}: branch {chain} expansion mismatch")
        g1 = f.comp(chain[0]).mult
        mults = [f.comp(x).mult for x in walk]
        if mults != [mu * g1 for mu in hj.mus]:
            raise InconsistencyError(f"{f.name}: branch {chain} multiplicities {mults}")
        out.append(hj)
    return out


def branch_components(f: FiberGraph) -> list[list[str]]:
    """Component ids of every H-J branch, leaf first, bullet excluded."""
    return [w[:-1] for w in _branch_walks(f)]


def compute_invariants(f: FiberGraph) -> InvariantBundle:
    """All invariants; the graph is minimized first."""
    g = _checked(f)
    m, contractions = minimize(f)
    r = m.blowups
    pa = reduced_pa(m)
    n_bar = g - pa
    mu = m.total_nodes
    beta = node_beta(m)
    beta_minus = sum((branch_beta(h) for h in hj_branches(m)), Fraction(0))
    beta_plus = beta - beta_minus
    fsq = reduced_self_intersection(m)
    c1_bar = 4 * n_bar + fsq - beta_minus
    c2_bar = 2 * n_bar + mu - beta_plus
    chi = (c1_bar + c2_bar) / 12
    if 12 * chi != 6 * n_bar + fsq + mu - beta:
        raise InconsistencyError(f"{f.name}: Noether fails at bar level")

    record = m.record
    derived = blow_down(m)
    if record is None and derived.r == r and all(x >= 2 for x in derived.mults):
        record = derived.mults
    if record is not None:
        alpha = Fraction(sum((x - 2) ** 2 for x in record))
        n_min = n_bar - sum((x - 1) * (x - 2) // 2 for x in record)
        fsq_min = fsq + sum((x - 1) ** 2 for x in record)
        mu_min = mu - r + sum((x - 1) * (x - 2) for x in record)
        c1_min = 4 * n_min + fsq_min + alpha - beta_minus
        c2_min = 2 * n_min + mu_min - beta_plus
        if (c1_min, c2_min) != (c1_bar + r, c2_bar - r):
            raise InconsistencyError(f"{f.name}: minimal-level formulas disagree")
        if derived.r == r and (derived.fred_sq, g - derived.pa_red) != (fsq_min, n_min):
            raise InconsistencyError(f"{f.name}: blow-down disagrees with the record")
    else:
        alpha = Fraction(0)
        n_min = n_bar

    return InvariantBundle(
        g=g, pa_red=pa, N_bar=n_bar, N_min=n_min, mu=mu, alpha=alpha, beta=beta,
        beta_minus=beta_minus, beta_plus=beta_plus, fred_sq=fsq,
        c1sq_bar=c1_bar, c2_bar=c2_bar, chi=chi,
        c1sq_min=c1_bar + r, c2_min=c2_bar - r,
        blowups=r, contractions=contractions,
        record=tuple(record) if record is not None else None,
    )


def chi_via_pairs(f: FiberGraph) -> Fraction:
    """chi_F = N_bar/2 - sum over nodes of chi(n_a, n_b)."""
    g = _checked(f)
    n_bar = g - reduced_pa(f)
    s = sum(
        (e.count * chi_pair(f.comp(e.a).mult, f.comp(e.b).mult) for e in f.nodes),
        Fraction(0),
    )
    return Fraction(n_bar, 2) - s


# -- ADE singularities ----------------------------------------------------

def _br(a: int, b: int) -> Fraction:
    return Fraction(gcd(a, b) ** 2, a * b)


_ADE_ARITY = {"A_odd": 2, "A_even": 0, "D_even": 3, "D_odd": 2, "E6": 0, "E7": 2, "E8": 0}


def ade_kind(name: str) -> tuple[str, int]:
    """Map 'A5', 'D7', 'E6' ... to (family key, k)."""
    t, idx = name[0].upper(), int(name[1:])
    if t == "A" and idx >= 1:
        return ("A_odd", (idx + 1) // 2) if idx % 2 else ("A_even", idx // 2)
    if t == "D" and idx >= 4:
        return ("D_even", (idx - 2) // 2) if idx % 2 == 0 else ("D_odd", (idx - 3) // 2)
    if t == "E" and idx in (6, 7, 8):
        return (f"E{idx}", 0)
    raise ValueError(f"unknown ADE type {name!r}")


def ade_invariants(kind: str, branch_mults: Sequence[int] = ()) -> tuple[int, int, Fraction]:
    """(mu, alpha, beta) of an ADE point with the given branch multiplicities.

    Argument order: A_{2k-1} takes (n, m); D_{2k+2} takes (n, m, l) with n
    the smooth branch; D_{2k+3} and E7 take (n, m) with n the smooth branch.
    """
    fam, k = ade_kind(kind)
    if len(branch_mults) != _ADE_ARITY[fam]:
        raise ValueError(f"{kind} expects {_ADE_ARITY[fam]} branch multiplicities")
    if any(x < 1 for x in branch_mults):
        raise ValueError("branch multiplicities must be positive")
    if fam == "A_odd":
        n, m = branch_mults
        beta = 1 - Fraction(1, k) + _br(k * (n + m), n) + _br(k * (n + m), m)
        return 2 * k - 1, k - 1, beta
    if fam == "A_even":
        return 2 * k, k, Fraction(3 * k, 2 * k + 1)
    if fam == "D_even":
        n, m, l = branch_mults
        s = n + k * (m + l)
        beta = Fraction(k * gcd(n, m + l) ** 2, n * s) + _br(s, m) + _br(s, l)
        return 2 * k + 2, k, beta
    if fam == "D_odd":
        n, m = branch_mults
        t = (2 * k + 1) * m + n
        beta = Fraction(1, 2) + _br(m, 2 * t) + Fraction((2 * k + 1) * gcd(n, 2 * m) ** 2, 2 * n * t)
        return 2 * k + 3, k + 1, beta
    if fam == "E6":
        return 6, 3, Fraction(1)
    if fam == "E7":
        n, m = branch_mults
        beta = (Fraction(1, 3) + Fraction(2 * gcd(3 * m, n) ** 2, 3 * n * (2 * m + n))
                + Fraction(gcd(m, 3 * n) ** 2, 3 * m * (2 * m + n)))
        return 7, 3, beta
    return 8, 4, Fraction(4, 5)
