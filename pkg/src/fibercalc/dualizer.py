"""Dual fibers by Hirzebruch-Jung chain insertion at every node."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from math import gcd, lcm
from typing import Optional

from fibercalc.arith import HJChain, continuant, hj_expand
from fibercalc.fiber_model import FiberError, FiberGraph, blow_down, build_fiber, fiber_genus
from fibercalc.invariants import InconsistencyError, chi_via_pairs, compute_invariants, reduced_pa


def multiplicity_lcm(f: FiberGraph) -> int:
    return lcm(*f.mults)


@dataclass(frozen=True)
class NodeChain:
    chain: Optional[HJChain]  # None when n = 1 (nothing inserted)
    gammas: tuple[int, ...]  # gamma_0 = a, ..., gamma_{r+1} = b

    @property
    def es(self) -> tuple[int, ...]:
        return self.chain.es if self.chain else ()

    @property
    def inner(self) -> tuple[int, ...]:
        return self.gammas[1:-1]


@lru_cache(maxsize=1024)
def node_chain(a: int, b: int, n: int) -> NodeChain:
    """Chain resolving z^n = x^a y^b at a node between multiplicities a, b."""
    if min(a, b, n) < 1:
        raise ValueError("node_chain needs positive arguments")
    if gcd(a, n) != 1 or gcd(b, n) != 1:
        raise ValueError(f"node_chain needs gcd(a, n) = gcd(b, n) = 1 (a={a}, b={b}, n={n})")
    if n == 1:
        return NodeChain(None, (a, b))
    q = (-b * pow(a, -1, n)) % n
    hj = hj_expand(n, q)
    g = [a, (q * a + b) // n]
    for e in hj.es:
        g.append(e * g[-1] - g[-2])
    if g[-1] != b or g[-2] <= 0:
        raise InconsistencyError(f"node_chain({a},{b},{n}) ends at {g[-1]}")
    # every interior curve satisfies Zariski; when n = -1 mod lcm(a, b) the
    # ends also divide the sum of their neighbours
    for i, e in enumerate(hj.es, 1):
        assert e * g[i] == g[i - 1] + g[i + 1]
    if (n + 1) % lcm(a, b) == 0:
        assert (g[1] + g[-1]) % g[0] == 0 and (g[-2] + g[0]) % g[-1] == 0
    return NodeChain(hj, tuple(g[:-1]) + (b,))


def default_n(f: FiberGraph) -> int:
    m = multiplicity_lcm(f)
    return m - 1 if m >= 2 else 1


def dual_fiber(f: FiberGraph, n: Optional[int] = None, force: bool = False) -> FiberGraph:
    """The dual model F*: strict transforms keep mult and genus, nodes get chains.

    ``n`` must be -1 modulo M_F.  With M_F <= 2 the default n is 1 and the
    dual is F itself unless ``force`` asks for an explicit n.
    """
    mf = multiplicity_lcm(f)
    if n is None:
        n = default_n(f)
    if n < 1 or (n + 1) % mf:
        raise FiberError(f"n = {n} is not congruent to -1 modulo M_F = {mf}")
    if n == 1 and not force:
        return f
    comps: list[tuple] = [(c.id, c.mult, None, c.genus) for c in f.components]
    nodes: list[tuple] = []
    for idx, e in enumerate(f.nodes):
        a, b = f.comp(e.a).mult, f.comp(e.b).mult
        nc = node_chain(a, b, n)
        for k in range(e.count):
            tag = f"{e.a}~{e.b}#{k + 1}" if e.count > 1 else f"{e.a}~{e.b}"
            prev = e.a
            for j, (gam, ee) in enumerate(zip(nc.inner, nc.es), 1):
                cid = f"{tag}.{j}"
                comps.append((cid, gam, -ee, 0))
                nodes.append((prev, cid))
                prev = cid
            nodes.append((prev, e.b))
    try:
        d = build_fiber(f"{f.name}*", comps, nodes)
    except FiberError as exc:
        raise InconsistencyError(f"dual of {f.name}: {exc}") from exc
    bd = blow_down(d)
    return d.with_blowups(bd.r, bd.mults if all(x >= 2 for x in bd.mults) else None)


@dataclass(frozen=True)
class DualSummary:
    """Invariants of F* read off the inserted chains without building the graph."""
    n: int
    size: int
    g: int
    pa_red: int
    chi_pairs: Fraction

    @property
    def N_bar(self) -> int:
        return self.g - self.pa_red


def dual_size(f: FiberGraph, n: int) -> int:
    """Number of components of dual_fiber(f, n)."""
    if n == 1:
        return len(f)
    return len(f) + sum(
        e.count * len(node_chain(f.comp(e.a).mult, f.comp(e.b).mult, n).es) for e in f.nodes
    )


def dual_summary(f: FiberGraph, n: Optional[int] = None) -> DualSummary:
    """Genus, reduced p_a and pair-chi of F*, computed chain by chain.

    Every chain is a string of smooth rational curves with self-intersections
    -e_k <= -2, so it can be summarised by continuants: eliminating its
    interior from -M leaves an edge of weight 1/K(e_1..e_L) between the
    ends and diagonal corrections K(e_2..e_L)/K, K(e_1..e_{L-1})/K.  The
    remaining matrix on the original components is checked the usual way.
    Along a chain gcd(gamma_k, gamma_k+1) is constant and
    sum 1/(gamma_k gamma_k+1) = K(e_1..e_L)/(ab), which makes the pair-chi
    sum linear in the chain length.
    """
    mf = multiplicity_lcm(f)
    if n is None:
        n = default_n(f)
    if n < 1 or (n + 1) % mf:
        raise FiberError(f"n = {n} is not congruent to -1 modulo M_F = {mf}")
    ids = f.ids
    ix = {c: i for i, c in enumerate(ids)}
    k = len(ids)
    weight = [0] * k  # sum of neighbour multiplicities in F*
    diag = [Fraction(0)] * k  # Schur corrections to -M
    off = [[Fraction(0)] * k for _ in range(k)]
    size, nodes, twice_g = k, 0, 0
    pairs = Fraction(0)
    for e in f.nodes:
        i, j = ix[e.a], ix[e.b]
        a, b = f.comp(e.a).mult, f.comp(e.b).mult
        nc = node_chain(a, b, n)
        es, gam, c = nc.es, nc.gammas, e.count
        L = len(es)
        if any(x < 2 for x in es):
            raise InconsistencyError(f"chain at {e.a}-{e.b} has a curve of self-intersection > -2")
        weight[i] += c * gam[1]
        weight[j] += c * gam[-2]
        size += c * L
        nodes += c * (L + 1)
        twice_g += c * sum(x * (y - 2) for x, y in zip(gam[1:-1], es))
        K, K1, K2 = continuant(es), continuant(es[1:]), continuant(es[:-1])
        if L == 0:
            K1 = K2 = 0
        diag[i] -= c * Fraction(K1, K)
        diag[j] -= c * Fraction(K2, K)
        if i == j:
            diag[i] -= 2 * c * Fraction(1, K)
        else:
            off[i][j] -= c * Fraction(1, K)
            off[j][i] -= c * Fraction(1, K)
        d = gcd(a, gam[1])
        chain_pairs = (Fraction(gam[1], a) + Fraction(gam[-2], b) + sum(es)
                       + Fraction(d * d * K, a * b)) / 12 - Fraction(L + 1, 4)
        pairs += c * chain_pairs
    for i, cid in enumerate(ids):
        m = f.comp(cid).mult
        if weight[i] % m:
            raise InconsistencyError(f"dual of {f.name}: self-intersection of {cid} is not integral")
        # -M_ii = -self = weight/m
        diag[i] += Fraction(weight[i], m)
        twice_g += m * (2 * f.comp(cid).genus - 2) + weight[i]
    mat = [row[:] for row in off]
    for i in range(k):
        mat[i][i] = diag[i]
    for p in range(k):
        piv = mat[p][p]
        if (piv <= 0) if p < k - 1 else (piv != 0):
            raise InconsistencyError(f"dual of {f.name}: intersection form is not that of a fiber")
        for r in range(p + 1, k):
            if mat[r][p]:
                t = mat[r][p] / piv
                for col in range(p, k):
                    mat[r][col] -= t * mat[p][col]
    if twice_g % 2:
        raise InconsistencyError(f"dual of {f.name}: K.F* is odd")
    g = twice_g // 2 + 1
    pa = sum(c.genus for c in f.components) + nodes - size + 1
    return DualSummary(n, size, g, pa, Fraction(g - pa, 2) - pairs)


# Duals up to this many components are built explicitly in duality_check.
GRAPH_LIMIT = 4000


@dataclass(frozen=True)
class DualityResult:
    chi_F: Fraction
    chi_dual: Fraction
    N_bar: int
    N_bar_dual: int
    g: int
    g_dual: int
    n: int
    method: str = "graph"

    @property
    def ok(self) -> bool:
        return (self.chi_F + self.chi_dual == self.N_bar
                and self.N_bar == self.N_bar_dual and self.g == self.g_dual)


def duality_check(f: FiberGraph, n: Optional[int] = None, method: str = "auto") -> DualityResult:
    """chi_F + chi_F* = N_bar, N_bar(F*) = N_bar(F), g(F*) = g(F).

    ``method`` is "graph" (build F* and compute its full bundle, cross-checked
    against the pair-chi formula), "chains" (use :func:`dual_summary`), or
    "auto", which builds the graph only for duals of at most GRAPH_LIMIT
    components.
    """
    if n is None:
        n = default_n(f)
    if method == "auto":
        method = "graph" if dual_size(f, n) <= GRAPH_LIMIT else "chains"
    if method not in ("graph", "chains"):
        raise ValueError(f"unknown method {method!r}")
    g = fiber_genus(f)
    chi = compute_invariants(f).chi
    n_bar = g - reduced_pa(f)
    if method == "chains":
        s = dual_summary(f, n)
        return DualityResult(chi, s.chi_pairs, n_bar, s.N_bar, g, s.g, n, "chains")
    d = dual_fiber(f, n, force=True) if n > 1 else f
    gd = fiber_genus(d)
    chi_d = compute_invariants(d).chi
    if chi_d != chi_via_pairs(d):
        raise InconsistencyError(f"dual of {f.name}: chi paths disagree")
    return DualityResult(chi, chi_d, n_bar, gd - reduced_pa(d), g, gd, n, "graph")
