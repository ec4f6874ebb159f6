"""Bounded enumeration of numerical fibers supported on rational trees."""

from __future__ import annotations

import ast
import logging
import operator
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import gcd
from typing import Iterator, Optional, Sequence

import networkx as nx

from fibercalc.classify import BOUND_EXCESS, canonical_form
from fibercalc.fiber_model import FiberGraph, blow_down, build_fiber, validate
from fibercalc.invariants import InvariantBundle, compute_invariants

log = logging.getLogger(__name__)

THREADS_ENV = "FIBERCALC_THREADS"
THEOREM13_PREDICATE = "c1sq_min > 4*g - 11/2"


# -- predicates -----------------------------------------------------------

_BIN = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}
_CMP = {ast.Lt: operator.lt, ast.LtE: operator.le, ast.Gt: operator.gt, ast.GtE: operator.ge,
        ast.Eq: operator.eq, ast.NotEq: operator.ne}

PREDICATE_NAMES = (
    "g", "N", "N_bar", "N_min", "pa_red", "mu", "alpha", "beta", "beta_minus", "beta_plus",
    "fred_sq", "c1sq_bar", "c2_bar", "chi", "c1sq_min", "c2_min", "blowups", "V", "max_mult",
)


class PredicateError(ValueError):
    pass


class Predicate:
    """A comparison expression over invariant names, evaluated exactly."""

    def __init__(self, text: str):
        self.text = text
        try:
            self.tree = ast.parse(text, mode="eval")
        except SyntaxError as exc:
            raise PredicateError(f"cannot parse predicate {text!r}: {exc.msg}") from None
        self._check(self.tree.body)

    def _check(self, node) -> None:
        ok = (ast.Expression, ast.BoolOp, ast.And, ast.Or, ast.UnaryOp, ast.Not, ast.USub,
              ast.UAdd, ast.BinOp, ast.Compare, ast.Name, ast.Load, ast.Constant,
              *_BIN, *_CMP)
        for sub in ast.walk(node):
            if not isinstance(sub, ok):
                raise PredicateError(f"unsupported syntax in predicate: {type(sub).__name__}")
            if isinstance(sub, ast.Name) and sub.id not in PREDICATE_NAMES:
                raise PredicateError(f"unknown name {sub.id!r} in predicate")
            if isinstance(sub, ast.Constant) and (
                    isinstance(sub.value, bool) or not isinstance(sub.value, int)):
                raise PredicateError("predicate constants must be integers (use a/b for fractions)")

    def _eval(self, node, env):
        if isinstance(node, ast.Constant):
            return Fraction(node.value)
        if isinstance(node, ast.Name):
            return env[node.id]
        if isinstance(node, ast.UnaryOp):
            v = self._eval(node.operand, env)
            if isinstance(node.op, ast.Not):
                return not v
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            return _BIN[type(node.op)](self._eval(node.left, env), self._eval(node.right, env))
        if isinstance(node, ast.BoolOp):
            vals = (self._eval(v, env) for v in node.values)
            return all(vals) if isinstance(node.op, ast.And) else any(vals)
        if isinstance(node, ast.Compare):
            left = self._eval(node.left, env)
            for op, comp in zip(node.ops, node.comparators):
                right = self._eval(comp, env)
                if not _CMP[type(op)](left, right):
                    return False
                left = right
            return True
        raise PredicateError(f"cannot evaluate {ast.dump(node)}")

    def __call__(self, b: InvariantBundle, f: FiberGraph) -> bool:
        env = {k: Fraction(getattr(b, k)) for k in PREDICATE_NAMES
               if k not in ("N", "V", "max_mult")}
        env.update(N=Fraction(b.N_min), V=Fraction(len(f)), max_mult=Fraction(max(f.mults)))
        return bool(self._eval(self.tree.body, env))


# -- bounds and hits ------------------------------------------------------

@dataclass(frozen=True)
class SearchBounds:
    genus: tuple[int, int]
    max_vertices: int
    max_mult: int
    predicate: Optional[str] = None
    min_vertices: int = 2

    def __post_init__(self):
        g = self.genus
        if isinstance(g, int):
            object.__setattr__(self, "genus", (g, g))
        if self.max_vertices < 1 or self.max_mult < 1:
            raise ValueError("max_vertices and max_mult must be >= 1")
        if self.predicate:
            Predicate(self.predicate)


@dataclass(frozen=True)
class SearchHit:
    canonical: str
    graph: FiberGraph
    scale: int  # the fiber is scale * (gcd-1 base)
    bundle: InvariantBundle = field(compare=False)

    @property
    def note(self) -> str:
        return f"scaling {self.scale} of a gcd-1 fiber" if self.scale > 1 else ""


def _tree_shapes(v: int) -> list[list[tuple[int, int]]]:
    if v == 1:
        return [[]]
    return [sorted(t.edges()) for t in nx.nonisomorphic_trees(v)]


def _dfs_order(v: int, edges) -> tuple[list[int], list[list[int]]]:
    adj: list[list[int]] = [[] for _ in range(v)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    # start from a vertex of maximal degree so that leaves settle early
    root = max(range(v), key=lambda x: (len(adj[x]), -x))
    order, seen, stack = [], {root}, [root]
    while stack:
        x = stack.pop()
        order.append(x)
        for y in sorted(adj[x], key=lambda y: len(adj[y])):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return order, adj


def _graph_from(mults: Sequence[int], edges, name: str) -> Optional[FiberGraph]:
    comps = [(f"v{i}", m) for i, m in enumerate(mults)]
    try:
        f = build_fiber(name, comps, [(f"v{a}", f"v{b}") for a, b in edges])
    except ValueError:
        return None
    return f


def _admissible(f: FiberGraph) -> bool:
    """Final filter shared by the pruned and unpruned enumerators."""
    for c in f.components:
        if c.self_int > -1:
            return False
        if c.self_int == -1 and f.degree(c.id) <= 2:
            return False
    return True


def _with_blowups(f: FiberGraph) -> FiberGraph:
    bd = blow_down(f)
    return f.with_blowups(bd.r, bd.mults if all(m >= 2 for m in bd.mults) else None)


def _hits_for(base: FiberGraph, bounds: SearchBounds, pred: Optional[Predicate]) -> list[SearchHit]:
    out = []
    gmin, gmax = bounds.genus
    top = max(base.mults)
    for k in range(1, bounds.max_mult // top + 1):
        f = base if k == 1 else base.scaled(k)
        rep = validate(f)
        if not rep.ok or not gmin <= rep.genus <= gmax:
            continue
        f = _with_blowups(f)
        b = compute_invariants(f)
        if pred is not None and not pred(b, f):
            continue
        out.append(SearchHit(canonical_form(f), f, k, b))
    return out


def _assignments_pruned(v: int, edges, max_mult: int) -> Iterator[list[int]]:
    order, adj = _dfs_order(v, edges)
    pos = {x: i for i, x in enumerate(order)}
    # vertices whose neighbourhood is complete once position t is assigned
    settle: list[list[int]] = [[] for _ in range(v)]
    for x in range(v):
        t = max([pos[x]] + [pos[y] for y in adj[x]])
        settle[t].append(x)
    mults = [0] * v

    def ok_at(t: int) -> bool:
        for x in settle[t]:
            s = sum(mults[y] for y in adj[x])
            if s % mults[x]:
                return False
            e = s // mults[x]
            if e < 1 or (e == 1 and len(adj[x]) <= 2):
                return False
        return True

    def rec(t: int):
        if t == v:
            yield list(mults)
            return
        x = order[t]
        for m in range(1, max_mult + 1):
            mults[x] = m
            if ok_at(t):
                yield from rec(t + 1)
        mults[x] = 0

    yield from rec(0)


def _assignments_unpruned(v: int, edges, max_mult: int) -> Iterator[list[int]]:
    for mults in product(range(1, max_mult + 1), repeat=v):
        yield list(mults)


def _search_shape(args) -> list[SearchHit]:
    v, edges, bounds, pruned = args
    pred = Predicate(bounds.predicate) if bounds.predicate else None
    gen = _assignments_pruned if pruned else _assignments_unpruned
    seen: dict[str, SearchHit] = {}
    for mults in gen(v, edges, bounds.max_mult):
        if gcd(*mults) != 1:
            continue
        f = _graph_from(mults, edges, f"tree{v}")
        if f is None or not _admissible(f):
            continue
        for hit in _hits_for(f, bounds, pred):
            seen.setdefault(hit.canonical, hit)
    return list(seen.values())


def thread_count(threads: Optional[int] = None) -> int:
    if threads is None:
        try:
            threads = int(os.environ.get(THREADS_ENV, "0"))
        except ValueError:
            threads = 0
    return threads if threads > 0 else (os.cpu_count() or 1)


def enumerate_fibers(bounds: SearchBounds, threads: Optional[int] = None,
                     pruned: bool = True) -> list[SearchHit]:
    """Every admissible rational-tree fiber within bounds, one per isomorphism
    class, sorted by canonical label."""
    tasks = [(v, edges, bounds, pruned)
             for v in range(max(bounds.min_vertices, 2), bounds.max_vertices + 1)
             for edges in _tree_shapes(v)]
    n = thread_count(threads)
    if n == 1 or len(tasks) < 2:
        parts = [_search_shape(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(n, len(tasks))) as ex:
            parts = list(ex.map(_search_shape, tasks, chunksize=1))
    merged: dict[str, SearchHit] = {}
    for part in parts:
        for hit in part:
            merged.setdefault(hit.canonical, hit)
    hits = [merged[k] for k in sorted(merged)]
    # give each hit a stable name from its position
    out = []
    for i, h in enumerate(hits, 1):
        g = h.graph
        out.append(SearchHit(h.canonical, type(g)(f"search/{i}", g.components, g.nodes,
                                                   g.blowups, g.record), h.scale, h.bundle))
    log.info("search: %d shapes, %d fibers", len(tasks), len(out))
    return out


# -- re-verifying the 22-type list ----------------------------------------

@dataclass
class Theorem13Report:
    bounds: SearchBounds
    found: dict[str, str]  # canonical -> search name
    expected: dict[str, str]  # canonical -> catalog key
    missing: list[str]  # catalog keys not found
    unexpected: list[str]  # search hits not in the catalog
    note: str = ""

    @property
    def empty_diff(self) -> bool:
        return not self.missing and not self.unexpected


def restricted_catalog(bounds: SearchBounds) -> dict[str, str]:
    """Canonical forms of the 22 types (free lengths expanded) inside bounds."""
    from fibercalc.catalog import FREE_LENGTH, type_entry

    gmin, gmax = bounds.genus
    out = {}
    for no in range(1, 23):
        lengths = range(1, bounds.max_vertices + 1) if no in FREE_LENGTH else [None]
        for L in lengths:
            e = type_entry(no, L)
            f = e.graph
            if (len(f) <= bounds.max_vertices and max(f.mults) <= bounds.max_mult
                    and gmin <= e.expected["g"] <= gmax):
                out.setdefault(canonical_form(f), e.key)
    return out


def verify_theorem13(bounds: SearchBounds, threads: Optional[int] = None) -> Theorem13Report:
    b = SearchBounds(bounds.genus, bounds.max_vertices, bounds.max_mult, THEOREM13_PREDICATE,
                     bounds.min_vertices)
    hits = enumerate_fibers(b, threads)
    found = {h.canonical: h.graph.name for h in hits}
    expected = restricted_catalog(b)
    missing = sorted(expected[k] for k in expected if k not in found)
    unexpected = sorted(found[k] for k in found if k not in expected)
    note = ("search space: rational trees with single edges; fibers needing blow-ups are "
            "included with r from the numerical blow-down, non-tree types are checked via "
            "the catalog only")
    return Theorem13Report(b, found, expected, missing, unexpected, note)


__all__ = [
    "BOUND_EXCESS", "Predicate", "PredicateError", "SearchBounds", "SearchHit",
    "Theorem13Report", "enumerate_fibers", "restricted_catalog", "verify_theorem13",
]
