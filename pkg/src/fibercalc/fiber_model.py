"""Decorated dual graphs of normal-crossing fiber models.

A fiber F = sum n_i C_i is stored as its dual graph: one vertex per
component (multiplicity, self-intersection, geometric genus) and one edge
per pair of meeting components, weighted by the number of nodes between
them.  An edge from a component to itself is a self-node.
"""

from __future__ import annotations

import heapq
import json
import logging
import re
import shlex
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Optional

from fibercalc.canon import canonical_order

log = logging.getLogger(__name__)


class FiberError(ValueError):
    """A document or graph that is not an acceptable fiber."""


class FiberSyntaxError(FiberError):
    def __init__(self, msg: str, line: int, col: int = 1):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Component:
    id: str
    mult: int
    self_int: int
    genus: int = 0


@dataclass(frozen=True)
class NodeEdge:
    a: str
    b: str
    count: int = 1

    @property
    def is_loop(self) -> bool:
        return self.a == self.b


@dataclass(frozen=True)
class FiberGraph:
    name: str
    components: tuple[Component, ...]
    nodes: tuple[NodeEdge, ...]
    blowups: int = 0
    # multiplicities m_i of the blown-up points, in blow-up order
    record: Optional[tuple[int, ...]] = None
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)
    _adj: dict = field(default=None, init=False, repr=False, compare=False, hash=False)
    _loops: dict = field(default=None, init=False, repr=False, compare=False, hash=False)
    _report: object = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        index = {c.id: i for i, c in enumerate(self.components)}
        adj: dict[str, dict[str, int]] = {c.id: {} for c in self.components}
        loops: dict[str, int] = {c.id: 0 for c in self.components}
        for e in self.nodes:
            if e.a not in adj or e.b not in adj:
                continue  # reported by validate
            if e.is_loop:
                loops[e.a] += e.count
            else:
                adj[e.a][e.b] = adj[e.a].get(e.b, 0) + e.count
                adj[e.b][e.a] = adj[e.b].get(e.a, 0) + e.count
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_adj", adj)
        object.__setattr__(self, "_loops", loops)

    # -- lookups ---------------------------------------------------------
    def __len__(self) -> int:
        return len(self.components)

    def comp(self, cid: str) -> Component:
        return self.components[self._index[cid]]

    def index(self, cid: str) -> int:
        return self._index[cid]

    @property
    def ids(self) -> list[str]:
        return [c.id for c in self.components]

    @property
    def mults(self) -> list[int]:
        return [c.mult for c in self.components]

    def neighbours(self, cid: str) -> dict[str, int]:
        """Other components meeting ``cid``, with node counts."""
        return dict(self._adj[cid])

    def loops(self, cid: str) -> int:
        return self._loops[cid]

    def degree(self, cid: str) -> int:
        """Number of node-points on ``cid`` towards other components."""
        return sum(self._adj[cid].values())

    @property
    def total_nodes(self) -> int:
        return sum(e.count for e in self.nodes)

    def adjacency(self) -> list[dict[int, int]]:
        ix = self._index
        return [{ix[j]: k for j, k in self._adj[c.id].items()} for c in self.components]

    def intersection_matrix(self) -> list[list[int]]:
        k = len(self.components)
        m = [[0] * k for _ in range(k)]
        for i, c in enumerate(self.components):
            m[i][i] = c.self_int
        for i, row in enumerate(self.adjacency()):
            for j, cnt in row.items():
                m[i][j] = cnt
        return m

    def with_blowups(self, r: int, record=None) -> "FiberGraph":
        return replace(self, blowups=r, record=tuple(record) if record is not None else None)

    def scaled(self, k: int, name: Optional[str] = None) -> "FiberGraph":
        """The fiber k*F: every multiplicity times k."""
        comps = tuple(replace(c, mult=c.mult * k) for c in self.components)
        return replace(self, name=name or self.name, components=comps)

    def scaled_down(self, d: int) -> "FiberGraph":
        if any(c.mult % d for c in self.components):
            raise FiberError(f"multiplicities are not all divisible by {d}")
        comps = tuple(replace(c, mult=c.mult // d) for c in self.components)
        return replace(self, components=comps)


def _merge_nodes(nodes: Iterable[NodeEdge]) -> tuple[NodeEdge, ...]:
    acc: dict[tuple[str, str], int] = {}
    order: list[tuple[str, str]] = []
    for e in nodes:
        key = (e.a, e.b) if e.a <= e.b else (e.b, e.a)
        if key not in acc:
            order.append(key)
            acc[key] = 0
        acc[key] += e.count
    return tuple(NodeEdge(a, b, acc[(a, b)]) for a, b in order)


def build_fiber(
    name: str,
    components: Iterable[tuple],
    nodes: Iterable[tuple],
    blowups: int = 0,
    record: Optional[Iterable[int]] = None,
    check: bool = True,
) -> FiberGraph:
    """Assemble a graph from ``(id, mult, self_int|None, genus)`` tuples.

    Missing self-intersections are solved from F.C_i = 0.  Nodes are
    ``(a, b)`` or ``(a, b, count)``.
    """
    comps = []
    for c in components:
        c = tuple(c)
        comps.append(c + (None, 0)[len(c) - 2:] if len(c) < 4 else c)
    mult = {c[0]: c[1] for c in comps}
    if len(mult) != len(comps):
        raise FiberError("duplicate component id")
    for cid, m, *_ in comps:
        if not isinstance(m, int) or m < 1:
            raise FiberError(f"component {cid}: multiplicity must be a positive integer")
    edges = []
    for e in nodes:
        a, b = e[0], e[1]
        cnt = e[2] if len(e) > 2 else 1
        for x in (a, b):
            if x not in mult:
                raise FiberError(f"node references unknown component {x!r}")
        if cnt < 1:
            raise FiberError(f"node {a}-{b}: count must be >= 1")
        edges.append(NodeEdge(a, b, cnt))
    edges_t = _merge_nodes(edges)
    weight = dict.fromkeys(mult, 0)  # sum over neighbours of n_j * C_i.C_j
    for e in edges_t:
        if not e.is_loop:
            weight[e.a] += mult[e.b] * e.count
            weight[e.b] += mult[e.a] * e.count
    out = []
    for cid, m, s, g in comps:
        if g < 0:
            raise FiberError(f"component {cid}: genus must be >= 0")
        if s is None:
            if weight[cid] % m:
                raise FiberError(
                    f"not a numerical fiber: self-intersection of {cid} solves to "
                    f"{Fraction(-weight[cid], m)}, not an integer"
                )
            s = -weight[cid] // m
        out.append(Component(cid, m, s, g))
    f = FiberGraph(name, tuple(out), edges_t, blowups, tuple(record) if record is not None else None)
    if check:
        rep = validate(f)
        if not rep.ok:
            raise FiberError("; ".join(rep.problems))
    return f


# -- validation -----------------------------------------------------------

@dataclass
class ValidationReport:
    ok: bool
    problems: list[str]
    genus: Optional[int] = None
    radical: Optional[tuple[int, ...]] = None


def _connected(f: FiberGraph) -> bool:
    if not f.components:
        return False
    start = f.components[0].id
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for u in f._adj[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == len(f.components)


def _elimination_pivots(f: FiberGraph) -> list[Fraction]:
    """Pivots of symmetric Gaussian elimination of -M, sparse, min-degree order.

    Stops early at the first non-positive pivot.  Any elimination order is
    fine here: for a fiber every proper principal submatrix of -M is
    positive definite, so the first k-1 pivots are positive and the last
    one vanishes.
    """
    a: dict[str, dict[str, Fraction]] = {
        c.id: {j: Fraction(-k) for j, k in f._adj[c.id].items()} for c in f.components
    }
    diag = {c.id: Fraction(-c.self_int) for c in f.components}
    heap = [(len(a[v]), v) for v in a]
    heapq.heapify(heap)
    done: set[str] = set()
    piv: list[Fraction] = []
    while heap:
        d, v = heapq.heappop(heap)
        if v in done or d != len(a[v]):
            continue
        p = diag[v]
        piv.append(p)
        done.add(v)
        if p <= 0 and len(done) < len(a):
            break
        row = a.pop(v)
        nbrs = list(row)
        for i in nbrs:
            del a[i][v]
        if p == 0:
            continue
        for x, i in enumerate(nbrs):
            ri = row[i]
            diag[i] -= ri * ri / p
            for j in nbrs[x + 1:]:
                t = a[i].get(j, 0) - ri * row[j] / p
                if t:
                    a[i][j] = a[j][i] = t
                else:
                    a[i].pop(j, None)
                    a[j].pop(i, None)
        for i in nbrs:
            heapq.heappush(heap, (len(a[i]), i))
    return piv


def _genus_twice_minus_two(f: FiberGraph) -> int:
    return sum(
        c.mult * (2 * (c.genus + f.loops(c.id)) - 2 - c.self_int) for c in f.components
    )


def validate(f: FiberGraph) -> ValidationReport:
    """Structural and numerical checks; never raises.  Cached per graph."""
    if f._report is None:
        object.__setattr__(f, "_report", _validate(f))
    rep = f._report
    return ValidationReport(rep.ok, list(rep.problems), rep.genus, rep.radical)


def _validate(f: FiberGraph) -> ValidationReport:
    problems = []
    if not f.components:
        return ValidationReport(False, ["empty graph"])
    for c in f.components:
        if c.mult < 1:
            problems.append(f"component {c.id}: multiplicity {c.mult} < 1")
        if c.genus < 0:
            problems.append(f"component {c.id}: genus {c.genus} < 0")
    if len(f._index) != len(f.components):
        problems.append("duplicate component id")
    for e in f.nodes:
        if e.a not in f._index or e.b not in f._index:
            problems.append(f"node {e.a}-{e.b}: unknown component")
        if e.count < 1:
            problems.append(f"node {e.a}-{e.b}: count {e.count} < 1")
    if f.blowups < 0:
        problems.append("blowups must be >= 0")
    if f.record is not None:
        if len(f.record) != f.blowups:
            problems.append(f"resolution record has {len(f.record)} entries, blowups = {f.blowups}")
        if any(m < 2 for m in f.record):
            problems.append("resolution record entries must be >= 2")
    if problems:
        return ValidationReport(False, problems)
    if not _connected(f):
        return ValidationReport(False, ["graph is disconnected"])
    for c in f.components:
        lhs = c.mult * c.self_int + sum(f.comp(j).mult * k for j, k in f._adj[c.id].items())
        if lhs:
            problems.append(f"Zariski identity fails at {c.id}: F.C = {lhs}")
        if len(f) > 1 and c.self_int > 0:
            problems.append(f"component {c.id}: self-intersection {c.self_int} > 0")
    if problems:
        return ValidationReport(False, problems)
    # -M positive semidefinite with one-dimensional kernel; by Zariski the
    # kernel is spanned by (n_i), and every proper sub-divisor has negative
    # self-intersection.
    piv = _elimination_pivots(f)
    if len(piv) < len(f) or any(p <= 0 for p in piv[:-1]) or piv[-1] != 0:
        problems.append("intersection matrix is not negative semidefinite of corank 1")
        return ValidationReport(False, problems)
    t = _genus_twice_minus_two(f)
    if t % 2:
        problems.append(f"K.F = {t} is odd: not a fiber of a relatively minimal family")
        return ValidationReport(False, problems)
    g = t // 2 + 1
    if g < 1:
        problems.append(f"not a numerical fiber (fiber genus {g} < 1)")
        return ValidationReport(False, problems, genus=g)
    return ValidationReport(True, [], genus=g, radical=tuple(f.mults))


def fiber_genus(f: FiberGraph) -> int:
    """g with 2g - 2 = sum n_i K.C_i."""
    t = _genus_twice_minus_two(f)
    if t % 2 or t < -2:
        raise FiberError(f"not a fiber of a relatively minimal family (K.F = {t})")
    return t // 2 + 1


# -- contraction ----------------------------------------------------------

def _redundant(self_int: int, genus: int, loops: int, nb: dict) -> Optional[bool]:
    """True for a redundant (-1)-curve, None for one that would leave the
    normal-crossing category if contracted."""
    if self_int != -1 or genus != 0:
        return False
    pts = sum(nb.values())
    if pts > 2:
        return False
    if loops or any(k > 1 for k in nb.values()):
        return None
    return pts >= 1


def minimize(f: FiberGraph) -> tuple[FiberGraph, int]:
    """Contract redundant (-1)-curves until none remain.

    Always contracts the smallest contractible id first, so the result is
    deterministic.
    """
    comp = {c.id: c for c in f.components}
    self_int = {c.id: c.self_int for c in f.components}
    adj = {c.id: dict(nb) for c, nb in ((c, f._adj[c.id]) for c in f.components)}
    heap = [c.id for c in f.components if c.self_int == -1]
    heapq.heapify(heap)
    warned: set[str] = set()
    removed: set[str] = set()
    count = 0
    points: list[int] = []  # multiplicity of the point each contraction creates
    while heap:
        v = heapq.heappop(heap)
        if v in removed:
            continue
        ok = _redundant(self_int[v], comp[v].genus, f._loops[v], adj[v])
        if ok is None and v not in warned:
            log.warning("%s: contraction leaves normal-crossing category; kept", v)
            warned.add(v)
        if not ok:
            continue
        nb = list(adj.pop(v))
        removed.add(v)
        count += 1
        points.append(len(nb))
        for u in nb:
            del adj[u][v]
            self_int[u] += 1
        if len(nb) == 2:
            a, b = nb
            adj[a][b] = adj[a].get(b, 0) + 1
            adj[b][a] = adj[b].get(a, 0) + 1
        for u in nb:
            if self_int[u] == -1:
                heapq.heappush(heap, u)
    if not count:
        return f, 0
    comps = tuple(replace(c, self_int=self_int[c.id]) for c in f.components if c.id not in removed)
    nodes = [e for e in f.nodes if e.is_loop and e.a not in removed]
    for a in (c.id for c in comps):
        for b, k in adj[a].items():
            if a < b:
                nodes.append(NodeEdge(a, b, k))
    r = max(0, f.blowups - count)
    if count > f.blowups:
        log.info("%s: %d contractions exceed blowups = %d", f.name, count, f.blowups)
    rec = _shrink_record(f.record, points, r)
    return FiberGraph(f.name, comps, tuple(nodes), r, rec), count


def _shrink_record(record, points, r):
    # remove the entries the contractions account for, matched as a multiset:
    # disjoint exceptional curves may be contracted in any order
    if record is None:
        return None
    left = list(record)
    for m in points:
        if m in left:
            left.reverse()
            left.remove(m)  # the latest blow-up of that multiplicity
            left.reverse()
        elif m >= 2:
            return None
    return tuple(left) if len(left) == r else None


def is_minimal_nc(f: FiberGraph) -> bool:
    return not any(
        _redundant(c.self_int, c.genus, f._loops[c.id], f._adj[c.id]) for c in f.components
    )


@dataclass(frozen=True)
class BlowDown:
    r: int
    mults: tuple[int, ...]  # multiplicities of the blown-up points, blow-up order
    pa_red: int  # arithmetic genus of the reduced minimal fiber
    fred_sq: int  # self-intersection of the reduced minimal fiber


def blow_down(f: FiberGraph) -> BlowDown:
    """Numerically contract the NC model to the relatively minimal fiber.

    Works on the intersection form and the arithmetic genera of the image
    curves: a component with p_a = 0 and self-intersection -1 is a smooth
    rational (-1)-curve, so it can be blown down.  Each contraction of E
    changes the survivors by C_i.C_j += k_i k_j and p_a(C_i) += k_i(k_i-1)/2
    with k_i = C_i.E.
    """
    ids = [c.id for c in f.components]
    sq = {c.id: c.self_int for c in f.components}
    pa = {c.id: c.genus + f._loops[c.id] for c in f.components}
    adj = {v: dict(f._adj[v]) for v in ids}
    heap = [f._index[v] for v in ids if pa[v] == 0 and sq[v] == -1]
    heapq.heapify(heap)
    mults: list[int] = []
    while heap and len(adj) > 1:
        e = ids[heapq.heappop(heap)]
        if e not in adj or pa[e] != 0 or sq[e] != -1:
            continue
        row = adj.pop(e)
        mults.append(sum(row.values()))
        touched = list(row)
        for i in touched:
            del adj[i][e]
        for x, i in enumerate(touched):
            ki = row[i]
            pa[i] += ki * (ki - 1) // 2
            sq[i] += ki * ki
            for j in touched[x + 1:]:
                adj[i][j] = adj[i].get(j, 0) + ki * row[j]
                adj[j][i] = adj[i][j]
        for i in touched:
            if pa[i] == 0 and sq[i] == -1:
                heapq.heappush(heap, f._index[i])
    pairs = sum(k for v, nb in adj.items() for u, k in nb.items() if v < u)
    return BlowDown(
        r=len(mults),
        mults=tuple(reversed(mults)),
        pa_red=sum(pa[v] for v in adj) + pairs - (len(adj) - 1),
        fred_sq=sum(sq[v] for v in adj) + 2 * pairs,
    )


# -- text format ----------------------------------------------------------

_KV = re.compile(r"^([a-z_]+)=(-?\d+)$")


def parse_fiber(text: str, name: Optional[str] = None) -> FiberGraph:
    """Parse the line-oriented fiber format."""
    fname = name or "fiber"
    blowups = 0
    record = None
    gcheck = None
    comps: list[tuple] = []
    nodes: list[tuple] = []
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            toks = shlex.split(line)
        except ValueError as exc:
            raise FiberSyntaxError(str(exc), ln) from None
        kw, args = toks[0], toks[1:]
        col = raw.find(kw) + 1

        def bad(msg):
            return FiberSyntaxError(msg, ln, col)

        def integer(tok, what):
            try:
                return int(tok)
            except ValueError:
                raise bad(f"{what}: expected integer, got {tok!r}") from None

        if kw == "fiber":
            if len(args) != 1:
                raise bad("fiber takes one quoted name")
            fname = args[0]
        elif kw == "blowups":
            if len(args) != 1:
                raise bad("blowups takes one integer")
            blowups = integer(args[0], "blowups")
            if blowups < 0:
                raise bad("blowups must be >= 0")
        elif kw == "record":
            record = tuple(integer(a, "record") for a in args)
        elif kw == "genus-check":
            if len(args) != 1:
                raise bad("genus-check takes one integer")
            gcheck = integer(args[0], "genus-check")
        elif kw == "component":
            if not args:
                raise bad("component needs an id")
            cid, opts = args[0], {}
            for a in args[1:]:
                mt = _KV.match(a)
                if not mt or mt.group(1) not in ("mult", "self", "genus"):
                    raise bad(f"bad component attribute {a!r}")
                opts[mt.group(1)] = int(mt.group(2))
            if "mult" not in opts:
                raise bad(f"component {cid}: mult= is required")
            comps.append((cid, opts["mult"], opts.get("self"), opts.get("genus", 0)))
        elif kw == "node":
            if len(args) not in (2, 3):
                raise bad("node takes two ids and an optional xCOUNT")
            cnt = 1
            if len(args) == 3:
                if not re.fullmatch(r"x\d+", args[2]):
                    raise bad(f"bad node count {args[2]!r}")
                cnt = int(args[2][1:])
            nodes.append((args[0], args[1], cnt))
        else:
            raise bad(f"unknown keyword {kw!r}")
    if not comps:
        raise FiberError("no components")
    f = build_fiber(fname, comps, nodes, blowups, record)
    if gcheck is not None:
        g = fiber_genus(f)
        if g != gcheck:
            raise FiberError(f"declared genus-check {gcheck} but fiber genus is {g}")
    return f


def canonical_components(f: FiberGraph) -> tuple[tuple, list[int]]:
    labels = [(c.mult, c.self_int, c.genus, f.loops(c.id)) for c in f.components]
    return canonical_order(labels, f.adjacency())


def emit_fiber(f: FiberGraph) -> str:
    """Canonical text: components in canonical-label order, defaults omitted."""
    _, order = canonical_components(f)
    pos = {f.components[v].id: i for i, v in enumerate(order)}
    out = [f"fiber {json.dumps(f.name)}"]
    if f.blowups:
        out.append(f"blowups {f.blowups}")
    if f.record:
        out.append("record " + " ".join(map(str, f.record)))
    for v in order:
        c = f.components[v]
        s = f"component {c.id} mult={c.mult} self={c.self_int}"
        if c.genus:
            s += f" genus={c.genus}"
        out.append(s)
    edges = []
    for e in f.nodes:
        a, b = sorted((e.a, e.b), key=lambda x: pos[x])
        edges.append((pos[a], pos[b], a, b, e.count))
    for _, _, a, b, cnt in sorted(edges):
        out.append(f"node {a} {b}" + (f" x{cnt}" if cnt > 1 else ""))
    return "\n".join(out) + "\n"


def fiber_to_dict(f: FiberGraph) -> dict:
    """Structured emission mirroring emit_fiber (same order, same data)."""
    _, order = canonical_components(f)
    pos = {f.components[v].id: i for i, v in enumerate(order)}
    comps = []
    for v in order:
        c = f.components[v]
        comps.append({"id": c.id, "mult": c.mult, "self": c.self_int, "genus": c.genus})
    nodes = sorted(
        (sorted((e.a, e.b), key=lambda x: pos[x]) + [e.count] for e in f.nodes),
        key=lambda t: (pos[t[0]], pos[t[1]]),
    )
    d = {"name": f.name, "blowups": f.blowups, "components": comps,
         "nodes": [{"a": a, "b": b, "count": n} for a, b, n in nodes]}
    if f.record is not None:
        d["record"] = list(f.record)
    return d


def fiber_from_dict(d: dict) -> FiberGraph:
    comps = [(c["id"], c["mult"], c.get("self"), c.get("genus", 0)) for c in d["components"]]
    nodes = [(e["a"], e["b"], e.get("count", 1)) for e in d.get("nodes", [])]
    return build_fiber(d.get("name", "fiber"), comps, nodes, d.get("blowups", 0), d.get("record"))
