"""Named fibers with their expected invariants.

The 22 fibers above the 4g - 11/2 bound are stored as compact path
descriptions and expanded into fiber-format text.  A path is a
whitespace-separated list of ``id:mult`` tokens joined in sequence; an id
already seen refers back to that vertex, so branches are written as a
second path starting at their attaching vertex.  A trailing ``*`` marks a
(-3)-curve, a trailing ``=s`` gives an explicit self-intersection, and
unmarked vertices are (-2)-curves.  Every self-intersection is also
re-solved from F.C = 0 when the text is parsed, which is the
transcription check.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction as Fr
from typing import Optional

from fibercalc.fiber_model import FiberError, FiberGraph, build_fiber, parse_fiber


@dataclass(frozen=True)
class CatalogEntry:
    key: str
    graph: FiberGraph
    expected: dict = field(hash=False, compare=False)
    provenance: str = ""


_TOKEN = re.compile(r"^([A-Za-z0-9_]+):(\d+)(\*|=-?\d+)?$")


def paths_to_text(name: str, paths: list[str], blowups: int = 0) -> str:
    """Expand the path mini-language into fiber-format text."""
    comps: dict[str, tuple[int, int]] = {}
    order: list[str] = []
    edges: list[tuple[str, str]] = []
    for path in paths:
        prev = None
        for tok in path.split():
            m = _TOKEN.match(tok)
            if not m:
                raise ValueError(f"bad path token {tok!r}")
            cid, mult, mark = m.group(1), int(m.group(2)), m.group(3)
            s = -3 if mark == "*" else int(mark[1:]) if mark else -2
            if cid in comps:
                if comps[cid] != (mult, s):
                    raise ValueError(f"{name}: {cid} redeclared differently")
            else:
                comps[cid] = (mult, s)
                order.append(cid)
            if prev is not None:
                edges.append((prev, cid))
            prev = cid
    lines = [f'fiber "{name}"']
    if blowups:
        lines.append(f"blowups {blowups}")
    lines += [f"component {c} mult={comps[c][0]} self={comps[c][1]}" for c in order]
    lines += [f"node {a} {b}" for a, b in edges]
    return "\n".join(lines) + "\n"


def _chain(prefix: str, mults, start: int = 0) -> str:
    return " ".join(f"{prefix}{i + start}:{m}" for i, m in enumerate(mults))


def _run(hi: int) -> list[int]:
    return list(range(hi, 0, -1))


# ---------------------------------------------------------------------------
# The 22 types.  Types 10, 14, 15, 16 and 19 contain a string of repeated
# (-2)-curves of free length; ``length`` defaults to the drawn one.

def _type_paths(no: int, length: Optional[int] = None) -> tuple[list[str], int]:
    if no == 1:
        return ([_chain("a", [3, 6, 9, 12, 15, 18, 21]) + " b0:10* " + _chain("b", _run(9), 1),
                 "a6:21 c0:14 c1:7"], 0)
    if no == 2:
        return (["a0:3 a1:6* " + _chain("b", _run(15)), "b0:15 c0:10 c1:5"], 0)
    if no == 3:
        return ([_chain("a", [3, 6, 9, 12]) + " " + _chain("b", _run(11)), "a3:12 c0:4*"], 0)
    if no == 4:
        return (["a0:1 a1:2 a2:3 a3:4* a4:9 a5:14 " + _chain("b", [12, 10, 8, 6, 4, 2]),
                 "a5:14 c0:7"], 0)
    if no == 5:
        return (["a0:2 a1:4 a2:6 a3:8 a4:10 a5:7 a6:4* a7:5 a8:6 a9:4 a10:2",
                 "a4:10 c0:5", "a8:6 d0:3"], 0)
    if no == 6:
        return (["a0:1 a1:2 a2:3 a3:4* " + _chain("b", _run(9)), "b0:9 c0:6 c1:3"], 0)
    if no == 7:
        return ([_chain("a", range(1, 11)) + " b0:6 b1:2*", "a9:10 c0:5"], 0)
    if no == 8:
        return ([_chain("a", [1, 2, 3, 4, 5, 6, 5, 4, 3, 2, 1]), "a5:6 c0:2*"], 0)
    if no == 9:
        return (["a0:1 a1:2* a2:5 " + _chain("b", _run(8)), "b0:8 c0:4"], 0)
    if no == 10:
        k = 3 if length is None else length
        if k < 1:
            raise ValueError("type 10 needs at least one mult-6 vertex")
        sixes = _chain("s", [6] * k)
        last = f"s{k - 1}"
        return ([sixes + " t0:4 t1:2", "s0:6 l0:3", "s0:6 l1:3", f"{last}:6 u0:2*"], 0)
    if no in (11, 12, 13, 14, 15, 16):
        tail = {11: [4, 6, 4, 2], 12: [4, 6, 8, 6, 4, 2], 13: [4, 6, 8, 10, 12, 8, 4]}[
            no if no <= 13 else no - 3]
        branch = {11: "b1:6 c0:4 c1:2", 12: "b2:8 c0:4", 13: "b4:12 c0:6"}[no if no <= 13 else no - 3]
        return (_d_tail(no >= 14, length) + ["x:2* " + _chain("b", tail), branch], 0)
    if no == 17:
        return ([_chain("a", [1, 2, 3, 4, 5, 4, 3, 2, 1]), "a4:5 c0:2* c1:1"], 0)
    if no in (18, 19):
        return (_d_tail(no == 19, length) + ["x:2* " + _chain("b", [4, 6, 5, 4, 3, 2, 1]),
                                              "b1:6 c0:3"], 0)
    if no == 20:
        return (["a0:2 a1:4 a2:6 a3:5 a4:4 a5:3 x:2* b0:3 b1:4 b2:5 b3:6 b4:4 b5:2",
                 "a2:6 c0:3", "b3:6 c1:3"], 0)
    if no == 21:
        return (["a0:2=-5 a1:10=-1 a2:3=-4 a3:2 a4:1", "a1:10=-1 c0:5"], 2)
    if no == 22:
        return (["a0:2 a1:4 a2:6 a3:5 a4:4 a5:3 x:2* b0:3 b1:4 b2:3 b3:2 b4:1",
                 "a2:6 c0:3", "b1:4 c1:2"], 0)
    raise KeyError(f"no type {no}")


def _d_tail(d_shaped: bool, length: Optional[int]) -> list[str]:
    """The end at the mult-2 (-3)-curve x: two mult-1 leaves on x, or on a
    string of mult-2 (-2)-curves leading to x."""
    if not d_shaped:
        return ["e0:1 x:2*", "e1:1 x:2*"]
    k = 2 if length is None else length
    if k < 1:
        raise ValueError("the D-shaped tail needs at least one mult-2 curve")
    string = _chain("d", [2] * k)
    return ["e0:1 d0:2", "e1:1 d0:2", f"{string} x:2*"]


# (c1^2, c2, chi) and g of the relatively minimal fiber.
TABLE = {
    1: (6, Fr(130, 7), 30, Fr(85, 21)),
    2: (4, Fr(54, 5), 26, Fr(46, 15)),
    3: (3, Fr(7), 21, Fr(7, 3)),
    4: (3, Fr(48, 7), 18, Fr(29, 14)),
    5: (3, Fr(98, 15), Fr(268, 15), Fr(61, 30)),
    6: (3, Fr(20, 3), 20, Fr(20, 9)),
    7: (2, Fr(16, 5), 16, Fr(8, 5)),
    8: (2, Fr(3), 15, Fr(3, 2)),
    9: (2, Fr(3), 15, Fr(3, 2)),
    10: (2, Fr(3), 9, Fr(1)),
    11: (2, Fr(8, 3), Fr(34, 3), Fr(7, 6)),
    12: (2, Fr(11, 4), Fr(49, 4), Fr(5, 4)),
    13: (2, Fr(17, 6), Fr(79, 6), Fr(4, 3)),
    14: (2, Fr(8, 3), Fr(34, 3), Fr(7, 6)),
    15: (2, Fr(11, 4), Fr(49, 4), Fr(5, 4)),
    16: (2, Fr(17, 6), Fr(79, 6), Fr(4, 3)),
    17: (2, Fr(14, 5), 14, Fr(7, 5)),
    18: (2, Fr(8, 3), Fr(40, 3), Fr(4, 3)),
    19: (2, Fr(8, 3), Fr(40, 3), Fr(4, 3)),
    20: (2, Fr(8, 3), Fr(52, 3), Fr(5, 3)),
    21: (2, Fr(13, 5), 7, Fr(4, 5)),
    22: (2, Fr(31, 12), Fr(197, 12), Fr(19, 12)),
}

FREE_LENGTH = (10, 14, 15, 16, 19)


def twentytwo_text(no: int, length: Optional[int] = None) -> str:
    paths, r = _type_paths(no, length)
    name = f"thm1.3/{no}" if length is None else f"thm1.3/{no}/L={length}"
    return paths_to_text(name, paths, r)


def type_entry(no: int, length: Optional[int] = None) -> CatalogEntry:
    g, c1, c2, chi = TABLE[no]
    f = parse_fiber(twentytwo_text(no, length))
    key = f"thm1.3/{no}" if length is None else f"thm1.3/{no}/L={length}"
    return CatalogEntry(
        key, f,
        {"g": g, "c1sq_min": Fr(c1), "c2_min": Fr(c2), "chi": Fr(chi)},
        f"classified fiber type {no} above the 4g - 11/2 bound; Chern numbers from the type table",
    )


def twentytwo() -> list[CatalogEntry]:
    return [type_entry(i) for i in range(1, 23)]


# ---------------------------------------------------------------------------

def example_family(g: int) -> CatalogEntry:
    """(g-1)F0 for the genus-2 fiber F0 on a 4-cycle; c1^2 = 4g - 11/2."""
    if g < 2:
        raise ValueError("example family needs g >= 2")
    k = g - 1
    comps = [("A", 2 * k, -3), ("B1", 3 * k, -2), ("B2", 3 * k, -2), ("D", 4 * k, -2), ("E", 2 * k, -2)]
    nodes = [("A", "B1"), ("A", "B2"), ("B1", "D"), ("B2", "D"), ("D", "E")]
    f = build_fiber(f"example1.6/g={g}", comps, nodes)
    exp = {"g": g, "c1sq_min": 4 * g - Fr(11, 2), "c2_min": 2 * g + Fr(5, 2), "chi": Fr(g, 2) - Fr(1, 4)}
    return CatalogEntry(f.name, f, exp, "multiple (g-1)F0 of a genus-2 fiber on a 4-cycle")


# ---------------------------------------------------------------------------
# Witnesses for the eight cases of small 2c2 - c1^2.

# (c1^2 - 4N, c2 - 2N, chi - N/2)
CASE_ROWS = {
    1: (Fr(0), Fr(0), Fr(0)),
    2: (Fr(1, 6), Fr(11, 6), Fr(1, 6)),
    3: (Fr(1, 2), Fr(5, 2), Fr(1, 4)),
    4: (Fr(1, 4), Fr(11, 4), Fr(1, 4)),
    5: (Fr(1), Fr(3), Fr(1, 3)),
    6: (Fr(-1), Fr(1), Fr(0)),
    7: (Fr(-3, 2), Fr(3, 2), Fr(0)),
    8: (Fr(-1, 2), Fr(5, 2), Fr(1, 6)),
}

# minimum h per case (case 1 handled separately)
_MIN_H = {1: 0, 2: 1, 3: 0, 4: 1, 5: 0, 6: 1, 7: 1, 8: 1}


def _case_genus_and_n(case: int, n: int, h: int, loops: int) -> tuple[int, int]:
    """Closed-form (g, N) of the witness, independent of the graph code."""
    if case == 1:
        return n * (h + loops - 1) + 1, n * (h + loops - 1) + 1 - h - loops
    return {
        2: (n * h + 1, h * (n - 1)),
        3: (n * (h + 1) + 1, (n - 1) * (h + 1)),
        4: (n * h + 1, h * (n - 1)),
        5: (n * (h + 2) + 1, (n - 1) * (h + 2)),
        6: (2 * n * h + 1, h * (2 * n - 1)),
        7: (n * (h + 1) + 1, (n - 1) * (h + 1) + 1),
        8: (n * (h + 2) + 1, (n - 1) * (h + 2) + 1),
    }[case]


def theorem14_family(case: int, n: int = 1, h: Optional[int] = None,
                     loops: Optional[int] = None) -> CatalogEntry:
    if case not in CASE_ROWS:
        raise ValueError(f"case must be 1..8, got {case}")
    if n < 1:
        raise ValueError("n must be >= 1")
    if h is None:
        h = max(_MIN_H[case], 1) if case != 1 else 2
    if h < _MIN_H[case]:
        raise ValueError(f"case {case} needs h >= {_MIN_H[case]}")
    L = 0
    if case == 1:
        L = max(0, 2 - h) if loops is None else loops
        if h + L < 1 or n * (h + L - 1) + 1 < 2:
            raise ValueError("case 1 needs fiber genus >= 2")
        comps = [("C", n, 0, h)]
        nodes = [("C", "C", L)] if L else []
        r = 0
    elif case == 2:
        comps = [("C", n, -6, h), ("E", 6 * n, -1), ("E1", 2 * n, -3), ("E2", 3 * n, -2)]
        nodes = [("C", "E"), ("E1", "E"), ("E2", "E")]
        r = 3
    elif case == 3:
        comps = [("C", n, -8, h), ("E2", 4 * n, -1), ("E1", 2 * n, -2)]
        nodes = [("C", "E2", 2), ("E1", "E2")]
        r = 2
    elif case == 4:
        comps = [("C1", n, -4, h), ("C2", n, -4, 0), ("E2", 4 * n, -1), ("E1", 2 * n, -2)]
        nodes = [("C1", "E2"), ("C2", "E2"), ("E1", "E2")]
        r = 2
    elif case == 5:
        comps = [("C", n, -9, h), ("E", 3 * n, -1)]
        nodes = [("C", "E", 3)]
        r = 1
    elif case == 6:
        comps = [("A", n, -4, 0), ("B", 2 * n, -1, h)]
        nodes = [("A", "B", 2)]
        r = 0
    elif case == 7:
        comps = [("A1", n, -2, 0), ("A2", n, -2, h), ("B", 2 * n, -1, 1)]
        nodes = [("A1", "B"), ("A2", "B")]
        r = 0
    else:
        comps = [("A", n, -6, h), ("B", 2 * n, -3, 1), ("E2", 6 * n, -1), ("E1", 3 * n, -2)]
        nodes = [("A", "E2"), ("B", "E2"), ("E1", "E2")]
        r = 2
    key = f"thm1.4/case{case}/n={n},h={h}" + (f",loops={L}" if case == 1 else "")
    f = build_fiber(key, comps, nodes, r)
    g, N = _case_genus_and_n(case, n, h, L)
    a, b, c = CASE_ROWS[case]
    exp = {"g": g, "N_min": N, "c1sq_min": 4 * N + a, "c2_min": 2 * N + b, "chi": Fr(N, 2) + c}
    return CatalogEntry(key, f, exp, f"witness for case {case} of small 2c2 - c1^2")


def witness_grid(ns=range(1, 5), hs=range(0, 3)) -> list[CatalogEntry]:
    out = []
    for case in CASE_ROWS:
        for n in ns:
            for h in hs:
                try:
                    out.append(theorem14_family(case, n, h))
                except ValueError:
                    continue
    return out


# ---------------------------------------------------------------------------
# Genus-1 calibration: classical NC models.

_KODAIRA_PATHS = {
    "II": (["a:1=-6 e:6=-1", "b:2=-3 e:6=-1", "c:3 e:6=-1"], 3, 2),
    "III": (["a:1=-4 e:4=-1 b:1=-4", "c:2 e:4=-1"], 2, 3),
    "IV": (["a:1=-3 e:3=-1", "b:1=-3 e:3=-1", "c:1=-3 e:3=-1"], 1, 4),
    "I0*": (["a:1 z:2 b:1", "c:1 z:2 d:1"], 0, 6),
    "IV*": (["a0:1 a1:2 z:3 b1:2 b0:1", "z:3 c1:2 c0:1"], 0, 8),
    "III*": (["a0:1 a1:2 a2:3 z:4 b2:3 b1:2 b0:1", "z:4 c:2"], 0, 9),
    "II*": (["a0:1 a1:2 a2:3 a3:4 a4:5 z:6 b1:4 b0:2", "z:6 c:3"], 0, 10),
}

KODAIRA_KINDS = ("II", "III", "IV", "I0*", "IV*", "III*", "II*")


def _cycle(name: str, b: int, m: int) -> FiberGraph:
    if b == 1:
        return build_fiber(name, [("C", m, 0)], [("C", "C")])
    comps = [(f"C{i}", m, -2) for i in range(b)]
    if b == 2:
        return build_fiber(name, comps, [("C0", "C1", 2)])
    return build_fiber(name, comps, [(f"C{i}", f"C{(i + 1) % b}") for i in range(b)])


def kodaira(kind: str) -> CatalogEntry:
    """Kinds: II, III, IV, I0*, IV*, III*, II*, I<b> and <m>I<b>."""
    key = f"kodaira/{kind}"
    if kind in _KODAIRA_PATHS:
        paths, r, c2 = _KODAIRA_PATHS[kind]
        f = parse_fiber(paths_to_text(key, paths, r))
        c2 = Fr(c2)
        prov = "elliptic fiber, Euler number coefficient"
    else:
        m = re.fullmatch(r"(\d*)I(\d+)", kind)
        if not m or int(m.group(2)) < 1 or (m.group(1) and int(m.group(1)) < 1):
            raise ValueError(f"unknown Kodaira kind {kind!r}")
        mult = int(m.group(1) or 1)
        f = _cycle(key, int(m.group(2)), mult)
        c2 = Fr(0)
        prov = "semistable elliptic fiber" + (" (multiple)" if mult > 1 else "")
    return CatalogEntry(key, f, {"g": 1, "c1sq_min": Fr(0), "c2_min": c2, "chi": c2 / 12}, prov)


# ---------------------------------------------------------------------------

def standard_entries() -> list[CatalogEntry]:
    """The default corpus for listing and batch verification."""
    out = twentytwo()
    out += [type_entry(no, L) for no in FREE_LENGTH for L in (1, 4)]
    out += [kodaira(k) for k in KODAIRA_KINDS + ("I1", "I2", "I5", "2I1", "3I4")]
    out += [example_family(g) for g in range(2, 13)]
    out += witness_grid(range(1, 3), range(0, 3))
    return out


_KEY_PATTERNS = [
    (re.compile(r"thm1\.3/(\d+)(?:/L=(\d+))?"),
     lambda m: type_entry(int(m.group(1)), int(m.group(2)) if m.group(2) else None)),
    (re.compile(r"kodaira/(.+)"), lambda m: kodaira(m.group(1))),
    (re.compile(r"example1\.6/g=(\d+)"), lambda m: example_family(int(m.group(1)))),
    (re.compile(r"thm1\.4/case(\d)(?:/n=(\d+),h=(\d+)(?:,loops=(\d+))?)?"),
     lambda m: theorem14_family(int(m.group(1)),
                                int(m.group(2) or 1),
                                int(m.group(3)) if m.group(3) else None,
                                int(m.group(4)) if m.group(4) else None)),
]


def lookup(key: str) -> CatalogEntry:
    for pat, make in _KEY_PATTERNS:
        m = pat.fullmatch(key)
        if m:
            try:
                return make(m)
            except (KeyError, ValueError, FiberError) as exc:
                raise KeyError(f"{key}: {exc}") from None
    raise KeyError(f"unknown catalog key {key!r}")
