"""Inequality checks, decorated-graph isomorphism and catalog matching."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Optional

from fibercalc.fiber_model import FiberGraph, canonical_components, minimize
from fibercalc.invariants import InvariantBundle, compute_invariants

BOUND_EXCESS = Fraction(11, 2)  # c1^2 > 4g - 11/2 singles out the 22 types


def c1_upper_bound(g: int) -> Fraction:
    """Largest c1^2 of a relatively minimal fiber of genus g."""
    if g < 2:
        raise ValueError("c1_upper_bound needs g >= 2")
    special = {2: Fraction(16, 5), 3: Fraction(7), 4: Fraction(54, 5), 6: Fraction(130, 7)}
    return special.get(g, 4 * g - BOUND_EXCESS)


# -- inequalities ---------------------------------------------------------

_OPS = {
    "<=": lambda a, b: a <= b,
    ">=": lambda a, b: a >= b,
    "==": lambda a, b: a == b,
    "<": lambda a, b: a < b,
    ">": lambda a, b: a > b,
}


@dataclass(frozen=True)
class Check:
    name: str
    left: Fraction
    relation: str
    right: Fraction
    passed: bool
    note: str = ""


@dataclass
class InequalityReport:
    fiber: str
    g: int
    checks: list[Check] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def get(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)

    def add(self, name, left, rel, right, note_if_equal: str = "") -> Check:
        left, right = Fraction(left), Fraction(right)
        if rel == "in-gap":
            ok = left == 0 or left >= 3
            right = Fraction(3)
        else:
            ok = _OPS[rel](left, right)
        note = note_if_equal if left == right and note_if_equal else ""
        c = Check(name, left, rel, right, ok, note)
        self.checks.append(c)
        return c


def is_semistable(f: FiberGraph, b: Optional[InvariantBundle] = None) -> bool:
    """Reduced with only nodes: unit multiplicities and no blow-ups to undo."""
    b = b or compute_invariants(f)
    return all(m == 1 for m in f.mults) and b.blowups == 0


def inequality_report(f: FiberGraph, b: Optional[InvariantBundle] = None) -> InequalityReport:
    b = b or compute_invariants(f)
    c1, c2, chi, g = b.c1sq_min, b.c2_min, b.chi, b.g
    semi = is_semistable(f, b)
    rep = InequalityReport(f.name, g)
    rep.add("c1sq >= 0", c1, ">=", 0)
    rep.add("c2 >= 0", c2, ">=", 0)
    rep.add("chi >= 0", chi, ">=", 0)
    rep.add("Noether c1sq + c2 = 12 chi", c1 + c2, "==", 12 * chi)
    if g < 2:
        rep.skipped += ["zero iff semistable", "canonical bound", "Miyaoka-Yau", "chi genus bound", "N_bar sandwich",
                        "non-semistable lower bounds", "gap", "c1sq cap"]
        return rep
    # for g = 1 every fiber has c1^2 = 0, so this only makes sense from g = 2 on
    zero = c1 == 0 or c2 == 0 or chi == 0
    rep.checks.append(Check(
        "zero Chern number iff semistable", Fraction(int(zero)), "==", Fraction(int(semi)),
        zero == semi, "semistable: all three vanish" if semi and zero else "",
    ))
    rep.add("c1sq <= 4g - 4", c1, "<=", 4 * g - 4)
    rep.add("Miyaoka-Yau c1sq <= 2 c2", c1, "<=", 2 * c2,
            "equality: F = n F_red with F_red nodal")
    rep.add("chi <= 5g/6", chi, "<=", Fraction(5 * g, 6))
    rep.add("chi >= N_bar/6", chi, ">=", Fraction(b.N_bar, 6))
    rep.add("chi <= 5 N_bar/6", chi, "<=", Fraction(5 * b.N_bar, 6))
    if semi:
        rep.skipped.append("non-semistable lower bounds (fiber is reduced nodal)")
    else:
        cusp = "equality: a reduced curve with one ordinary cusp"
        rep.add("c2 >= 11/6", c2, ">=", Fraction(11, 6), cusp)
        rep.add("chi >= 1/6", chi, ">=", Fraction(1, 6), cusp)
    rep.add("gap 2c2 - c1sq in {0} or >= 3", 2 * c2 - c1, "in-gap", 3)
    rep.add("c1sq <= cap(g)", c1, "<=", c1_upper_bound(g), "equality: extremal fiber")
    return rep


# -- isomorphism ----------------------------------------------------------

def canonical_form(f: FiberGraph) -> str:
    """Isomorphism-invariant label of the decorated graph."""
    (verts, edges), _ = canonical_components(f)
    v = ";".join(",".join(map(str, lab)) for lab in verts)
    e = ";".join(f"{i}-{j}x{c}" for i, j, c in edges)
    return f"V[{v}]E[{e}]"


@lru_cache(maxsize=None)
def _catalog_forms(max_len: int) -> dict[str, str]:
    from fibercalc.catalog import FREE_LENGTH, twentytwo, type_entry

    forms = {canonical_form(e.graph): e.key for e in twentytwo()}
    for no in FREE_LENGTH:
        for L in range(1, max_len + 1):
            forms.setdefault(canonical_form(type_entry(no, L).graph), f"thm1.3/{no}")
    return forms


@lru_cache(maxsize=None)
def _kodaira_forms() -> dict[str, str]:
    from fibercalc.catalog import KODAIRA_KINDS, kodaira

    return {canonical_form(kodaira(k).graph): f"kodaira/{k}" for k in KODAIRA_KINDS}


def match_catalog(f: FiberGraph) -> Optional[str]:
    """Key of the catalog type isomorphic to f (or to f divided by its gcd)."""
    m, _ = minimize(f)
    forms = _catalog_forms(len(m))
    key = forms.get(canonical_form(m))
    if key:
        return key
    d = gcd(*m.mults)
    if d > 1:
        base = forms.get(canonical_form(m.scaled_down(d)))
        if base:
            return f"{d}x{base}"
    return None


# -- classification -------------------------------------------------------

@dataclass(frozen=True)
class Classification:
    label: str
    family: str  # "thm1.3", "thm1.4", "kodaira", "none", "violation"
    detail: str = ""


UNCLASSIFIED = "unclassified — violates Theorem 1.4"


def _components_of(m: FiberGraph, keep: set[str]) -> list[set[str]]:
    seen: set[str] = set()
    parts = []
    for start in sorted(keep):
        if start in seen:
            continue
        part, stack = {start}, [start]
        while stack:
            v = stack.pop()
            for u in m.neighbours(v):
                if u in keep and u not in part:
                    part.add(u)
                    stack.append(u)
        seen |= part
        parts.append(part)
    return parts


def small_gap_case(m: FiberGraph, r: int) -> Optional[int]:
    """Structural case number for fibers with 2c2 - c1^2 < 6 (minimized graph)."""
    mults = m.mults
    n = min(mults)
    if r == 0:
        if len(set(mults)) == 1:
            return 1
        if set(mults) == {n, 2 * n}:
            a_part = {c.id for c in m.components if c.mult == n}
            parts = _components_of(m, a_part)
            if len(parts) == 2 and any(
                len(p) == 1 and (c := m.comp(next(iter(p)))).genus == 0
                and c.self_int == -2 and not m.loops(c.id)
                for p in parts
            ):
                return 7
            return 6
        return None
    if r == 3:
        return 2
    if r == 1:
        return 5
    if r == 2:
        top = max(m.components, key=lambda c: c.mult)
        if top.self_int != -1 or top.genus:
            return None
        others = {j: k for j, k in m.neighbours(top.id).items() if m.comp(j).mult != top.mult // 2}
        if top.mult == 4 * n:
            if len(others) == 1 and next(iter(others.values())) == 2:
                return 3
            if len(others) == 2:
                return 4
        if top.mult == 6 * n:
            return 8
    return None


def classify_fiber(f: FiberGraph) -> Classification:
    b = compute_invariants(f)
    m, _ = minimize(f)
    if b.g < 2:
        key = _kodaira_forms().get(canonical_form(m))
        if key:
            return Classification(key, "kodaira")
        if all(c.genus == 0 for c in m.components) and len(set(m.mults)) == 1 and b.c2_min == 0:
            return Classification("kodaira/semistable", "kodaira", "multiple of a nodal cycle")
        return Classification("none", "none", "genus 1 fiber outside the Kodaira models")
    if b.c1sq_min > 4 * b.g - BOUND_EXCESS:
        if b.g > 6:
            return Classification("violation", "violation",
                                  f"c1sq = {b.c1sq_min} > 4g - 11/2 with g = {b.g} > 6")
        key = match_catalog(m)
        if key is None:
            return Classification("violation", "violation",
                                  "above the 4g - 11/2 bound but not one of the 22 types")
        return Classification(key, "thm1.3")
    if 2 * b.c2_min - b.c1sq_min < 6:
        case = small_gap_case(m, b.blowups)
        if case is None:
            return Classification(UNCLASSIFIED, "violation")
        return Classification(f"thm1.4/case{case}", "thm1.4")
    return Classification("none", "none", "neither c1sq > 4g - 11/2 nor 2c2 - c1sq < 6")
