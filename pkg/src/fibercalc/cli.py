"""fibercalc command line."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from fibercalc import __version__
from fibercalc.arith import branch_beta, dedekind_sum, hj_expand
from fibercalc.catalog import lookup, standard_entries
from fibercalc.classify import classify_fiber, inequality_report
from fibercalc.dualizer import dual_fiber, duality_check
from fibercalc.fiber_model import (
    FiberError,
    emit_fiber,
    fiber_to_dict,
    minimize,
    parse_fiber,
    validate,
)
from fibercalc.invariants import BUNDLE_FIELDS, compute_invariants
from fibercalc.search import PredicateError, SearchBounds, enumerate_fibers, verify_theorem13

log = logging.getLogger("fibercalc")


class DomainError(Exception):
    pass


class Out:
    """Renders key/value lines or one JSON document from the same data."""

    def __init__(self, args):
        self.json = getattr(args, "json", False)
        self.digits = getattr(args, "decimal", None)

    def value(self, v):
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, Fraction):
            if self.digits is not None:
                return _decimal(v, self.digits)
            return str(v)
        if v is None:
            return "none"
        if isinstance(v, (list, tuple)):
            return " ".join(self.value(x) for x in v) if v else "-"
        return str(v)

    def jvalue(self, v):
        if isinstance(v, Fraction):
            return _decimal(v, self.digits) if self.digits is not None else str(v)
        if isinstance(v, (list, tuple)):
            return [self.jvalue(x) for x in v]
        if isinstance(v, dict):
            return {k: self.jvalue(x) for k, x in v.items()}
        return v

    def emit(self, pairs: list[tuple[str, object]], sep: str = "\n") -> None:
        if self.json:
            print(json.dumps({k: self.jvalue(v) for k, v in pairs}, indent=2))
        else:
            print(sep.join(f"{k} = {self.value(v)}" for k, v in pairs))


def _decimal(v: Fraction, digits: int) -> str:
    sign = "-" if v < 0 else ""
    v = abs(v)
    scaled = round(v * 10 ** digits)
    whole, frac = divmod(scaled, 10 ** digits)
    return f"{sign}{whole}.{frac:0{digits}d}" if digits else f"{sign}{whole}"


def _read(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc.strerror}") from None
    default = Path(path).stem if path != "-" else "stdin"
    return parse_fiber(text, name=default)


def _write(text: str, dest: Optional[str]) -> None:
    if dest and dest != "-":
        Path(dest).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- subcommands ----------------------------------------------------------

def cmd_validate(args) -> int:
    f = _read(args.file)
    rep = validate(f)
    Out(args).emit([("name", f.name), ("ok", rep.ok), ("genus", rep.genus),
                    ("radical", list(rep.radical or ())), ("problems", rep.problems)])
    return 0 if rep.ok else 1


def cmd_invariants(args) -> int:
    b = compute_invariants(_read(args.file))
    pairs = [(k, getattr(b, k)) for k in BUNDLE_FIELDS]
    pairs.append(("record", list(b.record) if b.record is not None else None))
    Out(args).emit(pairs)
    return 0


def cmd_dual(args) -> int:
    f = _read(args.file)
    d = dual_fiber(f, args.n, force=args.n is not None)
    if args.minimize:
        d, k = minimize(d)
        log.info("minimize: %d contractions", k)
    if args.json:
        _write(json.dumps(fiber_to_dict(d), indent=2) + "\n", args.output)
    else:
        _write(emit_fiber(d), args.output)
    return 0


def cmd_duality(args) -> int:
    r = duality_check(_read(args.file), args.n)
    Out(args).emit([("chi", r.chi_F), ("chi_dual", r.chi_dual), ("N_bar", r.N_bar),
                    ("ok", r.ok)], sep=", ")
    return 0 if r.ok else 1


def _report_pairs(rep):
    return [(c.name, {"left": c.left, "relation": c.relation, "right": c.right,
                      "pass": c.passed, "note": c.note}) for c in rep.checks]


def cmd_check(args) -> int:
    f = _read(args.file)
    rep = inequality_report(f)
    out = Out(args)
    if out.json:
        print(json.dumps({"fiber": f.name, "g": rep.g, "ok": rep.ok,
                          "checks": [dict(name=k, **out.jvalue(v)) for k, v in _report_pairs(rep)],
                          "skipped": rep.skipped}, indent=2))
    else:
        for c in rep.checks:
            status = "pass" if c.passed else "FAIL"
            rel = "in {0} or >=" if c.relation == "in-gap" else c.relation
            line = f"{status}  {c.name}: {out.value(c.left)} {rel} {out.value(c.right)}"
            print(line + (f"  ({c.note})" if c.note else ""))
        for s in rep.skipped:
            print(f"skip  {s}")
    for c in rep.failures:
        print(f"violation: {f.name}: {c.name} ({c.left} {c.relation} {c.right} is false)",
              file=sys.stderr)
    return 0 if rep.ok else 1


def cmd_classify(args) -> int:
    c = classify_fiber(_read(args.file))
    Out(args).emit([("label", c.label), ("family", c.family), ("detail", c.detail)])
    if c.family == "violation":
        print(f"violation: {c.label}: {c.detail}", file=sys.stderr)
        return 1
    return 0


def cmd_catalog(args) -> int:
    out = Out(args)
    if args.action == "list":
        entries = standard_entries()
        if out.json:
            print(json.dumps([{"key": e.key, "provenance": e.provenance} for e in entries], indent=2))
        else:
            for e in entries:
                print(e.key)
        return 0
    if args.action == "emit":
        if not args.key:
            raise DomainError("catalog emit needs a key")
        try:
            e = lookup(args.key)
        except KeyError as exc:
            raise DomainError(str(exc.args[0])) from None
        text = json.dumps(fiber_to_dict(e.graph), indent=2) + "\n" if out.json else emit_fiber(e.graph)
        _write(text, args.output)
        return 0
    # verify
    bad = 0
    rows = []
    for e in standard_entries():
        b = compute_invariants(e.graph)
        diffs = {k: (getattr(b, k), v) for k, v in e.expected.items() if getattr(b, k) != v}
        rows.append({"key": e.key, "ok": not diffs})
        if diffs:
            bad += 1
            for k, (got, want) in diffs.items():
                print(f"violation: {e.key}: {k} = {got}, expected {want}", file=sys.stderr)
    if out.json:
        print(json.dumps({"entries": rows, "failed": bad}, indent=2))
    else:
        for r in rows:
            print(f"{'ok  ' if r['ok'] else 'FAIL'}  {r['key']}")
        print(f"{len(rows) - bad}/{len(rows)} entries match")
    return 0 if bad == 0 else 1


def _genus_range(text: str) -> tuple[int, int]:
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            return int(a), int(b)
        return int(text), int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad genus {text!r}; use G or G1..G2") from None


FULL_SCALE = dict(genus=(2, 6), max_vertices=13, max_mult=21)


def cmd_search(args) -> int:
    out = Out(args)
    genus, vmax, mmax = args.genus, args.max_vertices, args.max_mult
    if args.full_scale:
        print("warning: full catalog-scale sweep; expect a very long run", file=sys.stderr)
        genus, vmax, mmax = FULL_SCALE["genus"], FULL_SCALE["max_vertices"], FULL_SCALE["max_mult"]
    if genus is None or vmax is None or mmax is None:
        raise DomainError("search needs --genus, --max-vertices and --max-mult (or --full-scale)")
    try:
        bounds = SearchBounds(genus, vmax, mmax, args.where)
    except PredicateError as exc:
        raise DomainError(str(exc)) from None
    if args.theorem13:
        rep = verify_theorem13(bounds, args.threads)
        out.emit([("bounds", f"g={genus[0]}..{genus[1]} V<={vmax} mult<={mmax}"),
                  ("found", sorted(rep.expected.get(k, v) for k, v in rep.found.items())),
                  ("missing", rep.missing), ("unexpected", rep.unexpected),
                  ("empty_diff", rep.empty_diff), ("note", rep.note)])
        return 0 if rep.empty_diff else 1
    hits = enumerate_fibers(bounds, args.threads)
    print(f"search: {len(hits)} fibers", file=sys.stderr)
    if args.emit_dir:
        d = Path(args.emit_dir)
        d.mkdir(parents=True, exist_ok=True)
        for h in hits:
            (d / f"{h.graph.name.replace('/', '-')}.fib").write_text(emit_fiber(h.graph), encoding="utf-8")
    per_genus: dict[int, int] = {}
    for h in hits:
        per_genus[h.bundle.g] = per_genus.get(h.bundle.g, 0) + 1
    summary = {
        "count": len(hits),
        "per_genus": {str(g): n for g, n in sorted(per_genus.items())},
        "fibers": [{"name": h.graph.name, "canonical": h.canonical, "g": h.bundle.g,
                    "scale": h.scale, "blowups": h.bundle.blowups,
                    "c1sq_min": h.bundle.c1sq_min, "c2_min": h.bundle.c2_min,
                    "chi": h.bundle.chi} for h in hits],
    }
    if out.json:
        print(json.dumps(out.jvalue(summary), indent=2))
    else:
        print(f"count = {len(hits)}")
        for g, n in sorted(per_genus.items()):
            print(f"genus {g} = {n}")
        for fi in summary["fibers"]:
            extra = f" scale={fi['scale']}" if fi["scale"] > 1 else ""
            print(f"{fi['name']}: g={fi['g']} r={fi['blowups']} c1sq={out.value(fi['c1sq_min'])} "
                  f"c2={out.value(fi['c2_min'])} chi={out.value(fi['chi'])}{extra} {fi['canonical']}")
    return 0


def cmd_dedekind(args) -> int:
    if args.q < 1:
        raise DomainError("q must be >= 1")
    Out(args).emit([("s", dedekind_sum(args.p, args.q))])
    return 0


def cmd_hj(args) -> int:
    try:
        h = hj_expand(args.n, args.q)
    except ValueError as exc:
        raise DomainError(str(exc)) from None
    Out(args).emit([("n", h.n), ("q", h.q), ("es", list(h.es)), ("mus", list(h.mus)),
                    ("beta", branch_beta(h))])
    return 0


# -- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="structured output")
    common.add_argument("--decimal", type=int, metavar="DIGITS",
                        help="render fractions as decimals (lossy; prints a warning)")

    p = argparse.ArgumentParser(prog="fibercalc", description=__doc__)
    p.add_argument("--version", action="version", version=f"fibercalc {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="diagnostics on stderr")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_, description=help_)
        sp.set_defaults(func=fn)
        return sp

    sp = add("validate", cmd_validate, "structural and Zariski checks")
    sp.add_argument("file")
    sp = add("invariants", cmd_invariants, "all invariants and Chern numbers")
    sp.add_argument("file")
    sp = add("dual", cmd_dual, "dual model by chain insertion")
    sp.add_argument("file")
    sp.add_argument("--n", type=int, help="base-change degree, -1 mod lcm of multiplicities")
    sp.add_argument("--minimize", action="store_true", help="contract redundant (-1)-curves")
    sp.add_argument("-o", "--output", help="output file (default stdout)")
    sp = add("duality", cmd_duality, "check chi_F + chi_F* = N_bar")
    sp.add_argument("file")
    sp.add_argument("--n", type=int)
    sp = add("check", cmd_check, "inequality report; exit 1 on any violation")
    sp.add_argument("file")
    sp = add("classify", cmd_classify, "match against the classified types")
    sp.add_argument("file")
    sp = add("catalog", cmd_catalog, "list, emit or verify catalog fibers")
    sp.add_argument("action", choices=["list", "emit", "verify"])
    sp.add_argument("key", nargs="?")
    sp.add_argument("-o", "--output")
    sp = add("search", cmd_search, "enumerate rational-tree numerical fibers")
    sp.add_argument("--genus", type=_genus_range, help="G or G1..G2")
    sp.add_argument("--max-vertices", type=int)
    sp.add_argument("--max-mult", type=int)
    sp.add_argument("--where", help='predicate, e.g. "c1sq_min > 4*g - 11/2"')
    sp.add_argument("--emit-dir", help="write every hit as a fiber file")
    sp.add_argument("--threads", type=int, help="worker processes (0 = auto)")
    sp.add_argument("--theorem13", action="store_true",
                    help="diff hits above 4g - 11/2 against the catalog")
    sp.add_argument("--full-scale", action="store_true",
                    help="catalog-scale bounds (g 2..6, V<=13, mult<=21); very long")
    sp = add("dedekind", cmd_dedekind, "Dedekind sum s(p, q)")
    sp.add_argument("p", type=int)
    sp.add_argument("q", type=int)
    sp = add("hj", cmd_hj, "Hirzebruch-Jung expansion of n/q")
    sp.add_argument("n", type=int)
    sp.add_argument("q", type=int)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    if getattr(args, "decimal", None) is not None:
        if args.decimal < 0:
            parser.error("--decimal needs DIGITS >= 0")
        print(f"warning: decimal output rounded to {args.decimal} digits; values are not exact",
              file=sys.stderr)
    try:
        return args.func(args)
    except (DomainError, FiberError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
