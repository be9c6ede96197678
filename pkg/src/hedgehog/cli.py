"""Command-line front end.

Commands: enumerate, homology, spectral, verify, show.  Output is JSON
by default (--csv for tables); every number is exact (integers, or
rationals rendered num/den).  Exit codes: 0 ok, 1 check failure,
2 usage error.  Bases and reports are cached under $HEDGEHOG_CACHE
(default ~/.cache/hedgehog); payloads are content-checked on read.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import operators
from .cache import CacheStore, cached_basis
from .graphs import parse_encoding, validate_admissible
from .homology import homology_table
from .spectral import Filtration, build_pages, hedgehog_prediction
from .verify import run_suite, suite_names

USAGE_ERROR = 2


def _store(args) -> CacheStore:
    root = Path(args.cache) if args.cache else None
    return CacheStore(root, enabled=not args.no_cache)


def _pieces(args) -> list[tuple[int, int, int]]:
    ks = range(args.k, args.k_max + 1) if args.k_max is not None else [args.k]
    return [(args.g, args.r, k) for k in ks]


def _emit(args, payload: dict, csv_rows=None, csv_header=None) -> None:
    if args.csv and csv_rows is not None:
        print(",".join(csv_header))
        for row in csv_rows:
            print(",".join(str(x) for x in row))
    else:
        print(json.dumps(payload, indent=2, sort_keys=True))


def cmd_enumerate(args) -> int:
    store = _store(args)
    table = {}
    rows = []
    for (g, r, k) in _pieces(args):
        fam = cached_basis(store, args.flavor, args.n, g, r, k,
                           args.vertex_bound)
        dims = {m: len(b) for m, b in sorted(fam.items())}
        table["g=%d r=%d k=%d" % (g, r, k)] = dims
        for m, d in dims.items():
            rows.append((g, r, k, m, d))
    _emit(args, {"flavor": args.flavor, "n": args.n, "dims": table},
          rows, ("g", "r", "k", "m", "dim"))
    return 0


def cmd_homology(args) -> int:
    store = _store(args)
    pieces = {}
    for (g, r, k) in _pieces(args):
        pieces[(g, r, k)] = cached_basis(store, args.flavor, args.n, g, r, k,
                                         args.vertex_bound)
    table = homology_table(args.flavor, args.n, args.diff, pieces)
    payload = {
        "flavor": args.flavor, "n": args.n, "diff": args.diff,
        "pieces": ["g=%d r=%d k=%d" % p for p in sorted(pieces)],
        "chain_dims": {str(d): v for d, v in sorted(table.dims.items())},
        "homology": {str(d): v for d, v in sorted(table.homology.items())},
        "euler": {"chain": table.euler_chain, "homology": table.euler_homology,
                  "consistent": table.check_euler()},
    }
    rows = [(d, table.dims.get(d, 0), table.homology.get(d, 0))
            for d in sorted(table.dims)]
    _emit(args, payload, rows, ("degree", "dim_chain", "dim_homology"))
    return 0


def cmd_spectral(args) -> int:
    store = _store(args)
    pieces = {}
    for (g, r, k) in _pieces(args):
        pieces[(g, r, k)] = cached_basis(store, args.flavor, args.n, g, r, k,
                                         args.vertex_bound)
    filt = Filtration(args.filtration, args.flavor, args.n, args.diff,
                      tuple(sorted(pieces)))
    rep = build_pages(filt, args.max_page, pieces)
    if args.report:
        Path(args.report).write_text(rep.serialize())
    payload = {
        "filtration": args.filtration, "flavor": args.flavor, "n": args.n,
        "diff": args.diff, "max_page": args.max_page,
        "cells": [{"page": pg, "level": p, "degree": d, "dim": dim,
                   "valid": valid}
                  for (pg, p, d, dim, valid) in rep.table()],
        "survivors_last_valid_page": {
            "level=%d degree=%d" % key: v
            for key, v in sorted(rep.survivor_summary().items())},
        "survivors_final_page": {
            "level=%d degree=%d" % key: v
            for key, v in sorted(rep.final_survivors().items())},
        "prediction_FG": hedgehog_prediction(args.n, range(0, 10), "FG"),
        "prediction_HG": hedgehog_prediction(args.n, range(0, 10), "HG"),
    }
    rows = [(pg, p, d, dim, "valid" if v else "edge")
            for (pg, p, d, dim, v) in rep.table()]
    _emit(args, payload, rows, ("page", "level", "degree", "dim", "valid"))
    return 0


def cmd_verify(args) -> int:
    store = _store(args)
    if args.inject_sign_bug:
        operators.INJECTED_SIGN_BUGS.add(args.inject_sign_bug)
    overrides = {}
    if args.vertex_bound is not None:
        overrides["vertex_bound"] = args.vertex_bound
    rep = run_suite(args.suite, store, overrides)
    print(json.dumps(rep.to_json(), indent=2, sort_keys=True))
    return 0 if rep.passed else 1


def cmd_show(args) -> int:
    encoding = args.encoding.replace(";", "\n")
    if not encoding.endswith("\n"):
        encoding += "\n"
    flavor, g = parse_encoding(encoding)
    val = g.valences()
    report = validate_admissible(g, allow_bivalent=(flavor == "MG2"))
    tags = {str(v): sorted(t) for v, t in g.classify_vertices().items()}
    payload = {
        "flavor": flavor, "n": g.n, "vertices": g.nv,
        "edges": [{"id": i, "ends": list(g.edges[i]),
                   "marked": i in g.marked} for i in range(len(g.edges))],
        "honest_hairs": list(g.honest),
        "dishonest_hairs": g.dishonest_hairs(),
        "valences": list(val),
        "loop_order": g.loop_order(),
        "marking_cycle_rank": g.marking_cycle_rank(),
        "grade": dict(zip(("g", "r", "k", "m"), g.grade())),
        "vertex_tags": tags,
        "hedgehog": g.is_hedgehog(),
        "admissible": report,
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cache", help="cache root (default $HEDGEHOG_CACHE)")
    common.add_argument("--no-cache", action="store_true")
    common.add_argument("--csv", action="store_true", help="CSV tables")
    ap = argparse.ArgumentParser(
        prog="hedgehog",
        description="Exact homology engine for marked, hairy and forested "
                    "graph complexes.")
    sub = ap.add_subparsers(dest="command", required=True)

    def window_args(p, diff_default=None):
        p.add_argument("--flavor", required=True,
                       choices=["MG", "MG2", "HG", "FG"])
        p.add_argument("-n", type=int, required=True, choices=[0, 1])
        p.add_argument("-g", type=int, required=True)
        p.add_argument("-r", type=int, required=True)
        p.add_argument("-k", type=int, required=True)
        p.add_argument("--k-max", type=int, default=None,
                       help="extend the window over k..k-max")
        p.add_argument("--vertex-bound", type=int, default=None,
                       help="total vertex bound (mandatory for MG2)")
        if diff_default is not None:
            p.add_argument("--diff", default=diff_default,
                           help="differential expression")

    p = sub.add_parser("enumerate", parents=[common],
                       help="enumerate bases of a graded piece")
    window_args(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("homology", parents=[common],
                       help="homology table of a window")
    window_args(p, diff_default="ds+dm")
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("spectral", parents=[common],
                       help="filtration spectral sequence pages")
    window_args(p, diff_default="ds+dm+dh+dhe")
    p.add_argument("--filtration", default="hairs",
                   choices=["hairs", "loop", "omega", "marked-critical"])
    p.add_argument("--max-page", type=int, default=3)
    p.add_argument("--report", help="write the page report to this file")
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("verify", parents=[common],
                       help="run an identity suite")
    p.add_argument("suite", choices=suite_names())
    p.add_argument("--vertex-bound", type=int, default=None,
                   help="override MG2 window vertex bounds")
    p.add_argument("--inject-sign-bug", metavar="OP",
                   help="test hook: corrupt the named operator's signs")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("show", parents=[common],
                       help="pretty-print a generator from its "
                            "GC1 encoding (';' for newlines)")
    p.add_argument("encoding")
    p.set_defaults(func=cmd_show)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0,) else 0
    try:
        return args.func(args)
    except (ValueError, RuntimeError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
