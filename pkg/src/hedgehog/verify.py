"""Declarative identity-checking harness.

Suites are bundles of checks, loaded from the packaged suites.json.
A check states an identity between operator expressions, a window of
enumerated pieces and an expectation.  Checks are evaluated exactly on
every basis element of the window; on failure the smallest
counterexample (canonical encoding order) and its residual are kept.

Sign-ambiguous identities ship as report-only groups; a group passes
when exactly one member holds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Optional

from .bases import GradedBasis, filter_subbasis
from .cache import CacheStore, cached_basis
from .expr import parse_expr
from .expr import eval_on_generator
from .homology import homology_table


class VerifyError(ValueError):
    pass


@dataclass(frozen=True)
class CheckSpec:
    name: str
    lhs: str
    rhs: str                       # "0", "id", or an expression
    flavor: str
    n: int
    pieces: tuple[tuple[int, int, int], ...]
    vertex_bound: Optional[int] = None
    filter: Optional[tuple[str, int]] = None
    expect: str = "must"           # must | report
    group: Optional[str] = None


@dataclass
class CheckReport:
    spec: CheckSpec
    passed: bool
    checked: int
    counterexample: Optional[str] = None
    residual: Optional[dict] = None

    def to_json(self) -> dict:
        out = {
            "name": self.spec.name,
            "expect": self.spec.expect,
            "passed": self.passed,
            "checked": self.checked,
        }
        if self.spec.group:
            out["group"] = self.spec.group
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
            out["residual"] = {k: str(v) for k, v in (self.residual or {}).items()}
        return out


@dataclass
class SuiteReport:
    name: str
    checks: list = field(default_factory=list)
    passed: bool = True

    def to_json(self) -> dict:
        return {"suite": self.name, "passed": self.passed,
                "checks": [c if isinstance(c, dict) else c.to_json()
                           for c in self.checks]}


def run_check(spec: CheckSpec, store: Optional[CacheStore] = None) -> CheckReport:
    """Exact evaluation of one identity over its window."""
    store = store or CacheStore(enabled=False)
    lhs = parse_expr(spec.lhs)
    rhs = None
    if spec.rhs not in ("0", "id"):
        rhs = parse_expr(spec.rhs)
    checked = 0
    first_bad = None
    first_residual = None
    for (g, r, k) in spec.pieces:
        fam = cached_basis(store, spec.flavor, spec.n, g, r, k,
                           spec.vertex_bound)
        for m in sorted(fam):
            basis: GradedBasis = fam[m]
            if spec.filter:
                basis = filter_subbasis(basis, spec.filter[0], spec.filter[1])
            for enc in basis.encodings:
                checked += 1
                got = eval_on_generator(lhs, spec.flavor, enc)
                if spec.rhs == "0":
                    want: dict = {}
                elif spec.rhs == "id":
                    want = {enc: Fraction(1)}
                else:
                    want = eval_on_generator(rhs, spec.flavor, enc)
                if got != want:
                    if first_bad is None or enc < first_bad:
                        first_bad = enc
                        first_residual = {
                            key: got.get(key, Fraction(0)) - want.get(key, Fraction(0))
                            for key in sorted(set(got) | set(want))
                            if got.get(key, Fraction(0)) != want.get(key, Fraction(0))}
    return CheckReport(spec, first_bad is None, checked, first_bad,
                       first_residual)


def _run_hg_shift_bijection(entry: dict, store: CacheStore) -> dict:
    """H(HG_n(g,1,0), ds) vs H(HG_n(g,0,1), ds) shifted by one degree."""
    n = entry["n"]
    g_max = entry.get("g_max", 2)
    ok = True
    tables = {}
    for g in range(1, g_max + 1):
        try:
            t10 = homology_table("HG", n, "ds",
                                 {(g, 1, 0): cached_basis(store, "HG", n, g, 1, 0)})
            t01 = homology_table("HG", n, "ds",
                                 {(g, 0, 1): cached_basis(store, "HG", n, g, 0, 1)})
        except Exception as exc:  # a broken differential is a failure
            tables["g=%d" % g] = {"error": str(exc)}
            ok = False
            continue
        shifted = {d + 1: v for d, v in t10.homology.items() if v}
        plain = {d: v for d, v in t01.homology.items() if v}
        tables["g=%d" % g] = {"H(r=1,k=0)[+1]": shifted, "H(r=0,k=1)": plain}
        if shifted != plain:
            ok = False
    return {"name": entry["name"], "expect": entry.get("expect", "must"),
            "passed": ok, "tables": tables}


def _run_hedgehog_parity(entry: dict, store: CacheStore) -> dict:
    """One-dimensional hedgehog classes appear iff the hair count has
    the right parity: odd for n=0, even for n=1."""
    k_max = entry.get("k_max", 5)
    ns = entry["n"] if isinstance(entry["n"], list) else [entry["n"]]
    ok = True
    found: dict[str, list] = {}
    for n in ns:
        dims = []
        for k in range(1, k_max + 1):
            fam = cached_basis(store, "HG", n, 1, 0, k)
            total = 0
            for m in sorted(fam):
                total += len(filter_subbasis(fam[m], "hedgehog"))
            want = 1 if (k % 2 == (1 if n == 0 else 0)) else 0
            dims.append((k, total, want))
            if total != want:
                ok = False
        found["n=%d" % n] = dims
    return {"name": entry["name"], "expect": entry.get("expect", "must"),
            "passed": ok, "dims": found}


def _load_suites() -> dict:
    text = resources.files("hedgehog").joinpath("suites.json").read_text()
    return json.loads(text)["suites"]


def suite_names() -> list[str]:
    return sorted(_load_suites())


def _entry_checks(entry: dict, overrides: dict) -> list[CheckSpec]:
    ns = entry["n"] if isinstance(entry["n"], list) else [entry["n"]]
    flavors = entry["flavor"] if isinstance(entry["flavor"], list) else [entry["flavor"]]
    vb = entry.get("vertex_bound")
    if vb is not None and overrides.get("vertex_bound"):
        vb = overrides["vertex_bound"]
    out = []
    for n in ns:
        for flavor in flavors:
            suffix = ""
            if len(ns) > 1:
                suffix += " [n=%d]" % n
            if len(flavors) > 1:
                suffix += " [%s]" % flavor
            group = entry.get("group")
            out.append(CheckSpec(
                name=entry["name"] + suffix, lhs=entry["lhs"],
                rhs=entry["rhs"], flavor=flavor,
                n=n, pieces=tuple(tuple(p) for p in entry["pieces"]),
                vertex_bound=vb,
                filter=tuple(entry["filter"]) if entry.get("filter") else None,
                expect=entry.get("expect", "must"),
                group=(group + suffix) if group else None))
    return out


def run_suite(name: str, store: Optional[CacheStore] = None,
              overrides: Optional[dict] = None) -> SuiteReport:
    """Run a named suite; aggregate fails iff a must-hold check fails
    or a sign-group does not have exactly one passing member."""
    suites = _load_suites()
    if name not in suites:
        raise VerifyError("unknown suite %r (have: %s)"
                          % (name, ", ".join(sorted(suites))))
    store = store or CacheStore(enabled=False)
    overrides = overrides or {}
    report = SuiteReport(name)
    groups: dict[str, list[bool]] = {}
    for entry in suites[name]:
        if entry.get("kind") in ("hg-shift-bijection", "hedgehog-parity"):
            runner = (_run_hg_shift_bijection if entry["kind"] == "hg-shift-bijection"
                      else _run_hedgehog_parity)
            res = runner(entry, store)
            report.checks.append(res)
            if entry.get("expect", "must") == "must" and not res["passed"]:
                report.passed = False
            continue
        for spec in _entry_checks(entry, overrides):
            res = run_check(spec, store)
            report.checks.append(res)
            if spec.group:
                groups.setdefault(spec.group, []).append(res.passed)
            elif spec.expect == "must" and not res.passed:
                report.passed = False
    for gname, flags in sorted(groups.items()):
        exactly_one = sum(flags) == 1
        report.checks.append({"name": "group %s: exactly one holds" % gname,
                              "expect": "must", "passed": exactly_one,
                              "members": flags})
        if not exactly_one:
            report.passed = False
    return report
