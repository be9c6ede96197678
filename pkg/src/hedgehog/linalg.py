"""Exact sparse linear algebra over the rationals.

Rank by integer fraction-free elimination with Markowitz-style pivoting
(deterministic, ties broken by lowest index), an optional mod-p pre-pass
certified against the exact result, and exact nullspace bases for the
spectral subquotients.  No floating point anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence


class LinalgError(ValueError):
    pass


class CertificationError(LinalgError):
    """Modular pre-pass disagreed with the exact elimination."""


class SparseMat:
    """Column-major sparse matrix with exact rational entries."""

    __slots__ = ("rows", "cols", "columns")

    def __init__(self, rows: int, cols: int,
                 columns: Sequence[dict[int, Fraction]]):
        if len(columns) != cols:
            raise LinalgError("column count mismatch")
        self.rows = rows
        self.cols = cols
        self.columns = [dict((r, Fraction(v)) for r, v in col.items() if v != 0)
                        for col in columns]
        for col in self.columns:
            for r in col:
                if not (0 <= r < rows):
                    raise LinalgError("row index out of range")

    @staticmethod
    def zero(rows: int, cols: int) -> "SparseMat":
        return SparseMat(rows, cols, [{} for _ in range(cols)])

    @staticmethod
    def identity(n: int) -> "SparseMat":
        return SparseMat(n, n, [{i: Fraction(1)} for i in range(n)])

    def nnz(self) -> int:
        return sum(len(c) for c in self.columns)

    def is_zero(self) -> bool:
        return all(not c for c in self.columns)

    def entry(self, r: int, c: int) -> Fraction:
        return self.columns[c].get(r, Fraction(0))

    def mul(self, other: "SparseMat") -> "SparseMat":
        """self @ other."""
        if self.cols != other.rows:
            raise LinalgError("shape mismatch in mul")
        cols = []
        for col in other.columns:
            acc: dict[int, Fraction] = {}
            for k, v in col.items():
                for r, w in self.columns[k].items():
                    acc[r] = acc.get(r, Fraction(0)) + v * w
            cols.append({r: v for r, v in acc.items() if v != 0})
        return SparseMat(self.rows, other.cols, cols)

    def add(self, other: "SparseMat", scale: Fraction = Fraction(1)) -> "SparseMat":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise LinalgError("shape mismatch in add")
        cols = []
        for a, b in zip(self.columns, other.columns):
            acc = dict(a)
            for r, v in b.items():
                acc[r] = acc.get(r, Fraction(0)) + v * scale
            cols.append({r: v for r, v in acc.items() if v != 0})
        return SparseMat(self.rows, self.cols, cols)

    def to_int_rows(self) -> list[dict[int, int]]:
        """Row-major integer form, denominators cleared per column."""
        rows: list[dict[int, int]] = [dict() for _ in range(self.rows)]
        for c, col in enumerate(self.columns):
            if not col:
                continue
            den = 1
            for v in col.values():
                den = den * v.denominator // gcd(den, v.denominator)
            for r, v in col.items():
                rows[r][c] = int(v * den)
        return rows

    def serialize(self) -> str:
        """Interchange form: header `rows cols nnz`, entries sorted (c, r)."""
        ents = []
        for c, col in enumerate(self.columns):
            for r in sorted(col):
                v = col[r]
                ents.append((c, r, v))
        lines = ["%d %d %d" % (self.rows, self.cols, len(ents))]
        for c, r, v in ents:
            lines.append("%d %d %d/%d" % (r, c, v.numerator, v.denominator))
        return "\n".join(lines) + "\n"

    @staticmethod
    def deserialize(text: str) -> "SparseMat":
        lines = text.strip("\n").split("\n")
        rows, cols, nnz = (int(x) for x in lines[0].split())
        columns: list[dict[int, Fraction]] = [dict() for _ in range(cols)]
        for ln in lines[1:]:
            rs, cs, vs = ln.split()
            num, den = vs.split("/")
            columns[int(cs)][int(rs)] = Fraction(int(num), int(den))
        m = SparseMat(rows, cols, columns)
        if m.nnz() != nnz:
            raise LinalgError("bad interchange file: nnz mismatch")
        return m


def _eliminate_int_rows(rows: list[dict[int, int]]) -> int:
    """Integer fraction-free elimination; returns the rank.

    Markowitz pivoting: minimize (nnz(row)-1)*(nnz(col)-1), ties broken
    by lowest column then row index.  Rows are gcd-reduced after each
    update to control growth.
    """
    rows = [dict(r) for r in rows if r]
    rank = 0
    while rows:
        col_count: dict[int, int] = {}
        for r in rows:
            for c in r:
                col_count[c] = col_count.get(c, 0) + 1
        best = None
        for i, r in enumerate(rows):
            rn = len(r) - 1
            for c in r:
                cost = rn * (col_count[c] - 1)
                key = (cost, c, i)
                if best is None or key < best:
                    best = key
        _cost, pc, pi = best
        piv = rows.pop(pi)
        pval = piv[pc]
        rank += 1
        nxt = []
        for r in rows:
            if pc in r:
                f = r.pop(pc)
                if pval != 1:
                    for c in r:
                        r[c] *= pval
                for c, v in piv.items():
                    if c == pc:
                        continue
                    nv = r.get(c, 0) - f * v
                    if nv:
                        r[c] = nv
                    elif c in r:
                        del r[c]
                if r:
                    g = 0
                    for v in r.values():
                        g = gcd(g, v)
                    if g > 1:
                        for c in r:
                            r[c] //= g
                    nxt.append(r)
            else:
                nxt.append(r)
        rows = nxt
    return rank


def rank_mod_p(m: SparseMat, p: int) -> int:
    """Rank over GF(p) by dense-ish row elimination on the sparse rows."""
    rows = []
    for r in m.to_int_rows():
        rr = {c: v % p for c, v in r.items() if v % p}
        if rr:
            rows.append(rr)
    rank = 0
    while rows:
        piv = rows.pop(0)
        pc = min(piv)
        inv = pow(piv[pc], -1, p)
        piv = {c: (v * inv) % p for c, v in piv.items()}
        rank += 1
        nxt = []
        for r in rows:
            if pc in r:
                f = r.pop(pc)
                for c, v in piv.items():
                    if c == pc:
                        continue
                    nv = (r.get(c, 0) - f * v) % p
                    if nv:
                        r[c] = nv
                    elif c in r:
                        del r[c]
            if r:
                nxt.append(r)
        rows = nxt
    return rank


_CERT_PRIMES = (2147483629, 2147483587)


def rank_exact(m: SparseMat, certify: bool = False) -> int:
    """Exact rank over Q; optional modular pre-pass cross-check."""
    pre = None
    if certify:
        pre = max(rank_mod_p(m, p) for p in _CERT_PRIMES)
    rank = _eliminate_int_rows(m.to_int_rows())
    if pre is not None and pre != rank:
        raise CertificationError("modular pre-pass rank %d != exact rank %d"
                                 % (pre, rank))
    return rank


def nullspace(m: SparseMat) -> list[dict[int, Fraction]]:
    """Basis of the right kernel, as sparse coordinate vectors.

    Deterministic reduced row echelon over Fraction; free columns in
    increasing order produce the basis.
    """
    rows: list[dict[int, Fraction]] = []
    for r in range(m.rows):
        rows.append({})
    for c, col in enumerate(m.columns):
        for r, v in col.items():
            rows[r][c] = v
    rows = [r for r in rows if r]
    pivots: list[tuple[int, dict[int, Fraction]]] = []
    while rows:
        rows.sort(key=lambda r: min(r))
        piv = rows.pop(0)
        pc = min(piv)
        inv = 1 / piv[pc]
        piv = {c: v * inv for c, v in piv.items()}
        for other in pivots:
            o = other[1]
            if pc in o:
                f = o.pop(pc)
                for c, v in piv.items():
                    if c == pc:
                        continue
                    nv = o.get(c, Fraction(0)) - f * v
                    if nv:
                        o[c] = nv
                    elif c in o:
                        del o[c]
        pivots.append((pc, piv))
        nxt = []
        for r in rows:
            if pc in r:
                f = r.pop(pc)
                for c, v in piv.items():
                    if c == pc:
                        continue
                    nv = r.get(c, Fraction(0)) - f * v
                    if nv:
                        r[c] = nv
                    elif c in r:
                        del r[c]
            if r:
                nxt.append(r)
        rows = nxt
    piv_cols = {pc for pc, _ in pivots}
    basis = []
    for c in range(m.cols):
        if c in piv_cols:
            continue
        vec: dict[int, Fraction] = {c: Fraction(1)}
        for pc, prow in pivots:
            v = prow.get(c)
            if v:
                vec[pc] = -v
        basis.append(vec)
    return basis


def homology_dim(d_in: SparseMat, d_out: SparseMat, check: bool = True) -> int:
    """dim ker(d_out) - rank(d_in), with the composition checked to be 0."""
    if d_in.rows != d_out.cols:
        raise LinalgError("chain degrees do not line up")
    if check and not d_out.mul(d_in).is_zero():
        raise LinalgError("d_out . d_in != 0: operator implementation bug")
    h = d_out.cols - rank_exact(d_out) - rank_exact(d_in)
    if h < 0:
        raise LinalgError("negative homology dimension")
    return h
