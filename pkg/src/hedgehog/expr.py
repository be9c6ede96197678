"""Symbolic operator expressions evaluated against bases.

Expression syntax (stable CLI identifiers from the operator registry):

    A + B        sum                 2*A, 1/2*A   scalar multiple
    A.B          composition         [A,B]        commutator AB - BA
    -A           negation            exp(A;N)     sum_{j<=N} A^j/j!
    pi(l), iota(l)                   parenthesised grouping

Evaluation is linear over exact rationals; atomic applications are
memoized per generator.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Optional

from .linalg import SparseMat
from .operators import ATOMS, PARAMETRIC, ChainVector, apply_atom, atom_shift


class ExprError(ValueError):
    pass


class Node:
    def key(self) -> str:
        raise NotImplementedError


class Atom(Node):
    def __init__(self, name: str, arg: Optional[int] = None):
        self.name = name
        self.arg = arg

    def key(self) -> str:
        return self.name if self.arg is None else "%s(%d)" % (self.name, self.arg)


class Scal(Node):
    def __init__(self, c: Fraction, sub: Node):
        self.c = c
        self.sub = sub

    def key(self) -> str:
        return "%s*(%s)" % (self.c, self.sub.key())


class Sum(Node):
    def __init__(self, parts: list[Node]):
        self.parts = parts

    def key(self) -> str:
        return "+".join("(%s)" % p.key() for p in self.parts)


class Comp(Node):
    """Composition; parts[0] applied last."""

    def __init__(self, parts: list[Node]):
        self.parts = parts

    def key(self) -> str:
        return ".".join("(%s)" % p.key() for p in self.parts)


class Comm(Node):
    def __init__(self, a: Node, b: Node):
        self.a = a
        self.b = b

    def key(self) -> str:
        return "[%s,%s]" % (self.a.key(), self.b.key())


class Exp(Node):
    def __init__(self, sub: Node, bound: int):
        self.sub = sub
        self.bound = bound

    def key(self) -> str:
        return "exp(%s;%d)" % (self.sub.key(), self.bound)


_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z_0-9]*|\d+|[()\[\],+\-*./;])")


def _tokenize(s: str) -> list[str]:
    out = []
    pos = 0
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m:
            raise ExprError("bad character at %r" % s[pos:])
        out.append(m.group(1))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens: list[str]):
        self.toks = tokens
        self.i = 0

    def peek(self) -> Optional[str]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expected: Optional[str] = None) -> str:
        if self.i >= len(self.toks):
            raise ExprError("unexpected end of expression")
        t = self.toks[self.i]
        if expected is not None and t != expected:
            raise ExprError("expected %r, got %r" % (expected, t))
        self.i += 1
        return t

    def parse(self) -> Node:
        node = self.expr()
        if self.peek() is not None:
            raise ExprError("trailing input at %r" % self.peek())
        return node

    def expr(self) -> Node:
        parts = [self.term()]
        while self.peek() in ("+", "-"):
            op = self.take()
            t = self.term()
            parts.append(t if op == "+" else Scal(Fraction(-1), t))
        return parts[0] if len(parts) == 1 else Sum(parts)

    def term(self) -> Node:
        neg = False
        if self.peek() == "-":
            self.take()
            neg = True
        if self.peek() is not None and self.peek().isdigit():
            c = Fraction(int(self.take()))
            if self.peek() == "/":
                self.take()
                c /= int(self.take())
            self.take("*")
            node: Node = self.comp()
            node = Scal(c, node)
        else:
            node = self.comp()
        return Scal(Fraction(-1), node) if neg else node

    def comp(self) -> Node:
        parts = [self.factor()]
        while self.peek() == ".":
            self.take()
            parts.append(self.factor())
        return parts[0] if len(parts) == 1 else Comp(parts)

    def factor(self) -> Node:
        t = self.peek()
        if t == "(":
            self.take()
            node = self.expr()
            self.take(")")
            return node
        if t == "[":
            self.take()
            a = self.expr()
            self.take(",")
            b = self.expr()
            self.take("]")
            return Comm(a, b)
        if t == "exp":
            self.take()
            self.take("(")
            sub = self.expr()
            self.take(";")
            bound = int(self.take())
            self.take(")")
            return Exp(sub, bound)
        name = self.take()
        if name in PARAMETRIC:
            self.take("(")
            arg = int(self.take())
            self.take(")")
            return Atom(name, arg)
        if name in ATOMS:
            return Atom(name)
        raise ExprError("unknown operator %r" % name)


def parse_expr(s: str) -> Node:
    return _Parser(_tokenize(s)).parse()


# -- evaluation --------------------------------------------------------------

_VEC_CACHE: dict[tuple, ChainVector] = {}


def _add_into(acc: dict, vec: ChainVector, scale: Fraction) -> None:
    if scale == 0:
        return
    for enc, c in vec.items():
        acc[enc] = acc.get(enc, Fraction(0)) + c * scale


def _prune(acc: dict) -> ChainVector:
    return {k: v for k, v in sorted(acc.items()) if v != 0}


def eval_on_generator(node: Node, flavor: str, encoding: str) -> ChainVector:
    from .operators import INJECTED_SIGN_BUGS

    key = (node.key(), flavor, encoding,
           tuple(sorted(INJECTED_SIGN_BUGS)) if INJECTED_SIGN_BUGS else None)
    hit = _VEC_CACHE.get(key)
    if hit is not None:
        return hit
    if isinstance(node, Atom):
        out = apply_atom(node.name, node.arg, flavor, encoding)
    elif isinstance(node, Scal):
        out = _prune({k: v * node.c for k, v in
                      eval_on_generator(node.sub, flavor, encoding).items()})
    elif isinstance(node, Sum):
        acc: dict = {}
        for p in node.parts:
            _add_into(acc, eval_on_generator(p, flavor, encoding), Fraction(1))
        out = _prune(acc)
    elif isinstance(node, Comp):
        vec: ChainVector = {encoding: Fraction(1)}
        for p in reversed(node.parts):
            vec = eval_on_vector(p, flavor, vec)
        out = vec
    elif isinstance(node, Comm):
        acc = {}
        _add_into(acc, eval_on_generator(Comp([node.a, node.b]), flavor,
                                         encoding), Fraction(1))
        _add_into(acc, eval_on_generator(Comp([node.b, node.a]), flavor,
                                         encoding), Fraction(-1))
        out = _prune(acc)
    elif isinstance(node, Exp):
        acc = {}
        vec = {encoding: Fraction(1)}
        fact = 1
        _add_into(acc, vec, Fraction(1))
        for j in range(1, node.bound + 1):
            vec = eval_on_vector(node.sub, flavor, vec)
            fact *= j
            if not vec:
                break
            _add_into(acc, vec, Fraction(1, fact))
        out = _prune(acc)
    else:
        raise ExprError("bad node %r" % node)
    _VEC_CACHE[key] = out
    return out


def eval_on_vector(node: Node, flavor: str, vec: ChainVector) -> ChainVector:
    acc: dict = {}
    for enc, coeff in vec.items():
        _add_into(acc, eval_on_generator(node, flavor, enc), coeff)
    return _prune(acc)


def clear_expr_cache() -> None:
    _VEC_CACHE.clear()


# -- grade shifts ------------------------------------------------------------

def expr_shifts(node: Node) -> list[dict[str, int]]:
    """Possible grade shifts of the expression (one per summand path)."""
    if isinstance(node, Atom):
        return [atom_shift(node.name, node.arg)]
    if isinstance(node, Scal):
        return expr_shifts(node.sub)
    if isinstance(node, Sum):
        out = []
        for p in node.parts:
            for s in expr_shifts(p):
                if s not in out:
                    out.append(s)
        return out
    if isinstance(node, Comp):
        outs = [{}]
        for p in node.parts:
            nxt = []
            for s1 in expr_shifts(p):
                for s0 in outs:
                    s = {k: s0.get(k, 0) + s1.get(k, 0)
                         for k in set(s0) | set(s1)}
                    if s not in nxt:
                        nxt.append(s)
            outs = nxt
        return outs
    if isinstance(node, Comm):
        return expr_shifts(Comp([node.a, node.b]))
    if isinstance(node, Exp):
        outs = [{}]
        base = expr_shifts(node.sub)
        for j in range(1, node.bound + 1):
            for s1 in base:
                s = {k: v * j for k, v in s1.items()}
                if s not in outs:
                    outs.append(s)
        return outs
    raise ExprError("bad node %r" % node)


# -- matrix assembly ---------------------------------------------------------

class CodomainError(ValueError):
    """An output generator is missing from the codomain basis."""


def assemble_matrix(node: Node, flavor: str, domain: list[str],
                    codomain_index: dict[str, int],
                    on_missing: str = "error") -> SparseMat:
    """Matrix of the expression: column j = expression on domain[j].

    on_missing: 'error' raises CodomainError, 'drop' discards terms
    outside the codomain (quotient-by-window semantics).
    """
    cols = []
    for enc in domain:
        vec = eval_on_generator(node, flavor, enc)
        col = {}
        for out_enc, coeff in vec.items():
            row = codomain_index.get(out_enc)
            if row is None:
                if on_missing == "drop":
                    continue
                raise CodomainError("output not in codomain basis:\n%s" % out_enc)
            col[row] = coeff
        cols.append(col)
    return SparseMat(len(codomain_index), len(domain), cols)
