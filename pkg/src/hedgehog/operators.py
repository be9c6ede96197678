"""Atomic operators on generators: differentials, homotopies, projections.

Each operator takes a canonical generator and returns an exact linear
combination of canonical generators (encoding -> Fraction).  Raw terms
are built as concrete graphs with explicit orientation words following
the per-flavor prescriptions; canonicalization supplies all signs.

For flavor FG every operator acts on the marked-graph level and terms
whose marking acquires a cycle are dropped (quotient projection).  For
flavor HG outputs must stay in the subcomplex; an operator that leaves
it raises ClosureError.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterator, Optional

from .graphs import (
    GraphError,
    LabeledGraph,
    _KE,
    _KH,
    _KV,
    _quick_zero,
    canonical_form,
    parse_encoding,
    ref_word,
    word_delete,
)

ChainVector = dict[str, Fraction]


class OperatorError(ValueError):
    pass


class ClosureError(OperatorError):
    """An operator left the subcomplex it was applied in."""


class DomainError(OperatorError):
    """Input outside the operator's domain."""


_PARSE_CACHE: dict[str, LabeledGraph] = {}
_APPLY_CACHE: dict[tuple, ChainVector] = {}

# test hook: operators whose term signs are deliberately corrupted
INJECTED_SIGN_BUGS: set[str] = set()


def graph_of(encoding: str) -> LabeledGraph:
    g = _PARSE_CACHE.get(encoding)
    if g is None:
        _flavor, g = parse_encoding(encoding)
        _PARSE_CACHE[encoding] = g
    return g


def clear_caches() -> None:
    _PARSE_CACHE.clear()
    _APPLY_CACHE.clear()


# -- raw-term assembly ------------------------------------------------------


def _pack(n, nv, edges, marked, honest, word, removed_v=(), removed_e=()):
    """Contiguous renumbering after deletions; word tokens follow."""
    rv = set(removed_v)
    re_ = set(removed_e)
    vmap = {}
    nxt = 0
    for v in range(nv):
        if v not in rv:
            vmap[v] = nxt
            nxt += 1
    emap = {}
    new_edges = []
    for i, (u, v) in enumerate(edges):
        if i in re_:
            continue
        emap[i] = len(new_edges)
        new_edges.append((vmap[u], vmap[v]))
    new_marked = frozenset(emap[e] for e in marked if e not in re_)
    new_honest = tuple(emap[e] for e in honest)
    new_word = []
    for t in word:
        if t[0] == _KV:
            new_word.append((_KV, vmap[t[1]]))
        elif t[0] == _KE:
            new_word.append((_KE, emap[t[1]]))
        else:
            new_word.append((_KH, emap[t[1]], t[2]))
    return LabeledGraph(n, nxt, new_edges, new_marked, new_honest), new_word


def _in_hg(g: LabeledGraph) -> bool:
    hs = set(g.honest)
    return all(i in g.marked for i in range(len(g.edges)) if i not in hs)


def _finish(terms, flavor: str) -> ChainVector:
    out: dict[str, Fraction] = {}
    for graph, word, coeff in terms:
        if coeff == 0:
            continue
        if flavor == "FG" and graph.marking_cycle_rank() > 0:
            continue
        if flavor == "HG" and not _in_hg(graph):
            raise ClosureError("operator output leaves the HG subcomplex")
        if _quick_zero(graph):
            continue
        c = canonical_form(graph, flavor, word, validate=False)
        if c.zero:
            continue
        out[c.encoding] = out.get(c.encoding, Fraction(0)) + coeff * c.sign
    return {k: v for k, v in sorted(out.items()) if v != 0}


# -- structural helpers -----------------------------------------------------


def chain_length(g: LabeledGraph, e: int) -> int:
    """Length of the maximal unmarked chain through e; 2 for tadpoles."""
    u, v = g.edges[e]
    if u == v:
        return 2
    val = g.valences()
    inc: list[list[int]] = [[] for _ in range(g.nv)]
    for i, (a, b) in enumerate(g.edges):
        inc[a].append(i)
        if a != b:
            inc[b].append(i)
    count = 1
    for start in (u, v):
        prev, cur = e, start
        while val[cur] == 2:
            nxts = [i for i in inc[cur] if i != prev]
            if len(nxts) != 1:
                break
            nxt = nxts[0]
            if nxt in g.marked:
                break
            if nxt == e:
                return count  # closed unmarked cycle
            count += 1
            a, b = g.edges[nxt]
            cur = b if a == cur else a
            prev = nxt
    return count


def subdiv_weight(g: LabeledGraph, e: int) -> Fraction:
    """Net coefficient for subdividing e: 1/c(e) per insertion slot.

    A tadpole offers two slots giving the same graph, so the stated
    c(e)=2 yields net weight 1; ordinary edges have one slot.
    """
    slots = 2 if g.edges[e][0] == g.edges[e][1] else 1
    return Fraction(slots, chain_length(g, e))


def _subdivide(g: LabeledGraph, e: int, word):
    """Replace e=(v1,v2) by v1-x and x-v2; returns pre-pack pieces.

    New vertex id nv, new edge ids E and E+1; the orientation word gets
    the seven-token block for n=1 (new vertex token at its center).
    """
    v1, v2 = g.edges[e]
    x = g.nv
    edges = list(g.edges) + [(v1, x), (x, v2)]
    e1, e2 = len(g.edges), len(g.edges) + 1
    honest = list(g.honest)
    if e in honest:
        val = g.valences()
        leaf_side = e1 if val[v1] == 1 else e2
        honest[honest.index(e)] = leaf_side
    sign = 1
    if g.n == 1:
        word, s1 = word_delete(word, (_KH, e, 0))
        word, s2 = word_delete(word, (_KE, e))
        word, s3 = word_delete(word, (_KH, e, 1))
        word = [(_KH, e1, 0), (_KE, e1), (_KH, e1, 1), (_KV, x),
                (_KH, e2, 0), (_KE, e2), (_KH, e2, 1)] + word
        sign = s1 * s2 * s3
    return x, e1, e2, edges, honest, word, sign


# -- atomic operators -------------------------------------------------------


def delta_m(g: LabeledGraph) -> Iterator:
    """Mark one unmarked non-honest edge; degree +1."""
    hs = set(g.honest)
    for e in range(len(g.edges)):
        if e in g.marked or e in hs:
            continue
        word = list(ref_word(g))
        if g.n == 0:
            word = [(_KE, e)] + word
            sign = 1
        else:
            word, sign = word_delete(word, (_KE, e))
        yield (LabeledGraph(g.n, g.nv, g.edges, g.marked | {e}, g.honest),
               word, Fraction(sign))


def splitter(g: LabeledGraph, marked_new: bool, min_valence: int,
             tilde: bool = False) -> Iterator:
    """Split a vertex into two joined by a new edge.

    marked_new selects the degree +1 split (delta_s family) versus the
    degree 0 insertion (Delta family); min_valence bounds the new
    vertices; tilde drops splits destroying a flower.
    """
    flowers = set(g.flowers()) if tilde else set()
    val = g.valences()
    for v in range(g.nv):
        if val[v] < 2:
            continue
        star = g.star(v)
        deg = len(star)
        lo = min_valence - 1
        if deg < 2 * lo:
            continue
        anchor, rest = star[0], star[1:]
        for asz in range(lo, deg - lo + 1):
            for comb in itertools.combinations(rest, asz - 1):
                part_a = {anchor} | set(comb)
                if tilde:
                    fl = [f for f in flowers if g.edges[f][0] == v]
                    destroyed = any(((f, 0) in part_a) != ((f, 1) in part_a)
                                    for f in fl)
                    if destroyed:
                        continue
                v1, v2 = g.nv, g.nv + 1
                e0 = len(g.edges)
                edges = []
                for i, (a, b) in enumerate(g.edges):
                    na = a
                    nb = b
                    if a == v:
                        na = v1 if (i, 0) in part_a else v2
                    if b == v:
                        nb = v1 if (i, 1) in part_a else v2
                    edges.append((na, nb))
                edges.append((v1, v2))
                marked = set(g.marked)
                if marked_new:
                    marked.add(e0)
                word = list(ref_word(g))
                sign = 1
                if g.n == 0:
                    if marked_new:
                        word = [(_KE, e0)] + word
                else:
                    word, sign = word_delete(word, (_KV, v))
                    if marked_new:
                        word = [(_KV, v1), (_KH, e0, 0), (_KH, e0, 1),
                                (_KV, v2)] + word
                    else:
                        word = [(_KV, v1), (_KH, e0, 0), (_KE, e0),
                                (_KH, e0, 1), (_KV, v2)] + word
                graph, word = _pack(g.n, g.nv + 2, edges, marked, g.honest,
                                    word, removed_v=(v,))
                yield graph, word, Fraction(sign)


def lam(g: LabeledGraph, tilde: bool = False) -> Iterator:
    """Lengthen a maximal unmarked chain: subdivide an unmarked edge.

    Coefficient 1/c(e); tilde skips flower edges.
    """
    flowers = set(g.flowers()) if tilde else set()
    for e in range(len(g.edges)):
        if e in g.marked or e in flowers:
            continue
        w = subdiv_weight(g, e)
        word = list(ref_word(g))
        x, e1, e2, edges, honest, word, sign = _subdivide(g, e, word)
        graph, word = _pack(g.n, g.nv + 1, edges, g.marked, honest, word,
                            removed_e=(e,))
        yield graph, word, sign * w


def delta_h(g: LabeledGraph) -> Iterator:
    """Attach a marked dishonest hair to an internal vertex; degree +1."""
    val = g.valences()
    for v in range(g.nv):
        if val[v] == 1:
            continue
        v0 = g.nv
        e0 = len(g.edges)
        edges = list(g.edges) + [(v, v0)]
        word = list(ref_word(g))
        if g.n == 0:
            word = [(_KE, e0)] + word
        else:
            word = [(_KH, e0, 0), (_KH, e0, 1), (_KV, v0)] + word
        yield (LabeledGraph(g.n, g.nv + 1, edges, g.marked | {e0}, g.honest),
               word, Fraction(1))


def delta_he(g: LabeledGraph) -> Iterator:
    """Attach a marked dishonest hair to an unmarked edge.

    Direct form of -[delta_h, Lambda]: subdivide an unmarked edge and
    hang the hair at the new trivalent vertex, coefficient -1/c(e).
    """
    for e in range(len(g.edges)):
        if e in g.marked:
            continue
        w = subdiv_weight(g, e)
        word = list(ref_word(g))
        x, e1, e2, edges, honest, word, sign = _subdivide(g, e, word)
        v0 = g.nv + 1
        e0 = len(edges)
        edges = edges + [(x, v0)]
        if g.n == 0:
            word = [(_KE, e0)] + word
        else:
            word = [(_KH, e0, 0), (_KH, e0, 1), (_KV, v0)] + word
        graph, word = _pack(g.n, g.nv + 2, edges, set(g.marked) | {e0},
                            honest, word, removed_e=(e,))
        yield graph, word, -sign * w


def delta_vv(g: LabeledGraph) -> Iterator:
    """Connect two distinct internal vertices by a marked edge; n=0 only.

    Ordered pairs, so each unordered pair contributes twice.  The u=w
    diagonal (a marked tadpole) is excluded: with it the total
    differential fails to square to zero.
    """
    if g.n != 0:
        raise DomainError("delta_vv is defined for n=0 only")
    val = g.valences()
    internal = [v for v in range(g.nv) if val[v] != 1]
    for u in internal:
        for w in internal:
            if u == w:
                continue
            e0 = len(g.edges)
            edges = list(g.edges) + [(u, w)]
            word = [(_KE, e0)] + list(ref_word(g))
            yield (LabeledGraph(0, g.nv, edges, g.marked | {e0}, g.honest),
                   word, Fraction(1))


def delta_ve(g: LabeledGraph) -> Iterator:
    """Connect an unmarked edge to an internal vertex by a marked edge.

    Matches -[delta_vv, Lambda] after projection; ordered pairs give
    each (edge, vertex) incidence weight 2/c(e).
    """
    if g.n != 0:
        raise DomainError("delta_ve is defined for n=0 only")
    val = g.valences()
    internal = [v for v in range(g.nv) if val[v] != 1]
    for e in range(len(g.edges)):
        if e in g.marked:
            continue
        w = subdiv_weight(g, e)
        for u in internal:
            word = list(ref_word(g))
            x, e1, e2, edges, honest, word, sign = _subdivide(g, e, word)
            e0 = len(edges)
            edges = edges + [(x, u)]
            word = [(_KE, e0)] + word
            graph, word = _pack(0, g.nv + 1, edges, set(g.marked) | {e0},
                                honest, word, removed_e=(e,))
            yield graph, word, -2 * sign * w


def delta_ee(g: LabeledGraph) -> Iterator:
    """Connect two unmarked edges (not necessarily distinct) by a marked
    edge between fresh subdivision points.

    Ordered pairs of insertion slots: distinct edges carry
    2/(c_e c_f), a doubly subdivided single edge the same weight 2 on
    desk-scale chains.  Calibrated against the square of the total
    differential, which pins the same-edge factor.
    """
    if g.n != 0:
        raise DomainError("delta_ee is defined for n=0 only")
    unmarked = [e for e in range(len(g.edges)) if e not in g.marked]
    for ei, e in enumerate(unmarked):
        we = subdiv_weight(g, e)
        for f in unmarked[ei:]:
            word = list(ref_word(g))
            if f != e:
                wf = subdiv_weight(g, f)
                x, e1, e2, edges0, honest, word, s1 = _subdivide(g, e, word)
                gmid = LabeledGraph(0, g.nv + 1, edges0, g.marked, honest)
                y, f1, f2, edges, honest, word, s2 = _subdivide(gmid, f, word)
                coeff = 2 * we * wf
                removed = (e, f)
            else:
                x, e1, e2, edges0, honest, word, s1 = _subdivide(g, e, word)
                gmid = LabeledGraph(0, g.nv + 1, edges0, g.marked, honest)
                wf = 2 * subdiv_weight(gmid, e2)
                y, f1, f2, edges, honest, word, s2 = _subdivide(gmid, e2, word)
                coeff = 2 * we * wf
                removed = (e, e2)
            nv = g.nv + 2
            e0 = len(edges)
            edges = edges + [(x, y)]
            word = [(_KE, e0)] + word
            graph, word = _pack(0, nv, edges, set(g.marked) | {e0},
                                honest, word, removed_e=removed)
            yield graph, word, coeff * s1 * s2


def _attach_quasihair(g_n, nv, edges, marked, honest, word, v):
    """Glue the gadget S (marked stem + unmarked flower) to vertex v."""
    q = nv
    e_s = len(edges)
    flower = e_s + 1
    edges = list(edges) + [(v, q), (q, q)]
    marked = set(marked) | {e_s}
    word = [(_KE, e_s)] + list(word)
    return nv + 1, edges, marked, honest, word


def delta_q(g: LabeledGraph) -> Iterator:
    """Attach the quasihair gadget S to internal non-quasileaf vertices."""
    if g.n != 0:
        raise DomainError("delta_q is defined for n=0 only")
    val = g.valences()
    ql = set(g.quasileaves())
    for v in range(g.nv):
        if val[v] == 1 or v in ql:
            continue
        nv, edges, marked, honest, word = _attach_quasihair(
            g.n, g.nv, g.edges, g.marked, g.honest, ref_word(g), v)
        yield LabeledGraph(0, nv, edges, marked, honest), word, Fraction(1)


def delta_qe(g: LabeledGraph) -> Iterator:
    """Attach S to an unmarked non-flower edge, coefficient -1/c(e).

    Direct form of -[delta_q, tilde-Lambda].
    """
    if g.n != 0:
        raise DomainError("delta_qe is defined for n=0 only")
    flowers = set(g.flowers())
    for e in range(len(g.edges)):
        if e in g.marked or e in flowers:
            continue
        w = subdiv_weight(g, e)
        word = list(ref_word(g))
        x, e1, e2, edges, honest, word, sign = _subdivide(g, e, word)
        nv, edges, marked, honest, word = _attach_quasihair(
            0, g.nv + 1, edges, g.marked, honest, word, x)
        graph, word = _pack(0, nv, edges, marked, honest, word, removed_e=(e,))
        yield graph, word, -sign * w


def homotopy_unmark(g: LabeledGraph) -> Iterator:
    """Unmark one marked internal edge, coefficient 1/|E^int|."""
    eint = g.internal_edges()
    if not eint:
        raise DomainError("homotopy_unmark needs an internal edge")
    for e in eint:
        if e not in g.marked:
            continue
        word = list(ref_word(g))
        if g.n == 0:
            word, sign = word_delete(word, (_KE, e))
        else:
            word = [(_KE, e)] + word
            sign = 1
        yield (LabeledGraph(g.n, g.nv, g.edges, g.marked - {e}, g.honest),
               word, Fraction(sign, len(eint)))


def homotopy_forest_q(g: LabeledGraph) -> Iterator:
    """Hedgehog-only unmarking homotopy (same action as homotopy_unmark)."""
    if not g.is_hedgehog():
        raise DomainError("homotopy_forest_q needs a hedgehog input")
    yield from homotopy_unmark(g)


def homotopy_hair(g: LabeledGraph) -> Iterator:
    """Remove a dishonest hair attached to a regular vertex.

    Coefficient 1/(number of regular vertices); restricting to hairs at
    regular vertices is what makes h d_h + d_h h = id hold on the
    regular sub-bases.
    """
    eta = g.regular_count()
    if eta == 0:
        raise DomainError("homotopy_hair needs a regular vertex")
    val = g.valences()
    tags = g.classify_vertices()
    for e in g.dishonest_hairs():
        u, v = g.edges[e]
        leaf_slot = 0 if val[u] == 1 else 1
        leaf = g.edges[e][leaf_slot]
        anchor = g.edges[e][1 - leaf_slot]
        if "regular" not in tags.get(anchor, set()):
            continue
        word = list(ref_word(g))
        if g.n == 0:
            word, sign = word_delete(word, (_KE, e))
        else:
            word, s1 = word_delete(word, (_KH, e, 1 - leaf_slot))
            word, s2 = word_delete(word, (_KH, e, leaf_slot))
            word, s3 = word_delete(word, (_KV, leaf))
            sign = s1 * s2 * s3
        graph, word = _pack(g.n, g.nv, g.edges, g.marked - {e}, g.honest,
                            word, removed_v=(leaf,), removed_e=(e,))
        yield graph, word, Fraction(sign, eta)


def pi_project(g: LabeledGraph, l: int) -> Iterator:
    """Mark the last l honest hairs; degree +l."""
    r = len(g.honest)
    if l < 0 or l > r:
        raise DomainError("pi needs 0 <= l <= r")
    chosen = list(g.honest[r - l:])
    word = list(ref_word(g))
    sign = 1
    if g.n == 0:
        word = [(_KE, e) for e in chosen] + word
    else:
        for e in reversed(chosen):
            word, s = word_delete(word, (_KE, e))
            sign *= s
    yield (LabeledGraph(g.n, g.nv, g.edges, g.marked | set(chosen),
                        g.honest[:r - l]), word, Fraction(sign))


def iota_include(g: LabeledGraph, l: int) -> Iterator:
    """Unmark l dishonest hairs and append them to the honest order.

    Averages over the ordered choices: coefficient (k-l)!/k!.
    """
    dis = g.dishonest_hairs()
    k = len(dis)
    if l < 0 or l > k:
        raise DomainError("iota needs 0 <= l <= k")
    coeff = Fraction(1)
    for j in range(l):
        coeff /= (k - j)
    for tup in itertools.permutations(dis, l):
        word = list(ref_word(g))
        sign = 1
        if g.n == 0:
            for e in tup:
                word, s = word_delete(word, (_KE, e))
                sign *= s
        else:
            word = [(_KE, e) for e in reversed(tup)] + word
        yield (LabeledGraph(g.n, g.nv, g.edges, g.marked - set(tup),
                            g.honest + tup), word, Fraction(sign) * coeff)


def proj_min3(g: LabeledGraph) -> Iterator:
    """Projection MG2 -> MG: kill graphs with a bivalent vertex."""
    if any(v == 2 for v in g.valences()):
        return
    yield g, list(ref_word(g)), Fraction(1)


def identity_op(g: LabeledGraph) -> Iterator:
    yield g, list(ref_word(g)), Fraction(1)


# -- registry ---------------------------------------------------------------

# name -> (function, fixed params, allowed flavors, n restriction, grade shift)
# grade shift keys: m, k, r, g, V (vertex count)
ATOMS: dict[str, tuple] = {
    "dm": (delta_m, {}, ("MG", "MG2", "FG", "HG"), None,
           {"m": 1}),
    "ds": (splitter, {"marked_new": True, "min_valence": 3}, None, None,
           {"m": 1, "V": 1}),
    "ds2": (splitter, {"marked_new": True, "min_valence": 2}, ("MG2",), None,
            {"m": 1, "V": 1}),
    "dst2": (splitter, {"marked_new": True, "min_valence": 2, "tilde": True},
             ("MG2",), 0, {"m": 1, "V": 1}),
    "Ds": (splitter, {"marked_new": False, "min_valence": 3}, None, None,
           {"V": 1}),
    "Ds2": (splitter, {"marked_new": False, "min_valence": 2}, ("MG2",), None,
            {"V": 1}),
    "Dst2": (splitter, {"marked_new": False, "min_valence": 2, "tilde": True},
             ("MG2",), 0, {"V": 1}),
    "lam": (lam, {}, ("MG2",), None, {"V": 1}),
    "lamt": (lam, {"tilde": True}, ("MG2",), 0, {"V": 1}),
    "dh": (delta_h, {}, None, None, {"m": 1, "k": 1, "V": 1}),
    "dhe": (delta_he, {}, None, None, {"m": 1, "k": 1, "V": 2}),
    "dvv": (delta_vv, {}, None, 0, {"m": 1, "g": 1}),
    "dve": (delta_ve, {}, None, 0, {"m": 1, "g": 1, "V": 1}),
    "dee": (delta_ee, {}, None, 0, {"m": 1, "g": 1, "V": 2}),
    "dq": (delta_q, {}, None, 0, {"m": 1, "g": 1, "V": 1}),
    "dqe": (delta_qe, {}, None, 0, {"m": 1, "g": 1, "V": 2}),
    "hU": (homotopy_unmark, {}, None, None, {"m": -1}),
    "hH": (homotopy_hair, {}, None, None, {"m": -1, "k": -1, "V": -1}),
    "qF": (homotopy_forest_q, {}, None, None, {"m": -1}),
    "P3": (proj_min3, {}, None, None, {}),
    "id": (identity_op, {}, None, None, {}),
}

PARAMETRIC = {
    "pi": (pi_project, None, None),   # shift depends on l
    "iota": (iota_include, None, None),
}


def atom_shift(name: str, arg: Optional[int]) -> dict[str, int]:
    if name == "pi":
        return {"m": arg, "r": -arg, "k": arg}
    if name == "iota":
        return {"m": -arg, "r": arg, "k": -arg}
    return dict(ATOMS[name][4])


def apply_atom(name: str, arg: Optional[int], flavor: str,
               encoding: str) -> ChainVector:
    """Memoized single-operator application to one canonical generator."""
    bugged = name in INJECTED_SIGN_BUGS
    key = (name, arg, flavor, encoding, bugged)
    hit = _APPLY_CACHE.get(key)
    if hit is not None:
        return hit
    g = graph_of(encoding)
    if name in PARAMETRIC:
        func = PARAMETRIC[name][0]
        terms = func(g, arg)
    elif name in ATOMS:
        func, params, flavors, n_req, _shift = ATOMS[name]
        if flavors is not None and flavor not in flavors:
            raise DomainError("operator %s not available on flavor %s"
                              % (name, flavor))
        if n_req is not None and g.n != n_req:
            raise DomainError("operator %s requires n=%d" % (name, n_req))
        terms = func(g, **params)
    else:
        raise OperatorError("unknown operator %r" % (name,))
    out = _finish(terms, flavor)
    if bugged:
        out = {enc: (-v if i % 2 else v)
               for i, (enc, v) in enumerate(sorted(out.items()))}
    _APPLY_CACHE[key] = out
    return out
