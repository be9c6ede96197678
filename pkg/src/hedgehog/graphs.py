"""Labeled multigraphs with markings, hairs and orientations.

A graph is stored with slot-distinct edge endpoints, so a tadpole
contributes two distinct half-edges.  Orientations are words in the
oriented-object tokens of the graph: for n=0 the marked edges, for n=1
the vertices, unmarked edges and half-edges.  Exchanging two tokens
flips the sign of a generator; a graph admitting an automorphism that
acts by an odd permutation on the tokens is the zero generator.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

FLAVORS = ("MG", "MG2", "HG", "FG")

# token kinds, ordered: vertices < edges < half-edges
_KV, _KE, _KH = 0, 1, 2


class GraphError(ValueError):
    """Malformed graph or orientation word."""


class LabeledGraph:
    """A concrete multigraph with marking, hair data and flavor n.

    Vertices are 0..nv-1.  Edge i is a pair (u, v); slot 0 is the
    u-side, slot 1 the v-side, distinct even when u == v.  `marked` is
    a set of edge ids, `honest` the ordered tuple of honest hair ids.
    """

    __slots__ = ("n", "nv", "edges", "marked", "honest", "_val")

    def __init__(self, n: int, nv: int, edges: Sequence[tuple[int, int]],
                 marked: Iterable[int], honest: Sequence[int] = ()):
        if n not in (0, 1):
            raise GraphError("n must be 0 or 1")
        self.n = n
        self.nv = nv
        self.edges = tuple((int(u), int(v)) for (u, v) in edges)
        self.marked = frozenset(marked)
        self.honest = tuple(honest)
        self._val = None

    # -- basic structure ------------------------------------------------

    def valences(self) -> tuple[int, ...]:
        if self._val is None:
            val = [0] * self.nv
            for (u, v) in self.edges:
                val[u] += 1
                val[v] += 1
            self._val = tuple(val)
        return self._val

    def is_leaf(self, v: int) -> bool:
        return self.valences()[v] == 1

    def leaves(self) -> list[int]:
        val = self.valences()
        return [v for v in range(self.nv) if val[v] == 1]

    def internal_vertices(self) -> list[int]:
        val = self.valences()
        return [v for v in range(self.nv) if val[v] != 1]

    def hairs(self) -> list[int]:
        """Edge ids incident to a leaf."""
        val = self.valences()
        return [i for i, (u, v) in enumerate(self.edges)
                if val[u] == 1 or val[v] == 1]

    def dishonest_hairs(self) -> list[int]:
        hs = set(self.honest)
        return [e for e in self.hairs() if e not in hs]

    def internal_edges(self) -> list[int]:
        val = self.valences()
        return [i for i, (u, v) in enumerate(self.edges)
                if val[u] != 1 and val[v] != 1]

    def loop_order(self) -> int:
        return len(self.edges) - self.nv + 1

    def is_connected(self) -> bool:
        if self.nv == 0:
            return False
        adj: list[list[int]] = [[] for _ in range(self.nv)]
        for (u, v) in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        seen = [False] * self.nv
        stack = [0]
        seen[0] = True
        count = 1
        while stack:
            w = stack.pop()
            for x in adj[w]:
                if not seen[x]:
                    seen[x] = True
                    count += 1
                    stack.append(x)
        return count == self.nv

    def star(self, v: int) -> list[tuple[int, int]]:
        """Half-edges (edge id, slot) attached to v, in edge order."""
        out = []
        for i, (a, b) in enumerate(self.edges):
            if a == v:
                out.append((i, 0))
            if b == v:
                out.append((i, 1))
        return out

    def marking_cycle_rank(self) -> int:
        """dim H_1 of the marked subgraph (edges in the marking)."""
        parent: dict[int, int] = {}

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        cycles = 0
        for e in sorted(self.marked):
            u, v = self.edges[e]
            for w in (u, v):
                if w not in parent:
                    parent[w] = w
            ru, rv = find(u), find(v)
            if ru == rv:
                cycles += 1
            else:
                parent[ru] = rv
        return cycles

    # -- classification --------------------------------------------------

    def classify_vertices(self) -> dict[int, set[str]]:
        """Tags per internal vertex: critical/regular, quasileaf, flower owner.

        A vertex is critical when trivalent with a dishonest hair
        attached, a quasileaf when trivalent with a tadpole attached.
        """
        val = self.valences()
        dis = set(self.dishonest_hairs())
        tags: dict[int, set[str]] = {}
        for v in range(self.nv):
            if val[v] == 1:
                continue
            t: set[str] = set()
            has_dh = any(e in dis for (e, _s) in self.star(v))
            has_tad = any(u == w == v for (u, w) in self.edges)
            if val[v] == 3 and has_dh:
                t.add("critical")
            else:
                t.add("regular")
            if val[v] == 3 and has_tad:
                t.add("quasileaf")
            tags[v] = t
        return tags

    def critical_count(self) -> int:
        return sum(1 for t in self.classify_vertices().values() if "critical" in t)

    def regular_count(self) -> int:
        return sum(1 for t in self.classify_vertices().values() if "regular" in t)

    def is_hedgehog(self) -> bool:
        return self.regular_count() == 0

    def quasileaves(self) -> list[int]:
        return sorted(v for v, t in self.classify_vertices().items()
                      if "quasileaf" in t)

    def flowers(self) -> list[int]:
        """Tadpole edge ids attached to quasileaves."""
        ql = set(self.quasileaves())
        return [i for i, (u, v) in enumerate(self.edges) if u == v and u in ql]

    # -- tokens ----------------------------------------------------------

    def tokens(self) -> tuple[tuple, ...]:
        """Oriented-object universe, in reference (sorted) order."""
        if self.n == 0:
            return tuple((_KE, e) for e in sorted(self.marked))
        toks = [(_KV, v) for v in range(self.nv)]
        toks += [(_KE, e) for e in range(len(self.edges)) if e not in self.marked]
        toks += [(_KH, e, s) for e in range(len(self.edges)) for s in (0, 1)]
        return tuple(toks)

    def grade(self) -> tuple[int, int, int, int]:
        """(g, r, k, m) of this graph."""
        return (self.loop_order(), len(self.honest),
                len(self.dishonest_hairs()), len(self.marked))


@dataclass(frozen=True)
class GradeKey:
    """Multidegree indexing a finite graded piece."""

    flavor: str
    n: int
    g: int
    r: int
    k: int
    m: int

    def degree(self) -> int:
        return self.m

    @staticmethod
    def of(graph: LabeledGraph, flavor: str) -> "GradeKey":
        g, r, k, m = graph.grade()
        return GradeKey(flavor, graph.n, g, r, k, m)


def max_internal_vertices(g: int, r: int, k: int) -> int:
    """Valence-three bound |V^int| <= 2g - 2 + r + k."""
    return 2 * g - 2 + r + k


# -- validation ----------------------------------------------------------

def validate_admissible(graph: LabeledGraph, allow_bivalent: bool = False) -> dict:
    """Per-invariant pass/fail report; never raises."""
    val = graph.valences()
    report: dict[str, bool] = {}
    minval = 2 if allow_bivalent else 3
    report["valence"] = all(v == 1 or v >= minval for v in val)
    hairs = set(graph.hairs())
    honest = set(graph.honest)
    dishonest = hairs - honest
    report["honest_hairs_are_hairs"] = honest <= hairs
    report["honest_order_well_formed"] = (len(graph.honest) == len(honest))
    report["dishonest_marked"] = dishonest <= graph.marked
    report["honest_unmarked"] = not (honest & graph.marked)
    report["connected"] = graph.is_connected()
    report["has_internal_vertex"] = any(v != 1 for v in val)
    report["edges_in_range"] = all(0 <= u < graph.nv and 0 <= v < graph.nv
                                   for (u, v) in graph.edges)
    report["marking_in_range"] = all(0 <= e < len(graph.edges)
                                     for e in graph.marked)
    report["ok"] = all(report.values())
    return report


# -- canonical labeling ----------------------------------------------------


def _perm_parity(perm: Sequence[int]) -> int:
    """Sign of a permutation given as an image list."""
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        clen = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return sign


def _word_parity_against_sorted(word: Sequence) -> int:
    """Sign of the permutation taking `word` to its sorted order."""
    order = sorted(range(len(word)), key=lambda i: word[i])
    return _perm_parity(order)


class Canon:
    """Result of canonicalization: encoding, relabeled graph, zero flag, sign."""

    __slots__ = ("encoding", "graph", "zero", "sign")

    def __init__(self, encoding: str, graph: LabeledGraph, zero: bool, sign: int):
        self.encoding = encoding
        self.graph = graph
        self.zero = zero
        self.sign = sign


def _initial_colors(g: LabeledGraph) -> list:
    val = g.valences()
    hairs = set(g.hairs())
    honest_pos = {e: i for i, e in enumerate(g.honest)}
    colors = []
    for v in range(g.nv):
        if val[v] == 1:
            e, _s = g.star(v)[0]
            if e in honest_pos:
                colors.append((0, honest_pos[e]))
            else:
                colors.append((1, 0))
        else:
            colors.append((2, val[v]))
    # edge class per edge: (marked, is_hair) -- leaf colors already
    # separate honest hairs, so edges need no honesty data
    _ = hairs
    return colors


def _refine(g: LabeledGraph, colors: list[int], inc: list[list[tuple[int, int]]]) -> list[int]:
    """Stable partition refinement; colors are small ints, cells keep order."""
    nv = g.nv
    while True:
        sigs = []
        for v in range(nv):
            neigh = sorted((cls, colors[u]) for (cls, u) in inc[v])
            sigs.append((colors[v], tuple(neigh)))
        order = sorted(range(nv), key=sigs.__getitem__)
        new = [0] * nv
        rank = 0
        prev = None
        for v in order:
            if prev is not None and sigs[v] != prev:
                rank += 1
            prev = sigs[v]
            new[v] = rank
        if new == colors:
            return new
        colors = new


def _incidence(g: LabeledGraph) -> list[list[tuple[int, int]]]:
    """Per vertex: (edge class id, other endpoint) per incident half-edge."""
    inc: list[list[tuple[int, int]]] = [[] for _ in range(g.nv)]
    for i, (u, v) in enumerate(g.edges):
        cls = 1 if i in g.marked else 0
        inc[u].append((cls, v))
        inc[v].append((cls, u))
    return inc


def _serialize(g: LabeledGraph, lab: list[int]) -> tuple[str, list[int], list[tuple]]:
    """Body string under vertex labeling, edge order and canonical edge keys."""
    honest_ids = set(g.honest)
    keys = []
    for i, (u, v) in enumerate(g.edges):
        a, b = lab[u], lab[v]
        if a > b:
            a, b = b, a
        keys.append((a, b, "m" if i in g.marked else "u"))
    order = sorted(range(len(g.edges)), key=lambda i: (keys[i], i))
    pos = [0] * len(g.edges)
    for p, e in enumerate(order):
        pos[e] = p
    lines = ["v=%d" % g.nv]
    for p, e in enumerate(order):
        a, b, f = keys[e]
        lines.append("e %d %d %d %s" % (p, a, b, f))
    lines.append("hr" + "".join(" %d" % pos[e] for e in g.honest))
    _ = honest_ids
    return "\n".join(lines) + "\n", pos, keys


def _search_labelings(g: LabeledGraph):
    """All discrete labelings with minimal serialized body.

    Returns (body, [vertex labeling lists]).  Exhaustive
    individualization-refinement; desk-scale graphs only.
    """
    inc = _incidence(g)
    init = _initial_colors(g)
    ranking = {c: i for i, c in enumerate(sorted(set(init)))}
    colors = _refine(g, [ranking[c] for c in init], inc)

    best: list = [None, []]  # body, labelings

    def rec(colors: list[int]) -> None:
        # cells in color order
        cells: dict[int, list[int]] = {}
        for v in range(g.nv):
            cells.setdefault(colors[v], []).append(v)
        target = None
        for c in sorted(cells):
            if len(cells[c]) > 1:
                target = cells[c]
                break
        if target is None:
            lab = [0] * g.nv
            for v in range(g.nv):
                lab[v] = colors[v]
            body, _pos, _keys = _serialize(g, lab)
            if best[0] is None or body < best[0]:
                best[0] = body
                best[1] = [lab]
            elif body == best[0]:
                best[1].append(lab)
            return
        for v in target:
            nxt = [2 * c for c in colors]
            nxt[v] -= 1
            ranking2 = {c: i for i, c in enumerate(sorted(set(nxt)))}
            rec(_refine(g, [ranking2[c] for c in nxt], inc))

    rec(colors)
    return best[0], best[1]


def _edge_positions(g: LabeledGraph, lab: list[int]) -> list[int]:
    _body, pos, _keys = _serialize(g, lab)
    return pos


def _auto_token_sign(g: LabeledGraph, lab_a: list[int], lab_b: list[int]) -> int:
    """Token sign of the automorphism sending labeling a to labeling b."""
    n = g.n
    pos_a = _edge_positions(g, lab_a)
    pos_b = _edge_positions(g, lab_b)
    inv_b = [0] * g.nv
    for v in range(g.nv):
        inv_b[lab_b[v]] = v
    vperm = [inv_b[lab_a[v]] for v in range(g.nv)]
    inv_pos_b = [0] * len(g.edges)
    for e in range(len(g.edges)):
        inv_pos_b[pos_b[e]] = e
    eperm = [inv_pos_b[pos_a[e]] for e in range(len(g.edges))]

    if n == 0:
        marked = sorted(g.marked)
        idx = {e: i for i, e in enumerate(marked)}
        return _perm_parity([idx[eperm[e]] for e in marked])

    sign = _perm_parity(vperm)
    unmarked = [e for e in range(len(g.edges)) if e not in g.marked]
    idx = {e: i for i, e in enumerate(unmarked)}
    sign *= _perm_parity([idx[eperm[e]] for e in unmarked])
    # half-edges: slot of image determined by endpoint images
    hperm = []
    hindex = {}
    for e in range(len(g.edges)):
        for s in (0, 1):
            hindex[(e, s)] = len(hindex)
    for e in range(len(g.edges)):
        u, v = g.edges[e]
        f = eperm[e]
        fu, fv = g.edges[f]
        for s in (0, 1):
            w = g.edges[e][s]
            if fu == fv:
                t = s  # tadpole image: identity slot choice
            else:
                t = 0 if vperm[w] == fu else 1
            hperm.append(hindex[(f, t)])
    sign *= _perm_parity(hperm)
    return sign


def _quick_zero(g: LabeledGraph) -> bool:
    """Cheap sufficient conditions for the zero generator.

    n=0: a parallel pair of marked edges gives an odd swap.
    n=1: any tadpole flips odd; a parallel pair of unmarked edges is odd.
    """
    by_pair: dict[tuple[int, int, bool], int] = {}
    for i, (u, v) in enumerate(g.edges):
        a, b = (u, v) if u <= v else (v, u)
        key = (a, b, i in g.marked)
        by_pair[key] = by_pair.get(key, 0) + 1
    if g.n == 0:
        return any(c >= 2 and mk for (_a, _b, mk), c in by_pair.items())
    if any(u == v for (u, v) in g.edges):
        return True
    return any(c >= 2 and not mk for (_a, _b, mk), c in by_pair.items())


def _parallel_swap_zero(g: LabeledGraph) -> bool:
    # covered by _quick_zero; kept for clarity at call sites
    return _quick_zero(g)


def canonical_form(graph: LabeledGraph, flavor: str,
                   word: Optional[Sequence[tuple]] = None,
                   validate: bool = True) -> Canon:
    """Canonical encoding, zero flag and sign of (graph, word).

    The word must be a permutation of the token universe; when omitted
    the reference (sorted) word is used.  The sign relates the input
    word to the canonical representative's reference orientation.
    Equal inputs give bit-equal outputs; isomorphic inputs (preserving
    honest-hair order and marking) give the same encoding.
    """
    if flavor not in FLAVORS:
        raise GraphError("unknown flavor %r" % (flavor,))
    toks = graph.tokens()
    if word is None:
        word = toks
    elif validate and sorted(word) != sorted(toks):
        raise GraphError("orientation word does not match token universe")
    elif not validate and len(word) != len(toks):
        raise GraphError("orientation word has the wrong length")

    body, labs = _search_labelings(graph)
    header = "gc1 n=%d flavor=%s\n" % (graph.n, flavor)
    encoding = header + body

    lab0 = labs[0]
    pos0 = _edge_positions(graph, lab0)

    zero = _quick_zero(graph)
    if not zero:
        for lab in labs[1:]:
            if _auto_token_sign(graph, lab0, lab) == -1:
                zero = True
                break

    cgraph = _relabel(graph, lab0, pos0)

    sign = 0
    if not zero:
        mapped = []
        for t in word:
            if t[0] == _KV:
                mapped.append((_KV, lab0[t[1]]))
            elif t[0] == _KE:
                mapped.append((_KE, pos0[t[1]]))
            else:
                _k, e, s = t
                u, v = graph.edges[e]
                if u == v:
                    t2 = s
                else:
                    w = graph.edges[e][s]
                    a = min(lab0[u], lab0[v])
                    t2 = 0 if lab0[w] == a else 1
                mapped.append((_KH, pos0[e], t2))
        sign = _word_parity_against_sorted(mapped)

    return Canon(encoding, cgraph, zero, sign)


def _relabel(g: LabeledGraph, lab: list[int], pos: list[int]) -> LabeledGraph:
    """The canonical representative as a concrete graph."""
    ne = len(g.edges)
    new_edges: list[tuple[int, int]] = [(0, 0)] * ne
    for e, (u, v) in enumerate(g.edges):
        a, b = lab[u], lab[v]
        if a > b:
            a, b = b, a
        new_edges[pos[e]] = (a, b)
    marked = frozenset(pos[e] for e in g.marked)
    honest = tuple(pos[e] for e in g.honest)
    return LabeledGraph(g.n, g.nv, new_edges, marked, honest)


def parse_encoding(encoding: str) -> tuple[str, LabeledGraph]:
    """Inverse of the GC1 serialization: (flavor, graph)."""
    lines = encoding.strip("\n").split("\n")
    head = lines[0].split()
    if head[0] != "gc1":
        raise GraphError("not a gc1 encoding")
    n = int(head[1].split("=")[1])
    flavor = head[2].split("=")[1]
    nv = int(lines[1].split("=")[1])
    edges = []
    marked = set()
    honest: tuple[int, ...] = ()
    for ln in lines[2:]:
        parts = ln.split()
        if parts[0] == "e":
            eid, u, v, f = int(parts[1]), int(parts[2]), int(parts[3]), parts[4]
            assert eid == len(edges)
            edges.append((u, v))
            if f == "m":
                marked.add(eid)
        elif parts[0] == "hr":
            honest = tuple(int(x) for x in parts[1:])
        else:
            raise GraphError("bad line %r" % ln)
    return flavor, LabeledGraph(n, nv, edges, marked, honest)


def re_flavor(encoding: str, flavor: str) -> str:
    """The same canonical generator under another flavor tag.

    Valid because the canonical labeling never looks at the flavor;
    only the header line differs between flavors.
    """
    if flavor not in FLAVORS:
        raise GraphError("unknown flavor %r" % (flavor,))
    head, rest = encoding.split("\n", 1)
    parts = head.split()
    return "%s %s flavor=%s\n%s" % (parts[0], parts[1], flavor, rest)


def iso_sign(a: LabeledGraph, a_word: Optional[Sequence[tuple]],
             b: LabeledGraph, b_word: Optional[Sequence[tuple]],
             flavor: str = "MG") -> Optional[int]:
    """+-1 when orientation-isomorphic up to that sign, None when not iso.

    Consistent with canonical_form: equals sign(a) * sign(b).  Zero
    generators compare as isomorphic with sign 0.
    """
    if a.n != b.n:
        return None
    ca = canonical_form(a, flavor, a_word)
    cb = canonical_form(b, flavor, b_word)
    if ca.encoding != cb.encoding:
        return None
    return ca.sign * cb.sign


def ref_word(graph: LabeledGraph) -> tuple[tuple, ...]:
    """Reference orientation: tokens sorted by canonical id."""
    return graph.tokens()


def word_delete(word: Sequence[tuple], token: tuple) -> tuple[list, int]:
    """d_token: move the token to the front and strip it, with sign."""
    w = list(word)
    try:
        i = w.index(token)
    except ValueError:
        raise GraphError("token %r not in word" % (token,))
    del w[i]
    return w, (-1) ** i
