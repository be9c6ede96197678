"""Enumeration of generator bases for graded pieces of each flavor.

Strategy: enumerate connected internal multigraphs (edge multisets with
degree pruning), dedupe by canonical form, decorate with hairs and
honest-hair labels, then attach markings (forest-filtered for FG, full
marking for HG).  Canonicalize, drop zero generators, dedupe.  Chosen
for auditability over speed; bases are ordered lexicographically by
canonical encoding, so results are stable across runs and platforms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional

from .graphs import (
    Canon,
    GradeKey,
    GraphError,
    LabeledGraph,
    _quick_zero,
    canonical_form,
    max_internal_vertices,
)


@dataclass(frozen=True)
class GradedBasis:
    grade: GradeKey
    encodings: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.encodings)

    @property
    def index(self) -> dict[str, int]:
        return {e: i for i, e in enumerate(self.encodings)}


class EnumerationError(ValueError):
    pass


def _edge_multisets(p: int, q: int, degree_cap: int,
                    degree_min: int = 0) -> Iterator[tuple[tuple[int, int], ...]]:
    """Multisets of q vertex pairs over 0..p-1 with per-vertex degree cap.

    Tadpoles count twice.  Yields nondecreasing tuples of pairs; prunes
    branches that cannot reach `degree_min` at every vertex.
    """
    pairs = [(i, j) for i in range(p) for j in range(i, p)]
    deg = [0] * p
    out: list[tuple[int, int]] = []

    def rec(start: int, left: int) -> Iterator[tuple[tuple[int, int], ...]]:
        if left == 0:
            yield tuple(out)
            return
        if degree_min:
            # pairs from `start` on only touch vertices >= pairs[start][0];
            # earlier vertices must already meet the minimum
            lo = pairs[start][0] if start < len(pairs) else p
            if any(deg[v] < degree_min for v in range(min(lo, p))):
                return
            need = sum(max(0, degree_min - deg[v]) for v in range(p))
            if need > 2 * left:
                return
        for idx in range(start, len(pairs)):
            i, j = pairs[idx]
            if i == j:
                if deg[i] + 2 > degree_cap:
                    continue
                deg[i] += 2
            else:
                if deg[i] + 1 > degree_cap or deg[j] + 1 > degree_cap:
                    continue
                deg[i] += 1
                deg[j] += 1
            out.append((i, j))
            yield from rec(idx, left - 1)
            out.pop()
            if i == j:
                deg[i] -= 2
            else:
                deg[i] -= 1
                deg[j] -= 1

    yield from rec(0, q)


def _connected(p: int, edges: tuple[tuple[int, int], ...]) -> bool:
    if p == 1:
        return True
    adj: list[list[int]] = [[] for _ in range(p)]
    for (u, v) in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = [False] * p
    stack = [0]
    seen[0] = True
    c = 1
    while stack:
        w = stack.pop()
        for x in adj[w]:
            if not seen[x]:
                seen[x] = True
                c += 1
                stack.append(x)
    return c == p


def _bare_structures(p: int, q: int, minval: int, hair_total: int) -> list[tuple[tuple[int, int], ...]]:
    """Connected internal multigraphs up to isomorphism, as edge tuples.

    Keeps structures whose valence deficits can be filled by at most
    `hair_total` hairs.
    """
    # every other vertex still needs its minimal internal degree, which
    # caps any single vertex; hairs can absorb valence deficits
    dmin = max(1 if p > 1 else 0, minval - hair_total)
    cap = max(2 * q - dmin * (p - 1), 0)
    found: dict[str, tuple[tuple[int, int], ...]] = {}
    for edges in _edge_multisets(p, q, cap, dmin):
        deg = [0] * p
        for (u, v) in edges:
            deg[u] += 1 if u != v else 2
            deg[v] += 1 if u != v else 0
        if p > 1 and min(deg) == 0:
            continue
        deficit = sum(max(0, minval - d) for d in deg)
        if deficit > hair_total:
            continue
        if not _connected(p, edges):
            continue
        bare = LabeledGraph(0, p, edges, frozenset())
        enc = canonical_form(bare, "MG").encoding
        if enc not in found:
            found[enc] = edges
    return [found[e] for e in sorted(found)]


def _hair_distributions(deg: list[int], minval: int, total: int) -> Iterator[tuple[int, ...]]:
    """Hair counts per internal vertex filling valence deficits."""
    p = len(deg)

    def rec(i: int, left: int, acc: list[int]) -> Iterator[tuple[int, ...]]:
        if i == p:
            if left == 0:
                yield tuple(acc)
            return
        lo = max(0, minval - deg[i])
        for h in range(lo, left + 1):
            if sum(max(0, minval - deg[j]) for j in range(i + 1, p)) > left - h:
                continue
            acc.append(h)
            yield from rec(i + 1, left - h, acc)
            acc.pop()

    yield from rec(0, total, [])


def _decorated_graphs(n: int, edges: tuple[tuple[int, int], ...], p: int,
                      minval: int, r: int, k: int) -> Iterator[tuple[LabeledGraph, list[int]]]:
    """Attach r labeled honest and k dishonest hairs in all ways.

    Yields (unmarked-decorated graph, internal edge id list); markings
    are attached by the caller.
    """
    deg = [0] * p
    for (u, v) in edges:
        deg[u] += 1 if u != v else 2
        deg[v] += 1 if u != v else 0
    internal_ids = list(range(len(edges)))
    for hs in _hair_distributions(deg, minval, r + k):
        # honest labels 0..r-1 -> vertices, respecting per-vertex capacity
        for assign in itertools.product(range(p), repeat=r):
            cnt = [0] * p
            ok = True
            for v in assign:
                cnt[v] += 1
                if cnt[v] > hs[v]:
                    ok = False
                    break
            if not ok:
                continue
            all_edges = list(edges)
            nv = p
            honest = []
            for v in assign:
                all_edges.append((v, nv))
                honest.append(len(all_edges) - 1)
                nv += 1
            dis_ids = []
            for v in range(p):
                for _ in range(hs[v] - cnt[v]):
                    all_edges.append((v, nv))
                    dis_ids.append(len(all_edges) - 1)
                    nv += 1
            g = LabeledGraph(n, nv, all_edges, frozenset(dis_ids), tuple(honest))
            yield g, internal_ids


def _forest(graph: LabeledGraph, marked: frozenset[int]) -> bool:
    return LabeledGraph(graph.n, graph.nv, graph.edges, marked,
                        graph.honest).marking_cycle_rank() == 0


def enumerate_basis(flavor: str, n: int, g: int, r: int, k: int,
                    vertex_bound: Optional[int] = None) -> dict[int, GradedBasis]:
    """Complete bases of the (flavor, n, g, r, k) piece, one per degree m.

    For MG2 a vertex bound (total vertices) is mandatory; bivalent
    chains make the piece infinite otherwise.
    """
    if flavor not in ("MG", "MG2", "HG", "FG"):
        raise EnumerationError("unknown flavor %r" % (flavor,))
    if n not in (0, 1):
        raise EnumerationError("n must be 0 or 1")
    if flavor == "MG2":
        if vertex_bound is None:
            raise EnumerationError("MG2 enumeration requires a vertex bound")
        minval = 2
        pmax = vertex_bound - r - k
    else:
        minval = 3
        pmax = max_internal_vertices(g, r, k)

    by_m: dict[int, dict[str, str]] = {}
    for p in range(1, max(pmax, 0) + 1):
        q = p + g - 1
        if q < 0:
            continue
        for edges in _bare_structures(p, q, minval, r + k):
            for base, internal_ids in _decorated_graphs(n, edges, p, minval, r, k):
                dis = frozenset(base.marked)  # dishonest hairs, always marked
                if flavor == "HG":
                    subsets: Iterator = iter([tuple(internal_ids)])
                else:
                    subsets = itertools.chain.from_iterable(
                        itertools.combinations(internal_ids, t)
                        for t in range(len(internal_ids) + 1))
                for sub in subsets:
                    m_set = dis | frozenset(sub)
                    cand = LabeledGraph(n, base.nv, base.edges, m_set, base.honest)
                    if flavor == "FG" and cand.marking_cycle_rank() > 0:
                        continue
                    if _quick_zero(cand):
                        continue
                    c = canonical_form(cand, flavor)
                    if c.zero:
                        continue
                    by_m.setdefault(len(m_set), {})[c.encoding] = c.encoding
    out: dict[int, GradedBasis] = {}
    for m in sorted(by_m):
        encs = tuple(sorted(by_m[m]))
        out[m] = GradedBasis(GradeKey(flavor, n, g, r, k, m), encs)
    return out


def basis_dims(flavor: str, n: int, g: int, r: int, k: int,
               vertex_bound: Optional[int] = None) -> dict[int, int]:
    """Dimension table by degree m."""
    return {m: len(b) for m, b in
            enumerate_basis(flavor, n, g, r, k, vertex_bound).items()}


# -- sub-basis predicates ---------------------------------------------------

def _pred_hedgehog(graph: LabeledGraph, _c: int) -> bool:
    return graph.is_hedgehog()


def _pred_regular(graph: LabeledGraph, _c: int) -> bool:
    return graph.regular_count() >= 1


def _pred_omega_ge(graph: LabeledGraph, c: int) -> bool:
    return graph.marking_cycle_rank() >= c


def _pred_hairs_ge(graph: LabeledGraph, c: int) -> bool:
    return len(graph.hairs()) >= c


def _pred_marked_critical_ge(graph: LabeledGraph, c: int) -> bool:
    mi = len([e for e in graph.internal_edges() if e in graph.marked])
    return mi + graph.critical_count() >= c


def _pred_slack_ge(graph: LabeledGraph, c: int) -> bool:
    return len(graph.edges) - len(graph.marked) >= c


PREDICATES = {
    "hedgehog": _pred_hedgehog,
    "has-regular-vertex": _pred_regular,
    "omega>=": _pred_omega_ge,
    "hairs>=": _pred_hairs_ge,
    "marked-internal+critical>=": _pred_marked_critical_ge,
    "slack>=": _pred_slack_ge,
}


def filter_subbasis(basis: GradedBasis, predicate: str, c: int = 0) -> GradedBasis:
    """Sub-basis of generators satisfying the predicate, inherited order."""
    from .graphs import parse_encoding

    if predicate not in PREDICATES:
        raise EnumerationError("unknown predicate %r" % (predicate,))
    f = PREDICATES[predicate]
    kept = tuple(e for e in basis.encodings if f(parse_encoding(e)[1], c))
    return GradedBasis(basis.grade, kept)
