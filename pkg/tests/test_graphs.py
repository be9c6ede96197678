"""Graph model: validation, canonical forms, signs, classifications."""

import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from hedgehog.graphs import (
    GraphError,
    LabeledGraph,
    canonical_form,
    iso_sign,
    parse_encoding,
    re_flavor,
    ref_word,
    validate_admissible,
)
from oracles import brute_is_zero, brute_iso_sign

THETA = LabeledGraph(0, 2, [(0, 1), (0, 1), (0, 1)], marked=set())
STAR3 = LabeledGraph(0, 4, [(0, 1), (0, 2), (0, 3)], marked=set(),
                     honest=(0, 1, 2))


def hhg(k, n=0):
    """Hairy hedgehog: k-cycle with one marked hair per vertex, all
    edges marked (the HG marking)."""
    edges = []
    if k == 1:
        edges.append((0, 0))
    else:
        edges = [(i, (i + 1) % k) for i in range(k)]
    for i in range(k):
        edges.append((i, k + i))
    return LabeledGraph(n, 2 * k, edges, marked=set(range(len(edges))))


class TestValidation:
    def test_theta_passes(self):
        assert validate_admissible(THETA)["ok"]

    def test_single_edge_between_leaves_fails(self):
        g = LabeledGraph(0, 2, [(0, 1)], marked=set(), honest=(0,))
        rep = validate_admissible(g)
        assert not rep["has_internal_vertex"]
        assert not rep["ok"]

    def test_marked_honest_hair_fails(self):
        g = LabeledGraph(0, 4, [(0, 1), (0, 2), (0, 3)], marked={0},
                         honest=(0, 1, 2))
        rep = validate_admissible(g)
        assert not rep["honest_unmarked"]
        assert not rep["ok"]

    def test_bivalent_needs_relaxation(self):
        g = LabeledGraph(0, 1, [(0, 0)], marked=set())
        assert not validate_admissible(g)["ok"]
        assert validate_admissible(g, allow_bivalent=True)["ok"]


class TestCanonicalForm:
    def test_single_token_sign_plus(self):
        g = LabeledGraph(0, 2, [(0, 1), (0, 1), (0, 1)], marked={0})
        c = canonical_form(g, "MG")
        assert not c.zero and c.sign == 1

    def test_hhg2_zero(self):
        assert canonical_form(hhg(2), "HG").zero

    def test_hhg3_nonzero(self):
        assert not canonical_form(hhg(3), "HG").zero

    def test_hhg_parity_both_n(self):
        for k in range(1, 6):
            assert canonical_form(hhg(k, 0), "HG").zero == (k % 2 == 0)
            assert canonical_form(hhg(k, 1), "HG").zero == (k % 2 == 1)

    def test_n1_tadpole_zero(self):
        g = LabeledGraph(1, 2, [(0, 0), (0, 1)], marked={1})
        assert canonical_form(g, "FG").zero

    def test_two_dishonest_hairs_same_vertex_zero(self):
        for n in (0, 1):
            g = LabeledGraph(n, 3, [(0, 0), (0, 1), (0, 2)], marked={1, 2})
            assert canonical_form(g, "MG").zero

    def test_idempotent_on_own_representative(self):
        g = LabeledGraph(0, 4, [(0, 1), (0, 1), (1, 2), (0, 3)],
                         marked={1, 3}, honest=(2,))
        c = canonical_form(g, "MG")
        assert not c.zero
        c2 = canonical_form(c.graph, "MG")
        assert c2.encoding == c.encoding
        assert c2.sign == 1

    def test_word_universe_mismatch_raises(self):
        with pytest.raises(GraphError):
            canonical_form(THETA, "MG", word=[("bogus",)])

    def test_encoding_round_trip(self):
        c = canonical_form(hhg(3), "HG")
        flavor, g = parse_encoding(c.encoding)
        assert flavor == "HG"
        assert canonical_form(g, "HG").encoding == c.encoding

    def test_re_flavor_is_header_only(self):
        c = canonical_form(THETA, "MG")
        other = re_flavor(c.encoding, "FG")
        assert other.splitlines()[1:] == c.encoding.splitlines()[1:]
        assert "flavor=FG" in other.splitlines()[0]


class TestIsoSign:
    def test_token_swap_is_minus(self):
        w = list(ref_word(hhg(3)))
        w[0], w[1] = w[1], w[0]
        assert iso_sign(hhg(3), None, hhg(3), w, "HG") == -1

    def test_different_graphs_not_iso(self):
        assert iso_sign(THETA, None, STAR3, None, "MG") is None

    def test_relabeling_matches_brute_force(self):
        g = LabeledGraph(0, 5, [(0, 1), (1, 2), (2, 0), (0, 3), (1, 4)],
                         marked={4}, honest=(3,))
        perm = [2, 0, 1, 4, 3]
        edges = [(perm[u], perm[v]) for (u, v) in g.edges]
        h = LabeledGraph(0, 5, edges, marked={4}, honest=(3,))
        s = iso_sign(g, None, h, None, "MG")
        brute = brute_iso_sign(g, h)
        assert s in brute
        assert brute == {s}  # no odd automorphism here

    def test_sign_coherence_triple(self):
        base = LabeledGraph(0, 6, [(0, 1), (1, 2), (2, 0), (0, 3), (1, 4),
                                   (2, 5)], marked={3, 4, 5})
        labelings = [[0, 1, 2, 3, 4, 5], [1, 2, 0, 4, 5, 3],
                     [2, 0, 1, 5, 3, 4]]
        graphs = []
        for lab in labelings:
            edges = [(lab[u], lab[v]) for (u, v) in base.edges]
            graphs.append(LabeledGraph(0, 6, edges, marked={3, 4, 5}))
        a, b, c = graphs
        sab = iso_sign(a, None, b, None, "MG")
        sbc = iso_sign(b, None, c, None, "MG")
        sac = iso_sign(a, None, c, None, "MG")
        assert sac == sab * sbc


def _random_graph(rng, n):
    """Small random admissible-ish labeled graph with markings."""
    p = rng.randint(1, 4)
    q = rng.randint(max(0, p - 1), p + 2)
    pairs = [(i, j) for i in range(p) for j in range(i, p)]
    edges = [pairs[rng.randrange(len(pairs))] for _ in range(q)]
    hairs = rng.randint(0, 3)
    nv = p
    for _ in range(hairs):
        v = rng.randrange(p)
        edges.append((v, nv))
        nv += 1
    hair_ids = list(range(q, q + hairs))
    rng.shuffle(hair_ids)
    r = rng.randint(0, len(hair_ids))
    honest = tuple(hair_ids[:r])
    marked = set(hair_ids[r:])
    for e in range(q):
        if rng.random() < 0.5:
            marked.add(e)
    g = LabeledGraph(n, nv, edges, marked, honest)
    if not g.is_connected():
        return None
    return g


@given(seed=st.integers(0, 10**9), n=st.integers(0, 1))
@settings(max_examples=120, deadline=None)
def test_zero_flag_matches_brute_force(seed, n):
    rng = random.Random(seed)
    g = _random_graph(rng, n)
    if g is None:
        return
    assert canonical_form(g, "MG").zero == brute_is_zero(g)


@given(seed=st.integers(0, 10**9), n=st.integers(0, 1))
@settings(max_examples=60, deadline=None)
def test_canonical_encoding_label_invariant(seed, n):
    rng = random.Random(seed)
    g = _random_graph(rng, n)
    if g is None:
        return
    perm = list(range(g.nv))
    rng.shuffle(perm)
    edges = [(perm[u], perm[v]) for (u, v) in g.edges]
    eperm = list(range(len(g.edges)))
    rng.shuffle(eperm)
    inv = [0] * len(eperm)
    for i, e in enumerate(eperm):
        inv[e] = i
    edges2 = [edges[e] for e in eperm]
    marked2 = {inv[e] for e in g.marked}
    honest2 = tuple(inv[e] for e in g.honest)
    h = LabeledGraph(g.n, g.nv, edges2, marked2, honest2)
    ca, cb = canonical_form(g, "MG"), canonical_form(h, "MG")
    assert ca.encoding == cb.encoding
    assert ca.zero == cb.zero


class TestStructure:
    def test_marking_cycle_rank_examples(self):
        assert THETA.marking_cycle_rank() == 0
        two = LabeledGraph(0, 2, [(0, 1), (0, 1), (0, 1)], marked={0, 1})
        assert two.marking_cycle_rank() == 1
        dumbbell = LabeledGraph(0, 2, [(0, 0), (1, 1), (0, 1)],
                                marked={0, 1})
        assert dumbbell.marking_cycle_rank() == 2

    def test_omega_iso_invariant_and_bounded(self):
        rng = random.Random(5)
        for _ in range(60):
            g = _random_graph(rng, 0)
            if g is None:
                continue
            w = g.marking_cycle_rank()
            assert 0 <= w <= g.loop_order()
            perm = list(range(g.nv))
            rng.shuffle(perm)
            h = LabeledGraph(0, g.nv, [(perm[u], perm[v]) for u, v in g.edges],
                             g.marked, g.honest)
            assert h.marking_cycle_rank() == w

    def test_classify_hedgehog(self):
        h = hhg(3)
        tags = h.classify_vertices()
        assert all("critical" in tags[v] for v in range(3))
        assert h.is_hedgehog()

    def test_classify_star_regular(self):
        assert "regular" in STAR3.classify_vertices()[0]
        assert not STAR3.is_hedgehog()

    def test_quasileaf_and_flower(self):
        # theta with the quasihair gadget at vertex 0
        g = LabeledGraph(0, 3, [(0, 1), (0, 1), (0, 1), (0, 2), (2, 2)],
                         marked={3})
        assert g.quasileaves() == [2]
        assert g.flowers() == [4]
