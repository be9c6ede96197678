"""Basis enumeration: completeness, examples, determinism, filters."""

import itertools

import pytest

from hedgehog.bases import (
    EnumerationError,
    basis_dims,
    enumerate_basis,
    filter_subbasis,
)
from hedgehog.graphs import LabeledGraph, canonical_form, parse_encoding
from oracles import brute_graphs, brute_is_zero


def oracle_basis(flavor, n, g, r, k):
    """Raw edge-list generation with brute-force zero detection."""
    out = {}
    for cand, internal_ids, dis in brute_graphs(n, g, r, k):
        for t in range(len(internal_ids) + 1):
            for sub in itertools.combinations(internal_ids, t):
                m = frozenset(dis) | frozenset(sub)
                gg = LabeledGraph(n, cand.nv, cand.edges, m, cand.honest)
                if flavor == "FG" and gg.marking_cycle_rank() > 0:
                    continue
                if flavor == "HG" and len(sub) != len(internal_ids):
                    continue
                if brute_is_zero(gg):
                    continue
                out.setdefault(len(m), set()).add(
                    canonical_form(gg, flavor).encoding)
    return out


class TestExamples:
    def test_fhg1_is_the_only_generator(self):
        assert basis_dims("FG", 0, 1, 0, 1) == {1: 1}

    def test_hg_zero_flagged_hedgehog_piece_empty(self):
        assert basis_dims("HG", 0, 1, 0, 2) == {}

    def test_mg_g2_includes_the_four_valent_graph(self):
        # theta, dumbbell and the two-tadpole wedge all live at m=0
        dims = basis_dims("MG", 0, 2, 0, 0)
        assert dims == {0: 3, 1: 4, 2: 1}

    def test_connected_g0_without_hairs_empty(self):
        for flavor in ("MG", "FG", "HG"):
            assert basis_dims(flavor, 0, 0, 0, 0) == {}

    def test_mg2_requires_vertex_bound(self):
        with pytest.raises(EnumerationError):
            enumerate_basis("MG2", 0, 1, 0, 0)

    def test_unknown_flavor(self):
        with pytest.raises(EnumerationError):
            enumerate_basis("XX", 0, 1, 0, 0)


@pytest.mark.parametrize("flavor,n,g,r,k", [
    ("MG", 0, 2, 0, 0), ("MG", 1, 2, 0, 0),
    ("FG", 0, 1, 0, 2), ("FG", 1, 1, 1, 1),
    ("HG", 0, 1, 1, 1), ("MG", 0, 1, 1, 1),
    ("MG", 1, 1, 0, 2), ("FG", 0, 0, 2, 1),
    ("MG", 0, 2, 1, 0), ("FG", 1, 2, 0, 1),
])
def test_completeness_against_oracle(flavor, n, g, r, k):
    want = oracle_basis(flavor, n, g, r, k)
    got = enumerate_basis(flavor, n, g, r, k)
    assert set(want) == set(got)
    for m in want:
        assert set(got[m].encodings) == want[m]


def test_deterministic_and_sorted():
    a = enumerate_basis("MG", 0, 2, 0, 1)
    b = enumerate_basis("MG", 0, 2, 0, 1)
    for m in a:
        assert a[m].encodings == b[m].encodings
        assert list(a[m].encodings) == sorted(a[m].encodings)


class TestFilters:
    def test_hedgehog_partition(self):
        fam = enumerate_basis("FG", 1, 1, 0, 2)
        for m, b in fam.items():
            hh = filter_subbasis(b, "hedgehog")
            reg = filter_subbasis(b, "has-regular-vertex")
            assert sorted(hh.encodings + reg.encodings) == list(b.encodings)

    def test_fhg2_markings_for_n1(self):
        fam = enumerate_basis("FG", 1, 1, 0, 2)
        got = {m: len(filter_subbasis(b, "hedgehog")) for m, b in fam.items()}
        assert got == {3: 1}  # only the maximally marked survivor

    def test_theta_basis_has_no_hedgehogs(self):
        fam = enumerate_basis("FG", 0, 2, 0, 0)
        for b in fam.values():
            assert len(filter_subbasis(b, "hedgehog")) == 0

    def test_omega_filter_empty_on_fg(self):
        fam = enumerate_basis("FG", 0, 2, 0, 1)
        for b in fam.values():
            assert len(filter_subbasis(b, "omega>=", 1)) == 0

    def test_omega_filter_nonempty_on_mg(self):
        fam = enumerate_basis("MG", 0, 2, 0, 0)
        assert any(len(filter_subbasis(b, "omega>=", 1)) for b in fam.values())

    def test_unknown_predicate(self):
        fam = enumerate_basis("FG", 0, 1, 0, 1)
        with pytest.raises(EnumerationError):
            filter_subbasis(fam[1], "nope")


def test_closure_under_differential(store):
    """Differential outputs of basis elements stay in the codomain bases."""
    from hedgehog.expr import parse_expr, eval_on_generator
    from hedgehog.operators import graph_of

    node = parse_expr("ds+dm")
    for flavor, n in (("MG", 0), ("FG", 1)):
        fam = enumerate_basis(flavor, n, 2, 0, 0)
        all_encs = {e for b in fam.values() for e in b.encodings}
        for m, b in fam.items():
            for enc in b.encodings:
                for out in eval_on_generator(node, flavor, enc):
                    assert graph_of(out).grade()[:3] == (2, 0, 0)
                    assert out in all_encs


def test_mg2_matches_mg_on_min_three_graphs():
    """The MG2 basis restricted to bivalent-free graphs is the MG basis."""
    mg = enumerate_basis("MG", 0, 2, 0, 0)
    mg2 = enumerate_basis("MG2", 0, 2, 0, 0, vertex_bound=4)
    for m in mg:
        want = {e.replace("flavor=MG", "flavor=MG2") for e in mg[m].encodings}
        got = {e for e in mg2[m].encodings
               if all(v != 2 for v in parse_encoding(e)[1].valences())}
        assert want == got
