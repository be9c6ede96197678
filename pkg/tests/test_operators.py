"""Atomic operators: spec'd examples, identities, dual routes, errors."""

from fractions import Fraction

import pytest

from hedgehog.bases import enumerate_basis, filter_subbasis
from hedgehog.expr import eval_on_generator, parse_expr
from hedgehog.graphs import LabeledGraph, canonical_form, re_flavor
from hedgehog.operators import (
    ClosureError,
    DomainError,
    apply_atom,
    chain_length,
    graph_of,
    subdiv_weight,
)


def enc_of(graph, flavor):
    c = canonical_form(graph, flavor)
    assert not c.zero
    return c.encoding


THETA0 = LabeledGraph(0, 2, [(0, 1), (0, 1), (0, 1)], marked=set())
STAR3 = LabeledGraph(0, 4, [(0, 1), (0, 2), (0, 3)], marked=set(),
                     honest=(0, 1, 2))
FHG1 = LabeledGraph(0, 2, [(0, 0), (0, 1)], marked={1})


def ev(exprstr, flavor, enc):
    return eval_on_generator(parse_expr(exprstr), flavor, enc)


FULLY_MARKED = LabeledGraph(0, 2, [(0, 0), (0, 1)], marked={0, 1})


class TestDeltaM:
    def test_fully_marked_is_zero(self):
        assert ev("dm", "MG", enc_of(FULLY_MARKED, "MG")) == {}

    def test_theta_coefficient_three(self):
        out = ev("dm", "MG", enc_of(THETA0, "MG"))
        assert len(out) == 1
        assert abs(list(out.values())[0]) == 3

    def test_fg_drops_cycle_closing_marking(self):
        # FHG(1): the only unmarked edge is the loop, marking it closes
        # a marked cycle, so the forested differential vanishes
        out_mg = ev("dm", "MG", enc_of(FHG1, "MG"))
        assert out_mg
        assert ev("dm", "FG", enc_of(FHG1, "FG")) == {}
        # a larger window: every output marking stays a forest
        fam = enumerate_basis("FG", 0, 2, 0, 1)
        for m, b in fam.items():
            for enc in b.encodings:
                for out_enc in ev("dm", "FG", enc):
                    assert graph_of(out_enc).marking_cycle_rank() == 0


class TestSplitter:
    def test_trivalent_has_no_min3_split(self):
        assert ev("ds", "MG", enc_of(STAR3, "MG")) == {}
        assert ev("Ds", "MG", enc_of(THETA0, "MG")) == {}

    def test_four_valent_star_has_three_pairings(self):
        g = LabeledGraph(0, 5, [(0, 1), (0, 2), (0, 3), (0, 4)],
                         marked=set(), honest=(0, 1, 2, 3))
        out = ev("Ds", "MG", enc_of(g, "MG"))
        assert sum(abs(v) for v in out.values()) == 3

    def test_star3_min2_splits(self):
        enc = re_flavor(enc_of(STAR3, "MG"), "MG2")
        out = ev("Ds2", "MG2", enc)
        # three ways to carry one hair on a bivalent vertex
        assert sum(abs(v) for v in out.values()) == 3
        for out_enc in out:
            assert 2 in graph_of(out_enc).valences()

    def test_direct_equals_commutator_on_mg(self):
        for n in (0, 1):
            fam = enumerate_basis("MG", n, 2, 0, 1)
            for m, b in fam.items():
                for enc in b.encodings:
                    assert ev("ds", "MG", enc) == ev("[dm,Ds]", "MG", enc)


class TestLambda:
    def test_theta_three_unit_terms(self):
        enc = re_flavor(enc_of(THETA0, "MG"), "MG2")
        out = ev("lam", "MG2", enc)
        assert len(out) == 1
        assert abs(list(out.values())[0]) == 3  # c(e)=1 per edge

    def test_tadpole_net_coefficient_one(self):
        g = LabeledGraph(0, 1, [(0, 0)], marked=set())
        assert chain_length(g, 0) == 2
        assert subdiv_weight(g, 0) == 1  # two insertion slots at 1/2 each
        enc = canonical_form(g, "MG2").encoding
        out = ev("lam", "MG2", enc)
        assert list(out.values()) == [Fraction(1)]

    def test_fully_marked_is_zero(self):
        enc = re_flavor(enc_of(FULLY_MARKED, "MG"), "MG2")
        assert ev("lam", "MG2", enc) == {}

    def test_closed_chain_sums_to_one(self):
        two_gon = LabeledGraph(0, 2, [(0, 1), (0, 1)], marked=set())
        enc = canonical_form(two_gon, "MG2").encoding
        out = ev("lam", "MG2", enc)
        assert list(out.values()) == [Fraction(1)]  # 2 edges at 1/2

    def test_flavor_restriction(self):
        with pytest.raises(DomainError):
            ev("lam", "MG", enc_of(THETA0, "MG"))


class TestDeltaH:
    def test_star3_single_term(self):
        out = ev("dh", "MG", enc_of(STAR3, "MG"))
        assert len(out) == 1
        (out_enc, coeff), = out.items()
        assert abs(coeff) == 1
        assert graph_of(out_enc).grade()[2] == 1  # one dishonest hair

    def test_theta_merges_to_coefficient_two(self):
        out = ev("dh", "MG", enc_of(THETA0, "MG"))
        assert len(out) == 1
        assert abs(list(out.values())[0]) == 2

    def test_hhg1_target_becomes_regular(self):
        out = ev("dh", "FG", enc_of(FHG1, "FG"))
        for out_enc in out:
            g = graph_of(out_enc)
            assert not g.is_hedgehog()


class TestDeltaHE:
    def test_fully_marked_zero(self):
        assert ev("dhe", "MG", enc_of(FULLY_MARKED, "MG")) == {}

    def test_theta_single_class_coefficient_three(self):
        out = ev("dhe", "MG", enc_of(THETA0, "MG"))
        assert len(out) == 1
        assert abs(list(out.values())[0]) == 3

    def test_dual_route_after_projection(self):
        for n in (0, 1):
            fam = enumerate_basis("MG", n, 1, 0, 1)
            for m, b in fam.items():
                for enc in b.encodings:
                    lhs = ev("dhe", "MG", enc)
                    enc2 = re_flavor(enc, "MG2")
                    raw = ev("P3.(lam.dh-dh.lam)", "MG2", enc2)
                    rhs = {re_flavor(e, "MG"): v for e, v in raw.items()}
                    assert lhs == rhs

    def test_hg_closure_error_with_honest_hairs(self):
        fam = enumerate_basis("HG", 0, 1, 1, 1)
        enc = fam[min(fam)].encodings[0]
        with pytest.raises(ClosureError):
            ev("dhe", "HG", enc)


class TestConnectFamily:
    def test_star3_no_pair_to_connect(self):
        # one internal vertex and no diagonal: nothing to connect
        assert ev("dvv", "MG", enc_of(STAR3, "MG")) == {}

    def test_theta_vv_counts_ordered_pairs(self):
        out = ev("dvv", "MG", enc_of(THETA0, "MG"))
        assert len(out) == 1
        assert abs(list(out.values())[0]) == 2

    def test_ee_fully_marked_zero(self):
        assert ev("dee", "MG", enc_of(FULLY_MARKED, "MG")) == {}

    def test_n1_rejected(self):
        g = LabeledGraph(1, 4, [(0, 1), (0, 2), (0, 3)], marked=set(),
                         honest=(0, 1, 2))
        for op in ("dvv", "dve", "dee", "dq", "dqe"):
            with pytest.raises(DomainError):
                ev(op, "MG", enc_of(g, "MG"))

    def test_dve_dual_route(self):
        fam = enumerate_basis("MG", 0, 2, 0, 0)
        for m, b in fam.items():
            for enc in b.encodings:
                lhs = ev("dve", "MG", enc)
                raw = ev("P3.(lam.dvv-dvv.lam)", "MG2", re_flavor(enc, "MG2"))
                assert lhs == {re_flavor(e, "MG"): v for e, v in raw.items()}


class TestQuasihair:
    def test_star3_sprouts_one_gadget(self):
        out = ev("dq", "MG", enc_of(STAR3, "MG"))
        assert len(out) == 1
        (out_enc, coeff), = out.items()
        g = graph_of(out_enc)
        assert len(g.quasileaves()) == 1 and len(g.flowers()) == 1
        assert abs(coeff) == 1

    def test_quasileaves_excluded(self):
        # attach the gadget to FHG(1): its vertex is a quasileaf
        assert ev("dq", "FG", enc_of(FHG1, "FG")) == {}

    def test_dqe_fully_marked_zero(self):
        assert ev("dqe", "MG", enc_of(FULLY_MARKED, "MG")) == {}

    def test_dqe_dual_route(self):
        fam = enumerate_basis("MG", 0, 2, 0, 0)
        for m, b in fam.items():
            for enc in b.encodings:
                lhs = ev("dqe", "MG", enc)
                raw = ev("P3.(lamt.dq-dq.lamt)", "MG2", re_flavor(enc, "MG2"))
                assert lhs == {re_flavor(e, "MG"): v for e, v in raw.items()}


class TestHomotopies:
    def test_unmark_theta_third(self):
        g = LabeledGraph(0, 2, [(0, 1), (0, 1), (0, 1)], marked={0})
        out = ev("hU", "MG", enc_of(g, "MG"))
        assert list(out.values()) == [Fraction(1, 3)]

    def test_unmark_no_marked_internal(self):
        assert ev("hU", "MG", enc_of(THETA0, "MG")) == {}

    def test_unmark_needs_internal_edge(self):
        with pytest.raises(DomainError):
            ev("hU", "MG", enc_of(STAR3, "MG"))

    def test_unmark_anticommutator_is_identity(self):
        for n in (0, 1):
            fam = enumerate_basis("MG", n, 2, 0, 0)
            for m, b in fam.items():
                for enc in b.encodings:
                    assert ev("hU.dm+dm.hU", "MG", enc) == {enc: Fraction(1)}

    def test_hair_homotopy_star(self):
        g = LabeledGraph(0, 5, [(0, 1), (0, 2), (0, 3), (0, 4)],
                         marked={3}, honest=(0, 1, 2))
        out = ev("hH", "MG", enc_of(g, "MG"))
        assert list(out.values()) == [Fraction(1)]

    def test_hair_homotopy_rejects_hedgehogs(self):
        fam = enumerate_basis("HG", 0, 1, 0, 3)
        hh = filter_subbasis(fam[6], "hedgehog")
        with pytest.raises(DomainError):
            ev("hH", "HG", hh.encodings[0])

    def test_hair_identity_on_regular_part(self):
        for flavor in ("HG", "FG"):
            for n in (0, 1):
                fam = enumerate_basis(flavor, n, 1, 1, 1)
                for m, b in fam.items():
                    sub = filter_subbasis(b, "has-regular-vertex")
                    for enc in sub.encodings:
                        got = ev("hH.dh+dh.hH", flavor, enc)
                        assert got == {enc: Fraction(1)}

    def test_forest_homotopy_fhg1_not_identity(self):
        enc = enc_of(FHG1, "FG")
        assert ev("qF.dm+dm.qF", "FG", enc) != {enc: Fraction(1)}

    def test_forest_homotopy_rejects_non_hedgehog(self):
        fam = enumerate_basis("FG", 0, 1, 1, 1)
        reg = filter_subbasis(fam[min(fam)], "has-regular-vertex")
        with pytest.raises(DomainError):
            ev("qF", "FG", reg.encodings[0])

    def test_forest_identity_on_slack_two_hedgehogs(self):
        for n, k in ((0, 3), (1, 4)):
            fam = enumerate_basis("FG", n, 1, 0, k)
            for m, b in fam.items():
                sub = filter_subbasis(filter_subbasis(b, "hedgehog"),
                                      "slack>=", 2)
                for enc in sub.encodings:
                    assert ev("qF.dm+dm.qF", "FG", enc) == {enc: Fraction(1)}


class TestPiIota:
    def test_pi_star3_marks_last_hair(self):
        out = ev("pi(1)", "MG", enc_of(STAR3, "MG"))
        (out_enc, coeff), = out.items()
        g = graph_of(out_enc)
        assert g.grade() == (0, 2, 1, 1)
        assert abs(coeff) == 1

    def test_pi_zero_is_identity(self):
        enc = enc_of(STAR3, "MG")
        assert ev("pi(0)", "MG", enc) == {enc: Fraction(1)}

    def test_pi_iota_identity(self):
        for n in (0, 1):
            fam = enumerate_basis("MG", n, 1, 1, 2)
            for m, b in fam.items():
                for enc in b.encodings:
                    for l in (1, 2):
                        got = ev("pi(%d).iota(%d)" % (l, l), "MG", enc)
                        assert got == {enc: Fraction(1)}

    def test_out_of_range(self):
        enc = enc_of(STAR3, "MG")
        with pytest.raises(DomainError):
            ev("pi(4)", "MG", enc)
        with pytest.raises(DomainError):
            ev("iota(1)", "MG", enc)


class TestSquares:
    @pytest.mark.parametrize("flavor,n", [("MG", 0), ("MG", 1),
                                          ("FG", 0), ("FG", 1)])
    def test_full_hair_differential_squares(self, flavor, n):
        fam = enumerate_basis(flavor, n, 2, 0, 1)
        node = parse_expr("(ds+dm+dh+dhe).(ds+dm+dh+dhe)")
        for m, b in fam.items():
            for enc in b.encodings:
                assert eval_on_generator(node, flavor, enc) == {}

    def test_connect_family_squares_on_hairless(self):
        for flavor in ("MG", "FG"):
            fam = enumerate_basis(flavor, 0, 2, 0, 0)
            node = parse_expr("(ds+dm+dvv+dve+dee).(ds+dm+dvv+dve+dee)")
            for m, b in fam.items():
                for enc in b.encodings:
                    assert eval_on_generator(node, flavor, enc) == {}

    def test_quasihair_family_squares_on_fg(self):
        fam = enumerate_basis("FG", 0, 2, 0, 0)
        node = parse_expr("(ds+dm+dq+dqe).(ds+dm+dq+dqe)")
        for m, b in fam.items():
            for enc in b.encodings:
                assert eval_on_generator(node, "FG", enc) == {}


def test_memoization_returns_same_object():
    enc = enc_of(THETA0, "MG")
    a = apply_atom("dm", None, "MG", enc)
    b = apply_atom("dm", None, "MG", enc)
    assert a is b
