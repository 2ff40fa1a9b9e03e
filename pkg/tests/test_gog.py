import random

import pytest
from hypothesis import given, settings, strategies as st

from generators import random_graph
from mumford_ret.construct import subdivide_segment
from mumford_ret.errors import InadmissibleError, ValidationError
from mumford_ret.gog import (ORIGIN, TERMINAL, Cusp, Edge, GraphOfGroups, Signature, Vertex, abelian_invariants,
                             abelianization, contract, fundamental_presentation, graph_genus, image_of,
                             is_admissible, is_stable, is_type_am, signature_of, slide, spanning_trees, stabilize,
                             validate)
from mumford_ret.groups import alternating, cyclic, symmetric, trivial
from mumford_ret.permgroup import Perm, hom_count
from mumford_ret.presentation import AbelianInvariants

C2, C3, C6, C9 = cyclic(2), cyclic(3), cyclic(6), cyclic(9)
S3 = symmetric(3)
T1 = trivial()


def gen(g):
    return g.generators[0]


def segment(a, b, edge_group, into_a, into_b, cusps=()):
    return GraphOfGroups((Vertex(0, a), Vertex(1, b)), (Edge(0, 0, 1, edge_group, into_a, into_b),), cusps)


def full_c6_segment():
    return segment(C6, C6, C6, (gen(C6),), (gen(C6),))


class TestValidate:
    def test_single_trivial_vertex(self):
        assert validate(GraphOfGroups((Vertex(0, T1),))) == []

    def test_bad_monomorphism(self):
        g = segment(C2, S3, C2, (gen(C2),), (Perm.parse("(0 1)", 4),))
        problems = validate(g)
        assert problems and "edge 0" in problems[0]

    def test_non_injective(self):
        g = segment(C3, C3, C3, (gen(C3),), (Perm.identity(3),))
        assert any("injective" in p for p in validate(g))

    def test_disconnected(self):
        g = GraphOfGroups((Vertex(0, T1), Vertex(1, T1)))
        assert validate(g) == ["underlying graph is not connected"]

    def test_trivial_cusp_rejected(self):
        g = GraphOfGroups((Vertex(0, C2),), (), (Cusp(0, 0, T1, ()),))
        assert any("cusp 0" in p for p in validate(g))


class TestStable:
    def test_full_segment_unstable(self):
        assert not is_stable(full_c6_segment())

    def test_trivial_middle_edge(self):
        assert is_stable(segment(C6, C9, T1, (), ()))

    def test_valency_three_exempt(self):
        c2 = (gen(C2),)
        g = GraphOfGroups((Vertex(0, C2), Vertex(1, S3), Vertex(2, S3), Vertex(3, S3)),
                          (Edge(0, 0, 1, C2, c2, (Perm.parse("(0 1)", 3),)),
                           Edge(1, 0, 2, T1, (), ()), Edge(2, 0, 3, T1, (), ())))
        assert is_stable(g)

    def test_invalid_graph(self):
        with pytest.raises(ValidationError):
            is_stable(GraphOfGroups((Vertex(0, T1), Vertex(1, T1))))


class TestContract:
    def test_full_collapse(self):
        g = contract(full_c6_segment(), 0)
        assert len(g.vertices) == 1 and g.vertices[0].group == C6 and not g.edges

    def test_prime_power_chain(self):
        tree = subdivide_segment(9, 9, 3)
        assert [v.group.order for v in tree.vertices] == [9, 3, 3, 9]
        merged = contract(tree, 0)
        assert [v.group.order for v in merged.vertices] == [9, 3, 9]
        assert merged.vertices[0].id == 0

    def test_inadmissible_middle_edge(self):
        with pytest.raises(InadmissibleError):
            contract(segment(C6, C6, T1, (), ()), 0)

    def test_loop(self):
        g = GraphOfGroups((Vertex(0, C2),), (Edge(0, 0, 0, C2, (gen(C2),), (gen(C2),)),))
        with pytest.raises(InadmissibleError):
            contract(g, 0)

    def test_reattaches_cusps_with_composed_maps(self):
        c4 = cyclic(4)
        x = gen(c4)
        g = GraphOfGroups((Vertex(0, c4), Vertex(1, C2)), (Edge(0, 0, 1, C2, (x ** 2,), (gen(C2),)),),
                          (Cusp(0, 1, C2, (gen(C2),)),))
        h = contract(g, 0)
        assert h.vertex_ids() == [0]
        assert h.cusps[0].vertex == 0 and h.cusps[0].into == (x ** 2,)
        assert validate(h) == []


class TestSlide:
    def test_identity(self):
        g = segment(C2, S3, C2, (gen(C2),), (Perm.parse("(0 1)", 3),))
        assert slide(g, 0, TERMINAL, S3.identity) == g

    def test_conjugate_transposition(self):
        g = segment(C2, S3, C2, (gen(C2),), (Perm.parse("(0 1)", 3),))
        c = Perm.parse("(0 1 2)", 3)
        h = slide(g, 0, TERMINAL, c)
        assert image_of(h, h.edge(0), TERMINAL) == {S3.identity, Perm.parse("(0 1)", 3).conjugate(c)}
        assert h.edge(0).into_terminal != g.edge(0).into_terminal

    def test_inverse_undoes(self):
        g = segment(C2, S3, C2, (gen(C2),), (Perm.parse("(0 1)", 3),))
        c = Perm.parse("(0 1 2)", 3)
        assert slide(slide(g, 0, TERMINAL, c), 0, TERMINAL, c.inverse()) == g

    def test_conjugator_outside(self):
        g = segment(C2, S3, C2, (gen(C2),), (Perm.parse("(0 1)", 3),))
        with pytest.raises(ValidationError):
            slide(g, 0, ORIGIN, Perm.parse("(0 1 2)", 3))


class TestPresentation:
    def test_single_vertex(self):
        pres = fundamental_presentation(GraphOfGroups((Vertex(0, C2),)), minimize=True)
        assert pres.rank == 1 and abelianization(pres) == AbelianInvariants((2,), 0)
        assert hom_count(pres, S3) == 4

    def test_free_product(self):
        pres = fundamental_presentation(segment(C2, C3, T1, (), ()), minimize=True)
        assert pres.generators == ("v0_0", "v1_0")
        assert abelianization(pres) == AbelianInvariants((6,), 0)
        # homs C2 * C3 -> S3: 4 choices of a with a^2 = 1, 3 of b with b^3 = 1
        assert hom_count(pres, S3) == 12

    def test_loop(self):
        g = GraphOfGroups((Vertex(0, C2),), (Edge(0, 0, 0, T1, (), ()),))
        pres = fundamental_presentation(g)
        assert pres.generators == ("v0_0", "t0")
        assert abelianization(pres) == AbelianInvariants((2,), 1)

    def test_non_spanning_tree(self):
        with pytest.raises(ValidationError):
            fundamental_presentation(segment(C2, C3, T1, (), ()), tree=[])

    def test_minimized_agrees(self):
        g = subdivide_segment(6, 9, 3)
        full, small = fundamental_presentation(g), fundamental_presentation(g, minimize=True)
        assert abelianization(full) == abelianization(small)
        assert hom_count(full, S3) == hom_count(small, S3)

    def test_amalgam_over_c2(self):
        # S3 *_{C2} S3: abelianization of amalgam is Z/2
        t = Perm.parse("(0 1)", 3)
        g = segment(S3, S3, C2, (t,), (t,))
        assert abelian_invariants(g) == AbelianInvariants((2,), 0)


class TestGenus:
    def test_tree(self):
        assert graph_genus(subdivide_segment(4, 4, 2)) == 0

    def test_loop(self):
        assert graph_genus(GraphOfGroups((Vertex(0, T1),), (Edge(0, 0, 0, T1, (), ()),))) == 1

    def test_three_inserted_edges(self):
        tree = subdivide_segment(4, 4, 2)
        extra = tuple(Edge(10 + k, 0, 3, T1, (), ()) for k in range(3))
        assert graph_genus(GraphOfGroups(tree.vertices, tree.edges + extra, tree.cusps)) == 3

    def test_disconnected(self):
        with pytest.raises(ValidationError):
            graph_genus(GraphOfGroups((Vertex(0, T1), Vertex(1, T1))))


class TestTypeAm:
    def test_amalgam_tree(self):
        t = Perm.parse("(0 1)", 3)
        assert is_type_am(segment(S3, S3, C2, (t,), (t,)))

    def test_trivial_loops(self):
        tree = subdivide_segment(6, 9, 3)
        loops = (Edge(10, 0, 0, T1, (), ()), Edge(11, 3, 3, T1, (), ()))
        assert is_type_am(GraphOfGroups(tree.vertices, tree.edges + loops, tree.cusps))

    def test_nontrivial_loop(self):
        g = GraphOfGroups((Vertex(0, C2),), (Edge(0, 0, 0, C2, (gen(C2),), (gen(C2),)),))
        assert not is_type_am(g)

    def test_nontrivial_cycle_through_trivial_tree_edge(self):
        a4 = alternating(4)
        x = Perm.parse("(0 1 2)", 4)
        g = GraphOfGroups((Vertex(0, a4), Vertex(1, a4)),
                          (Edge(0, 0, 1, T1, (), ()), Edge(1, 0, 1, C3, (x,), (x,))))
        # choose the C3 edge in the tree and the trivial edge outside it
        assert is_type_am(g)


class TestSignature:
    def test_no_cusps(self):
        assert signature_of(GraphOfGroups((Vertex(0, T1),))) == Signature(())

    def test_prime_power_tree(self):
        assert signature_of(subdivide_segment(4, 4, 2)).orders == (4, 4, 4, 4)

    def test_mixed_segment(self):
        assert signature_of(subdivide_segment(6, 9, 3)).orders == (6, 6, 9, 9)

    def test_bad_entry(self):
        with pytest.raises(ValidationError):
            Signature((1,))


class TestStabilize:
    def test_stable_unchanged(self):
        g = segment(C6, C9, T1, (), ())
        assert stabilize(g) == g

    def test_mixed_segment(self):
        g = stabilize(subdivide_segment(6, 9, 3))
        assert [v.group.order for v in g.vertices] == [6, 9]
        assert [e.group.order for e in g.edges] == [1]
        assert signature_of(g).orders == (6, 6, 9, 9) and is_stable(g)

    def test_one_step_chain(self):
        c4 = cyclic(4)
        x = gen(c4)
        g = GraphOfGroups((Vertex(0, c4), Vertex(1, C2)), (Edge(0, 0, 1, C2, (x ** 2,), (gen(C2),)),),
                          (Cusp(0, 1, C2, (gen(C2),)), Cusp(1, 0, c4, (x,))))
        h = stabilize(g)
        assert [v.group for v in h.vertices] == [c4] and not h.edges and len(h.cusps) == 2


seeds = st.integers(0, 10**6)


@settings(max_examples=40)
@given(seeds)
def test_contract_preserves_genus_signature_and_validity(seed):
    g = random_graph(random.Random(seed))
    for e in g.edges:
        if is_admissible(g, e.id):
            h = contract(g, e.id)
            assert validate(h) == []
            assert graph_genus(h) == graph_genus(g)
            assert signature_of(h) == signature_of(g)


@settings(max_examples=40)
@given(seeds)
def test_stabilize_idempotent_and_bounded(seed):
    g = random_graph(random.Random(seed))
    h = stabilize(g)
    assert validate(h) == []
    assert stabilize(h) == h
    assert len(g.edges) - len(h.edges) <= len(g.edges)
    assert signature_of(h) == signature_of(g)


@settings(max_examples=25)
@given(seeds)
def test_spanning_tree_independence(seed):
    g = random_graph(random.Random(seed), max_vertices=4)
    reference = None
    for tree in list(spanning_trees(g))[:6]:
        pres = fundamental_presentation(g, tree, minimize=True)
        value = (abelianization(pres), hom_count(pres, C2), hom_count(pres, S3))
        assert reference is None or value == reference
        reference = value


@settings(max_examples=30)
@given(seeds)
def test_slide_preserves_signature(seed):
    g = random_graph(random.Random(seed))
    rng = random.Random(seed + 1)
    for e in g.edges:
        end = rng.choice([ORIGIN, TERMINAL])
        c = rng.choice(g.group_at(e.endpoint(end)).elements)
        h = slide(g, e.id, end, c)
        assert validate(h) == [] and signature_of(h) == signature_of(g)
        assert graph_genus(h) == graph_genus(g)
