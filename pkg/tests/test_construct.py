import json
import random
from functools import lru_cache

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from generators import random_am_graph
from mumford_ret.branch import formula_count
from mumford_ret.construct import (EXCLUDED_PAIRS, add_genus_edges, amalgamify, covering_graph, delta_connected,
                                   greedy_generators, harbater_paste, p_part, realize, realize_full_aut,
                                   star_tree_for_cyclic, subdivide_segment, verify_cover_spec)
from mumford_ret.errors import StructuralError, ValidationError
from mumford_ret.gog import (Edge, GraphOfGroups, Vertex, abelianization, fundamental_presentation, graph_genus,
                             is_stable, is_type_am, signature_of, stabilize)
from mumford_ret.groups import alternating, by_name, corpus, cyclic, symmetric
from mumford_ret.permgroup import Perm, generates
from mumford_ret.presentation import AbelianInvariants
from mumford_ret.serialize import cover_from_json, cover_to_json, dumps

S3 = symmetric(3)


@lru_cache(maxsize=None)
def star(n):
    return star_tree_for_cyclic(n, 3)


def chain(g):
    return [v.group.order for v in g.vertices], [e.group.order for e in g.edges]


class TestSubdivide:
    def test_p_part(self):
        assert p_part(18, 3) == (2, 2) and p_part(5, 3) == (5, 0)

    def test_mixed_segment(self):
        g = subdivide_segment(6, 9, 3)
        assert chain(g) == ([6, 3, 3, 9], [3, 1, 3])
        assert signature_of(g).orders == (6, 6, 9, 9)

    def test_prime_power_tree(self):
        g = subdivide_segment(27, 27, 3)
        assert chain(g) == ([27, 9, 3, 3, 9, 27], [9, 3, 1, 3, 9])
        assert signature_of(g).orders == (27,) * 4

    def test_prime_to_p(self):
        assert chain(subdivide_segment(2, 3, 5)) == ([2, 3], [1])

    def test_too_small(self):
        with pytest.raises(ValidationError):
            subdivide_segment(1, 3, 5)

    @pytest.mark.parametrize("e,e2,p", [(4, 8, 2), (6, 9, 3), (10, 25, 5), (12, 7, 3), (14, 49, 7)])
    def test_stabilizes_with_same_signature(self, e, e2, p):
        g = subdivide_segment(e, e2, p)
        h = stabilize(g)
        assert is_stable(h) and signature_of(h) == signature_of(g)
        assert formula_count(h).n == formula_count(g).n == 4


class TestStarTree:
    @pytest.mark.parametrize("n,p,sig,genus", [(3, 3, (3,) * 4, 2), (2, 3, (2,) * 6, 2), (4, 2, (4,) * 4, 3)])
    def test_examples(self, n, p, sig, genus):
        spec = star_tree_for_cyclic(n, p)
        assert spec.signature.orders == sig and spec.cover_genus == genus and spec.valid
        assert spec.base_genus == 0 and spec.certificate["delta_connected"]

    def test_too_small(self):
        with pytest.raises(ValidationError):
            star_tree_for_cyclic(1, 3)

    def test_non_prime(self):
        with pytest.raises(ValidationError):
            star_tree_for_cyclic(3, 4)


class TestPaste:
    def test_s3(self):
        t, r = Perm.parse("(0 1)", 3), Perm.parse("(0 1 2)", 3)
        spec = harbater_paste(star(2), star(3), S3, (t,), (r,))
        assert spec.signature.orders == (2,) * 6 + (3,) * 4
        assert spec.cover_genus == 12 == oracles.rh_genus(6, 0, spec.signature.orders)
        assert spec.valid and spec.certificate["delta_connected"]

    def test_redundant_c2(self):
        c2 = cyclic(2)
        spec = harbater_paste(star(2), star(2), c2)
        assert len(spec.signature) == 12 and spec.valid

    def test_c6(self):
        c6 = cyclic(6)
        x = c6.generators[0]
        spec = harbater_paste(star(2), star(3), c6, (x ** 3,), (x ** 2,))
        assert sorted(spec.signature.orders) == [2] * 6 + [3] * 4 and spec.valid

    def test_not_generating_is_flagged(self):
        t = Perm.parse("(0 1)", 3)
        spec = harbater_paste(star(2), star(2), S3, (t,), (t,))
        assert not spec.valid and not spec.certificate["delta_connected"]

    def test_bad_embedding(self):
        with pytest.raises(ValidationError):
            harbater_paste(star(3), star(2), S3, (Perm.parse("(0 1)", 3),), (Perm.parse("(0 1)", 3),))


def _cyclic_pairs(max_order):
    for name, group in corpus(max_order):
        if group.order == 1:
            continue
        reps = [c.representative for c in group.conjugacy_classes if group.identity not in c.members]
        for x in reps:
            for y in group.elements:
                if not y.is_identity() and x.order() <= y.order():
                    yield name, group, x, y


def test_paste_connectivity_iff_generates():
    checked = 0
    for name, group, x, y in _cyclic_pairs(12):
        spec = harbater_paste(star(x.order()), star(y.order()), group, (x,), (y,))
        nodes, links = covering_graph(spec.star_graph, group, spec.vertex_images, spec.letter_images)
        expected = len(oracles.span([x.images, y.images], group.degree)) == group.order
        assert delta_connected(nodes, links) == expected == spec.valid, (name, x, y)
        checked += 1
    assert checked > 100


class TestRealize:
    def test_c2(self):
        spec = realize(cyclic(2), 3)
        assert spec.signature.orders == (2,) * 6 and spec.cover_genus == 2 and spec.valid

    def test_s3(self):
        spec = realize(S3, 3)
        assert spec.signature.orders == (2,) * 6 + (3,) * 4 and spec.cover_genus == 12

    def test_q8(self):
        spec = realize(by_name("Q8"), 3)
        assert spec.signature.orders == (4,) * 8 and spec.valid
        assert [Perm.parse(s, 8).order() for s in spec.certificate["generators"]] == [4, 4]

    def test_trivial(self):
        with pytest.raises(ValidationError):
            realize(cyclic(1), 3)

    def test_explicit_generators(self):
        with pytest.raises(ValidationError):
            realize(S3, 3, [Perm.parse("(0 1 2)", 3)])
        spec = realize(S3, 3, [Perm.parse("(0 1)", 3), Perm.parse("(1 2)", 3)])
        assert spec.signature.orders == (2,) * 12 and spec.valid

    @pytest.mark.parametrize("name,group", [ng for ng in corpus(24) if ng[1].order > 1])
    def test_greedy_generates(self, name, group):
        gens = greedy_generators(group)
        assert generates(group, gens)
        assert [x.order() for x in gens] == sorted(x.order() for x in gens)


class TestGenusEdges:
    def test_zero(self):
        spec = star(3)
        assert add_genus_edges(spec, 0) == spec

    def test_one(self):
        spec = add_genus_edges(star(3), 1)
        assert spec.base_genus == 1 == graph_genus(spec.star_graph)
        assert spec.signature.orders == (3,) * 4 and spec.valid

    def test_three_on_s3(self):
        spec = add_genus_edges(realize(S3, 3), 3)
        assert spec.base_genus == 3 and is_type_am(spec.star_graph) and spec.valid
        assert spec.cover_genus == oracles.rh_genus(6, 3, spec.signature.orders)

    def test_negative(self):
        with pytest.raises(ValidationError):
            add_genus_edges(star(3), -1)

    @settings(max_examples=15)
    @given(st.integers(0, 4), st.sampled_from([2, 3, 4, 5]))
    def test_raises_genus_exactly(self, g, n):
        before = star(n)
        after = add_genus_edges(before, g)
        assert graph_genus(after.star_graph) == graph_genus(before.star_graph) + g
        assert signature_of(after.star_graph) == signature_of(before.star_graph)


class TestFullAut:
    def test_c2(self):
        spec = realize_full_aut(cyclic(2), 3)
        assert (spec.base_genus, len(spec.signature)) == (3, 6)
        assert "condition" in spec.certificate

    def test_s3(self):
        spec = realize_full_aut(S3, 3)
        assert (spec.base_genus, len(spec.signature)) == (3, 10) and spec.valid

    def test_genus2(self):
        spec = realize_full_aut(cyclic(2), 3, method="genus2")
        assert (spec.base_genus, len(spec.signature)) == (2, 6)
        assert (spec.base_genus, len(spec.signature)) not in EXCLUDED_PAIRS

    def test_unknown_method(self):
        with pytest.raises(ValidationError):
            realize_full_aut(S3, 3, method="genus1")

    def test_realize_already_has_many_cusps(self):
        spec = realize(symmetric(4), 3)
        assert spec.base_genus == 0 and len(spec.signature) > 4


class TestAmalgamify:
    def test_already_am(self):
        g = subdivide_segment(6, 9, 3)
        res = amalgamify(g)
        assert res.result == g and (res.s, res.t) == (0, 0)

    def test_c2_loop(self):
        c2 = cyclic(2)
        x = c2.generators[0]
        g = GraphOfGroups((Vertex(0, c2),), (Edge(0, 0, 0, c2, (x,), (x,)),))
        assert abelianization(fundamental_presentation(g)) == AbelianInvariants((2,), 1)
        res = amalgamify(g)
        assert (res.s, res.t) == (1, 0)
        assert abelianization(fundamental_presentation(res.result)) == AbelianInvariants((), 1)

    def test_a4_loop(self):
        a4 = alternating(4)
        c3 = cyclic(3)
        x = Perm.parse("(0 1 2)", 4)
        g = GraphOfGroups((Vertex(0, a4),), (Edge(0, 0, 0, c3, (x,), (x,)),))
        res = amalgamify(g)
        assert (res.s, res.t) == (0, 1) and res.relations == ((0, 1, 0),)
        assert [v.group for v in res.result.vertices] == [a4, a4]
        assert formula_count(res.result).n - formula_count(g).n == 3

    def test_neither_case(self):
        c4 = cyclic(4)
        x = c4.generators[0]
        g = GraphOfGroups((Vertex(0, c4),), (Edge(0, 0, 0, cyclic(2), (x ** 2,), (x ** 2,)),))
        with pytest.raises(StructuralError):
            amalgamify(g)

    @settings(max_examples=30)
    @given(st.integers(0, 10**6))
    def test_idempotent_type_am(self, seed):
        g = random_am_graph(random.Random(seed))
        res = amalgamify(g)
        assert is_type_am(res.result) and oracles.nontrivial_cycle_rank(res.result) == 0
        assert len(res.relations) == res.t
        again = amalgamify(res.result)
        assert (again.s, again.t) == (0, 0)


def test_cover_spec_round_trip():
    spec = realize(S3, 3)
    text = dumps(cover_to_json(spec))
    back = cover_from_json(json.loads(text))
    assert back.cover_genus == spec.cover_genus and back.signature == spec.signature and back.valid
    assert dumps(cover_to_json(back)) == text
    assert verify_cover_spec(back) == ([], True)
