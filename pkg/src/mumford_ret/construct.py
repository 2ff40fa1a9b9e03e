"""Constructions: subdivided segments, *-trees for cyclic groups, pasting,
genus raising, amalgamification and the realization pipelines.

A realization is a :class:`CoverSpec`: a *-graph together with a quotient
map from its Bass-Serre group onto the deck group.  The map is stored per
vertex (images of the vertex-group generators) and per edge (image of the
stable letter).  Every spec is re-verified when it is built; the findings
land in ``certificate`` instead of being trusted.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence

from sympy import factorint

from .branch import riemann_hurwitz_genus
from .errors import InconsistencyError, StructuralError, ValidationError
from .gog import (ORIGIN, TERMINAL, Cusp, Edge, GraphOfGroups, Signature, Vertex, _nontrivial_cycle_edge,
                  fundamental_presentation, graph_genus, image_of, is_type_am, require_valid, signature_of,
                  validate)
from .groups import cyclic, trivial
from .permgroup import FiniteGroup, Perm, element_closure, extend_hom, generates, is_injective
from .ret import require_prime

EXCLUDED_PAIRS = frozenset({(2, 0), (1, 2), (1, 1), (0, 4), (0, 3)})


def p_part(n: int, p: int) -> tuple[int, int]:
    """Write n = m * p^r with p not dividing m; returns (m, r)."""
    r = factorint(n).get(p, 0)
    return n // p**r, r


def _cyclic_edge(eid: int, big: Vertex, small: Vertex, big_is_origin: bool) -> Edge:
    """Edge carrying the smaller cyclic group, included by gen -> gen^(|big|/|small|)."""
    group = small.group
    if group.order == 1:
        return Edge(eid, big.id if big_is_origin else small.id, small.id if big_is_origin else big.id,
                    group, (), ())
    into_big = (big.group.generators[0] ** (big.group.order // group.order),)
    into_small = (small.group.generators[0],)
    if big_is_origin:
        return Edge(eid, big.id, small.id, group, into_big, into_small)
    return Edge(eid, small.id, big.id, group, into_small, into_big)


def _side_orders(e: int, p: int) -> list[int]:
    """Vertex orders from C_e down to C_p along one half of a subdivided segment."""
    m, r = p_part(e, p)
    top = r if m > 1 else r - 1
    return [e] + [p**j for j in range(top, 0, -1)]


def subdivide_segment(e: int, e_prime: int, p: int, name: str = "segment") -> GraphOfGroups:
    """Chain C_e - C_{p^r} - ... - C_p -(1)- C_p - ... - C_{e'} with two cusps at each end.

    Edge groups inside each half are the smaller of the two neighbours; the
    middle edge is trivial.  When an end has order prime to p its half is
    the single vertex C_e.
    """
    require_prime(p)
    if e < 2 or e_prime < 2:
        raise ValidationError("segment end orders must be at least 2")
    left = _side_orders(e, p)
    right = list(reversed(_side_orders(e_prime, p)))
    vertices = [Vertex(i, cyclic(n)) for i, n in enumerate(left + right)]
    edges = []
    for i in range(len(vertices) - 1):
        a, b = vertices[i], vertices[i + 1]
        if i == len(left) - 1:
            edges.append(Edge(i, a.id, b.id, trivial(), (), ()))
        elif i < len(left) - 1:
            edges.append(_cyclic_edge(i, a, b, big_is_origin=True))
        else:
            edges.append(_cyclic_edge(i, b, a, big_is_origin=False))
    first, last = vertices[0], vertices[-1]
    cusps = [Cusp(k, first.id, first.group, first.group.generators) for k in range(2)]
    cusps += [Cusp(k + 2, last.id, last.group, last.group.generators) for k in range(2)]
    return GraphOfGroups(tuple(vertices), tuple(edges), tuple(cusps), name)


@dataclass(frozen=True)
class CoverSpec:
    """A *-graph with a quotient map onto the deck group, verified on construction."""

    star_graph: GraphOfGroups
    deck_group: FiniteGroup
    vertex_images: dict
    letter_images: dict
    base_genus: int
    signature: Signature
    cover_genus: int
    certificate: dict = field(default_factory=dict)

    @property
    def quotient_onto(self) -> dict[str, Perm]:
        """Images of the Bass-Serre presentation generators, keyed by name."""
        out = {}
        for v in self.star_graph.vertices:
            for i, x in enumerate(self.vertex_images[v.id]):
                out[f"v{v.id}_{i}"] = x
        for e in self.star_graph.edges:
            out[f"t{e.id}"] = self.letter_images[e.id]
        return out

    @property
    def valid(self) -> bool:
        return bool(self.certificate.get("valid"))


def _vertex_hom(spec_graph: GraphOfGroups, vertex_images: Mapping, deck: FiniteGroup, vid: int) -> dict:
    return extend_hom(spec_graph.group_at(vid), tuple(vertex_images[vid]), deck)


def subgroup_image(graph: GraphOfGroups, vertex_images: Mapping, deck: FiniteGroup, vid: int,
                   elements: Optional[frozenset] = None) -> frozenset:
    hom = _vertex_hom(graph, vertex_images, deck, vid)
    src = hom.keys() if elements is None else elements
    return frozenset(hom[x] for x in src)


def covering_graph(graph: GraphOfGroups, deck: FiniteGroup, vertex_images: Mapping,
                   letter_images: Mapping) -> tuple[list, list]:
    """The graph Delta: left cosets g*rho(N_v) over vertices, g*rho(N_e) over edges.

    The edge coset g*rho(N_e) (image taken at the origin) joins g*rho(N_o)
    to g*rho(t_e)^-1*rho(N_t), which is well defined by the edge relator.
    """
    homs = {v.id: _vertex_hom(graph, vertex_images, deck, v.id) for v in graph.vertices}
    vsubs = {vid: frozenset(h.values()) for vid, h in homs.items()}

    def coset(g, sub):
        return frozenset(g * h for h in sub)

    nodes = []
    for v in graph.vertices:
        seen = set()
        for g in deck.elements:
            c = coset(g, vsubs[v.id])
            if c not in seen:
                seen.add(c)
                nodes.append((v.id, c))
    links = []
    for e in graph.edges:
        esub = frozenset(homs[e.origin][x] for x in image_of(graph, e, ORIGIN))
        t_inv = letter_images[e.id].inverse()
        seen = set()
        for g in deck.elements:
            c = coset(g, esub)
            if c in seen:
                continue
            seen.add(c)
            links.append((e.id, (e.origin, coset(g, vsubs[e.origin])),
                          (e.terminal, coset(g * t_inv, vsubs[e.terminal]))))
    return nodes, links


def delta_connected(nodes: list, links: list) -> bool:
    parent = {n: n for n in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for _, a, b in links:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    return len({find(n) for n in nodes}) == 1


def _evaluate(word, names: Sequence[str], images: Mapping[str, Perm], identity: Perm) -> Perm:
    acc = identity
    for letter in word:
        x = images[names[abs(letter) - 1]]
        acc = acc * (x if letter > 0 else x.inverse())
    return acc


def verify_cover_spec(spec: CoverSpec) -> tuple[list[str], bool]:
    """Violations of the CoverSpec invariants, plus whether Delta is connected."""
    g, deck = spec.star_graph, spec.deck_group
    problems = list(validate(g))
    if problems:
        return problems, False
    for v in g.vertices:
        try:
            hom = _vertex_hom(g, spec.vertex_images, deck, v.id)
        except (ValidationError, KeyError) as exc:
            problems.append(f"vertex {v.id}: quotient map is not a homomorphism ({exc})")
            continue
        if not is_injective(hom):
            problems.append(f"vertex {v.id}: quotient map is not injective on the vertex group")
    if problems:
        return problems, False
    images = spec.quotient_onto
    pres = fundamental_presentation(g)
    for rel in pres.relators:
        if _evaluate(rel, pres.generators, images, deck.identity) != deck.identity:
            problems.append(f"relator {pres.format_word(rel)} is not respected")
            break
    if not generates(deck, images.values()):
        problems.append("quotient map is not surjective")
    if spec.base_genus != graph_genus(g):
        problems.append("base genus differs from the graph genus")
    if spec.signature != signature_of(g):
        problems.append("signature differs from the cusp signature")
    try:
        if spec.cover_genus != riemann_hurwitz_genus(deck.order, spec.base_genus, spec.signature):
            problems.append("cover genus differs from Riemann-Hurwitz")
    except InconsistencyError as exc:
        problems.append(str(exc))
    connected = delta_connected(*covering_graph(g, deck, spec.vertex_images, spec.letter_images))
    if not connected:
        problems.append("covering graph is disconnected")
    return problems, connected


def make_cover_spec(graph: GraphOfGroups, deck: FiniteGroup, vertex_images: Mapping,
                    letter_images: Mapping, construction: str, **extra) -> CoverSpec:
    """Assemble a spec, derive its genera and signature, and certify it."""
    require_valid(graph)
    base = graph_genus(graph)
    sig = signature_of(graph)
    try:
        cover = riemann_hurwitz_genus(deck.order, base, sig)
    except InconsistencyError:
        cover = -1
    spec = CoverSpec(graph, deck, {k: tuple(v) for k, v in vertex_images.items()}, dict(letter_images),
                     base, sig, cover)
    problems, connected = verify_cover_spec(spec)
    certificate = {"construction": construction, "valid": not problems, "delta_connected": connected,
                   "violations": problems, "embeddability": "structural"}
    certificate.update(extra)
    return replace(spec, certificate=certificate)


def star_tree_for_cyclic(n: int, p: int) -> CoverSpec:
    """*-tree with deck group C_n: four cusps of order n, or six of order 2 when n = 2."""
    require_prime(p)
    if n < 2:
        raise ValidationError("star trees need n >= 2")
    deck = cyclic(n)
    x = deck.generators[0]
    if n == 2:
        c2 = cyclic(2)
        vertices = tuple(Vertex(i, c2) for i in range(3))
        edges = (Edge(0, 0, 1, trivial(), (), ()), Edge(1, 1, 2, trivial(), (), ()))
        cusps = tuple(Cusp(2 * v + k, v, c2, c2.generators) for v in range(3) for k in range(2))
        graph = GraphOfGroups(vertices, edges, cusps, "C2")
    else:
        graph = subdivide_segment(n, n, p, name=f"C{n}")
    vertex_images = {}
    for v in graph.vertices:
        d = v.group.order
        vertex_images[v.id] = (x ** (n // d),) if d > 1 else ()
    letters = {e.id: deck.identity for e in graph.edges}
    return make_cover_spec(graph, deck, vertex_images, letters, "star-tree")


def _renumbered(graph: GraphOfGroups, voff: int, eoff: int, coff: int) -> GraphOfGroups:
    return GraphOfGroups(
        tuple(Vertex(v.id + voff, v.group) for v in graph.vertices),
        tuple(replace(e, id=e.id + eoff, origin=e.origin + voff, terminal=e.terminal + voff) for e in graph.edges),
        tuple(replace(c, id=c.id + coff, vertex=c.vertex + voff) for c in graph.cusps),
        graph.name)


def _push_images(spec: CoverSpec, group: FiniteGroup, into: Optional[Sequence[Perm]]) -> tuple[dict, dict]:
    """Compose a spec's quotient map with an embedding of its deck group into ``group``."""
    if into is None:
        if spec.deck_group.degree != group.degree or not spec.deck_group.element_set <= group.element_set:
            raise ValidationError("deck group is not a subgroup; pass an explicit embedding")
        return dict(spec.vertex_images), dict(spec.letter_images)
    hom = extend_hom(spec.deck_group, tuple(into), group)
    if not is_injective(hom):
        raise ValidationError("deck group embedding is not injective")
    vimg = {vid: tuple(hom[x] for x in imgs) for vid, imgs in spec.vertex_images.items()}
    limg = {eid: hom[x] for eid, x in spec.letter_images.items()}
    return vimg, limg


def harbater_paste(c1: CoverSpec, c2: CoverSpec, group: FiniteGroup,
                   into1: Optional[Sequence[Perm]] = None, into2: Optional[Sequence[Perm]] = None,
                   at1: Optional[int] = None, at2: Optional[int] = None) -> CoverSpec:
    """Join two *-trees by a trivial edge and induce both quotient maps up to ``group``.

    ``into1``/``into2`` give the images of the deck-group generators in
    ``group`` (default: inclusion).  The edge joins ``at1`` and ``at2``,
    the lowest vertex ids by default.  If the two images do not generate
    ``group`` the result is still returned, flagged invalid.
    """
    v1, l1 = _push_images(c1, group, into1)
    v2, l2 = _push_images(c2, group, into2)
    g1 = c1.star_graph
    voff, coff = g1.next_vertex_id(), g1.next_cusp_id()
    joint = g1.next_edge_id()
    g2 = _renumbered(c2.star_graph, voff, joint + 1, coff)
    a = min(g1.vertex_ids()) if at1 is None else at1
    b = (min(c2.star_graph.vertex_ids()) if at2 is None else at2) + voff
    g1.vertex(a)
    g2.vertex(b)
    graph = GraphOfGroups(g1.vertices + g2.vertices,
                          g1.edges + (Edge(joint, a, b, trivial(), (), ()),) + g2.edges,
                          g1.cusps + g2.cusps, "paste")
    vertex_images = dict(v1)
    vertex_images.update({vid + voff: imgs for vid, imgs in v2.items()})
    letters = dict(l1)
    letters[joint] = group.identity
    letters.update({eid + joint + 1: x for eid, x in l2.items()})
    return make_cover_spec(graph, group, vertex_images, letters, "harbater-paste")


def greedy_generators(group: FiniteGroup) -> list[Perm]:
    """Generating sequence: repeatedly add the element enlarging the generated subgroup most.

    Ties go to the first element in enumeration order.  The result is then
    ordered by ascending element order (stable).
    """
    chosen: list[Perm] = []
    current = frozenset([group.identity])
    while len(current) < group.order:
        best, best_set = None, current
        for x in group.elements:
            if x in current:
                continue
            grown = element_closure(group, chosen + [x])
            if len(grown) > len(best_set):
                best, best_set = x, grown
        chosen.append(best)
        current = best_set
    return sorted(chosen, key=lambda x: x.order())


def realize(group: FiniteGroup, p: int, generators: Optional[Sequence[Perm]] = None) -> CoverSpec:
    """*-tree realizing ``group`` as deck group: one cyclic star tree per generator, pasted in order."""
    require_prime(p)
    if group.order == 1:
        raise ValidationError("realize needs a non-trivial group")
    gens = greedy_generators(group) if generators is None else list(generators)
    if not generates(group, gens):
        raise ValidationError("the given elements do not generate the group")
    gens = [x for x in gens if not x.is_identity()]
    specs = [(star_tree_for_cyclic(x.order(), p), (x,)) for x in gens]
    if len(specs) == 1:
        first, into = specs[0]
        vimg, limg = _push_images(first, group, into)
        return make_cover_spec(first.star_graph, group, vimg, limg, "realize", generators=[str(x) for x in gens])
    spec = harbater_paste(specs[0][0], specs[1][0], group, specs[0][1], specs[1][1])
    for nxt, into in specs[2:]:
        spec = harbater_paste(spec, nxt, group, None, into)
    cert = dict(spec.certificate, construction="realize", generators=[str(x) for x in gens])
    return replace(spec, certificate=cert)


def add_genus_edges(spec: CoverSpec, g: int, between: Optional[tuple[int, int]] = None) -> CoverSpec:
    """Insert g trivial edges (a loop if there is one vertex); base genus rises by g."""
    if g < 0:
        raise ValidationError("number of genus edges must be non-negative")
    if g == 0:
        return spec
    graph = spec.star_graph
    ids = sorted(graph.vertex_ids())
    a, b = between if between is not None else (ids[0], ids[1] if len(ids) > 1 else ids[0])
    graph.vertex(a)
    graph.vertex(b)
    start = graph.next_edge_id()
    new_edges = tuple(Edge(start + k, a, b, trivial(), (), ()) for k in range(g))
    letters = dict(spec.letter_images)
    letters.update({start + k: spec.deck_group.identity for k in range(g)})
    out = GraphOfGroups(graph.vertices, graph.edges + new_edges, graph.cusps, graph.name)
    cert = {k: v for k, v in spec.certificate.items() if k not in ("valid", "delta_connected", "violations")}
    cert["construction"] = f"{spec.certificate.get('construction', 'spec')}+genus{g}"
    extra = {k: v for k, v in cert.items() if k not in ("construction", "embeddability")}
    return make_cover_spec(out, spec.deck_group, spec.vertex_images, letters, cert["construction"], **extra)


def realize_full_aut(group: FiniteGroup, p: int, method: str = "genus3") -> CoverSpec:
    """Realization with (base genus, cusp count) outside the excluded pairs.

    ``genus3`` adds three trivial edges; ``genus2`` adds two.
    """
    if method not in ("genus3", "genus2"):
        raise ValidationError(f"unknown method {method!r}")
    spec = add_genus_edges(realize(group, p), 3 if method == "genus3" else 2)
    pair = (spec.base_genus, len(spec.signature))
    if pair in EXCLUDED_PAIRS:
        raise InconsistencyError(f"(g, n) = {pair} is an excluded pair")
    cert = dict(spec.certificate, condition=f"(g, n) = {pair} avoids {sorted(EXCLUDED_PAIRS)}")
    return replace(spec, certificate=cert)


@dataclass(frozen=True)
class AmalgamificationResult:
    result: GraphOfGroups
    s: int
    t: int
    relations: tuple[tuple[int, int, int], ...]
    dropped_cusps: tuple[int, ...] = ()

    def as_dict(self) -> dict:
        return {"s": self.s, "t": self.t,
                "relations": [{"edge": e, "new_vertex": n, "old_vertex": o} for e, n, o in self.relations],
                "dropped_cusps": list(self.dropped_cusps)}


def _am1(g: GraphOfGroups, e: Edge) -> tuple[GraphOfGroups, tuple[int, ...]]:
    """Trivialize the vertex of a loop whose group is its (cyclic) vertex group."""
    v = e.origin
    edges = []
    for f in g.edges:
        if v in (f.origin, f.terminal):
            f = replace(f, group=trivial(), into_origin=(), into_terminal=())
        edges.append(f)
    vertices = tuple(Vertex(x.id, trivial()) if x.id == v else x for x in g.vertices)
    dropped = tuple(c.id for c in g.cusps if c.vertex == v)
    cusps = tuple(c for c in g.cusps if c.vertex != v)
    return GraphOfGroups(vertices, tuple(edges), cusps, g.name), dropped


def _am2(g: GraphOfGroups, e: Edge, end: str) -> tuple[GraphOfGroups, tuple[int, int, int]]:
    """Move one end of e to a fresh vertex carrying a copy of that endpoint's group."""
    old = e.endpoint(end)
    new = g.next_vertex_id()
    moved = replace(e, origin=new) if end == ORIGIN else replace(e, terminal=new)
    graph = GraphOfGroups(g.vertices + (Vertex(new, g.group_at(old)),),
                          tuple(moved if f.id == e.id else f for f in g.edges), g.cusps, g.name)
    return graph, (e.id, new, old)


def amalgamify(g: GraphOfGroups, max_steps: Optional[int] = None) -> AmalgamificationResult:
    """Apply (Am 1)/(Am 2) to non-trivial edges closing cycles until the graph is of type Am."""
    require_valid(g)
    s = t = 0
    relations = []
    dropped: list[int] = []
    limit = len(g.edges) if max_steps is None else max_steps
    for _ in range(limit + 1):
        e, _tree = _nontrivial_cycle_edge(g)
        if e is None:
            break
        origin_group = g.group_at(e.origin)
        full_loop = e.is_loop and len(image_of(g, e, ORIGIN)) == origin_group.order
        if e.is_loop and origin_group.is_cyclic and full_loop:
            g, gone = _am1(g, e)
            dropped.extend(gone)
            s += 1
        elif not origin_group.is_cyclic or not g.group_at(e.terminal).is_cyclic:
            end = ORIGIN if not origin_group.is_cyclic else TERMINAL
            g, rel = _am2(g, e, end)
            relations.append(rel)
            t += 1
        else:
            kind = "loop" if e.is_loop else "edge"
            raise StructuralError(
                f"{kind} {e.id}: group of order {e.group.order} closes a cycle between cyclic vertex "
                f"groups but is not a loop equal to its vertex group; neither (Am 1) nor (Am 2) applies")
    else:
        raise StructuralError("amalgamification did not terminate")
    require_valid(g)
    if not is_type_am(g):
        raise StructuralError("amalgamification result is not of type Am")
    return AmalgamificationResult(g, s, t, tuple(relations), tuple(dropped))
