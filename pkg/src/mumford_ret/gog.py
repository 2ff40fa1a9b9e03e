"""Finite graphs of finite groups with cusps, and the moves on them.

A cusp is a marked half-edge at a vertex whose (cyclic, non-trivial)
stabilizer embeds in the vertex group.  Cusps stand in for the ends of the
infinite *-graph, so the finite part plus cusp markers is the whole model.

Monomorphisms are stored as the images of the source group's generators and
verified by enumeration.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Sequence

from .errors import InadmissibleError, PreconditionError, ValidationError
from .permgroup import FiniteGroup, Perm, cayley_presentation, extend_hom, is_injective
from .presentation import AbelianInvariants, Presentation, Word, abelianization, free_reduce, invert_word

ORIGIN = "origin"
TERMINAL = "terminal"

__all__ = [
    "Vertex", "Edge", "Cusp", "GraphOfGroups", "Signature", "Presentation",
    "validate", "require_valid", "is_stable", "contract", "slide", "fundamental_presentation",
    "abelianization", "graph_genus", "is_type_am", "type_am_tree", "signature_of", "stabilize",
    "spanning_tree", "spanning_trees", "is_admissible", "image_of", "abelian_invariants",
]


@dataclass(frozen=True)
class Vertex:
    id: int
    group: FiniteGroup


@dataclass(frozen=True)
class Edge:
    id: int
    origin: int
    terminal: int
    group: FiniteGroup
    into_origin: tuple
    into_terminal: tuple

    def __post_init__(self):
        object.__setattr__(self, "into_origin", tuple(self.into_origin))
        object.__setattr__(self, "into_terminal", tuple(self.into_terminal))

    @property
    def is_loop(self) -> bool:
        return self.origin == self.terminal

    def endpoint(self, end: str) -> int:
        return self.origin if end == ORIGIN else self.terminal

    def into(self, end: str) -> tuple:
        return self.into_origin if end == ORIGIN else self.into_terminal


@dataclass(frozen=True)
class Cusp:
    id: int
    vertex: int
    group: FiniteGroup
    into: tuple

    def __post_init__(self):
        object.__setattr__(self, "into", tuple(self.into))


@dataclass(frozen=True)
class Signature:
    orders: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "orders", tuple(int(e) for e in self.orders))
        if any(e < 2 for e in self.orders):
            raise ValidationError(f"signature entries must be >= 2: {self.orders}")

    def __len__(self) -> int:
        return len(self.orders)

    def __iter__(self):
        return iter(self.orders)

    def __add__(self, other: "Signature") -> "Signature":
        return Signature(self.orders + other.orders)


@dataclass(frozen=True)
class GraphOfGroups:
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...] = ()
    cusps: tuple[Cusp, ...] = ()
    name: str = field(default="g", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "cusps", tuple(self.cusps))

    def vertex(self, vid: int) -> Vertex:
        for v in self.vertices:
            if v.id == vid:
                return v
        raise ValidationError(f"no vertex {vid}")

    def edge(self, eid: int) -> Edge:
        for e in self.edges:
            if e.id == eid:
                return e
        raise ValidationError(f"no edge {eid}")

    def group_at(self, vid: int) -> FiniteGroup:
        return self.vertex(vid).group

    def vertex_ids(self) -> list[int]:
        return [v.id for v in self.vertices]

    def incident(self, vid: int) -> list[tuple[Edge, str]]:
        """(edge, end) pairs attached at ``vid``; a loop appears twice."""
        out = []
        for e in self.edges:
            if e.origin == vid:
                out.append((e, ORIGIN))
            if e.terminal == vid:
                out.append((e, TERMINAL))
        return out

    def valency(self, vid: int) -> int:
        return len(self.incident(vid))

    def cusps_at(self, vid: int) -> list[Cusp]:
        return [c for c in self.cusps if c.vertex == vid]

    def next_vertex_id(self) -> int:
        return max((v.id for v in self.vertices), default=-1) + 1

    def next_edge_id(self) -> int:
        return max((e.id for e in self.edges), default=-1) + 1

    def next_cusp_id(self) -> int:
        return max((c.id for c in self.cusps), default=-1) + 1


@lru_cache(maxsize=4096)
def _hom_table(source: FiniteGroup, images: tuple, target: FiniteGroup) -> dict:
    return extend_hom(source, images, target)


def edge_map(g: GraphOfGroups, e: Edge, end: str) -> dict:
    """Elementwise monomorphism from the edge group into the endpoint group."""
    return _hom_table(e.group, e.into(end), g.group_at(e.endpoint(end)))


def image_of(g: GraphOfGroups, e: Edge, end: str) -> frozenset:
    return frozenset(edge_map(g, e, end).values())


def cusp_map(g: GraphOfGroups, c: Cusp) -> dict:
    return _hom_table(c.group, c.into, g.group_at(c.vertex))


def _connected(vertex_ids: Sequence[int], pairs: Iterable[tuple[int, int]]) -> bool:
    if not vertex_ids:
        return False
    adj: dict = {v: set() for v in vertex_ids}
    for a, b in pairs:
        adj[a].add(b)
        adj[b].add(a)
    seen = {vertex_ids[0]}
    stack = [vertex_ids[0]]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(vertex_ids)


def _check_mono(label: str, source: FiniteGroup, images: tuple, target: FiniteGroup) -> Optional[str]:
    try:
        table = _hom_table(source, images, target)
    except ValidationError as exc:
        return f"{label}: {exc}"
    if not is_injective(table):
        return f"{label}: map is not injective"
    return None


def validate(g: GraphOfGroups) -> list[str]:
    """All invariant violations, each naming the offending vertex, edge or cusp."""
    problems = []
    vids = [v.id for v in g.vertices]
    if not vids:
        return ["graph has no vertices"]
    for kind, ids in (("vertex", vids), ("edge", [e.id for e in g.edges]), ("cusp", [c.id for c in g.cusps])):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        if dupes:
            problems.append(f"duplicate {kind} ids {dupes}")
    known = set(vids)
    dangling = False
    for e in g.edges:
        for end in (ORIGIN, TERMINAL):
            if e.endpoint(end) not in known:
                problems.append(f"edge {e.id}: {end} vertex {e.endpoint(end)} does not exist")
                dangling = True
                continue
            msg = _check_mono(f"edge {e.id} ({end})", e.group, e.into(end), g.group_at(e.endpoint(end)))
            if msg:
                problems.append(msg)
    for c in g.cusps:
        if c.vertex not in known:
            problems.append(f"cusp {c.id}: vertex {c.vertex} does not exist")
            continue
        if not c.group.is_cyclic or c.group.order < 2:
            problems.append(f"cusp {c.id}: stabilizer must be non-trivial cyclic")
        msg = _check_mono(f"cusp {c.id}", c.group, c.into, g.group_at(c.vertex))
        if msg:
            problems.append(msg)
    if not dangling and not _connected(vids, [(e.origin, e.terminal) for e in g.edges]):
        problems.append("underlying graph is not connected")
    return problems


def require_valid(g: GraphOfGroups) -> None:
    problems = validate(g)
    if problems:
        raise ValidationError("invalid graph of groups: " + "; ".join(problems))


def is_stable(g: GraphOfGroups) -> bool:
    require_valid(g)
    for v in g.vertices:
        inc = g.incident(v.id)
        if len(inc) > 2:
            continue
        for e, end in inc:
            if len(image_of(g, e, end)) == v.group.order:
                return False
    return True


def is_admissible(g: GraphOfGroups, eid: int) -> bool:
    e = g.edge(eid)
    if e.is_loop:
        return False
    return any(len(image_of(g, e, end)) == g.group_at(e.endpoint(end)).order for end in (ORIGIN, TERMINAL))


def contract(g: GraphOfGroups, eid: int) -> GraphOfGroups:
    """Collapse an admissible edge, merging its endpoints into the larger group."""
    e = g.edge(eid)
    if e.is_loop:
        raise InadmissibleError(f"edge {eid} is a loop")
    full = [end for end in (ORIGIN, TERMINAL)
            if len(image_of(g, e, end)) == g.group_at(e.endpoint(end)).order]
    if not full:
        raise InadmissibleError(f"edge {eid}: edge group is proper in both endpoint groups")
    absorbed_end = TERMINAL if TERMINAL in full else ORIGIN
    kept_end = ORIGIN if absorbed_end == TERMINAL else TERMINAL
    u, w = e.endpoint(absorbed_end), e.endpoint(kept_end)
    to_edge = {y: x for x, y in edge_map(g, e, absorbed_end).items()}
    into_kept = edge_map(g, e, kept_end)
    psi = {y: into_kept[x] for y, x in to_edge.items()}

    edges = []
    for f in g.edges:
        if f.id == eid:
            continue
        if f.origin == u:
            f = replace(f, origin=w, into_origin=tuple(psi[x] for x in f.into_origin))
        if f.terminal == u:
            f = replace(f, terminal=w, into_terminal=tuple(psi[x] for x in f.into_terminal))
        edges.append(f)
    cusps = [replace(c, vertex=w, into=tuple(psi[x] for x in c.into)) if c.vertex == u else c
             for c in g.cusps]
    vertices = [v for v in g.vertices if v.id != u]
    return GraphOfGroups(tuple(vertices), tuple(edges), tuple(cusps), g.name)


def slide(g: GraphOfGroups, eid: int, end: str, conjugator: Perm) -> GraphOfGroups:
    """Post-compose one edge monomorphism with conjugation by ``conjugator``."""
    if end not in (ORIGIN, TERMINAL):
        raise ValidationError(f"endpoint selector must be {ORIGIN!r} or {TERMINAL!r}")
    e = g.edge(eid)
    group = g.group_at(e.endpoint(end))
    if conjugator not in group:
        raise ValidationError(f"{conjugator} is not in the group of vertex {e.endpoint(end)}")
    images = tuple(x.conjugate(conjugator) for x in e.into(end))
    new = replace(e, into_origin=images) if end == ORIGIN else replace(e, into_terminal=images)
    return replace(g, edges=tuple(new if f.id == eid else f for f in g.edges))


def spanning_tree(g: GraphOfGroups) -> frozenset:
    """Deterministic BFS spanning tree, lowest ids first."""
    start = min(g.vertex_ids())
    seen = {start}
    tree = set()
    frontier = [start]
    while frontier:
        nxt = []
        for v in frontier:
            for e in sorted(g.edges, key=lambda e: e.id):
                if e.is_loop or v not in (e.origin, e.terminal):
                    continue
                w = e.terminal if e.origin == v else e.origin
                if w not in seen:
                    seen.add(w)
                    tree.add(e.id)
                    nxt.append(w)
        frontier = sorted(nxt)
    return frozenset(tree)


def _is_spanning_tree(g: GraphOfGroups, tree: frozenset) -> bool:
    edges = [g.edge(i) for i in tree]
    if len(edges) != len(g.vertices) - 1 or any(e.is_loop for e in edges):
        return False
    return _connected(g.vertex_ids(), [(e.origin, e.terminal) for e in edges])


def spanning_trees(g: GraphOfGroups) -> Iterator[frozenset]:
    ids = [e.id for e in g.edges if not e.is_loop]
    for combo in itertools.combinations(ids, len(g.vertices) - 1):
        tree = frozenset(combo)
        if _is_spanning_tree(g, tree):
            yield tree


def _cayley_relators(group: FiniteGroup) -> tuple[dict, list[Word]]:
    pres, words = cayley_presentation(group)
    return words, list(pres.relators)


def _shift(word: Word, offset: int) -> Word:
    return tuple(x + offset if x > 0 else x - offset for x in word)


def _canonical_cyclic(word: Word) -> Word:
    w = list(word)
    while len(w) > 1 and w[0] == -w[-1]:
        w = w[1:-1]
    variants = []
    for base in (w, list(invert_word(w))):
        for i in range(len(base)):
            variants.append(tuple(base[i:] + base[:i]))
    return min(variants) if variants else ()


def fundamental_presentation(g: GraphOfGroups, tree: Optional[Iterable[int]] = None,
                             minimize: bool = False) -> Presentation:
    """Bass-Serre presentation relative to a spanning tree.

    Generators are the vertex-group generators (``v<id>_<i>``) followed by one
    stable letter ``t<id>`` per edge.  Vertex relators come from the Cayley
    graph of each vertex group; tree edges get the relator ``t``.  With
    ``minimize`` the tree letters are eliminated and relators are
    deduplicated up to cyclic permutation and inversion.
    """
    require_valid(g)
    tree = spanning_tree(g) if tree is None else frozenset(tree)
    for i in tree:
        g.edge(i)
    if not _is_spanning_tree(g, tree):
        raise ValidationError(f"edges {sorted(tree)} do not form a spanning tree")

    names: list[str] = []
    offsets = {}
    words = {}
    relators: list[Word] = []
    for v in g.vertices:
        offsets[v.id] = len(names)
        names.extend(f"v{v.id}_{i}" for i in range(len(v.group.generators)))
        words[v.id], rels = _cayley_relators(v.group)
        relators.extend(_shift(r, offsets[v.id]) for r in rels)
    letters = {}
    for e in g.edges:
        letters[e.id] = len(names) + 1
        names.append(f"t{e.id}")
    for e in g.edges:
        t = letters[e.id]
        wo, wt = words[e.origin], words[e.terminal]
        for x in e.group.generators:
            left = _shift(wo[edge_map(g, e, ORIGIN)[x]], offsets[e.origin])
            right = _shift(wt[edge_map(g, e, TERMINAL)[x]], offsets[e.terminal])
            rel = free_reduce((t,) + left + (-t,) + invert_word(right))
            if rel:
                relators.append(rel)
        if e.id in tree:
            relators.append((t,))
    if not minimize:
        return Presentation(tuple(names), tuple(relators))

    dead = {letters[i] for i in tree}
    keep = [k for k in range(1, len(names) + 1) if k not in dead]
    renumber = {old: new for new, old in enumerate(keep, start=1)}
    seen = set()
    out = []
    for rel in relators:
        reduced = free_reduce(
            (renumber[abs(x)] if x > 0 else -renumber[abs(x)]) for x in rel if abs(x) not in dead)
        key = _canonical_cyclic(reduced)
        if key and key not in seen:
            seen.add(key)
            out.append(reduced)
    return Presentation(tuple(names[k - 1] for k in keep), tuple(out))


def graph_genus(g: GraphOfGroups) -> int:
    """First Betti number of the underlying graph (cusps excluded)."""
    if not _connected(g.vertex_ids(), [(e.origin, e.terminal) for e in g.edges]):
        raise ValidationError("graph is not connected")
    return len(g.edges) - len(g.vertices) + 1


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def _nontrivial_cycle_edge(g: GraphOfGroups) -> tuple[Optional[Edge], frozenset]:
    """First non-trivial edge (by id) closing a cycle of non-trivial edges.

    Also returns the spanning tree grown from non-trivial edges first; when no
    such edge exists every edge outside that tree has trivial group.
    """
    uf = _UnionFind(g.vertex_ids())
    tree = set()
    offender = None
    ordered = sorted(g.edges, key=lambda e: (e.group.order == 1, e.id))
    for e in ordered:
        joined = uf.union(e.origin, e.terminal)
        if joined:
            tree.add(e.id)
        elif e.group.order > 1 and offender is None:
            offender = e
    return offender, frozenset(tree)


def type_am_tree(g: GraphOfGroups) -> Optional[frozenset]:
    """A spanning tree whose complement has only trivial edge groups, if any."""
    require_valid(g)
    offender, tree = _nontrivial_cycle_edge(g)
    return None if offender is not None else tree


def is_type_am(g: GraphOfGroups) -> bool:
    return type_am_tree(g) is not None


def signature_of(g: GraphOfGroups) -> Signature:
    return Signature(tuple(c.group.order for c in g.cusps))


def stabilize(g: GraphOfGroups, max_steps: Optional[int] = None) -> GraphOfGroups:
    """Contract admissible edges (lowest id first) until the graph is stable."""
    require_valid(g)
    steps = 0
    limit = len(g.edges) if max_steps is None else max_steps
    while not is_stable(g) and steps < limit:
        candidates = sorted(e.id for e in g.edges if is_admissible(g, e.id))
        if not candidates:
            break
        g = contract(g, candidates[0])
        steps += 1
    return g


def require_stable(g: GraphOfGroups) -> None:
    if not is_stable(g):
        raise PreconditionError("graph of groups is not stable; stabilize it first")


def abelian_invariants(g: GraphOfGroups) -> AbelianInvariants:
    return abelianization(fundamental_presentation(g))
