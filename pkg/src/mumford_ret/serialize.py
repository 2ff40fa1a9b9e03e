"""JSON documents and DOT drawings.

Every document carries a ``schema`` field.  Permutations are written in
cycle notation; on input both cycle strings and image arrays are accepted.
Groups may also be given by name (``{"name": "S3"}`` or just ``"S3"``).
"""

from __future__ import annotations

import json
from typing import Any, Optional

from .construct import CoverSpec, covering_graph, make_cover_spec
from .errors import ValidationError
from .gog import Cusp, Edge, GraphOfGroups, Vertex
from .groups import by_name
from .permgroup import FiniteGroup, Perm, closure, group_tag
from .ret import MumfordWitness, RamificationDatum

SCHEMAS = {
    "group": "mumford-ret/group/1",
    "graph": "mumford-ret/graph/1",
    "datum": "mumford-ret/datum/1",
    "witness": "mumford-ret/witness/1",
    "cover": "mumford-ret/cover-spec/1",
    "branch": "mumford-ret/branch-count/1",
    "verdict": "mumford-ret/verdict/1",
}


def dumps(doc: Any) -> str:
    """Canonical text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _perm(value, degree: int) -> Perm:
    return Perm.parse(value, degree)


def group_to_json(group: FiniteGroup) -> dict:
    return {"schema": SCHEMAS["group"], "degree": group.degree,
            "generators": [str(g) for g in group.generators], "order": group.order}


def group_from_json(doc) -> FiniteGroup:
    if isinstance(doc, str):
        return by_name(doc)
    if not isinstance(doc, dict):
        raise ValidationError("group document must be an object or a name")
    if "name" in doc and "generators" not in doc:
        return by_name(doc["name"])
    try:
        degree = int(doc["degree"])
        gens = [_perm(x, degree) for x in doc["generators"]]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed group document: {exc}") from None
    group = closure(degree, gens)
    if "order" in doc and doc["order"] != group.order:
        raise ValidationError(f"declared order {doc['order']} but generators give {group.order}")
    return group


def _images(images, degree: int) -> tuple:
    return tuple(_perm(x, degree) for x in images)


def graph_to_json(g: GraphOfGroups) -> dict:
    def grp(group):
        doc = group_to_json(group)
        doc.pop("schema")
        return doc

    return {
        "schema": SCHEMAS["graph"],
        "name": g.name,
        "vertices": [{"id": v.id, "group": grp(v.group)} for v in g.vertices],
        "edges": [{"id": e.id, "from": e.origin, "to": e.terminal, "group": grp(e.group),
                   "into_from": [str(x) for x in e.into_origin], "into_to": [str(x) for x in e.into_terminal]}
                  for e in g.edges],
        "cusps": [{"id": c.id, "vertex": c.vertex, "group": grp(c.group), "into": [str(x) for x in c.into]}
                  for c in g.cusps],
    }


def graph_from_json(doc: dict) -> GraphOfGroups:
    try:
        vertices = [Vertex(int(v["id"]), group_from_json(v["group"])) for v in doc["vertices"]]
        degrees = {v.id: v.group.degree for v in vertices}

        def deg(vid):
            if vid not in degrees:
                raise ValidationError(f"unknown vertex {vid}")
            return degrees[vid]

        edges = []
        for e in doc.get("edges", []):
            o, t = int(e["from"]), int(e["to"])
            edges.append(Edge(int(e["id"]), o, t, group_from_json(e["group"]),
                              _images(e["into_from"], deg(o)), _images(e["into_to"], deg(t))))
        cusps = [Cusp(int(c["id"]), int(c["vertex"]), group_from_json(c["group"]),
                      _images(c["into"], deg(int(c["vertex"]))))
                 for c in doc.get("cusps", [])]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed graph document: missing {exc}") from None
    return GraphOfGroups(tuple(vertices), tuple(edges), tuple(cusps), doc.get("name", "g"))


def datum_to_json(datum: RamificationDatum) -> dict:
    return {"schema": SCHEMAS["datum"], "group": group_to_json(datum.group),
            "classes": [str(g) for g in datum.representatives()]}


def datum_from_json(doc: dict) -> RamificationDatum:
    try:
        group = group_from_json(doc["group"])
        reps = [_perm(x, group.degree) for x in doc["classes"]]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed datum document: missing {exc}") from None
    return RamificationDatum.from_representatives(group, reps)


def witness_to_json(w: MumfordWitness) -> dict:
    return dict(w.as_dict(), schema=SCHEMAS["witness"])


def cover_to_json(spec: CoverSpec) -> dict:
    return {
        "schema": SCHEMAS["cover"],
        "star_graph": graph_to_json(spec.star_graph),
        "deck_group": group_to_json(spec.deck_group),
        "quotient_onto": {k: str(v) for k, v in spec.quotient_onto.items()},
        "base_genus": spec.base_genus,
        "signature": list(spec.signature.orders),
        "cover_genus": spec.cover_genus,
        "certificate": spec.certificate,
    }


def cover_from_json(doc: dict) -> CoverSpec:
    """Rebuild and re-certify a spec; declared genera and signature must match."""
    try:
        graph = graph_from_json(doc["star_graph"])
        deck = group_from_json(doc["deck_group"])
        images = {k: _perm(v, deck.degree) for k, v in doc["quotient_onto"].items()}
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed cover document: missing {exc}") from None
    try:
        vertex_images = {v.id: tuple(images[f"v{v.id}_{i}"] for i in range(len(v.group.generators)))
                         for v in graph.vertices}
        letters = {e.id: images[f"t{e.id}"] for e in graph.edges}
    except KeyError as exc:
        raise ValidationError(f"quotient map misses generator {exc}") from None
    cert = dict(doc.get("certificate", {}))
    construction = cert.pop("construction", "imported")
    for key in ("valid", "delta_connected", "violations", "embeddability"):
        cert.pop(key, None)
    spec = make_cover_spec(graph, deck, vertex_images, letters, construction, **cert)
    for key, value in (("base_genus", spec.base_genus), ("cover_genus", spec.cover_genus),
                       ("signature", list(spec.signature.orders))):
        if key in doc and doc[key] != value:
            raise ValidationError(f"declared {key} {doc[key]} differs from recomputed {value}")
    return spec


def _quote(s: str) -> str:
    return '"' + s.replace('"', '\\"') + '"'


def graph_to_dot(g: GraphOfGroups) -> str:
    """Vertices labelled by group tag, edges by edge-group tag, cusps as arrow stubs."""
    lines = [f"graph {_quote(g.name)} {{", "  node [shape=circle];"]
    for v in g.vertices:
        lines.append(f"  v{v.id} [label={_quote(group_tag(v.group))}];")
    for c in g.cusps:
        lines.append(f"  c{c.id} [shape=point, width=0.05, label=\"\"];")
        lines.append(f"  v{c.vertex} -- c{c.id} [dir=forward, arrowhead=normal, "
                     f"label={_quote(str(c.group.order))}];")
    for e in g.edges:
        lines.append(f"  v{e.origin} -- v{e.terminal} [label={_quote(group_tag(e.group))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def delta_to_dot(spec: CoverSpec, name: Optional[str] = None) -> str:
    nodes, links = covering_graph(spec.star_graph, spec.deck_group, spec.vertex_images, spec.letter_images)
    ids = {n: i for i, n in enumerate(nodes)}
    lines = [f"graph {_quote(name or 'delta')} {{", "  node [shape=circle];"]
    for n, i in ids.items():
        lines.append(f"  d{i} [label={_quote(f'v{n[0]}:{min(n[1])}')}];")
    for eid, a, b in links:
        lines.append(f"  d{ids[a]} -- d{ids[b]} [label={_quote(f't{eid}')}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
