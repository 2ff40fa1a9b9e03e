"""Branch-point calculus on graphs of groups.

The count of branch points of the uniformization attached to a stable graph of
finite groups is ``n = 2(C - c) + 3(D - d)``, where C/D count non-trivial
cyclic/non-cyclic vertex groups and c/d the same for edge groups.  The
hypothesis that the fundamental group contains a free subgroup of rank 2 is
not checked.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import InconsistencyError, ValidationError
from .gog import ORIGIN, TERMINAL, GraphOfGroups, Signature, image_of, require_stable, require_valid
from .permgroup import classify_pgl2_finite, is_maximal_cyclic


@dataclass(frozen=True)
class BranchCount:
    n: int
    C: int
    c: int
    D: int
    d: int

    def __post_init__(self):
        if self.n != 2 * (self.C - self.c) + 3 * (self.D - self.d):
            raise InconsistencyError("n does not match 2(C-c) + 3(D-d)")

    def as_dict(self) -> dict:
        return {"n": self.n, "C": self.C, "c": self.c, "D": self.D, "d": self.d}


def _bucket(group) -> str:
    if group.order == 1:
        return "trivial"
    return "cyclic" if group.is_cyclic else "noncyclic"


def formula_count(g: GraphOfGroups) -> BranchCount:
    """Evaluate the counting formula without the stability gate."""
    C = sum(1 for v in g.vertices if _bucket(v.group) == "cyclic")
    D = sum(1 for v in g.vertices if _bucket(v.group) == "noncyclic")
    c = sum(1 for e in g.edges if _bucket(e.group) == "cyclic")
    d = sum(1 for e in g.edges if _bucket(e.group) == "noncyclic")
    return BranchCount(2 * (C - c) + 3 * (D - d), C, c, D, d)


def branch_count(g: GraphOfGroups) -> BranchCount:
    require_valid(g)
    require_stable(g)
    count = formula_count(g)
    if count.n < 0:
        raise InconsistencyError(f"negative branch count {count.n}")
    return count


def _check_regular_tree(t: GraphOfGroups) -> None:
    require_valid(t)
    if len(t.edges) != len(t.vertices) - 1 or any(e.is_loop for e in t.edges):
        raise ValidationError("regular tree must be a tree")
    for v in t.vertices:
        if v.group.is_cyclic or not classify_pgl2_finite(v.group).embeddable:
            raise ValidationError(f"vertex {v.id}: regular trees need non-cyclic finite PGL2 vertex groups")
        if t.valency(v.id) > 3:
            raise ValidationError(f"vertex {v.id} has valency {t.valency(v.id)} > 3")
    for e in t.edges:
        if e.group.order < 2 or not e.group.is_cyclic:
            raise ValidationError(f"edge {e.id}: edge groups must be non-trivial cyclic")
        for end in (ORIGIN, TERMINAL):
            if not is_maximal_cyclic(t.group_at(e.endpoint(end)), image_of(t, e, end)):
                raise ValidationError(f"edge {e.id}: image is not maximal cyclic at the {end}")


def regular_tree_branch_count(t: GraphOfGroups) -> int:
    _check_regular_tree(t)
    n = len(t.vertices) + 2
    other = branch_count(t).n
    if other != n:
        raise InconsistencyError(f"regular tree count {n} disagrees with formula count {other}")
    return n


def regular_local_contribution(t: GraphOfGroups, vid: int) -> int:
    _check_regular_tree(t)
    return 3 - t.valency(vid)


@dataclass(frozen=True)
class BranchLocus:
    points: frozenset

    def __len__(self) -> int:
        return len(self.points)


def branch_pushout(b1: BranchLocus, b2: BranchLocus, bh: BranchLocus,
                   f1: Mapping, f2: Mapping) -> BranchLocus:
    """Pushout of finite sets: b1 and b2 glued along the images of bh.

    Points are relabelled ``1:x`` / ``2:y``; a glued class is named by its
    members joined with ``=``.
    """
    for name, f, target in (("f1", f1, b1), ("f2", f2, b2)):
        for x in bh.points:
            if x not in f:
                raise ValidationError(f"{name} is not defined on {x!r}")
            if f[x] not in target.points:
                raise ValidationError(f"{name}({x!r}) = {f[x]!r} is not in its target")
    parent = {}
    nodes = [("1", x) for x in b1.points] + [("2", y) for y in b2.points]
    for node in nodes:
        parent[node] = node

    def find(node):
        while parent[node] != node:
            parent[node] = parent[parent[node]]
            node = parent[node]
        return node

    for x in bh.points:
        a, b = find(("1", f1[x])), find(("2", f2[x]))
        if a != b:
            parent[max(a, b)] = min(a, b)
    classes: dict = {}
    for node in nodes:
        classes.setdefault(find(node), []).append(f"{node[0]}:{node[1]}")
    return BranchLocus(frozenset("=".join(sorted(members)) for members in classes.values()))


def cusp_locus(g: GraphOfGroups) -> BranchLocus:
    return BranchLocus(frozenset(f"cusp:{g.name}:{c.id}" for c in g.cusps))


def riemann_hurwitz_genus(group_order: int, base_genus: int, signature: Iterable[int]) -> int:
    """Genus h of a tame G-cover: 2h - 2 = |G|(2g - 2) + sum (|G|/e)(e - 1)."""
    orders = tuple(signature.orders if isinstance(signature, Signature) else signature)
    if group_order < 1 or base_genus < 0:
        raise ValidationError("group order must be positive and base genus non-negative")
    total = group_order * (2 * base_genus - 2)
    for e in orders:
        if e < 2 or group_order % e:
            raise InconsistencyError(f"ramification index {e} does not divide |G| = {group_order}")
        total += (group_order // e) * (e - 1)
    if total % 2:
        raise InconsistencyError("2h - 2 is odd")
    h = total // 2 + 1
    if h < 0:
        raise InconsistencyError(f"negative cover genus {h}")
    return h


def hurwitz_dimension(genus: int, n: int) -> int:
    if genus < 0 or n < 0:
        raise ValidationError("genus and branch point count must be non-negative")
    dim = 3 * genus - 3 + n
    if dim < 0:
        raise ValidationError(f"degenerate moduli: 3g - 3 + n = {dim}")
    return dim
