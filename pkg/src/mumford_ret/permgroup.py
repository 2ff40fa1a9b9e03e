"""Exact arithmetic in finite permutation groups.

Permutations act on ``{0, ..., n-1}`` and compose left to right:
``(p * q)(x) = q(p(x))``.  Groups are enumerated exhaustively, which is
fine at the sizes this package targets (orders up to a few thousand) and
keeps every subset operation trivial and deterministic.
"""

from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence, Union

from .errors import ResourceError, ValidationError
from .presentation import Presentation

DEFAULT_ORDER_CAP = 10_000
DEFAULT_HOM_CAP = 10**13

_CYCLE_RE = re.compile(r"\(([^()]*)\)")


class Perm:
    """A permutation stored as its image tuple."""

    __slots__ = ("images", "_hash")

    def __init__(self, images: Iterable[int]):
        images = tuple(int(x) for x in images)
        if sorted(images) != list(range(len(images))):
            raise ValidationError(f"not a permutation: {list(images)}")
        self.images = images
        self._hash = hash(images)

    @classmethod
    def _raw(cls, images: tuple) -> "Perm":
        p = object.__new__(cls)
        p.images = images
        p._hash = hash(images)
        return p

    @classmethod
    def identity(cls, degree: int) -> "Perm":
        return cls._raw(tuple(range(degree)))

    @classmethod
    def from_cycles(cls, cycles: Sequence[Sequence[int]], degree: int) -> "Perm":
        images = list(range(degree))
        seen = set()
        for cyc in cycles:
            for i, x in enumerate(cyc):
                if not 0 <= x < degree or x in seen:
                    raise ValidationError(f"bad cycle {list(cyc)} for degree {degree}")
                seen.add(x)
                images[x] = cyc[(i + 1) % len(cyc)]
        return cls(images)

    @classmethod
    def parse(cls, value: Union[str, Sequence[int], "Perm"], degree: Optional[int] = None) -> "Perm":
        """Accept cycle notation ``"(0 1 2)(3 4)"``, an image list, or a Perm."""
        if isinstance(value, Perm):
            p = value
        elif isinstance(value, str):
            text = value.strip()
            cycles = []
            for body in _CYCLE_RE.findall(text):
                pts = [int(t) for t in body.replace(",", " ").split()]
                if pts:
                    cycles.append(pts)
            leftover = _CYCLE_RE.sub("", text).strip()
            if leftover:
                raise ValidationError(f"cannot parse cycle notation {value!r}")
            if degree is None:
                degree = 1 + max((x for c in cycles for x in c), default=-1)
            p = cls.from_cycles(cycles, degree)
        else:
            p = cls(value)
        if degree is not None and p.degree != degree:
            raise ValidationError(f"permutation {p} has degree {p.degree}, expected {degree}")
        return p

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __mul__(self, other: "Perm") -> "Perm":
        if len(other.images) != len(self.images):
            raise ValidationError("degree mismatch in product")
        q = other.images
        return Perm._raw(tuple(q[i] for i in self.images))

    def inverse(self) -> "Perm":
        inv = [0] * len(self.images)
        for i, x in enumerate(self.images):
            inv[x] = i
        return Perm._raw(tuple(inv))

    def __pow__(self, k: int) -> "Perm":
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = Perm.identity(self.degree)
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self, h: "Perm") -> "Perm":
        """Return ``h * self * h^-1``."""
        return h * self * h.inverse()

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self.images))

    def cycles(self) -> list[tuple[int, ...]]:
        seen = [False] * len(self.images)
        out = []
        for start in range(len(self.images)):
            if seen[start]:
                continue
            cyc = [start]
            seen[start] = True
            x = self.images[start]
            while x != start:
                cyc.append(x)
                seen[x] = True
                x = self.images[x]
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def order(self) -> int:
        return math.lcm(*(len(c) for c in self.cycles()))

    def __eq__(self, other) -> bool:
        return isinstance(other, Perm) and self.images == other.images

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Perm") -> bool:
        return self.images < other.images

    def __str__(self) -> str:
        cyc = self.cycles()
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc) or "()"

    def __repr__(self) -> str:
        return f"Perm('{self}', degree={self.degree})"


def commutator(a: Perm, b: Perm) -> Perm:
    """``[a, b] = a b a^-1 b^-1``."""
    return a * b * a.inverse() * b.inverse()


class FiniteGroup:
    """A fully enumerated permutation group.

    Build instances with :func:`closure`; the constructor trusts its input.
    """

    def __init__(self, degree: int, generators: Sequence[Perm], elements: Sequence[Perm]):
        self.degree = degree
        self.generators = tuple(generators)
        self.elements = tuple(sorted(elements))
        self.order = len(self.elements)
        self._index = {g: i for i, g in enumerate(self.elements)}

    @cached_property
    def identity(self) -> Perm:
        return Perm.identity(self.degree)

    @cached_property
    def element_set(self) -> frozenset:
        return frozenset(self.elements)

    def __contains__(self, g) -> bool:
        return g in self._index

    def index(self, g: Perm) -> int:
        try:
            return self._index[g]
        except KeyError:
            raise ValidationError(f"{g} is not an element of the group") from None

    def __iter__(self) -> Iterator[Perm]:
        return iter(self.elements)

    def __len__(self) -> int:
        return self.order

    def __eq__(self, other) -> bool:
        return (isinstance(other, FiniteGroup) and self.degree == other.degree
                and self.element_set == other.element_set)

    def __hash__(self) -> int:
        return hash((self.degree, self.element_set))

    def __repr__(self) -> str:
        gens = ", ".join(str(g) for g in self.generators)
        return f"<FiniteGroup order={self.order} degree={self.degree} gens=[{gens}]>"

    def subgroup(self, gens: Iterable[Perm]) -> "FiniteGroup":
        gens = list(gens)
        for g in gens:
            if g not in self:
                raise ValidationError(f"{g} is not an element of the group")
        return closure(self.degree, gens, cap=self.order)

    @cached_property
    def is_abelian(self) -> bool:
        return all(a * b == b * a for a in self.generators for b in self.generators)

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*(g.order() for g in self.elements))

    @cached_property
    def is_cyclic(self) -> bool:
        return self.order == 1 or any(g.order() == self.order for g in self.elements)

    @cached_property
    def is_trivial(self) -> bool:
        return self.order == 1

    def is_normal_subgroup(self, h: "FiniteGroup") -> bool:
        if not h.element_set <= self.element_set:
            return False
        return all(x.conjugate(g) in h for g in self.generators for x in h.generators)

    @cached_property
    def multiplication_table(self) -> tuple[tuple[int, ...], ...]:
        if self.order > 2000:
            raise ResourceError(f"multiplication table for order {self.order} exceeds 2000")
        idx = self._index
        return tuple(tuple(idx[a * b] for b in self.elements) for a in self.elements)

    @cached_property
    def inverse_table(self) -> tuple[int, ...]:
        return tuple(self._index[g.inverse()] for g in self.elements)

    @cached_property
    def conjugacy_classes(self) -> tuple["ConjClass", ...]:
        return tuple(conjugacy_classes(self))

    def class_of(self, g: Perm) -> "ConjClass":
        self.index(g)
        for c in self.conjugacy_classes:
            if g in c.members:
                return c
        raise AssertionError("classes do not partition the group")

    def words(self) -> dict[Perm, tuple[int, ...]]:
        """Shortest-word labels (in the generators) for every element, BFS order."""
        return _cayley_words(self)


def _cayley_words(group: FiniteGroup) -> dict[Perm, tuple[int, ...]]:
    words = {group.identity: ()}
    queue = deque([group.identity])
    while queue:
        x = queue.popleft()
        for i, s in enumerate(group.generators):
            y = x * s
            if y not in words:
                words[y] = words[x] + (i + 1,)
                queue.append(y)
    return words


def _as_perm(p, degree: int) -> Perm:
    try:
        return Perm.parse(p, degree)
    except ValidationError as exc:
        raise ValidationError(f"invalid generator: {exc}") from None


def closure(degree: int, gens: Sequence, cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    """The subgroup of Sym(degree) generated by ``gens``, fully enumerated."""
    if degree < 1:
        raise ValidationError("degree must be positive")
    gens = [_as_perm(g, degree) for g in gens]
    ident = Perm.identity(degree)
    seen = {ident}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for s in gens:
            y = x * s
            if y not in seen:
                seen.add(y)
                if len(seen) > cap:
                    raise ResourceError(f"group order exceeds cap {cap}")
                queue.append(y)
    return FiniteGroup(degree, gens, seen)


def element_closure(group: FiniteGroup, gens: Iterable[Perm]) -> frozenset:
    """Element set generated by ``gens`` inside ``group`` (no validation)."""
    gens = list(set(gens))
    ident = group.identity
    seen = {ident}
    stack = [ident]
    while stack:
        x = stack.pop()
        for s in gens:
            y = x * s
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return frozenset(seen)


@dataclass(frozen=True)
class ConjClass:
    parent: FiniteGroup
    representative: Perm
    members: frozenset

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, g) -> bool:
        return g in self.members

    @property
    def element_order(self) -> int:
        return self.representative.order()

    def inverse(self) -> "ConjClass":
        return self.parent.class_of(self.representative.inverse())

    def __eq__(self, other) -> bool:
        return isinstance(other, ConjClass) and self.members == other.members

    def __hash__(self) -> int:
        return hash(self.members)

    def __repr__(self) -> str:
        return f"ConjClass({self.representative}, size={len(self.members)})"


def conjugacy_classes(group: FiniteGroup) -> list[ConjClass]:
    """Classes ordered by their minimal element; the identity class is first."""
    assigned: set = set()
    classes = []
    gens = group.generators
    for g in group.elements:
        if g in assigned:
            continue
        orbit = {g}
        stack = [g]
        while stack:
            x = stack.pop()
            for h in gens:
                y = x.conjugate(h)
                if y not in orbit:
                    orbit.add(y)
                    stack.append(y)
        assigned |= orbit
        classes.append(ConjClass(group, min(orbit), frozenset(orbit)))
    return classes


def generates(group: FiniteGroup, subset: Iterable[Perm]) -> bool:
    subset = list(subset)
    for g in subset:
        group.index(g)
    return len(element_closure(group, subset)) == group.order


@dataclass(frozen=True)
class Pgl2Class:
    """Isomorphism type among the finite subgroups of PGL2 in characteristic 0."""

    kind: str
    n: Optional[int] = None

    KINDS = ("Cyclic", "Dihedral", "A4", "S4", "A5", "NotEmbeddable")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValidationError(f"unknown PGL2 class {self.kind}")
        if self.kind in ("Cyclic", "Dihedral") and (self.n is None or self.n < 1):
            raise ValidationError(f"{self.kind} needs n >= 1")

    @property
    def embeddable(self) -> bool:
        return self.kind != "NotEmbeddable"

    def __str__(self) -> str:
        return f"{self.kind}({self.n})" if self.n is not None else self.kind


# (order, e1, e2, e3): G is the von Dyck group <a,b | a^e1, b^e2, (ab)^e3>
_POLYHEDRAL = {"A4": (12, 2, 3, 3), "S4": (24, 2, 3, 4), "A5": (60, 2, 3, 5)}


def _is_dihedral(group: FiniteGroup) -> bool:
    n = group.order // 2
    if group.order % 2 or n < 2:
        return False
    if n == 2:
        return not group.is_cyclic
    involutions = [s for s in group.elements if s.order() == 2]
    seen_subgroups = set()
    for r in group.elements:
        if r.order() != n:
            continue
        rot = element_closure(group, [r])
        if rot in seen_subgroups:
            continue
        seen_subgroups.add(rot)
        r_inv = r.inverse()
        if any(s not in rot and r.conjugate(s) == r_inv for s in involutions):
            return True
    return False


def _is_von_dyck(group: FiniteGroup, e1: int, e2: int, e3: int) -> bool:
    firsts = [a for a in group.elements if a.order() == e1]
    seconds = [b for b in group.elements if b.order() == e2]
    for a in firsts:
        for b in seconds:
            if (a * b).order() == e3 and len(element_closure(group, [a, b])) == group.order:
                return True
    return False


def classify_pgl2_finite(group: FiniteGroup) -> Pgl2Class:
    if group.is_cyclic:
        return Pgl2Class("Cyclic", group.order)
    if _is_dihedral(group):
        return Pgl2Class("Dihedral", group.order // 2)
    for name, (order, e1, e2, e3) in _POLYHEDRAL.items():
        # a generating pair with these orders makes G a quotient of the
        # von Dyck group of the same order, hence isomorphic to it
        if group.order == order and _is_von_dyck(group, e1, e2, e3):
            return Pgl2Class(name)
    return Pgl2Class("NotEmbeddable")


def is_maximal_cyclic(group: FiniteGroup, sub: frozenset) -> bool:
    """True iff the cyclic subgroup ``sub`` lies in no strictly larger cyclic subgroup."""
    k = len(sub)
    for g in group.elements:
        o = g.order()
        if o > k and o % k == 0 and element_closure(group, [g ** (o // k)]) == sub:
            return False
    return True


def extend_hom(source: FiniteGroup, images: Sequence[Perm], target: FiniteGroup) -> dict:
    """Extend a generator assignment to a homomorphism ``source -> target``.

    Raises ValidationError if an image is not in ``target`` or the
    assignment does not respect the relations of ``source``.
    """
    if len(images) != len(source.generators):
        raise ValidationError(
            f"expected {len(source.generators)} generator images, got {len(images)}")
    for img in images:
        if img not in target:
            raise ValidationError(f"image {img} is not in the target group")
    table = {source.identity: target.identity}
    queue = deque([source.identity])
    while queue:
        x = queue.popleft()
        fx = table[x]
        for s, img in zip(source.generators, images):
            y = x * s
            fy = fx * img
            prev = table.get(y)
            if prev is None:
                table[y] = fy
                queue.append(y)
            elif prev != fy:
                raise ValidationError("generator images do not define a homomorphism")
    return table


def is_injective(hom: dict) -> bool:
    return len(set(hom.values())) == len(hom)


def _relator_schedule(presentation: Presentation) -> tuple[list[int], list[list[tuple[int, ...]]]]:
    """Greedy variable order so that relators become checkable early."""
    supports = [set(abs(x) - 1 for x in r) for r in presentation.relators if r]
    live = [r for r in presentation.relators if r]
    order: list[int] = []
    assigned: set = set()
    remaining = set(range(presentation.rank))
    while remaining:
        def score(v):
            completes = sum(1 for s in supports if v in s and s - assigned <= {v})
            touches = sum(1 for s in supports if v in s and s & assigned)
            return (completes, touches, -v)
        v = max(remaining, key=score)
        order.append(v)
        assigned.add(v)
        remaining.discard(v)
    position = {v: i for i, v in enumerate(order)}
    checks: list[list[tuple[int, ...]]] = [[] for _ in order]
    for rel, sup in zip(live, supports):
        checks[max(position[v] for v in sup)].append(rel)
    return order, checks


def iter_homomorphisms(presentation: Presentation, target: FiniteGroup,
                       cap: int = DEFAULT_HOM_CAP) -> Iterator[tuple[Perm, ...]]:
    """Yield every generator assignment into ``target`` satisfying all relators."""
    k = presentation.rank
    if target.order ** k > cap:
        raise ResourceError(f"|T|^{k} = {target.order ** k} exceeds hom cap {cap}")
    mul = target.multiplication_table
    inv = target.inverse_table
    ident = target.index(target.identity)
    order, checks = _relator_schedule(presentation)
    values = [0] * k
    elems = target.elements

    def holds(rel) -> bool:
        acc = ident
        for letter in rel:
            g = values[letter - 1] if letter > 0 else inv[values[-letter - 1]]
            acc = mul[acc][g]
        return acc == ident

    def rec(depth: int):
        if depth == len(order):
            yield tuple(elems[v] for v in values)
            return
        var = order[depth]
        for g in range(target.order):
            values[var] = g
            if all(holds(r) for r in checks[depth]):
                yield from rec(depth + 1)

    yield from rec(0)


def cayley_presentation(group: FiniteGroup, names: Optional[Sequence[str]] = None) -> tuple[Presentation, dict]:
    """Presentation of ``group`` on its own generators, read off the Cayley graph.

    Every non-tree edge ``x --s--> xs`` of a BFS tree contributes the relator
    ``w(x) s w(xs)^-1``.  Also returns the word for each element.
    """
    from .presentation import free_reduce, invert_word

    words = group.words()
    rels = []
    for x, wx in words.items():
        for i, s in enumerate(group.generators):
            rel = free_reduce(wx + (i + 1,) + invert_word(words[x * s]))
            if rel:
                rels.append(rel)
    if names is None:
        names = [f"x{i}" for i in range(len(group.generators))]
    return Presentation(tuple(names), tuple(rels)), words


def hom_count(presentation: Presentation, target: FiniteGroup, cap: int = DEFAULT_HOM_CAP) -> int:
    return sum(1 for _ in iter_homomorphisms(presentation, target, cap))


def group_tag(group: FiniteGroup) -> str:
    """Short human label used in DOT output and reports."""
    if group.order == 1:
        return "1"
    c = classify_pgl2_finite(group)
    if c.kind == "Cyclic":
        return f"C{c.n}"
    if c.kind == "Dihedral":
        return "V4" if c.n == 2 else f"D{c.n}"
    if c.embeddable:
        return c.kind
    return f"G{group.order}"
