"""Certification of ramification data.

Checks for genus-g generating systems, the Harbater-Mumford condition,
data of Mumford type (pairs and triples with product one generating
PGL2-embeddable subgroups), Mumford-Schwarz triples and their p-adic
triangle-group caveat, and the virtual variant that completes pairs with
extra "virtual" monodromies.

Indices into a datum are 0-based throughout.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Optional, Sequence

from sympy import isprime

from .errors import ResourceError, ValidationError
from .gog import Signature
from .permgroup import (ConjClass, FiniteGroup, Perm, Pgl2Class, cayley_presentation, classify_pgl2_finite,
                        commutator, element_closure, generates)

DEFAULT_SEARCH_CAP = 10**8

FINITE = "FinitePgl2"
POSSIBLE_INFINITE = "PossibleInfiniteTriangle"
EXCLUDED = "Excluded"


def require_prime(p: int) -> None:
    if not isprime(int(p)):
        raise ValidationError(f"p = {p} is not prime")


@dataclass(frozen=True)
class RamificationDatum:
    group: FiniteGroup
    classes: tuple[ConjClass, ...]

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        for i, c in enumerate(self.classes):
            if not c.members <= self.group.element_set:
                raise ValidationError(f"class {i} does not belong to the group")
            if self.group.identity in c.members:
                raise ValidationError(f"class {i} is the identity class")

    @classmethod
    def from_representatives(cls, group: FiniteGroup, reps: Sequence[Perm]) -> "RamificationDatum":
        return cls(group, tuple(group.class_of(g) for g in reps))

    def __len__(self) -> int:
        return len(self.classes)

    @property
    def signature(self) -> Signature:
        return Signature(tuple(c.element_order for c in self.classes))

    def representatives(self) -> tuple[Perm, ...]:
        return tuple(c.representative for c in self.classes)


@dataclass(frozen=True)
class TriangleFlag:
    p: int
    status: str

    def __post_init__(self):
        require_prime(self.p)
        if self.status not in (FINITE, POSSIBLE_INFINITE, EXCLUDED):
            raise ValidationError(f"unknown triangle status {self.status}")
        if self.status == POSSIBLE_INFINITE and self.p > 5:
            raise ValidationError("infinite discrete p-adic triangle groups need p <= 5")

    def __str__(self) -> str:
        return f"{self.status}(p={self.p})"


def _product(elems: Sequence[Perm], identity: Perm) -> Perm:
    acc = identity
    for x in elems:
        acc = acc * x
    return acc


def is_genus_g_system(group: FiniteGroup, genus: int, system: Sequence[Perm]) -> bool:
    """Check ``prod [a_j, b_j] * prod g_i = 1`` and that the tuple generates."""
    if genus < 0 or len(system) < 2 * genus:
        raise ValidationError(f"a genus {genus} system needs at least {2 * genus} entries")
    for x in system:
        group.index(x)
    acc = group.identity
    for j in range(genus):
        acc = acc * commutator(system[2 * j], system[2 * j + 1])
    acc = acc * _product(system[2 * genus:], group.identity)
    return acc == group.identity and generates(group, system)


def _search_space(group: FiniteGroup, genus: int, datum: RamificationDatum) -> int:
    return group.order ** (2 * genus) * math.prod(len(c) for c in datum.classes)


def exists_genus_g_system(group: FiniteGroup, genus: int, datum: RamificationDatum,
                          cap: int = DEFAULT_SEARCH_CAP) -> Optional[tuple[Perm, ...]]:
    """First genus-g generating system with g_i in C_i, in deterministic order."""
    if datum.group != group:
        raise ValidationError("datum belongs to a different group")
    if _search_space(group, genus, datum) > cap:
        raise ResourceError(f"search space exceeds cap {cap}")
    ident = group.identity
    classes = datum.classes
    members = [sorted(c.members) for c in classes]
    for handles in itertools.product(group.elements, repeat=2 * genus):
        acc = ident
        for j in range(genus):
            acc = acc * commutator(handles[2 * j], handles[2 * j + 1])
        if not classes:
            if acc == ident and generates(group, handles):
                return tuple(handles)
            continue
        for head in itertools.product(*members[:-1]):
            partial = acc * _product(head, ident)
            last = partial.inverse()
            if last in classes[-1]:
                system = tuple(handles) + tuple(head) + (last,)
                if generates(group, system):
                    return system
    return None


def check_hm_arrangement(datum: RamificationDatum) -> int:
    """Return r for a datum arranged as (C_1..C_r, C_1^-1..C_r^-1)."""
    if len(datum) % 2:
        raise ValidationError("HM data need an even number of classes")
    r = len(datum) // 2
    for i in range(r):
        if datum.classes[i + r] != datum.classes[i].inverse():
            raise ValidationError(f"class {i + r} is not the inverse class of class {i}")
    return r


def hm_condition(datum: RamificationDatum) -> bool:
    r = check_hm_arrangement(datum)
    for i in range(r):
        rest = [x for j, c in enumerate(datum.classes) if j not in (i, i + r) for x in c.members]
        if not generates(datum.group, rest):
            return False
    return True


@dataclass(frozen=True)
class MumfordWitness:
    """Blocks list indices in the order in which the product is one."""

    blocks: tuple[tuple[int, ...], ...]
    representatives: tuple[Perm, ...]
    classification: tuple = ()

    def violations(self, datum: RamificationDatum) -> list[str]:
        out = []
        flat = sorted(i for b in self.blocks for i in b)
        if flat != list(range(len(datum))):
            out.append("blocks do not partition the class indices")
        if len(self.representatives) != len(datum):
            return out + ["wrong number of representatives"]
        for i, g in enumerate(self.representatives):
            if g not in datum.classes[i]:
                out.append(f"representative {i} is not in its class")
        ident = datum.group.identity
        for b, cls in zip(self.blocks, self.classification):
            if len(b) not in (2, 3):
                out.append(f"block {b} has size {len(b)}")
                continue
            if _product([self.representatives[i] for i in b], ident) != ident:
                out.append(f"block {b}: product is not one")
            sub = datum.group.subgroup(self.representatives[i] for i in b)
            found = classify_pgl2_finite(sub)
            if found != cls or not found.embeddable:
                out.append(f"block {b}: subgroup classifies as {found}, recorded {cls}")
        if len(self.classification) != len(self.blocks):
            out.append("one classification per block is required")
        return out

    def as_dict(self) -> dict:
        return {"blocks": [list(b) for b in self.blocks],
                "reps": [str(g) for g in self.representatives],
                "classification": [str(c) for c in self.classification]}


@lru_cache(maxsize=8192)
def _classify_subgroup(group: FiniteGroup, elements: frozenset) -> Pgl2Class:
    sub = FiniteGroup(group.degree, sorted(elements), elements)
    return classify_pgl2_finite(sub)


def subgroup_class(group: FiniteGroup, gens: Sequence[Perm]) -> Pgl2Class:
    return _classify_subgroup(group, element_closure(group, gens))


def _pair_option(datum: RamificationDatum, i: int, j: int) -> Optional[tuple]:
    a = datum.classes[i].representative
    if a.inverse() in datum.classes[j]:
        return ((i, j), (a, a.inverse()), Pgl2Class("Cyclic", a.order()))
    return None


def _triple_instances(datum: RamificationDatum, block: tuple[int, int, int],
                      normalize: bool = True) -> Iterator[tuple]:
    """Product-one triples in the block's classes, both cyclic orientations.

    Yields (ordered block, reps, Pgl2Class).  With ``normalize`` the first
    entry is fixed to its class representative (enough for existence, since
    simultaneous conjugation preserves everything a single block needs).
    """
    i, j, k = block
    group = datum.group
    for order in ((i, j, k), (i, k, j)):
        c0, c1, c2 = (datum.classes[x] for x in order)
        firsts = [c0.representative] if normalize else sorted(c0.members)
        for a in firsts:
            for b in sorted(c1.members):
                c = (a * b).inverse()
                if c in c2:
                    yield order, (a, b, c), subgroup_class(group, (a, b))


def _triple_option(datum: RamificationDatum, block) -> Optional[tuple]:
    for order, reps, cls in _triple_instances(datum, block):
        if cls.embeddable:
            return order, reps, cls
    return None


def _set_partitions(indices: tuple[int, ...], sizes: tuple[int, ...]) -> Iterator[list[tuple[int, ...]]]:
    """Partitions into blocks with allowed sizes; deterministic lexicographic order."""
    if not indices:
        yield []
        return
    first, rest = indices[0], indices[1:]
    for size in sizes:
        for others in itertools.combinations(rest, size - 1):
            remaining = tuple(x for x in rest if x not in others)
            for tail in _set_partitions(remaining, sizes):
                yield [(first,) + others] + tail


def _count_partitions(n: int) -> int:
    counts = [1, 0, 1]
    for m in range(3, n + 1):
        counts.append((m - 1) * counts[m - 2] + math.comb(m - 1, 2) * counts[m - 3])
    return counts[n] if n < len(counts) else 0


def mumford_type_witness(datum: RamificationDatum, p: int = 3,
                         cap: int = DEFAULT_SEARCH_CAP) -> Optional[MumfordWitness]:
    """Search partitions into pairs/triples with product-one, PGL2-embeddable blocks.

    ``p`` only matters for the virtual variant; finite subgroups of PGL2 in
    characteristic zero do not depend on it.
    """
    require_prime(p)
    r = len(datum)
    if math.prod(len(c) for c in datum.classes) * max(_count_partitions(r), 1) > cap:
        raise ResourceError(f"Mumford-type search space exceeds cap {cap}")
    memo: dict = {}

    def option(block):
        if block not in memo:
            memo[block] = _pair_option(datum, *block) if len(block) == 2 else _triple_option(datum, block)
        return memo[block]

    for partition in _set_partitions(tuple(range(r)), (2, 3)):
        chosen = []
        for block in partition:
            opt = option(block)
            if opt is None:
                break
            chosen.append(opt)
        else:
            reps: list = [None] * r
            for order, block_reps, _ in chosen:
                for idx, g in zip(order, block_reps):
                    reps[idx] = g
            return MumfordWitness(tuple(o for o, _, _ in chosen), tuple(reps), tuple(c for _, _, c in chosen))
    return None


def hm_implies_mumford(datum: RamificationDatum) -> MumfordWitness:
    """The canonical all-pairs witness (g_i, g_i^-1) of an HM-arranged datum."""
    r = check_hm_arrangement(datum)
    reps: list = [None] * (2 * r)
    blocks = []
    classes = []
    for i in range(r):
        g = datum.classes[i].representative
        reps[i], reps[i + r] = g, g.inverse()
        blocks.append((i, i + r))
        classes.append(Pgl2Class("Cyclic", g.order()))
    return MumfordWitness(tuple(blocks), tuple(reps), tuple(classes))


def triangle_status(cls: Pgl2Class, p: int) -> str:
    if cls.embeddable:
        return FINITE
    return POSSIBLE_INFINITE if p <= 5 else EXCLUDED


def mumford_schwarz_check(group: FiniteGroup, triple: Sequence[Perm], p: int) -> TriangleFlag:
    require_prime(p)
    if len(triple) != 3:
        raise ValidationError("a Mumford-Schwarz check needs exactly three elements")
    for x in triple:
        group.index(x)
    if _product(triple, group.identity) != group.identity:
        raise ValidationError("triple product is not the identity")
    return TriangleFlag(p, triangle_status(subgroup_class(group, triple), p))


@dataclass(frozen=True)
class VirtualBlock:
    indices: tuple[int, ...]
    representatives: tuple[Perm, ...]
    virtual: Optional[Perm]
    classification: Pgl2Class
    flag: TriangleFlag

    def as_dict(self) -> dict:
        return {"indices": list(self.indices), "reps": [str(g) for g in self.representatives],
                "virtual": None if self.virtual is None else str(self.virtual),
                "classification": str(self.classification), "flag": self.flag.status}


@dataclass(frozen=True)
class VirtualReport:
    """status is ``certified`` (all blocks finite) or ``unknown``."""

    status: str
    blocks: tuple[VirtualBlock, ...]
    p: int
    generates: Optional[bool] = None

    @property
    def virtual_monodromies(self) -> tuple[Perm, ...]:
        return tuple(b.virtual for b in self.blocks if b.virtual is not None)

    @property
    def completed_system(self) -> tuple[Perm, ...]:
        out = []
        for b in self.blocks:
            out.extend(b.representatives)
            if b.virtual is not None:
                out.append(b.virtual)
        return tuple(out)

    def as_dict(self) -> dict:
        return {"status": self.status, "p": self.p, "generates": self.generates,
                "blocks": [b.as_dict() for b in self.blocks],
                "virtual_monodromies": [str(g) for g in self.virtual_monodromies]}


def _virtual_instances(datum: RamificationDatum, block: tuple[int, ...], p: int,
                       normalize: bool) -> list[VirtualBlock]:
    """All ways to certify one block, finite ones first."""
    group = datum.group
    ident = group.identity
    out = []
    if len(block) == 2:
        i, j = block
        firsts = [datum.classes[i].representative] if normalize else sorted(datum.classes[i].members)
        for a in firsts:
            for b in sorted(datum.classes[j].members):
                cls = subgroup_class(group, (a, b))
                delta = (a * b).inverse()
                virtual = None if delta == ident else delta
                out.append(VirtualBlock(block, (a, b), virtual, cls, TriangleFlag(p, triangle_status(cls, p))))
    else:
        for order, reps, cls in _triple_instances(datum, block, normalize=normalize):
            out.append(VirtualBlock(order, reps, None, cls, TriangleFlag(p, triangle_status(cls, p))))
    out = [b for b in out if b.flag.status != EXCLUDED]
    out.sort(key=lambda b: (b.flag.status != FINITE, b.virtual is not None))
    return out


def virtual_mumford_type(datum: RamificationDatum, p: int = 3,
                         cap: int = DEFAULT_SEARCH_CAP) -> Optional[VirtualReport]:
    """Search partitions into blocks of size 2 or 3, completing pairs by a virtual monodromy.

    A pair (a, b) with ab != 1 is completed to the triple (a, b, (ab)^-1).
    Certified reports have every block PGL2-embeddable and a completed system
    generating G.  Blocks that are not embeddable are admissible only as
    possible infinite triangle groups (p <= 5), giving an ``unknown`` report.
    Returns None when neither exists.
    """
    require_prime(p)
    r = len(datum)
    budget = [cap]

    def spend(n=1):
        budget[0] -= n
        if budget[0] < 0:
            raise ResourceError(f"virtual Mumford-type search exceeds cap {cap}")

    normalized: dict = {}

    def options(block):
        if block not in normalized:
            normalized[block] = _virtual_instances(datum, block, p, normalize=True)
            spend(len(normalized[block]) + 1)
        return normalized[block]

    unknown_candidate = None
    for partition in _set_partitions(tuple(range(r)), (2, 3)):
        spend()
        per_block = [options(b) for b in partition]
        if any(not opts for opts in per_block):
            continue
        if all(opts[0].flag.status == FINITE for opts in per_block):
            found = _joint_generating(datum, partition, p, spend)
            if found is not None:
                return VirtualReport("certified", found, p, True)
        if unknown_candidate is None and any(opts[-1].flag.status != FINITE for opts in per_block):
            unknown_candidate = tuple(opts[-1] if opts[-1].flag.status != FINITE else opts[0]
                                      for opts in per_block)
    if unknown_candidate is not None:
        return VirtualReport("unknown", unknown_candidate, p, None)
    return None


def _joint_generating(datum: RamificationDatum, partition, p: int, spend) -> Optional[tuple]:
    """Choose finite block instances so the completed system generates G."""
    group = datum.group
    per_block = []
    for idx, block in enumerate(partition):
        full = [b for b in _virtual_instances(datum, block, p, normalize=(idx == 0)) if b.flag.status == FINITE]
        spend(len(full))
        if not full:
            return None
        per_block.append(full)
    if not per_block:
        return () if group.order == 1 else None
    for combo in itertools.product(*per_block):
        spend()
        elems = [x for b in combo for x in b.representatives + ((b.virtual,) if b.virtual is not None else ())]
        if generates(group, elems):
            return tuple(combo)
    return None


@dataclass(frozen=True)
class TypeAmCriterion:
    normal: bool
    representatives_in_subgroup: bool
    virtual: Optional[VirtualReport]
    quotient_order: int
    quotient_rank: Optional[int]
    complement: Optional[tuple[Perm, ...]]
    holds: Optional[bool] = field(default=None)

    def as_dict(self) -> dict:
        return {"normal": self.normal, "representatives_in_subgroup": self.representatives_in_subgroup,
                "virtual": None if self.virtual is None else self.virtual.as_dict(),
                "quotient_order": self.quotient_order, "quotient_rank": self.quotient_rank,
                "complement": None if self.complement is None else [str(x) for x in self.complement],
                "holds": self.holds}


def _coset_action(group: FiniteGroup, sub: FiniteGroup) -> tuple[list[frozenset], dict]:
    """Right cosets Hx and the induced permutation of each group element."""
    cosets: list[frozenset] = []
    where: dict = {}
    for x in group.elements:
        if x in where:
            continue
        coset = frozenset(h * x for h in sub.elements)
        for y in coset:
            where[y] = len(cosets)
        cosets.append(coset)
    reps = [min(c) for c in cosets]
    action = {x: Perm([where[r * x] for r in reps]) for x in group.elements}
    return cosets, action


def minimal_generator_count(group: FiniteGroup, limit: int) -> Optional[int]:
    """Smallest k <= limit such that some k elements generate, else None."""
    if group.order == 1:
        return 0
    for k in range(1, limit + 1):
        for combo in itertools.combinations(group.elements, k):
            if generates(group, combo):
                return k
    return None


def find_complement(group: FiniteGroup, normal: FiniteGroup, cap: int = DEFAULT_SEARCH_CAP) -> Optional[tuple]:
    """Generators of a complement to a normal subgroup, via lifts of a quotient presentation."""
    from .permgroup import closure

    cosets, action = _coset_action(group, normal)
    quotient = closure(len(cosets), [action[g] for g in group.generators])
    pres, _ = cayley_presentation(quotient)
    fibres = []
    for q in quotient.generators:
        fibres.append(sorted(x for x in group.elements if action[x] == q))
    if math.prod(len(f) for f in fibres) > cap:
        raise ResourceError(f"complement search exceeds cap {cap}")
    ident = group.identity
    for lifts in itertools.product(*fibres):
        ok = True
        for rel in pres.relators:
            acc = ident
            for letter in rel:
                x = lifts[abs(letter) - 1]
                acc = acc * (x if letter > 0 else x.inverse())
            if acc != ident:
                ok = False
                break
        if ok:
            return tuple(lifts)
    return None


def type_am_criterion(group: FiniteGroup, sub: FiniteGroup, genus: int, datum: RamificationDatum,
                      p: int = 3, cap: int = DEFAULT_SEARCH_CAP) -> TypeAmCriterion:
    """Composite check for a cover of type Am: normal subgroup, virtual type, split quotient."""
    from .permgroup import closure

    normal = group.is_normal_subgroup(sub)
    inside = all(c.members & sub.element_set for c in datum.classes)
    virtual = None
    if inside:
        h_datum = RamificationDatum.from_representatives(
            sub, [min(c.members & sub.element_set) for c in datum.classes])
        virtual = virtual_mumford_type(h_datum, p, cap)
    quotient_order = group.order // sub.order
    rank = None
    complement = None
    if normal:
        cosets, action = _coset_action(group, sub)
        quotient = closure(len(cosets), [action[g] for g in group.generators])
        rank = minimal_generator_count(quotient, genus)
        complement = find_complement(group, sub, cap)
    if not (normal and inside) or rank is None or complement is None or virtual is None:
        holds: Optional[bool] = False
    elif virtual.status == "certified":
        holds = True
    else:
        holds = None
    return TypeAmCriterion(normal, inside, virtual, quotient_order, rank, complement, holds)
