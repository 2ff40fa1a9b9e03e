"""Named small groups as permutation groups, plus the test corpus."""

from __future__ import annotations

import re
from typing import Callable, Hashable, Sequence

from .errors import ValidationError
from .permgroup import FiniteGroup, Perm, closure


def trivial() -> FiniteGroup:
    return closure(1, [])


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise ValidationError("cyclic group needs n >= 1")
    if n == 1:
        return trivial()
    return closure(n, [Perm([(i + 1) % n for i in range(n)])])


def dihedral(n: int) -> FiniteGroup:
    """Dihedral group of order 2n; D2 is the Klein four group."""
    if n < 1:
        raise ValidationError("dihedral group needs n >= 1")
    if n == 1:
        return cyclic(2)
    if n == 2:
        return klein_four()
    rot = Perm([(i + 1) % n for i in range(n)])
    ref = Perm([(-i) % n for i in range(n)])
    return closure(n, [rot, ref])


def klein_four() -> FiniteGroup:
    return closure(4, [Perm.parse("(0 1)(2 3)", 4), Perm.parse("(0 2)(1 3)", 4)])


def symmetric(n: int) -> FiniteGroup:
    if n <= 1:
        return trivial()
    if n == 2:
        return cyclic(2)
    return closure(n, [Perm.parse("(0 1)", n), Perm.from_cycles([tuple(range(n))], n)])


def alternating(n: int) -> FiniteGroup:
    if n <= 2:
        return trivial()
    gens = [Perm.from_cycles([(0, 1, i)], n) for i in range(2, n)]
    return closure(n, gens)


def regular_representation(elements: Sequence[Hashable], mul: Callable, gens: Sequence[Hashable]) -> FiniteGroup:
    """Right regular representation; point i is ``elements[i]``."""
    index = {x: i for i, x in enumerate(elements)}
    perms = [Perm([index[mul(x, g)] for x in elements]) for g in gens]
    return closure(len(elements), perms)


def dicyclic(n: int) -> FiniteGroup:
    """Dic_n of order 4n: <a, x | a^(2n), x^2 = a^n, x a x^-1 = a^-1>."""
    if n < 2:
        raise ValidationError("dicyclic group needs n >= 2")
    m = 2 * n

    def mul(u, v):
        k, e = u
        l, f = v
        if e == 0:
            return ((k + l) % m, f)
        if f == 0:
            return ((k - l) % m, 1)
        return ((k - l + n) % m, 0)

    # a^k x^e, listed so that the point of a is 1 (makes <a> enumerate first)
    elements = [(k, 0) for k in range(m)] + [(k, 1) for k in range(m)]
    return regular_representation(elements, mul, [(1, 0), (0, 1)])


def quaternion() -> FiniteGroup:
    return dicyclic(2)


def special_linear_2_3() -> FiniteGroup:
    """SL(2, 3) acting on the eight non-zero vectors of F_3^2."""
    vecs = [(a, b) for a in range(3) for b in range(3) if (a, b) != (0, 0)]
    index = {v: i for i, v in enumerate(vecs)}

    def act(mat):
        (p, q), (r, s) = mat
        return Perm([index[((p * a + q * b) % 3, (r * a + s * b) % 3)] for a, b in vecs])

    return closure(8, [act(((1, 1), (0, 1))), act(((0, 2), (1, 0)))])


def direct_product(*factors: FiniteGroup) -> FiniteGroup:
    degree = sum(g.degree for g in factors)
    gens = []
    offset = 0
    for g in factors:
        for s in g.generators:
            images = list(range(degree))
            for i, x in enumerate(s.images):
                images[offset + i] = offset + x
            gens.append(Perm(images))
        offset += g.degree
    return closure(degree, gens)


_ATOMS = {
    "V4": klein_four,
    "K4": klein_four,
    "Q8": quaternion,
    "SL23": special_linear_2_3,
    "SL(2,3)": special_linear_2_3,
}


def _atom(name: str) -> FiniteGroup:
    if name in _ATOMS:
        return _ATOMS[name]()
    m = re.fullmatch(r"(C|D|S|A|Dic)(\d+)", name)
    if not m:
        raise ValidationError(f"unknown group name {name!r}")
    kind, n = m.group(1), int(m.group(2))
    return {"C": cyclic, "D": dihedral, "S": symmetric, "A": alternating, "Dic": dicyclic}[kind](n)


def by_name(name: str) -> FiniteGroup:
    """Parse names like ``C5``, ``D4``, ``S3``, ``A5``, ``Q8``, ``Dic3``, ``C2xS3``."""
    parts = [p for p in re.split(r"\s*[x×]\s*", name.strip()) if p]
    if not parts:
        raise ValidationError("empty group name")
    groups = [_atom(p) for p in parts]
    return groups[0] if len(groups) == 1 else direct_product(*groups)


CORPUS_NAMES = (
    "C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10", "C11", "C12",
    "C13", "C16", "C18", "C24",
    "V4", "D3", "D4", "D5", "D6", "D7", "D8", "D9", "D10", "D11", "D12",
    "A4", "S4", "Q8", "Dic3", "Dic5", "Dic6", "SL23",
    "C2xC2xC2", "C3xC3", "C2xC4", "C2xC6", "C4xC4", "C2xC8", "C2xC2xC4",
    "C2xD4", "C2xQ8", "C3xS3", "C2xA4", "C2xC2xC6", "C3xC6", "C2xC10", "C4xS3",
)


def corpus(max_order: int = 24) -> list[tuple[str, FiniteGroup]]:
    """The named small groups used throughout the test and acceptance suites."""
    out = []
    for name in CORPUS_NAMES:
        g = by_name(name)
        if g.order <= max_order:
            out.append((name, g))
    return out
