"""Finite group presentations and their abelianizations.

A word is a tuple of non-zero integers: ``k`` stands for generator ``k - 1``
and ``-k`` for its inverse.  Relators are words that evaluate to the identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors

from .errors import ValidationError

Word = tuple[int, ...]


def free_reduce(word: Iterable[int]) -> Word:
    out: list[int] = []
    for letter in word:
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def invert_word(word: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(word))


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relators: tuple[Word, ...]

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "relators", tuple(tuple(r) for r in self.relators))
        if len(set(self.generators)) != len(self.generators):
            raise ValidationError("duplicate generator names")
        n = len(self.generators)
        for rel in self.relators:
            for letter in rel:
                if letter == 0 or abs(letter) > n:
                    raise ValidationError(f"relator {rel} references an undeclared generator")

    @property
    def rank(self) -> int:
        return len(self.generators)

    def format_word(self, word: Sequence[int]) -> str:
        if not word:
            return "1"
        parts = []
        for letter in word:
            name = self.generators[abs(letter) - 1]
            parts.append(name if letter > 0 else name + "^-1")
        return "*".join(parts)

    def __str__(self) -> str:
        rels = ", ".join(self.format_word(r) for r in self.relators)
        return f"< {', '.join(self.generators)} | {rels} >"

    def relation_matrix(self) -> list[list[int]]:
        """Exponent-sum rows; zero rows and repeats (up to sign) are dropped."""
        rows = []
        seen = set()
        for rel in self.relators:
            row = [0] * self.rank
            for letter in rel:
                row[abs(letter) - 1] += 1 if letter > 0 else -1
            key = tuple(row)
            if any(row) and key not in seen:
                seen.add(key)
                seen.add(tuple(-x for x in row))
                rows.append(row)
        return rows


@dataclass(frozen=True)
class AbelianInvariants:
    """Invariant factors d1 | d2 | ... (all > 1) plus the free rank."""

    torsion: tuple[int, ...]
    free_rank: int

    def as_dict(self) -> dict:
        return {"torsion": list(self.torsion), "free_rank": self.free_rank}


def abelianization(presentation: Presentation) -> AbelianInvariants:
    """Abelian invariants of the presented group via Smith normal form."""
    rows = presentation.relation_matrix()
    n = presentation.rank
    if not rows or n == 0:
        return AbelianInvariants((), n)
    factors = invariant_factors(Matrix(rows), domain=ZZ)
    nonzero = [abs(int(d)) for d in factors if int(d) != 0]
    torsion = tuple(d for d in nonzero if d > 1)
    return AbelianInvariants(torsion, n - len(nonzero))
