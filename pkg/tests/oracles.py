"""Independent reference implementations used to cross-check the library.

Nothing here imports library algorithms: elements are plain image tuples,
and group operations are re-derived from scratch.
"""

from __future__ import annotations

import itertools
from functools import reduce
from math import gcd


def compose(p: tuple, q: tuple) -> tuple:
    """Apply p first, then q."""
    return tuple(q[i] for i in p)


def invert(p: tuple) -> tuple:
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def span(gens, degree: int) -> frozenset:
    ident = tuple(range(degree))
    seen = {ident}
    frontier = [ident]
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = compose(x, g)
                if y not in seen:
                    seen.add(y)
                    new.append(y)
        frontier = new
    return frozenset(seen)


def classes(elements) -> list[frozenset]:
    elements = list(elements)
    out = []
    done = set()
    for g in sorted(elements):
        if g in done:
            continue
        cls = frozenset(compose(compose(h, g), invert(h)) for h in elements)
        done |= cls
        out.append(cls)
    return out


def element_order(p: tuple) -> int:
    ident = tuple(range(len(p)))
    k, x = 1, p
    while x != ident:
        x = compose(x, p)
        k += 1
    return k


class Table:
    """Integer multiplication table of an element set (own enumeration)."""

    def __init__(self, elements):
        self.elements = sorted(elements)
        self.index = {g: i for i, g in enumerate(self.elements)}
        self.mul = [[self.index[compose(a, b)] for b in self.elements] for a in self.elements]
        self.inv = [self.index[invert(a)] for a in self.elements]
        self.identity = self.index[tuple(range(len(self.elements[0])))]
        self._span = {}

    def product(self, idxs) -> int:
        acc = self.identity
        for i in idxs:
            acc = self.mul[acc][i]
        return acc

    def commutator(self, a: int, b: int) -> int:
        return self.product((a, b, self.inv[a], self.inv[b]))

    def generated(self, idxs) -> int:
        key = frozenset(idxs)
        if key not in self._span:
            seen = {self.identity}
            frontier = [self.identity]
            while frontier:
                new = []
                for x in frontier:
                    for g in key:
                        y = self.mul[x][g]
                        if y not in seen:
                            seen.add(y)
                            new.append(y)
                frontier = new
            self._span[key] = len(seen)
        return self._span[key]


def genus_system_exists(table: Table, genus: int, class_sets) -> bool:
    """Brute force over every tuple (a1, b1, ..., g1, ..., gr) with g_i in C_i."""
    n = len(table.elements)
    pools = [range(n)] * (2 * genus) + [sorted(table.index[x] for x in c) for c in class_sets]
    for tup in itertools.product(*pools):
        acc = table.identity
        for j in range(genus):
            acc = table.mul[acc][table.commutator(tup[2 * j], tup[2 * j + 1])]
        acc = table.mul[acc][table.product(tup[2 * genus:])]
        if acc == table.identity and table.generated(tup) == n:
            return True
    return False


def is_isomorphic(elems_a, elems_b) -> bool:
    """Brute-force isomorphism of two permutation groups given as element sets.

    Picks a small generating set of A and tries every image tuple in B with
    matching element orders, extending multiplicatively and checking
    bijectivity.
    """
    a, b = sorted(elems_a), sorted(elems_b)
    if len(a) != len(b):
        return False
    if sorted(element_order(x) for x in a) != sorted(element_order(x) for x in b):
        return False
    degree_a = len(a[0])
    gens = []
    current = span([], degree_a)
    for x in a:
        if x not in current:
            gens.append(x)
            current = span(gens, degree_a)
        if len(current) == len(a):
            break
    by_order = {}
    for y in b:
        by_order.setdefault(element_order(y), []).append(y)
    ident_a, ident_b = tuple(range(degree_a)), tuple(range(len(b[0])))
    for images in itertools.product(*(by_order[element_order(g)] for g in gens)):
        phi = {ident_a: ident_b}
        frontier = [ident_a]
        ok = True
        while frontier and ok:
            new = []
            for x in frontier:
                for g, h in zip(gens, images):
                    y, fy = compose(x, g), compose(phi[x], h)
                    if y in phi:
                        if phi[y] != fy:
                            ok = False
                            break
                    else:
                        phi[y] = fy
                        new.append(y)
                if not ok:
                    break
            frontier = new
        if ok and len(set(phi.values())) == len(a):
            return True
    return False


def determinantal_invariants(rows, ncols: int) -> tuple[tuple[int, ...], int]:
    """Invariant factors and free rank of Z^ncols / rowspace via gcds of minors.

    d_k = gcd of all k-by-k minors; the invariant factors are d_k / d_{k-1}.
    """
    import sympy

    if not rows:
        return (), ncols
    m = sympy.Matrix(rows)
    rank = m.rank()
    divisors = [1]
    for k in range(1, rank + 1):
        g = 0
        for r in itertools.combinations(range(m.rows), k):
            for c in itertools.combinations(range(m.cols), k):
                g = gcd(g, int(m.extract(list(r), list(c)).det()))
        divisors.append(abs(g))
    factors = [divisors[k] // divisors[k - 1] for k in range(1, rank + 1)]
    return tuple(f for f in factors if f > 1), ncols - rank


def hom_count_brute(relators, ngens: int, elements) -> int:
    """Count generator assignments satisfying every relator by full enumeration."""
    elements = list(elements)
    count = 0
    for tup in itertools.product(elements, repeat=ngens):
        ok = True
        for rel in relators:
            acc = tuple(range(len(elements[0])))
            for letter in rel:
                x = tup[abs(letter) - 1]
                acc = compose(acc, x if letter > 0 else invert(x))
            if acc != tuple(range(len(elements[0]))):
                ok = False
                break
        count += ok
    return count


def rh_genus(order: int, base: int, sig) -> int:
    total = order * (2 * base - 2) + sum(order - order // e for e in sig)
    return total // 2 + 1


def lcm_all(xs) -> int:
    return reduce(lambda a, b: a * b // gcd(a, b), xs, 1)


def nontrivial_cycle_rank(graph) -> int:
    """First Betti number of the subgraph of edges with non-trivial groups."""
    vertices = [v.id for v in graph.vertices]
    edges = [(e.origin, e.terminal) for e in graph.edges if e.group.order > 1]
    adj = {v: [] for v in vertices}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    components = 0
    seen = set()
    for v in vertices:
        if v in seen:
            continue
        components += 1
        stack = [v]
        seen.add(v)
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
    return len(edges) - len(vertices) + components
