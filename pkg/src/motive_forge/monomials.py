"""Monomial bases, G-hat invariant monomials, monomial classes and the
monomial-motive correspondence at the Fermat point.

Exponent vectors live in prod Z/m_i.  The class universe is every residue
vector v with sum q_i v_i = 0 mod m; a member v is tied to the character
a = (q_1 v_1, ..., q_5 v_5) mod m whenever all a_i are nonzero.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .mirror import build_ghat
from .motives import MotiveRow, block_permutations, canonical_label, motive_table
from .weights import AdmissiblePair

# Representatives used by the published monomial tables; classes without an
# entry fall back to their lexicographic minimum.
TABLE_REPRESENTATIVES = {
    (5, (1, 1, 1, 1, 1)): [
        (0, 0, 0, 0, 0), (4, 1, 0, 0, 0), (3, 2, 0, 0, 0),
        (3, 1, 1, 0, 0), (2, 2, 1, 0, 0), (4, 0, 3, 2, 1),
    ],
    (8, (1, 1, 2, 2, 2)): [
        (0, 0, 0, 0, 0), (0, 2, 1, 1, 1), (6, 2, 0, 0, 0), (0, 0, 0, 2, 2),
        (2, 0, 1, 3, 3), (4, 0, 2, 0, 0), (0, 0, 2, 1, 1), (2, 2, 1, 1, 0),
        (0, 4, 0, 3, 3), (4, 0, 1, 1, 0), (2, 0, 3, 0, 0), (6, 0, 1, 0, 0),
        (0, 0, 3, 1, 0), (2, 0, 2, 1, 0), (4, 0, 3, 2, 1),
    ],
}


class ConifoldOnly:
    """Marker: no member of the class gives a character in A(Q)."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "ConifoldOnly"


CONIFOLD_ONLY = ConifoldOnly()


def degree(p: AdmissiblePair, v) -> int:
    return sum(q * x for q, x in zip(p.Q, v))


def monomial_basis(p: AdmissiblePair, k: int) -> list[tuple]:
    """Monomials of degree k*m with 0 <= v_i <= m_i - 2."""
    caps = [mi - 2 for mi in p.mi]
    target = k * p.m
    out = []

    def rec(i, rest, cur):
        if i == 4:
            if rest % p.Q[4] == 0 and 0 <= rest // p.Q[4] <= caps[4]:
                out.append(tuple(cur + [rest // p.Q[4]]))
            return
        for x in range(min(caps[i], rest // p.Q[i]) + 1):
            rec(i + 1, rest - p.Q[i] * x, cur + [x])

    rec(0, target, [])
    return out


def degree_m_monomials(p: AdmissiblePair) -> list[tuple]:
    """All v >= 0 with sum q_i v_i = m (no cap)."""
    out = []

    def rec(i, rest, cur):
        if i == 4:
            if rest % p.Q[4] == 0:
                out.append(tuple(cur + [rest // p.Q[4]]))
            return
        for x in range(rest // p.Q[i] + 1):
            rec(i + 1, rest - p.Q[i] * x, cur + [x])

    rec(0, p.m, [])
    return out


def invariant_monomials(p: AdmissiblePair, G=None) -> list[tuple]:
    """Degree-m monomials fixed by every element of G-hat."""
    G = G or build_ghat(p)
    V = np.array(degree_m_monomials(p), dtype=np.int64)
    A = V * np.array(p.Q)
    ok = ((G.elements @ A.T) % p.m == 0).all(axis=0)
    return [tuple(int(x) for x in row) for row in V[ok]]


def orbit_generators(p: AdmissiblePair) -> list[tuple]:
    """Invariant monomials other than pure powers x_i^{m_i}."""
    return [v for v in invariant_monomials(p) if sum(1 for x in v if x) > 1]


def residue_universe(p: AdmissiblePair) -> list[tuple]:
    mi = p.mi
    return [v for v in itertools.product(*[range(x) for x in mi])
            if degree(p, v) % p.m == 0]


def character_of(p: AdmissiblePair, v):
    """a = q.v mod m, or None when some coordinate vanishes."""
    a = tuple(q * x % p.m for q, x in zip(p.Q, v))
    return None if 0 in a else a


@dataclass
class MonomialClass:
    pair: AdmissiblePair
    representative: tuple
    orbits: list = field(repr=False)  # translation orbits merged by permutations

    @property
    def mult(self) -> int:
        """lambda_v: number of translation orbits merged into the class."""
        return len(self.orbits)

    @property
    def members(self) -> list:
        """Translation orbit of the representative."""
        for o in self.orbits:
            if self.representative in o:
                return sorted(o)
        raise AssertionError("representative not in its class")

    @property
    def orbit_size(self) -> int:
        return len(self.orbits[0])

    @property
    def orbit_length(self) -> int:
        """Distinct permutation-normal forms along one orbit."""
        blocks = self.pair.weight_blocks()
        return len({_perm_normal(v, blocks) for v in self.members})

    @property
    def characters(self) -> list:
        """Characters reached by the representative's orbit (one orbit's worth)."""
        return sorted(a for a in (character_of(self.pair, v) for v in self.members) if a)

    @property
    def all_characters(self) -> list:
        out = []
        for o in self.orbits:
            out.extend(a for a in (character_of(self.pair, v) for v in o) if a)
        return sorted(out)

    @property
    def degree_R(self) -> int:
        """Degree of the per-orbit factor R([v], t)."""
        return len(self.characters)

    @property
    def conifold_only(self) -> bool:
        return not self.characters

    @property
    def weighted_degree(self) -> int:
        return degree(self.pair, self.representative)


def _perm_normal(v, blocks):
    out = []
    for b in blocks:
        out.extend(sorted(v[i] for i in b))
    return tuple(out)


def _translation_orbits(p: AdmissiblePair):
    mi = p.mi
    gens = orbit_generators(p)
    universe = residue_universe(p)
    seen = set()
    orbits = []
    for v in universe:
        if v in seen:
            continue
        orb = {v}
        frontier = [v]
        while frontier:
            nxt = []
            for x in frontier:
                for w in gens:
                    y = tuple((a + b) % n for a, b, n in zip(x, w, mi))
                    if y not in orb:
                        orb.add(y)
                        nxt.append(y)
            frontier = nxt
        seen |= orb
        orbits.append(frozenset(orb))
    return orbits


@lru_cache(maxsize=None)
def _classify(p: AdmissiblePair) -> tuple:
    orbits = _translation_orbits(p)
    where = {v: i for i, o in enumerate(orbits) for v in o}
    perms = block_permutations(p.weight_blocks())
    parent = list(range(len(orbits)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, o in enumerate(orbits):
        v = next(iter(o))
        for s in perms:
            j = where[tuple(v[s[k]] for k in range(5))]
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    groups: dict = {}
    for i in range(len(orbits)):
        groups.setdefault(find(i), []).append(orbits[i])
    fixtures = TABLE_REPRESENTATIVES.get((p.m, p.Q), [])
    out = []
    for orbs in groups.values():
        members = set().union(*orbs)
        rep = next((f for f in fixtures if f in members), None)
        if rep is None:
            rep = min(members)
        out.append(MonomialClass(p, rep, sorted(orbs, key=min)))
    order = {f: i for i, f in enumerate(fixtures)}
    out.sort(key=lambda c: (order.get(c.representative, len(order)), c.representative))
    return tuple(out)


def classify(p: AdmissiblePair) -> list[MonomialClass]:
    return list(_classify(p))


def class_of(p: AdmissiblePair, v) -> MonomialClass:
    v = tuple(x % n for x, n in zip(v, p.mi))
    for c in _classify(p):
        if any(v in o for o in c.orbits):
            return c
    raise KeyError(f"{v} is not in the residue universe of {p}")


def monomial_to_motive(c: MonomialClass):
    """Motive rows reached by the class, or CONIFOLD_ONLY.

    Returns a list because a class can meet several motives (the constant
    class meets every mirror-invariant motive).
    """
    chars = c.all_characters
    if not chars:
        return CONIFOLD_ONLY
    p = c.pair
    labels = sorted({canonical_label(a, p) for a in chars})
    rows = {r.label: r for r in motive_table(p)}
    return [rows[lab] for lab in labels]


def motive_to_monomial(p: AdmissiblePair, a) -> list[MonomialClass]:
    """Classes met by the motive of a: v_i = a_i / q_i over all members."""
    from .motives import find_row

    row = find_row(p, a)
    seen = []
    for orb in row.orbits:
        for b in orb.members:
            v = tuple(x // q for x, q in zip(b, p.Q))
            c = class_of(p, v)
            if c not in seen:
                seen.append(c)
    return seen


@dataclass
class CorrespondenceBlock:
    """Connected component of the class/motive incidence relation."""

    classes: list
    motives: list  # MotiveRow

    @property
    def degree_R(self) -> int:
        return sum(c.degree_R for c in self.classes)


def correspondence(p: AdmissiblePair) -> list[CorrespondenceBlock]:
    classes = classify(p)
    blocks: list[CorrespondenceBlock] = []
    for c in classes:
        mot = monomial_to_motive(c)
        labels = set() if mot is CONIFOLD_ONLY else {r.label for r in mot}
        hit = [b for b in blocks if labels & {r.label for r in b.motives}]
        merged = CorrespondenceBlock([c], [] if mot is CONIFOLD_ONLY else list(mot))
        for b in hit:
            blocks.remove(b)
            merged.classes = b.classes + merged.classes
            for r in b.motives:
                if r.label not in {x.label for x in merged.motives}:
                    merged.motives.append(r)
        blocks.append(merged)
    order = {id(c): i for i, c in enumerate(classes)}
    for b in blocks:
        b.classes.sort(key=lambda c: order[id(c)])
    blocks.sort(key=lambda b: order[id(b.classes[0])])
    return blocks


def invariant_character_classes(p: AdmissiblePair) -> list[MonomialClass]:
    """Classes met by the mirror-invariant motives."""
    from .mirror import invariant_motives

    out = []
    for o in invariant_motives(p):
        for c in motive_to_monomial(p, o.representative):
            if c not in out:
                out.append(c)
    return out


__all__ = [
    "CONIFOLD_ONLY", "ConifoldOnly", "MonomialClass", "MotiveRow", "TABLE_REPRESENTATIVES",
    "character_of", "class_of", "classify", "correspondence", "degree", "invariant_monomials",
    "monomial_basis", "monomial_to_motive", "motive_to_monomial", "orbit_generators",
]
