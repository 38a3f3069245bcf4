"""Fermat motives of a weighted diagonal threefold: characters, orbits, Hodge data.

A character is a 5-tuple a in (Z/m)^5 with sum a_i = 0 mod m.  The set
A(Q) keeps those with every a_i nonzero and divisible by q_i.  A motive is an
orbit of A(Q) under multiplication by (Z/m)^*; motives related by permuting
coordinates of equal weight share a label, and the number of orbits sharing
a label is its multiplicity.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .arith import CyclotomicInteger, GroupRingElement, _power_basis_images, units_mod
from .weights import AdmissiblePair, curve_correction


def characters_AQ(p: AdmissiblePair) -> list[tuple]:
    """All a with a_i in q_i Z/m, a_i != 0, sum a_i = 0 mod m (sorted)."""
    m, Q = p.m, p.Q
    # enumerate the four shortest ranges, solve for the remaining coordinate
    order = sorted(range(5), key=lambda i: m // Q[i])
    free, last = order[:4], order[4]
    grids = np.meshgrid(*[np.arange(1, m // Q[i], dtype=np.int64) * Q[i] for i in free],
                        indexing="ij")
    cols = [g.ravel() for g in grids]
    rest = (-sum(cols)) % m
    ok = (rest != 0) & (rest % Q[last] == 0)
    full = np.zeros((int(ok.sum()), 5), dtype=np.int64)
    for i, c in zip(free, cols):
        full[:, i] = c[ok]
    full[:, last] = rest[ok]
    return sorted(tuple(int(x) for x in row) for row in full)


def norm(a, m) -> int:
    """||a|| = sum a_i / m - 1, representatives 0 < a_i < m."""
    s = sum(x % m for x in a)
    if s % m:
        raise ValueError(f"{a} is not a character (sum not divisible by {m})")
    return s // m - 1


def scalar_orbit(a, m) -> tuple:
    return tuple(sorted({tuple(t * x % m for x in a) for t in units_mod(m)}))


def permutation_key(a, blocks) -> tuple:
    """Sort a within each block of equal weight."""
    out = []
    for b in blocks:
        out.extend(sorted(a[i] for i in b))
    return tuple(out)


def canonical_label(a, p: AdmissiblePair) -> tuple:
    blocks = p.weight_blocks()
    return min(permutation_key(tuple(t * x % p.m for x in a), blocks)
               for t in units_mod(p.m))


def block_permutations(blocks) -> list[tuple]:
    """All index permutations that only move indices within weight blocks."""
    out = []
    for combo in itertools.product(*[itertools.permutations(b) for b in blocks]):
        perm = [0] * 5
        for b, image in zip(blocks, combo):
            for i, j in zip(b, image):
                perm[i] = j
        out.append(tuple(perm))
    return out


@dataclass
class MotiveOrbit:
    """One (Z/m)^*-orbit A inside A(Q)."""

    pair: AdmissiblePair
    representative: tuple
    members: tuple
    label: tuple
    mult: int = 1

    @property
    def dim(self) -> int:
        return len(self.members)

    @property
    def hodge(self) -> tuple:
        """(h30, h21, h12, h03): counts of ||a|| = 3, 2, 1, 0."""
        counts = [0, 0, 0, 0]
        for a in self.members:
            counts[3 - norm(a, self.pair.m)] += 1
        return tuple(counts)

    @property
    def h30(self):
        return self.hodge[0]

    @property
    def h21(self):
        return self.hodge[1]

    def contains(self, a) -> bool:
        return tuple(x % self.pair.m for x in a) in set(self.members)


@dataclass
class MotiveRow:
    """A label together with all scalar orbits sharing it (one table row)."""

    label: tuple
    orbits: list = field(repr=False)

    @property
    def mult(self):
        return len(self.orbits)

    @property
    def dim(self):
        return self.orbits[0].dim

    @property
    def h30(self):
        return self.orbits[0].h30

    @property
    def h21_per_orbit(self):
        return self.orbits[0].h21

    @property
    def h21_total(self):
        return sum(o.h21 for o in self.orbits)

    @property
    def B3_total(self):
        return sum(o.dim for o in self.orbits)


@lru_cache(maxsize=None)
def _orbits(p: AdmissiblePair) -> tuple:
    m = p.m
    chars = characters_AQ(p)
    seen = set()
    raw = []
    for a in chars:
        if a in seen:
            continue
        orb = scalar_orbit(a, m)
        seen.update(orb)
        raw.append(orb)
    out = []
    labels: dict = {}
    for orb in raw:
        lab = canonical_label(orb[0], p)
        labels.setdefault(lab, []).append(orb)
    for lab, orbs in labels.items():
        for orb in orbs:
            out.append(MotiveOrbit(p, orb[0], orb, lab, len(orbs)))
    out.sort(key=lambda o: (o.label, o.members))
    return tuple(out)


def motive_orbits(p: AdmissiblePair) -> list[MotiveOrbit]:
    """Every scalar orbit in A(Q), each carrying its label and multiplicity."""
    return list(_orbits(p))


def motive_table(p: AdmissiblePair) -> list[MotiveRow]:
    """One row per label; weight motive first, then by descending dimension and label."""
    rows: dict = {}
    for o in _orbits(p):
        rows.setdefault(o.label, []).append(o)
    out = [MotiveRow(lab, orbs) for lab, orbs in rows.items()]
    wlab = canonical_label(p.Q, p)
    out.sort(key=lambda r: (r.label != wlab, r.label))
    return out


def find_motive(p: AdmissiblePair, a) -> MotiveOrbit:
    """Scalar orbit containing a (a need not be canonical)."""
    a = tuple(x % p.m for x in a)
    for o in _orbits(p):
        if a in o.members:
            return o
    raise KeyError(f"{a} is not in A(Q) for {p}")


def find_row(p: AdmissiblePair, a) -> MotiveRow:
    lab = canonical_label(tuple(x % p.m for x in a), p)
    for r in motive_table(p):
        if r.label == lab:
            return r
    raise KeyError(f"no motive with label {lab} for {p}")


@dataclass
class Aggregate:
    h30: int
    h21_Y: int
    B3_Y: int
    h21_X: int
    B3_X: int

    def as_tuple(self):
        return (self.h30, self.h21_Y, self.B3_Y, self.h21_X, self.B3_X)


def aggregate(p: AdmissiblePair) -> Aggregate:
    orbs = _orbits(p)
    h30 = sum(o.h30 for o in orbs)
    h21 = sum(o.h21 for o in orbs)
    B3 = sum(o.dim for o in orbs)
    corr = curve_correction(p)
    return Aggregate(h30, h21, B3, h21 + corr, B3 + 2 * corr)


# ---------------------------------------------------------------------------
# projectors on the unweighted Fermat group

PROJECTOR_BUDGET = 6


def _group_elements(m):
    """(Z/m)^5 / diagonal, first coordinate normalised to 0."""
    return np.array([(0,) + t for t in itertools.product(range(m), repeat=4)], dtype=np.int64)


def unweighted_orbits(m) -> list[list[tuple]]:
    """(Z/m)^*-orbits of all a in (Z/m)^5 with sum 0 (the full character group)."""
    chars = [a for a in itertools.product(range(m), repeat=5) if sum(a) % m == 0]
    seen = set()
    out = []
    for a in chars:
        if a not in seen:
            orb = scalar_orbit(a, m)
            seen.update(orb)
            out.append(list(orb))
    return out


def projector_numerators_exact(m):
    """Integer numerators of every p_A (common denominator m^4).

    The coefficient of g in m^4 p_A is sum_{a in A} zeta^{-<a,g>}.  It is
    accumulated as power counts, reduced mod Phi_m, and asserted rational
    (orbits are Galois-stable).  Returns (group elements, N x #orbits
    matrix, orbit list).
    """
    G = _group_elements(m)
    orbits = unweighted_orbits(m)
    R = np.array(_power_basis_images(m), dtype=np.int64)  # m x phi
    N = len(G)
    cols = []
    for orb in orbits:
        A = np.array(orb, dtype=np.int64)
        E = (-(G @ A.T)) % m
        counts = np.zeros((N, m), dtype=np.int64)
        for j in range(E.shape[1]):
            counts[np.arange(N), E[:, j]] += 1
        red = counts @ R
        if red[:, 1:].any():
            raise ArithmeticError("projector coefficient is not rational")
        cols.append(red[:, 0])
    return G, np.stack(cols, axis=1), orbits


def character_projector(a, m) -> GroupRingElement:
    """p_a = (1/m^4) sum_g a(g)^{-1} g as an exact group-ring element."""
    coeffs = {}
    for g in GroupRingElement.group(m):
        k = -sum(x * y for x, y in zip(a, g))
        coeffs[g] = CyclotomicInteger.zeta_power(m, k)
    return GroupRingElement(m, coeffs, m**4)


def orbit_projector(orbit, m) -> GroupRingElement:
    out = character_projector(orbit[0], m)
    for a in orbit[1:]:
        out = out + character_projector(a, m)
    return out


def projector_check(m, budget: int = PROJECTOR_BUDGET) -> dict:
    """Verify p_A p_B = delta_AB p_A and sum_A p_A = 1 in Z[1/m][G]."""
    if m > budget:
        raise ValueError(f"m={m} exceeds projector budget {budget} (group order m^4)")
    t0 = time.perf_counter()
    G, C, orbits = projector_numerators_exact(m)
    N = len(G)
    D = m**4
    index = {tuple(g): i for i, g in enumerate(G.tolist())}
    # difference table: diff[h, g] = index of h - g
    diff = np.empty((N, N), dtype=np.int64)
    Gl = G.tolist()
    for hi, h in enumerate(Gl):
        for gi, g in enumerate(Gl):
            d = [(x - y) % m for x, y in zip(h, g)]
            d0 = d[0]
            diff[hi, gi] = index[tuple((x - d0) % m for x in d)]
    bound = int(np.abs(C).max()) ** 2 * N
    if bound >= 2**53:
        raise OverflowError("float64 exactness bound exceeded")
    Cf = C.astype(np.float64)
    idem = ortho = True
    worst = 0
    for a in range(C.shape[1]):
        circ = Cf[:, a][diff]  # circ[h, g] = c_A[h - g]
        prod = circ @ Cf  # column b: numerator of p_A p_B times m^4
        prod = np.rint(prod).astype(np.int64)
        target = np.zeros_like(prod)
        target[:, a] = D * C[:, a]
        bad = prod != target
        if bad.any():
            worst += int(bad.sum())
            if bad[:, a].any():
                idem = False
            if np.delete(bad, a, axis=1).any():
                ortho = False
    total = C.sum(axis=1)
    ident = np.zeros(N, dtype=np.int64)
    ident[index[(0,) * 5]] = D
    resolves = bool((total == ident).all())
    denominators_ok = True  # numerators are integers over m^4 by construction
    return {
        "m": m,
        "group_order": N,
        "orbits": len(orbits),
        "idempotent": idem,
        "orthogonal": ortho,
        "sum_is_identity": resolves,
        "denominators_divide_m4": denominators_ok,
        "mismatches": worst,
        "seconds": round(time.perf_counter() - t0, 3),
        "ok": idem and ortho and resolves,
    }
