"""The mirror group G-hat and mirror-invariant Fermat motives.

An element is stored as k = (k_1..k_5) with k_i in Z/m_i, acting by
Y_i -> zeta_{m_i}^{k_i} Y_i.  The condition prod g_i = 1 on the monomial
Y_1...Y_5 becomes sum q_i k_i = 0 mod m, and the diagonal (1,1,1,1,1) is
quotiented out.  A character a in A(Q) pairs with k through
sum k_i a_i mod m, which is well defined on the quotient.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .arith import prime_factors
from .motives import MotiveOrbit, motive_orbits
from .weights import AdmissiblePair


@dataclass(frozen=True)
class MirrorGroup:
    pair: AdmissiblePair
    elements: np.ndarray = field(repr=False, compare=False)

    @property
    def m(self):
        return self.pair.m

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def phases(self) -> np.ndarray:
        """Exponents e_i = q_i k_i mod m, i.e. g_i = exp(2 pi i e_i / m)."""
        return (self.elements * np.array(self.pair.Q)) % self.m

    def canonical(self, k) -> tuple:
        return canonical_element(self.pair, k)

    def contains(self, k) -> bool:
        return is_member(self.pair, k)

    def structure(self) -> list[int]:
        """Invariant factors d_1 | d_2 | ... of the group."""
        return invariant_factors(self)


def is_member(p: AdmissiblePair, k) -> bool:
    return sum(q * x for q, x in zip(p.Q, k)) % p.m == 0


def _canon_array(p: AdmissiblePair, K: np.ndarray) -> np.ndarray:
    """Lexicographically smallest member of each diagonal coset (rows of K).

    A shift by t(1,...,1) reaches k_1 = 0 exactly for t = -k_1 + s m_1,
    s = 0..q_1-1, so the minimum is taken over those q_1 candidates.
    """
    mi = np.array(p.mi, dtype=np.int64)
    K = np.asarray(K, dtype=np.int64) % mi
    base = (-K[:, :1]) % mi[0]
    best = None
    for s in range(p.Q[0]):
        cand = (K + base + s * mi[0]) % mi
        if best is None:
            best = cand
            continue
        less = np.zeros(len(K), dtype=bool)
        decided = np.zeros(len(K), dtype=bool)
        for i in range(1, 5):
            lt = (cand[:, i] < best[:, i]) & ~decided
            gt = (cand[:, i] > best[:, i]) & ~decided
            less |= lt
            decided |= lt | gt
        best[less] = cand[less]
    return best


def canonical_element(p: AdmissiblePair, k) -> tuple:
    return tuple(int(x) for x in _canon_array(p, np.array([k], dtype=np.int64))[0])


@lru_cache(maxsize=None)
def _build(p: AdmissiblePair) -> MirrorGroup:
    mi = p.mi
    # every coset has members with k_1 = 0
    grids = np.meshgrid(*[np.arange(x, dtype=np.int64) for x in mi[1:4]], indexing="ij")
    cols = [np.zeros(grids[0].size, dtype=np.int64)] + [g.ravel() for g in grids]
    s = sum(q * c for q, c in zip(p.Q[:4], cols)) % p.m
    need = (-s) % p.m
    ok = need % p.Q[4] == 0
    K = np.stack(cols + [(need // p.Q[4]) % mi[4]], axis=1)[ok]
    canon = np.unique(_canon_array(p, K), axis=0)
    expected, rem = divmod(p.m**3, int(np.prod(p.Q)))
    if rem or len(canon) != expected:
        raise ArithmeticError(f"{p}: |G-hat| = {len(canon)}, expected m^3/prod q = {expected}")
    canon.setflags(write=False)
    return MirrorGroup(p, canon)


def build_ghat(p: AdmissiblePair) -> MirrorGroup:
    return _build(p)


def gq_order(p: AdmissiblePair) -> int:
    return int(np.prod(p.Q))


def invariant_factors(G: MirrorGroup) -> list[int]:
    p = G.pair
    zero = canonical_element(p, (0,) * 5)
    factors: dict = {}
    for ell in prime_factors(G.order):
        # n_j = #{x : ell^j x = 0}; the partition of exponents follows
        counts = [1]
        j = 1
        while counts[-1] < _ell_part(G.order, ell):
            mult = (G.elements * ell**j)
            canon = _canon_array(p, mult)
            n = int((canon == np.array(zero)).all(axis=1).sum())
            counts.append(n)
            j += 1
        # number of cyclic factors of order >= ell^j is log(n_j / n_{j-1})
        ranks = [_log(counts[i] // counts[i - 1], ell) for i in range(1, len(counts))]
        for i, r in enumerate(ranks):
            nxt = ranks[i + 1] if i + 1 < len(ranks) else 0
            for _ in range(r - nxt):
                factors.setdefault(ell, []).append(ell ** (i + 1))
    # combine prime-power parts into invariant factors
    width = max((len(v) for v in factors.values()), default=0)
    out = [1] * width
    for ell, powers in factors.items():
        powers = sorted(powers, reverse=True)
        for i, pw in enumerate(powers):
            out[width - 1 - i] *= pw
    return out


def _ell_part(n, ell):
    r = 1
    while n % ell == 0:
        n //= ell
        r *= ell
    return r


def _log(n, ell):
    e = 0
    while n > 1:
        n //= ell
        e += 1
    return e


def pairing(a, k, m) -> int:
    return sum(x * y for x, y in zip(a, k)) % m


def is_invariant(a, G: MirrorGroup) -> bool:
    a = np.array(a, dtype=np.int64)
    return bool(((G.elements @ a) % G.m == 0).all())


def orbit_is_invariant(orbit: MotiveOrbit, G: MirrorGroup) -> bool:
    A = np.array(orbit.members, dtype=np.int64)
    return bool(((G.elements @ A.T) % G.m == 0).all())


def invariant_motives(p: AdmissiblePair) -> list[MotiveOrbit]:
    G = build_ghat(p)
    return [o for o in motive_orbits(p) if orbit_is_invariant(o, G)]


def invariant_B3(p: AdmissiblePair) -> int:
    return sum(o.dim for o in invariant_motives(p))


def generated_subgroup(p: AdmissiblePair, gens) -> set:
    """Canonical elements of the subgroup generated by gens (BFS closure)."""
    mi = p.mi
    start = canonical_element(p, (0,) * 5)
    seen = {start}
    frontier = [start]
    gens = [tuple(g) for g in gens]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = canonical_element(p, tuple((a + b) % n for a, b, n in zip(x, g, mi)))
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def all_members(p: AdmissiblePair):
    """Every representative (no quotient), for small oracles."""
    for k in itertools.product(*[range(x) for x in p.mi]):
        if is_member(p, k):
            yield k
