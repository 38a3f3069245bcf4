"""Admissible pairs <m, Q>, singular strata and Vafa's formula."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce

# The source tables print the largest pair with degree 1807; the arithmetic
# forces 1806.  Surfaced in CLI output and the acceptance report.
LARGEST_PAIR_NOTE = (
    "largest pair Q=(1,42,258,602,903) has m = sum(Q) = 1806; "
    "a printed degree of 1807 violates conditions (2) and (3)"
)


class InadmissibleError(ValueError):
    def __init__(self, m, Q, condition, detail):
        self.condition = condition
        super().__init__(f"<{m},{tuple(Q)}> violates condition ({condition}): {detail}")


@dataclass(frozen=True, order=True)
class AdmissiblePair:
    m: int
    Q: tuple

    def __post_init__(self):
        object.__setattr__(self, "Q", tuple(sorted(int(q) for q in self.Q)))
        check_admissible(self.m, self.Q)

    @property
    def mi(self) -> tuple:
        return tuple(self.m // q for q in self.Q)

    def weight_blocks(self) -> list[list[int]]:
        """Index blocks of equal weight (Q is sorted, so blocks are contiguous)."""
        blocks: list[list[int]] = []
        for i, q in enumerate(self.Q):
            if blocks and self.Q[blocks[-1][0]] == q:
                blocks[-1].append(i)
            else:
                blocks.append([i])
        return blocks

    def __str__(self):
        return f"<{self.m},({','.join(map(str, self.Q))})>"


def violated_condition(m, Q):
    """Return (condition number, message) for the first failing condition, or None."""
    Q = tuple(Q)
    if len(Q) != 5 or any(int(q) != q or q < 1 for q in Q) or m < 1:
        return (0, "need a positive degree and five positive integer weights")
    for sub in itertools.combinations(Q, 4):
        if reduce(math.gcd, sub) != 1:
            return (1, f"gcd{sub} = {reduce(math.gcd, sub)} != 1")
    for q in Q:
        if m % q:
            return (2, f"q={q} does not divide m={m}")
    if sum(Q) != m:
        return (3, f"sum(Q) = {sum(Q)} != m = {m}")
    return None


def is_admissible(m, Q) -> bool:
    return violated_condition(m, Q) is None


def check_admissible(m, Q):
    bad = violated_condition(m, Q)
    if bad is not None:
        raise InadmissibleError(m, Q, *bad)


def _unit_fraction_tuples(n, remaining, lo):
    """Nondecreasing n-tuples >= lo of integers >= 2 with sum 1/x = remaining."""
    if n == 1:
        if remaining.numerator == 1 and remaining.denominator >= lo:
            yield (remaining.denominator,)
        return
    # x >= 1/remaining (strictly for n>1) and x <= n/remaining
    start = max(lo, math.floor(1 / remaining) + 1)
    stop = math.floor(n / remaining)
    for x in range(start, stop + 1):
        rest = remaining - Fraction(1, x)
        if rest <= 0:
            continue
        for tail in _unit_fraction_tuples(n - 1, rest, x):
            yield (x,) + tail


@lru_cache(maxsize=1)
def _enumerate():
    seen = set()
    for ms in _unit_fraction_tuples(5, Fraction(1), 2):
        m = reduce(math.lcm, ms)
        Q = tuple(sorted(m // x for x in ms))
        if is_admissible(m, Q):
            seen.add((m, Q))
    return tuple(AdmissiblePair(m, Q) for m, Q in sorted(seen))


def enumerate_admissible() -> list[AdmissiblePair]:
    return list(_enumerate())


def pair(m, *Q) -> AdmissiblePair:
    if len(Q) == 1:
        Q = tuple(Q[0])
    return AdmissiblePair(m, tuple(Q))


# ---------------------------------------------------------------------------
# strata


@dataclass(frozen=True)
class SingularStratum:
    S: tuple  # 0-based indices j with m_j | l
    I: tuple
    c_I: int
    kind: str  # "curve", "point" or "none"
    ells: tuple
    m_prime: int | None = None
    Q_prime: tuple | None = None
    genus: int | None = None
    m_C: int | None = None


def curve_genus(m_prime: int, Qp) -> int:
    """Coefficient of t^(m'-a-b-c) in (1 - t^m') / ((1-t^a)(1-t^b)(1-t^c))."""
    a, b, c = Qp
    target = m_prime - (a + b + c)
    if target < 0:
        return 0
    n = m_prime + 1
    series = [0] * n
    series[0] = 1
    for w in (a, b, c):
        for k in range(w, n):
            series[k] += series[k - w]
    num = [0] * n
    num[0] = 1
    if m_prime < n:
        num[m_prime] -= 1
    coeff = sum(num[i] * series[target - i] for i in range(target + 1))
    return coeff


def stratum_patterns(p: AdmissiblePair) -> dict:
    """Map S_l pattern (tuple of indices) -> list of l in 0..m-1."""
    out: dict = {}
    for ell in range(p.m):
        S = tuple(j for j, mj in enumerate(p.mi) if ell % mj == 0)
        out.setdefault(S, []).append(ell)
    return out


def singular_strata(p: AdmissiblePair) -> list[SingularStratum]:
    out = []
    for S, ells in sorted(stratum_patterns(p).items()):
        if len(S) == 5:
            continue
        if len(S) == 4:
            raise ArithmeticError(f"{p}: #S_l = 4 for l={ells[0]}")
        I = tuple(j for j in range(5) if j not in S)
        c = reduce(math.gcd, [p.Q[j] for j in S]) if S else 1
        if len(S) == 3 and c >= 2:
            mp = p.m // c
            Qp = tuple(p.Q[j] // c for j in S)
            out.append(SingularStratum(S, I, c, "curve", tuple(ells), mp, Qp,
                                       curve_genus(mp, Qp), c - 1))
        elif len(S) == 2 and c >= 2:
            out.append(SingularStratum(S, I, c, "point", tuple(ells)))
        else:
            out.append(SingularStratum(S, I, c, "none", tuple(ells)))
    return out


def curve_correction(p: AdmissiblePair) -> int:
    """sum over curve strata of m_C g(C)."""
    return sum(s.m_C * s.genus for s in singular_strata(p) if s.kind == "curve")


# ---------------------------------------------------------------------------
# Vafa


@dataclass
class ResolutionSummary:
    pair: AdmissiblePair
    beta: list = field(repr=False)
    B3_Y: int
    B3_X: int
    chi: int
    h11: int
    h21: int


def vafa_betas(p: AdmissiblePair) -> list[int]:
    """beta_l for l = 0..m-1, exact and asserted integral.

    The inner sum over r only depends on which m_i divide r, so r is grouped
    by that pattern; this keeps m = 1806 cheap.
    """
    patterns = stratum_patterns(p)
    factor = [1 - mi for mi in p.mi]
    beta_by_pattern = {}
    for S in patterns:
        total = Fraction(0)
        for R, rs in patterns.items():
            prod = 1
            for i in set(S) & set(R):
                prod *= factor[i]
            total += len(rs) * prod
        total /= p.m
        if total.denominator != 1:
            raise ArithmeticError(f"{p}: beta for pattern {S} is {total}, not integral")
        beta_by_pattern[S] = int(total)
    beta = [0] * p.m
    for S, ells in patterns.items():
        for ell in ells:
            beta[ell] = beta_by_pattern[S]
    return beta


def vafa_summary(p: AdmissiblePair) -> ResolutionSummary:
    beta = vafa_betas(p)
    patterns = stratum_patterns(p)
    sizes = {ell: len(S) for S, ells in patterns.items() for ell in ells}
    B3_Y = -beta[0]
    B3_X = B3_Y - sum(b for ell, b in enumerate(beta) if sizes[ell] == 3)
    chi = sum(beta)
    twice = sum(b for ell, b in enumerate(beta) if sizes[ell] < 3)
    if twice % 2:
        raise ArithmeticError(f"{p}: odd h11 numerator")
    h11 = -1 + twice // 2
    if (2 * h11 - chi) % 2:
        raise ArithmeticError(f"{p}: chi parity")
    h21 = h11 - chi // 2
    return ResolutionSummary(p, beta, B3_Y, B3_X, chi, h11, h21)
